#pragma once

#include "modnet/mobius.hpp"

#include <string>
#include <utility>

namespace modnet {

// Open interval of the extended line with lo < hi; lo may be -inf, hi may be +inf.
struct Span {
    double lo = -kInf;
    double hi = kInf;

    bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
    bool lower_ray() const { return lo == -kInf && std::isfinite(hi); }
    bool upper_ray() const { return std::isfinite(lo) && hi == kInf; }
    bool contains(const Span& o) const { return lo <= o.lo && o.hi <= hi; }
    bool contains(double x) const { return lo < x && x < hi; }
    bool operator==(const Span&) const = default;
};

inline bool near(const Span& a, const Span& b, double tol) {
    auto close = [tol](double x, double y) {
        if (std::isinf(x) || std::isinf(y)) return x == y;
        return std::abs(x - y) <= tol * std::max(1.0, std::abs(x));
    };
    return close(a.lo, b.lo) && close(a.hi, b.hi);
}

enum class RegionKind { DoubleCone, WedgeRight, WedgeLeft, LightconeFwd, LightconeBwd, HalfBandR, HalfBandL };

inline std::string to_string(RegionKind k) {
    switch (k) {
        case RegionKind::DoubleCone: return "DoubleCone";
        case RegionKind::WedgeRight: return "WedgeRight";
        case RegionKind::WedgeLeft: return "WedgeLeft";
        case RegionKind::LightconeFwd: return "LightconeFwd";
        case RegionKind::LightconeBwd: return "LightconeBwd";
        case RegionKind::HalfBandR: return "HalfBandR";
        case RegionKind::HalfBandL: return "HalfBandL";
    }
    return "?";
}

inline RegionKind region_kind_from_string(const std::string& s) {
    for (RegionKind k : {RegionKind::DoubleCone, RegionKind::WedgeRight, RegionKind::WedgeLeft, RegionKind::LightconeFwd,
                         RegionKind::LightconeBwd, RegionKind::HalfBandR, RegionKind::HalfBandL})
        if (to_string(k) == s) return k;
    throw InvalidArgument("unknown region kind '" + s + "'");
}

inline RegionKind infer_kind(const Span& l, const Span& r) {
    if (!(l.lo < l.hi) || !(r.lo < r.hi)) throw InvalidArgument("region intervals must satisfy lo < hi");
    const bool lb = l.bounded(), rb = r.bounded();
    if (lb && rb) return RegionKind::DoubleCone;
    if (l.lower_ray() && r.upper_ray()) return RegionKind::WedgeRight;
    if (l.upper_ray() && r.lower_ray()) return RegionKind::WedgeLeft;
    if (l.upper_ray() && r.upper_ray()) return RegionKind::LightconeFwd;
    if (l.lower_ray() && r.lower_ray()) return RegionKind::LightconeBwd;
    if (lb && (r.lower_ray() || r.upper_ray())) return RegionKind::HalfBandR;
    if (rb && (l.lower_ray() || l.upper_ray())) return RegionKind::HalfBandL;
    throw InvalidArgument("interval shapes outside the region catalogue");
}

// Product of lightray intervals, a_L = (a0 - a1)/sqrt2, a_R = (a0 + a1)/sqrt2.
struct Region {
    Span left;
    Span right;
    RegionKind kind = RegionKind::DoubleCone;

    static Region make(Span l, Span r) { return {l, r, infer_kind(l, r)}; }

    static Region make(Span l, Span r, RegionKind expected) {
        Region g = make(l, r);
        if (g.kind != expected)
            throw InvalidArgument("region kind " + to_string(expected) + " inconsistent with intervals (" + to_string(g.kind) + ")");
        return g;
    }

    bool is_wedge() const { return kind == RegionKind::WedgeRight || kind == RegionKind::WedgeLeft; }

    // Corner of a wedge (the translation carrying the standard wedge onto it).
    std::pair<double, double> apex() const {
        if (kind == RegionKind::WedgeRight) return {left.hi, right.lo};
        if (kind == RegionKind::WedgeLeft) return {left.lo, right.hi};
        if (kind == RegionKind::LightconeFwd) return {left.lo, right.lo};
        if (kind == RegionKind::LightconeBwd) return {left.hi, right.hi};
        throw InvalidArgument("apex defined for wedges and lightcones only");
    }
};

inline bool operator==(const Region& a, const Region& b) { return a.left == b.left && a.right == b.right && a.kind == b.kind; }

inline bool near(const Region& a, const Region& b, double tol = 1e-12) {
    return a.kind == b.kind && near(a.left, b.left, tol) && near(a.right, b.right, tol);
}

namespace regions {
inline Region wedge_right(double xl = 0, double xr = 0) { return Region::make({-kInf, xl}, {xr, kInf}); }
inline Region wedge_left(double xl = 0, double xr = 0) { return Region::make({xl, kInf}, {-kInf, xr}); }
inline Region forward_cone(double xl = 0, double xr = 0) { return Region::make({xl, kInf}, {xr, kInf}); }
inline Region backward_cone(double xl = 0, double xr = 0) { return Region::make({-kInf, xl}, {-kInf, xr}); }
inline Region double_cone(double a, double b, double c, double d) { return Region::make({a, b}, {c, d}); }
inline Region d0() { return double_cone(0, 1, 0, 1); }
inline Region band_right() { return Region::make({0, 1}, {0, kInf}); }
inline Region band_left() { return Region::make({0, kInf}, {0, 1}); }
}  // namespace regions

inline bool contains(const Region& outer, const Region& inner) {
    return outer.left.contains(inner.left) && outer.right.contains(inner.right);
}

inline bool contains_point(const Region& r, double al, double ar) { return r.left.contains(al) && r.right.contains(ar); }

// Every point of a is spacelike to every point of b.
inline bool spacelike(const Region& a, const Region& b) {
    const bool one = a.left.lo >= b.left.hi && a.right.hi <= b.right.lo;
    const bool two = a.left.hi <= b.left.lo && a.right.lo >= b.right.hi;
    return one || two;
}

inline bool point_spacelike(double xl, double xr, double yl, double yr) { return (xl - yl) * (xr - yr) < 0; }

// The two wedges making up the causal complement of a double cone.
inline std::pair<Region, Region> causal_complement(const Region& o) {
    if (o.kind != RegionKind::DoubleCone) throw InvalidArgument("causal complement is two wedges only for double cones");
    return {regions::wedge_left(o.left.hi, o.right.lo), regions::wedge_right(o.left.lo, o.right.hi)};
}

// ---- Poincare-dilation group and reflections -------------------------------------------

// x -> sigma e^{s} x + t on each lightray coordinate; sigma = -1 composes with j.
struct PDElement {
    double sl = 0, sr = 0, tl = 0, tr = 0;
    bool reflect = false;

    static PDElement identity() { return {}; }
    static PDElement translation(double al, double ar) { return {0, 0, al, ar, false}; }
    static PDElement dilation(double s) { return {s, s, 0, 0, false}; }
    static PDElement boost_right(double t) { return {t, -t, 0, 0, false}; }  // Lambda_{W_R}(t) = delta(t) x delta(-t)
    static PDElement j() { return {0, 0, 0, 0, true}; }

    double sigma() const { return reflect ? -1.0 : 1.0; }
    double act_left(double x) const { return sigma() * std::exp(sl) * x + tl; }
    double act_right(double x) const { return sigma() * std::exp(sr) * x + tr; }

    PDElement operator*(const PDElement& h) const {
        return {sl + h.sl, sr + h.sr, sigma() * std::exp(sl) * h.tl + tl, sigma() * std::exp(sr) * h.tr + tr,
                reflect != h.reflect};
    }

    PDElement inverse() const {
        const double s = sigma();
        return {-sl, -sr, -s * std::exp(-sl) * tl, -s * std::exp(-sr) * tr, reflect};
    }
};

namespace detail {
inline Span map_span(const Span& s, double sig, double scale, double shift) {
    auto f = [&](double x) { return sig * scale * x + shift; };
    return sig > 0 ? Span{f(s.lo), f(s.hi)} : Span{f(s.hi), f(s.lo)};
}
}  // namespace detail

inline Region act(const PDElement& g, const Region& r) {
    return Region::make(detail::map_span(r.left, g.sigma(), std::exp(g.sl), g.tl),
                        detail::map_span(r.right, g.sigma(), std::exp(g.sr), g.tr));
}

inline Region translate(const Region& r, double al, double ar) { return act(PDElement::translation(al, ar), r); }

enum class ReflectAbout { origin_j, wedge_jW };

inline Region reflect(const Region& r) { return act(PDElement::j(), r); }

// j_W = g j g^{-1} with g the translation to the wedge corner.
inline PDElement wedge_reflection(const Region& w) {
    if (!w.is_wedge()) throw InvalidArgument("reflection j_W needs a wedge");
    const auto [xl, xr] = w.apex();
    return {0, 0, 2 * xl, 2 * xr, true};
}

inline Region reflect(const Region& r, const Region& w) { return act(wedge_reflection(w), r); }

// ---- Einstein cylinder --------------------------------------------------------------------

// Lifted angle intervals on R^2 (before the identification (a, b) ~ (a - 2pi, b + 2pi)) together
// with the centre of the Minkowski copy they are referred to.
struct CylinderRegion {
    Span left;
    Span right;
    double center_l = 0;
    double center_r = 0;
};

// Centre moved into [-pi, pi) jointly with the region, then the region alone moved by the lattice
// vector bringing it closest to that centre (same cylinder subset either way).
inline CylinderRegion canonical(CylinderRegion c) {
    auto shift = [](CylinderRegion& r, double sh) {
        r.left = {r.left.lo - sh, r.left.hi - sh};
        r.right = {r.right.lo + sh, r.right.hi + sh};
    };
    const double k = std::floor((c.center_l + kPi) / kTwoPi);
    shift(c, kTwoPi * k);
    c.center_l -= kTwoPi * k;
    c.center_r += kTwoPi * k;
    const double ml = 0.5 * (c.left.lo + c.left.hi) - c.center_l;
    const double mr = 0.5 * (c.right.lo + c.right.hi) - c.center_r;
    const double j = std::round((ml - mr) / (2.0 * kTwoPi));
    shift(c, kTwoPi * j);
    return c;
}

inline double angle_of(double x) {
    if (x == kInf) return kPi;
    if (x == -kInf) return -kPi;
    return 2.0 * std::atan(x);
}

inline CylinderRegion on_cylinder(const Region& r, double cl = 0, double cr = 0) {
    return canonical({{cl + angle_of(r.left.lo), cl + angle_of(r.left.hi)},
                      {cr + angle_of(r.right.lo), cr + angle_of(r.right.hi)}, cl, cr});
}

inline bool fits_copy(const Span& s, double c, double tol = 1e-12) { return s.lo >= c - kPi - tol && s.hi <= c + kPi + tol; }

namespace detail {
inline double copy_coordinate(double alpha, double c) {
    const double d = alpha - c;
    if (d >= kPi - 1e-13) return kInf;
    if (d <= -kPi + 1e-13) return -kInf;
    return std::tan(0.5 * d);
}
}  // namespace detail

// Minkowski coordinates of a cylinder region within its reference copy.
inline Region region_in_copy(const CylinderRegion& c) {
    if (!fits_copy(c.left, c.center_l) || !fits_copy(c.right, c.center_r))
        throw InvalidArgument("region leaves its Minkowski copy");
    return Region::make({detail::copy_coordinate(c.left.lo, c.center_l), detail::copy_coordinate(c.left.hi, c.center_l)},
                        {detail::copy_coordinate(c.right.lo, c.center_r), detail::copy_coordinate(c.right.hi, c.center_r)});
}

// Same cylinder subset, referred to the copy centred at (nl, nr).
inline CylinderRegion copy_view(const CylinderRegion& c, double nl, double nr) {
    for (int k = -3; k <= 3; ++k) {
        const double sh = kTwoPi * k;
        CylinderRegion t{{c.left.lo - sh, c.left.hi - sh}, {c.right.lo + sh, c.right.hi + sh}, nl, nr};
        if (fits_copy(t.left, nl) && fits_copy(t.right, nr)) return t;
    }
    throw InvalidArgument("region does not fit inside the copy centred at (" + std::to_string(nl) + ", " +
                          std::to_string(nr) + ")");
}

inline bool near(const CylinderRegion& a, const CylinderRegion& b, double tol = 1e-10) {
    const CylinderRegion x = canonical(a), y = canonical(b);
    return near(x.left, y.left, tol) && near(x.right, y.right, tol) && std::abs(x.center_l - y.center_l) < tol &&
           std::abs(x.center_r - y.center_r) < tol;
}

inline CylinderRegion g_act(const GElement& g, const CylinderRegion& c) {
    CylinderRegion r = c;
    r.left = {act_lifted(g.left, c.left.lo), act_lifted(g.left, c.left.hi)};
    r.right = {act_lifted(g.right, c.right.lo), act_lifted(g.right, c.right.hi)};
    return canonical(r);
}

inline GElement to_G(const PDElement& p) {
    if (p.reflect) throw InvalidArgument("the reflection j is not an element of G");
    return to_G(compose(translation(p.tl), dilation(p.sl)), compose(translation(p.tr), dilation(p.sr)));
}

}  // namespace modnet
