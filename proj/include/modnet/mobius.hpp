#pragma once

#include "modnet/core.hpp"

#include <array>
#include <optional>
#include <utility>

namespace modnet {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_inf(double x) { return std::isinf(x); }

// Both signed infinities denote the single point at infinity.
inline bool same_point(double x, double y, double tol = 1e-12) {
    if (is_inf(x) || is_inf(y)) return is_inf(x) && is_inf(y);
    return std::abs(x - y) <= tol * std::max(1.0, std::max(std::abs(x), std::abs(y)));
}

// Wrap into (-pi, pi].
inline double wrap_pi(double a) {
    double r = std::remainder(a, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

// ---- PSL(2,R) ----------------------------------------------------------------

struct MobiusElement {
    double a = 1, b = 0, c = 0, d = 1;

    static MobiusElement identity() { return {}; }

    // Normalizes det to 1 and fixes the PSL sign.
    static MobiusElement from(double a, double b, double c, double d) {
        const double det = a * d - b * c;
        if (!(det > 0) || !std::isfinite(det))
            throw InvalidArgument("Mobius matrix must have positive finite determinant");
        const double s = 1.0 / std::sqrt(det);
        MobiusElement g{a * s, b * s, c * s, d * s};
        g.canonicalize();
        return g;
    }

    void canonicalize() {
        const double first = a != 0 ? a : (b != 0 ? b : (c != 0 ? c : d));
        if (first < 0) {
            a = -a;
            b = -b;
            c = -c;
            d = -d;
        }
    }

    double det() const { return a * d - b * c; }

    MobiusElement operator*(const MobiusElement& h) const {
        MobiusElement r{a * h.a + b * h.c, a * h.b + b * h.d, c * h.a + d * h.c, c * h.b + d * h.d};
        r.canonicalize();
        return r;
    }

    MobiusElement inverse() const {
        MobiusElement r{d, -b, -c, a};
        r.canonicalize();
        return r;
    }

    Eigen::Matrix2d matrix() const {
        Eigen::Matrix2d m;
        m << a, b, c, d;
        return m;
    }

    // Fractional linear action on the compactified line.
    double act(double x) const {
        if (is_inf(x)) return c == 0 ? kInf : a / c;
        const double den = c * x + d;
        if (den == 0) return kInf;
        return (a * x + b) / den;
    }
};

// Frobenius distance between PSL classes (min over the sign).
inline double psl_distance(const MobiusElement& g, const MobiusElement& h) {
    const Eigen::Matrix2d x = g.matrix(), y = h.matrix();
    return std::min((x - y).norm(), (x + y).norm());
}

// ---- Cayley transform ---------------------------------------------------------

inline cplx cayley(double x) {
    if (is_inf(x)) return cplx(-1.0, 0.0);
    const cplx i(0.0, 1.0);
    return -(x - i) / (x + i);
}

inline double cayley_inverse(cplx z) {
    if (std::abs(z + 1.0) < 1e-15) return kInf;
    const cplx i(0.0, 1.0);
    return (-i * (z - 1.0) / (z + 1.0)).real();
}

// Angle on the circle of a line point, in (-pi, pi].
inline double line_to_angle(double x) {
    if (is_inf(x)) return kPi;
    return 2.0 * std::atan(x);
}

inline double angle_to_line(double alpha) {
    const double w = wrap_pi(alpha);
    if (w == kPi) return kInf;
    return std::tan(0.5 * w);
}

// ---- Iwasawa decomposition ------------------------------------------------------

struct Iwasawa {
    double theta;  // K angle in (-pi, pi]
    double a;      // A(a) = diag(e^{a/2}, e^{-a/2})
    double n;      // N(n) = [[1, n], [0, 1]]
};

inline Eigen::Matrix2d k_matrix(double theta) {
    Eigen::Matrix2d k;
    k << std::cos(0.5 * theta), std::sin(0.5 * theta), -std::sin(0.5 * theta), std::cos(0.5 * theta);
    return k;
}

// Rotation angle carried by the first column of a 2x2 matrix (not wrapped).
inline double column_angle(double a, double c) { return 2.0 * std::atan2(-c, a); }

inline Iwasawa iwasawa(const MobiusElement& g) {
    const double r2 = g.a * g.a + g.c * g.c;
    return {wrap_pi(column_angle(g.a, g.c)), std::log(r2), (g.a * g.b + g.c * g.d) / r2};
}

inline MobiusElement recompose(const Iwasawa& w) {
    Eigen::Matrix2d an;
    an << std::exp(0.5 * w.a), std::exp(0.5 * w.a) * w.n, 0.0, std::exp(-0.5 * w.a);
    const Eigen::Matrix2d m = k_matrix(w.theta) * an;
    MobiusElement g{m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
    g.canonicalize();
    return g;
}

// ---- universal cover -------------------------------------------------------------

struct CoverElement {
    MobiusElement base;
    double phi = 0.0;

    static CoverElement identity() { return {}; }

    bool consistent(double tol = 1e-10) const {
        return std::abs(wrap_pi(phi - iwasawa(base).theta)) < tol;
    }
};

namespace detail {
inline constexpr int kTrackSamples = 64;

// Change of the Iwasawa angle along g*((1-s) + s*h), s in [0,1].
inline double tracked_angle_change(const MobiusElement& g, const MobiusElement& h) {
    double prev = std::atan2(g.c, g.a);
    double total = 0.0;
    for (int k = 1; k <= kTrackSamples; ++k) {
        const double s = static_cast<double>(k) / kTrackSamples;
        const double x = (1.0 - s) + s * h.a;
        const double y = s * h.c;
        const double vx = g.a * x + g.b * y;
        const double vy = g.c * x + g.d * y;
        const double cur = std::atan2(vy, vx);
        total += std::remainder(cur - prev, kTwoPi);
        prev = cur;
    }
    return -2.0 * total;
}
}  // namespace detail

// The lifted angle of a product is congruent to the Iwasawa angle of the product; the tracked
// path picks the sheet. When the angles happen to add (rotations) the sum is kept verbatim.
inline CoverElement compose(const CoverElement& g, const CoverElement& h) {
    CoverElement r;
    r.base = g.base * h.base;
    const double th = iwasawa(h.base).theta;
    const double raw = g.phi + detail::tracked_angle_change(g.base, h.base) + (h.phi - th);
    const double target = iwasawa(r.base).theta;
    const double sum = g.phi + h.phi;
    if (std::abs(raw - sum) < 1e-9 * (1.0 + std::abs(sum)) &&
        std::abs(wrap_pi(sum - target)) < 1e-12 * (1.0 + std::abs(sum))) {
        r.phi = sum;
    } else {
        r.phi = target + kTwoPi * std::round((raw - target) / kTwoPi);
    }
    return r;
}

inline CoverElement short_lift(const MobiusElement& g);

inline CoverElement inverse(const CoverElement& g) {
    CoverElement c{g.base.inverse(), iwasawa(g.base.inverse()).theta};
    const CoverElement e = compose(g, c);
    c.phi -= e.phi;
    if (std::abs(-g.phi - c.phi) < 1e-12 * (1.0 + std::abs(g.phi))) c.phi = -g.phi;
    return c;
}

enum class OneParam { rotation, dilation, translation };

inline CoverElement one_param(OneParam kind, double t) {
    if (!std::isfinite(t)) throw InvalidArgument("one-parameter subgroup needs a finite parameter");
    CoverElement r;
    switch (kind) {
        case OneParam::rotation: {
            const Eigen::Matrix2d k = k_matrix(t);
            r.base = MobiusElement{k(0, 0), k(0, 1), k(1, 0), k(1, 1)};
            r.base.canonicalize();
            r.phi = t;
            break;
        }
        case OneParam::dilation:
            r.base = MobiusElement{std::exp(0.5 * t), 0.0, 0.0, std::exp(-0.5 * t)};
            break;
        case OneParam::translation:
            r.base = MobiusElement{1.0, t, 0.0, 1.0};
            break;
    }
    return r;
}

inline CoverElement rotation(double t) { return one_param(OneParam::rotation, t); }
inline CoverElement dilation(double s) { return one_param(OneParam::dilation, s); }
inline CoverElement translation(double t) { return one_param(OneParam::translation, t); }

// Lift of a Mobius element with angle in (-pi, pi].
inline CoverElement short_lift(const MobiusElement& g) { return {g, iwasawa(g).theta}; }

inline double act(const CoverElement& g, double x) { return g.base.act(x); }

inline cplx act_circle(const CoverElement& g, cplx z) { return cayley(g.base.act(cayley_inverse(z))); }

// Action on the lifted circle coordinate (angle on the real line covering S^1).
inline double act_lifted(const CoverElement& g, double alpha) {
    const Iwasawa w = iwasawa(g.base);
    const double k = std::round(alpha / kTwoPi);
    const double a0 = alpha - kTwoPi * k;
    double image = a0;
    if (std::abs(std::abs(a0) - kPi) > 1e-15)
        image = 2.0 * std::atan(std::exp(w.a) * (std::tan(0.5 * a0) + w.n));
    return kTwoPi * k + image + g.phi;
}

inline bool approx_equal(const CoverElement& g, const CoverElement& h, double tol = 1e-10) {
    return psl_distance(g.base, h.base) <= tol && std::abs(g.phi - h.phi) <= tol;
}

// ---- intervals ---------------------------------------------------------------------

enum class Picture { line, circle };

// Line picture: the arc running counterclockwise from lo to hi; lo > hi passes through infinity.
// Circle picture: angles with 0 < hi - lo < 2 pi.
struct Interval {
    Picture picture = Picture::line;
    double lo = 0.0;
    double hi = kInf;

    static Interval line(double l, double r) {
        Interval i{Picture::line, l, r};
        i.validate();
        return i;
    }

    static Interval circle(double a1, double a2) {
        Interval i{Picture::circle, a1, a2};
        i.validate();
        return i;
    }

    void validate() const {
        if (std::isnan(lo) || std::isnan(hi)) throw InvalidArgument("interval endpoint is NaN");
        if (picture == Picture::circle) {
            const double len = hi - lo;
            if (!(len > 0 && len < kTwoPi)) throw InvalidArgument("circle interval length must lie in (0, 2pi)");
        } else if (same_point(lo, hi, 0.0)) {
            throw InvalidArgument("degenerate interval: endpoints coincide");
        }
    }

    Interval to_line() const {
        if (picture == Picture::line) return *this;
        double l = angle_to_line(lo), r = angle_to_line(hi);
        if (is_inf(l)) l = -kInf;
        if (is_inf(r)) r = kInf;
        return {Picture::line, l, r};
    }

    // Counterclockwise angles (lo, hi) with lo in (-pi, pi] and lo < hi <= lo + 2 pi.
    std::pair<double, double> angles() const {
        if (picture == Picture::circle) return {lo, hi};
        const double a1 = line_to_angle(lo);
        double a2 = line_to_angle(hi);
        while (a2 <= a1) a2 += kTwoPi;
        return {a1, a2};
    }

    double cayley_midpoint() const {
        const auto [a1, a2] = angles();
        return angle_to_line(0.5 * (a1 + a2));
    }

    bool contains(double x) const {
        const auto [a1, a2] = angles();
        double ax = line_to_angle(x);
        while (ax <= a1) ax += kTwoPi;
        return ax < a2;
    }
};

namespace detail {
inline Eigen::Vector2d homogeneous(double x) {
    if (is_inf(x)) return {1.0, 0.0};
    return {x, 1.0};
}

// Mobius map with 0 -> l, inf -> r, 1 -> m.
inline MobiusElement three_point_map(double l, double r, double m) {
    const Eigen::Vector2d L = homogeneous(l), R = homogeneous(r), M = homogeneous(m);
    Eigen::Matrix2d basis;
    basis.col(0) = R;
    basis.col(1) = L;
    const Eigen::Vector2d mu = basis.partialPivLu().solve(M);
    Eigen::Matrix2d g;
    g.col(0) = mu(0) * R;
    g.col(1) = mu(1) * L;
    if (!(g.determinant() > 0))
        throw InvalidArgument("interior point is not between the interval endpoints");
    return MobiusElement::from(g(0, 0), g(0, 1), g(1, 0), g(1, 1));
}
}  // namespace detail

// Lambda_I(t) = g delta_{-t} g^{-1}; g sends 0, inf, 1 to the left endpoint, right endpoint and an
// interior point (Cayley midpoint unless given).
inline CoverElement interval_dilation(const Interval& in, double t, std::optional<double> interior = {}) {
    in.validate();
    const Interval i = in.to_line();
    const double m = interior ? *interior : i.cayley_midpoint();
    if (!i.contains(m)) throw InvalidArgument("interior point outside the interval");
    const CoverElement g = short_lift(detail::three_point_map(i.lo, i.hi, m));
    return compose(compose(g, dilation(-t)), inverse(g));
}

// ---- commutation relations ---------------------------------------------------------

enum class CommutationPair { halfline_shifted, halfline_bounded };

struct Reordered {
    double s_prime;  // parameter of the second family, now on the left
    double t_prime;  // parameter of the first family, now on the right
};

namespace detail {
inline std::optional<double> shared_endpoint(const Interval& i, const Interval& j) {
    const Interval a = i.to_line(), b = j.to_line();
    int count = 0;
    double e = 0;
    for (double p : {a.lo, a.hi})
        for (double q : {b.lo, b.hi})
            if (same_point(p, q)) {
                ++count;
                e = p;
            }
    if (count != 1) return std::nullopt;
    return e;
}

// Exponential rate of Lambda_K near its non-shared fixed point, in a chart sending e to infinity.
inline double chart_rate(const Interval& k, double e) {
    const MobiusElement lam = interval_dilation(k, 1.0).base;
    MobiusElement chart = is_inf(e) ? MobiusElement::identity() : MobiusElement{0.0, -1.0, 1.0, -e};
    const MobiusElement conj = chart * lam * chart.inverse();
    return 2.0 * std::log(std::abs(conj.a));
}
}  // namespace detail

// Solves Lambda_I(t) Lambda_J(s) = Lambda_J(s') Lambda_I(t') for intervals sharing one endpoint.
inline Reordered reorder(const Interval& i, const Interval& j, double t, double s) {
    const auto e = detail::shared_endpoint(i, j);
    if (!e) throw InvalidArgument("intervals must share exactly one endpoint");
    const double si = detail::chart_rate(i, *e), sj = detail::chart_rate(j, *e);
    const double arg = std::exp(si * t + sj * s) + 1.0 - std::exp(si * t);
    if (!(arg > 0)) throw Inadmissible("commutation relation parameters inadmissible: log argument " + std::to_string(arg));
    const double sp = std::log(arg) / sj;
    return {sp, (si * t + sj * s - sj * sp) / si};
}

inline double reorder_residual(const Interval& i, const Interval& j, double t, double s) {
    const Reordered r = reorder(i, j, t, s);
    const MobiusElement lhs = interval_dilation(i, t).base * interval_dilation(j, s).base;
    const MobiusElement rhs = interval_dilation(j, r.s_prime).base * interval_dilation(i, r.t_prime).base;
    return psl_distance(lhs, rhs);
}

// The two displayed identities, evaluated with their closed-form parameters.
inline double commutation_residual(double t, double s, CommutationPair pair) {
    const Interval rplus = Interval::line(0.0, kInf);
    if (pair == CommutationPair::halfline_shifted) {
        const double arg = std::exp(-t - s) + 1.0 - std::exp(-t);
        if (!(arg > 0)) throw Inadmissible("e^{-t-s}+1-e^{-t} must be positive");
        const Interval shifted = Interval::line(1.0, kInf);
        const MobiusElement lhs = interval_dilation(rplus, t).base * interval_dilation(shifted, s).base;
        const MobiusElement rhs = interval_dilation(shifted, -std::log(arg)).base *
                                  interval_dilation(rplus, -std::log(std::exp(-t - s) / arg)).base;
        return psl_distance(lhs, rhs);
    }
    const double arg = std::exp(t + s) + 1.0 - std::exp(t);
    if (!(arg > 0)) throw Inadmissible("e^{t+s}+1-e^{t} must be positive");
    const Interval unit = Interval::line(0.0, 1.0);
    const MobiusElement lhs = interval_dilation(rplus, t).base * interval_dilation(unit, s).base;
    const MobiusElement rhs = interval_dilation(unit, std::log(arg)).base *
                              interval_dilation(rplus, std::log(std::exp(t + s) / arg)).base;
    return psl_distance(lhs, rhs);
}

// ---- the two-dimensional group G -------------------------------------------------------

struct GElement {
    CoverElement left;
    CoverElement right;

    static GElement identity() { return {}; }
};

inline GElement canonical(GElement g) {
    const double k = std::floor(g.left.phi / kTwoPi);
    g.left.phi -= kTwoPi * k;
    g.right.phi += kTwoPi * k;
    if (g.left.phi >= kTwoPi) {
        g.left.phi -= kTwoPi;
        g.right.phi += kTwoPi;
    }
    return g;
}

inline GElement to_G(const CoverElement& left, const CoverElement& right) { return canonical({left, right}); }

inline GElement compose(const GElement& g, const GElement& h) {
    return to_G(compose(g.left, h.left), compose(g.right, h.right));
}

inline bool approx_equal(const GElement& g, const GElement& h, double tol = 1e-10) {
    const GElement a = canonical(g), b = canonical(h);
    return approx_equal(a.left, b.left, tol) && approx_equal(a.right, b.right, tol);
}

}  // namespace modnet
