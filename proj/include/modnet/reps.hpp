#pragma once

#include "modnet/core.hpp"
#include "modnet/spacetime.hpp"
#include "modnet/stdspace.hpp"

#include <string>
#include <vector>

namespace modnet {

// Uniform grid u_j = origin + j h, j = 0..n-1, in log-momentum (chiral) or rapidity (massive).
struct Grid {
    Eigen::Index n = 64;
    double h = 0.75;
    double origin = 0.0;

    static Grid centered(Eigen::Index n, double h) { return {n, h, -0.5 * h * static_cast<double>(n - 1)}; }
    double point(Eigen::Index j) const { return origin + h * static_cast<double>(j); }
    double length() const { return h * static_cast<double>(n); }

    Vec points() const {
        Vec p(n);
        for (Eigen::Index j = 0; j < n; ++j) p(j) = point(j);
        return p;
    }

    void validate() const {
        require(n >= 2 && n % 2 == 0, "grid size must be even and at least 2");
        require(h > 0 && std::isfinite(h), "grid spacing must be positive");
    }
};

// Antiperiodic Fourier modes nu_k = (2k+1) pi / (n h); no zero mode, closed under nu -> -nu.
inline Vec mode_frequencies(const Grid& g) {
    Vec nu(g.n);
    for (Eigen::Index k = 0; k < g.n; ++k)
        nu(k) = (2.0 * static_cast<double>(k - g.n / 2) + 1.0) * kPi / g.length();
    return nu;
}

// Unitary map from grid values to mode coefficients.
inline CMat fourier(const Grid& g) {
    const Vec nu = mode_frequencies(g);
    CMat f(g.n, g.n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(g.n));
    for (Eigen::Index k = 0; k < g.n; ++k)
        for (Eigen::Index j = 0; j < g.n; ++j) f(k, j) = std::polar(norm, -nu(k) * g.h * static_cast<double>(j));
    return f;
}

// (Sh(s) phi)(u) = phi(u + s), antiperiodic wrap; an exact signed permutation for s on the grid.
inline CMat shift_matrix(const Grid& g, double s) {
    const double steps = s / g.h;
    const double k = std::round(steps);
    if (std::abs(steps - k) < 1e-12) {
        CMat p = CMat::Zero(g.n, g.n);
        const auto kk = static_cast<Eigen::Index>(k);
        for (Eigen::Index j = 0; j < g.n; ++j) {
            Eigen::Index src = j + kk;
            Eigen::Index wraps = src >= 0 ? src / g.n : -((-src + g.n - 1) / g.n);
            src -= wraps * g.n;
            p(j, src) = (wraps % 2 == 0) ? 1.0 : -1.0;
        }
        return p;
    }
    const CMat f = fourier(g);
    const Vec nu = mode_frequencies(g);
    CVec ph(g.n);
    for (Eigen::Index q = 0; q < g.n; ++q) ph(q) = std::polar(1.0, nu(q) * s);
    return f.adjoint() * ph.asDiagonal() * f;
}

enum class FiberKind { chiral_left, chiral_right, massive };

inline std::string to_string(FiberKind k) {
    switch (k) {
        case FiberKind::chiral_left: return "chiral_left";
        case FiberKind::chiral_right: return "chiral_right";
        case FiberKind::massive: return "massive";
    }
    return "?";
}

// One irreducible block. Vectors hold sqrt(weight) * xi(grid point), so the grid inner product is Euclidean.
struct Fiber {
    FiberKind kind = FiberKind::chiral_left;
    Grid grid;
    double mass = 0.0;
    double measure = 1.0;  // extra density (m^3 dmu for direct integrals)

    bool chiral() const { return kind != FiberKind::massive; }

    // Lightray momenta (p_L, p_R), pairing with (a_L, a_R) as a_L p_L + a_R p_R.
    Vec p_left() const {
        const Vec u = grid.points();
        if (kind == FiberKind::chiral_left) return u.array().exp();
        if (kind == FiberKind::chiral_right) return Vec::Zero(grid.n);
        return (mass / std::sqrt(2.0)) * u.array().exp();
    }
    Vec p_right() const {
        const Vec u = grid.points();
        if (kind == FiberKind::chiral_right) return u.array().exp();
        if (kind == FiberKind::chiral_left) return Vec::Zero(grid.n);
        return (mass / std::sqrt(2.0)) * (-u.array()).exp();
    }

    // Quadrature weight of each grid point: p^2 h for p dp, h/2 for dp_1/(2 omega).
    Vec weights() const {
        if (chiral()) return measure * grid.h * (2.0 * grid.points().array()).exp();
        return Vec::Constant(grid.n, measure * grid.h / 2.0);
    }

    CVec translation_phase(double al, double ar) const {
        const Vec ph = al * p_left() + ar * p_right();
        CVec z(grid.n);
        for (Eigen::Index j = 0; j < grid.n; ++j) z(j) = std::polar(1.0, ph(j));
        return z;
    }

    // Grid shift implementing the dilation part (s_L, s_R).
    double shift_amount(double sl, double sr) const {
        if (kind == FiberKind::chiral_left) return sl;
        if (kind == FiberKind::chiral_right) return sr;
        if (std::abs(sl + sr) > 1e-13 * (1.0 + std::abs(sl))) throw Unimplemented("dilation");
        return sl;
    }

    // Log-eigenvalue per mode of the shift generator: Sh(s) = sum e^{i nu s} P_nu.
    Vec nu() const { return mode_frequencies(grid); }
};

enum class ModelKind { chiral, chiral_sum, massive, direct_integral, twisted };

inline std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::chiral: return "chiral";
        case ModelKind::chiral_sum: return "chiralSum";
        case ModelKind::massive: return "massive";
        case ModelKind::direct_integral: return "directIntegral";
        case ModelKind::twisted: return "twisted";
    }
    return "?";
}

struct InnerSymmetryCharge {
    double q = 0.0;
};

// Direct sum of fibers with the (anti-)unitary Poincare-dilation action.
struct LatticeRep {
    ModelKind kind = ModelKind::chiral_sum;
    std::vector<Fiber> fibers;
    // Twist data: V(s) rotates fiber pairs (a, b) by the real angle q s, i.e. e^{+-iqs} on (a -+ ib)/sqrt2.
    InnerSymmetryCharge charge;
    std::vector<std::pair<std::size_t, std::size_t>> charge_pairs;

    Eigen::Index dim() const {
        Eigen::Index d = 0;
        for (const auto& f : fibers) d += f.grid.n;
        return d;
    }
    Eigen::Index offset(std::size_t i) const {
        Eigen::Index d = 0;
        for (std::size_t k = 0; k < i; ++k) d += fibers[k].grid.n;
        return d;
    }

    // Complex-linear part of U(g); the full operator is this composed with conjugation when g.reflect.
    CMat linear_part(const PDElement& g, bool twisted = true) const {
        const Eigen::Index d = dim();
        CMat u = CMat::Zero(d, d);
        for (std::size_t i = 0; i < fibers.size(); ++i) {
            const Fiber& f = fibers[i];
            const Eigen::Index o = offset(i), n = f.grid.n;
            const double s = f.shift_amount(g.sl, g.sr);
            u.block(o, o, n, n) = f.translation_phase(g.tl, g.tr).asDiagonal() * shift_matrix(f.grid, s);
        }
        if (twisted && !charge_pairs.empty() && charge.q != 0.0) u = u * charge_rotation(0.5 * (g.sl + g.sr));
        return u;
    }

    // Real form of U(g).
    Mat real_matrix(const PDElement& g, bool twisted = true) const {
        Mat m = real_form(linear_part(g, twisted));
        if (g.reflect) m = m * conj_matrix(dim());
        return m;
    }

    // Fiberwise, without assembling the full matrix.
    CVec apply(const PDElement& g, const CVec& xi, bool twisted = true) const {
        require(xi.size() == dim(), "vector outside the representation space");
        CVec v = g.reflect ? CVec(xi.conjugate()) : xi;
        if (twisted && !charge_pairs.empty() && charge.q != 0.0) v = charge_rotation(0.5 * (g.sl + g.sr)) * v;
        CVec out(v.size());
        for (std::size_t i = 0; i < fibers.size(); ++i) {
            const Fiber& f = fibers[i];
            const Eigen::Index o = offset(i), n = f.grid.n;
            const CVec moved = shift_matrix(f.grid, f.shift_amount(g.sl, g.sr)) * v.segment(o, n);
            out.segment(o, n) = f.translation_phase(g.tl, g.tr).cwiseProduct(moved);
        }
        return out;
    }

    // V(s): real rotation by q s between paired fibers (complex linear, commutes with the untwisted action).
    CMat charge_rotation(double s) const {
        const Eigen::Index d = dim();
        CMat v = CMat::Identity(d, d);
        const double c = std::cos(charge.q * s), sn = std::sin(charge.q * s);
        for (const auto& [a, b] : charge_pairs) {
            const Eigen::Index oa = offset(a), ob = offset(b), n = fibers[a].grid.n;
            v.block(oa, oa, n, n) = c * CMat::Identity(n, n);
            v.block(ob, ob, n, n) = c * CMat::Identity(n, n);
            v.block(oa, ob, n, n) = -sn * CMat::Identity(n, n);
            v.block(ob, oa, n, n) = sn * CMat::Identity(n, n);
        }
        return v;
    }

    void validate() const {
        require(!fibers.empty(), "representation needs at least one fiber");
        for (const auto& f : fibers) {
            f.grid.validate();
            if (f.kind == FiberKind::massive) require(f.mass > 0, "masses must be positive");
        }
        for (const auto& [a, b] : charge_pairs) {
            require(a < fibers.size() && b < fibers.size() && a != b, "charge pair out of range");
            require(fibers[a].kind == fibers[b].kind && fibers[a].grid.n == fibers[b].grid.n &&
                        fibers[a].grid.h == fibers[b].grid.h && fibers[a].grid.origin == fibers[b].grid.origin &&
                        fibers[a].mass == fibers[b].mass,
                    "charged fibers must be identical copies");
        }
    }
};

// ---- builders ------------------------------------------------------------------------------

struct RepSpec {
    ModelKind kind = ModelKind::chiral_sum;
    Eigen::Index n = 64;
    double h = 0.75;
    std::vector<double> masses{1.0};
    double mass_step = 1.0;  // d mu spacing for direct integrals
    double charge = 0.0;
    bool charged = false;  // chiralSum with two copies per chirality carrying a (zero) charge
};

inline LatticeRep build_rep(const RepSpec& spec) {
    LatticeRep rep;
    rep.kind = spec.kind;
    const Grid g = Grid::centered(spec.n, spec.h);
    switch (spec.kind) {
        case ModelKind::chiral:
            rep.fibers = {{FiberKind::chiral_left, g}};
            break;
        case ModelKind::chiral_sum:
            if (!spec.charged) {
                rep.fibers = {{FiberKind::chiral_left, g}, {FiberKind::chiral_right, g}};
                break;
            }
            [[fallthrough]];
        case ModelKind::twisted:
            rep.fibers = {{FiberKind::chiral_left, g}, {FiberKind::chiral_left, g},
                          {FiberKind::chiral_right, g}, {FiberKind::chiral_right, g}};
            rep.charge = {spec.charge};
            rep.charge_pairs = {{0, 1}, {2, 3}};
            break;
        case ModelKind::massive:
            require(spec.masses.size() == 1, "massive model takes exactly one mass");
            rep.fibers = {{FiberKind::massive, g, spec.masses[0]}};
            break;
        case ModelKind::direct_integral: {
            require(!spec.masses.empty(), "direct integral needs masses");
            std::vector<double> ms = spec.masses;
            std::sort(ms.begin(), ms.end());
            require(std::adjacent_find(ms.begin(), ms.end()) == ms.end(), "masses must be distinct");
            for (double m : spec.masses) rep.fibers.push_back({FiberKind::massive, g, m, m * m * m * spec.mass_step});
            break;
        }
    }
    rep.validate();
    return rep;
}

inline LatticeRep twist(const LatticeRep& rep, InnerSymmetryCharge v) {
    require(!rep.charge_pairs.empty(), "twist needs paired fibers carrying the charge");
    LatticeRep out = rep;
    if (v.q != 0.0) out.kind = ModelKind::twisted;
    out.charge = v;
    // V must commute with the untwisted generators.
    for (const PDElement& g : {PDElement::translation(0.7, -0.3), PDElement::boost_right(0.4), PDElement::j()}) {
        const CMat u = rep.linear_part(g, false), vv = out.charge_rotation(0.9);
        const CMat comm = g.reflect ? CMat(u * vv.conjugate() - vv * u) : CMat(u * vv - vv * u);
        if (comm.cwiseAbs().maxCoeff() > 1e-12) throw InvalidArgument("charge does not commute with the representation");
    }
    return out;
}

// ---- grid functions ---------------------------------------------------------------------------

// Samples xi on a fiber and applies the sqrt(weight) normalization.
template <class F>
CVec sample(const Fiber& f, F&& xi) {
    const Vec u = f.grid.points(), w = f.weights();
    CVec v(f.grid.n);
    for (Eigen::Index j = 0; j < f.grid.n; ++j) v(j) = std::sqrt(w(j)) * cplx(xi(u(j)));
    return v;
}

// Fraction of the norm in the outer quarters of a fiber (wrap-around sensitivity).
inline double boundary_leakage(const LatticeRep& rep, const CVec& xi) {
    double out = 0, all = xi.squaredNorm();
    for (std::size_t i = 0; i < rep.fibers.size(); ++i) {
        const Eigen::Index o = rep.offset(i), n = rep.fibers[i].grid.n, q = n / 4;
        out += xi.segment(o, q).squaredNorm() + xi.segment(o + n - q, q).squaredNorm();
    }
    return all > 0 ? std::sqrt(out / all) : 0.0;
}

// Joint translation spectrum of the chiral tensor product: all points (p_L, p_R) with both strictly positive.
struct TensorSpectrum {
    double min_left = 0, min_right = 0;
    bool avoids_axes = false;
};

inline TensorSpectrum chiral_tensor_spectrum(const Grid& gl, const Grid& gr) {
    TensorSpectrum t;
    t.min_left = std::exp(gl.points().minCoeff());
    t.min_right = std::exp(gr.points().minCoeff());
    t.avoids_axes = t.min_left > 0 && t.min_right > 0;
    return t;
}

// ---- product picture to direct integral -------------------------------------------------------

struct ResampleReport {
    CVec image;
    double norm_ratio_defect = 0;  // | |xi'| / |xi| - 1 |
};

// xi on the chiral tensor grid (row-major in (u_L, u_R), sqrt-weight normalized) to the massive fibers of rep.
// Coordinates: p_L = m e^theta / sqrt2, p_R = m e^{-theta} / sqrt2; with d mu = dm the Jacobian factor is 1.
inline ResampleReport product_to_direct_integral(const CMat& xi, const Grid& gl, const Grid& gr, const LatticeRep& target) {
    require(xi.rows() == gl.n && xi.cols() == gr.n, "tensor vector does not match the chiral grids");
    require(target.kind == ModelKind::direct_integral || target.kind == ModelKind::massive, "target must be massive fibers");
    // Back to function values on the (u_L, u_R) grid.
    const Vec ul = gl.points(), ur = gr.points();
    CMat vals(gl.n, gr.n);
    for (Eigen::Index i = 0; i < gl.n; ++i)
        for (Eigen::Index j = 0; j < gr.n; ++j)
            vals(i, j) = xi(i, j) / std::sqrt(gl.h * gr.h * std::exp(2 * ul(i) + 2 * ur(j)));
    auto interp = [&](double a, double b) -> cplx {
        const double x = (a - gl.origin) / gl.h, y = (b - gr.origin) / gr.h;
        if (x < 0 || y < 0 || x > static_cast<double>(gl.n - 1) || y > static_cast<double>(gr.n - 1)) return 0.0;
        const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(x), gl.n - 2);
        const auto j = std::min<Eigen::Index>(static_cast<Eigen::Index>(y), gr.n - 2);
        const double fx = x - static_cast<double>(i), fy = y - static_cast<double>(j);
        return (1 - fx) * (1 - fy) * vals(i, j) + fx * (1 - fy) * vals(i + 1, j) + (1 - fx) * fy * vals(i, j + 1) +
               fx * fy * vals(i + 1, j + 1);
    };
    ResampleReport r;
    r.image = CVec::Zero(target.dim());
    for (std::size_t k = 0; k < target.fibers.size(); ++k) {
        const Fiber& f = target.fibers[k];
        const Vec th = f.grid.points(), w = f.weights();
        const double lm = std::log(f.mass) - 0.5 * std::log(2.0);
        for (Eigen::Index j = 0; j < f.grid.n; ++j)
            r.image(target.offset(k) + j) = std::sqrt(w(j)) * interp(lm + th(j), lm - th(j));
    }
    const double n0 = xi.norm();
    r.norm_ratio_defect = n0 > 0 ? std::abs(r.image.norm() / n0 - 1.0) : 0.0;
    return r;
}

}  // namespace modnet
