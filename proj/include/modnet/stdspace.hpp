#pragma once

#include "modnet/core.hpp"
#include "modnet/mobius.hpp"

#include <Eigen/Eigenvalues>

#include <functional>
#include <optional>

namespace modnet {

// Real subspace of C^n (real form R^{2n}), stored by an orthonormal basis.
struct RealSubspace {
    Mat basis;

    Eigen::Index n() const { return basis.rows() / 2; }
    Eigen::Index dim() const { return basis.cols(); }
    Mat projector() const { return basis * basis.transpose(); }
};

inline RealSubspace make_subspace(const Mat& columns, double rel = kRankTol) {
    require(columns.rows() % 2 == 0, "real form needs an even number of rows");
    return {orth(columns, rel)};
}

using Vectors = std::vector<CVec>;

inline RealSubspace make_subspace(const Vectors& vectors, Eigen::Index n) {
    Mat cols(2 * n, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        require(vectors[k].size() == n, "vector outside the parent space");
        cols.col(static_cast<Eigen::Index>(k)) = real_form(vectors[k]);
    }
    return make_subspace(cols);
}

inline RealSubspace zero_subspace(Eigen::Index n) { return {Mat(2 * n, 0)}; }
inline RealSubspace whole_space(Eigen::Index n) { return {Mat::Identity(2 * n, 2 * n)}; }

inline RealSubspace real_slice(Eigen::Index n) {
    Mat b = Mat::Zero(2 * n, n);
    b.topRows(n).setIdentity();
    return {b};
}

inline double distance(const RealSubspace& a, const RealSubspace& b) { return subspace_distance(a.basis, b.basis); }

// sup over unit k in K of dist(k, H); zero iff K is contained in H.
inline double inclusion_defect(const RealSubspace& k, const RealSubspace& h) {
    return containment_distance(k.basis, h.basis);
}

inline RealSubspace image(const Mat& op, const RealSubspace& h) { return make_subspace(Mat(op * h.basis)); }

// H' = (iH)^perp.
inline RealSubspace symplectic_complement(const RealSubspace& h) {
    const Eigen::Index m = h.basis.rows();
    if (h.dim() == 0) return {Mat::Identity(m, m)};
    Mat jb = apply_ji(h.basis);
    Eigen::HouseholderQR<Mat> qr(jb);
    Mat q = qr.householderQ();
    // jb has orthonormal columns, so the trailing columns of the full Q span its complement.
    return {q.rightCols(m - h.dim())};
}

inline RealSubspace sum_closure(const std::vector<RealSubspace>& hs) {
    require(!hs.empty(), "sum of an empty family");
    Eigen::Index cols = 0;
    for (const auto& h : hs) cols += h.dim();
    Mat all(hs.front().basis.rows(), cols);
    Eigen::Index at = 0;
    for (const auto& h : hs) {
        require(h.basis.rows() == all.rows(), "subspaces live in different spaces");
        all.middleCols(at, h.dim()) = h.basis;
        at += h.dim();
    }
    return make_subspace(all);
}

// ---- standardness ------------------------------------------------------------------------

struct Standardness {
    bool cyclic = false;
    bool separating = false;
    double minimal_angle = 0;  // smallest principal angle between H and iH
    bool standard() const { return cyclic && separating; }
};

inline Standardness standardness(const RealSubspace& h) {
    Standardness r;
    const Eigen::Index m = h.basis.rows();
    if (h.dim() == 0) {
        r.cyclic = m == 0;
        r.separating = true;
        r.minimal_angle = kPi / 2;
        return r;
    }
    // rank [B, J_i B] = dim H + rank of the part of J_i H orthogonal to H
    const Mat jb = apply_ji(h.basis);
    const Mat rem = jb - h.basis * (h.basis.transpose() * jb);
    const Vec sv = svd(rem).s;
    const Eigen::Index rank = (sv.array() > kRankTol).count();
    r.cyclic = h.dim() + rank == m;
    const double smin = h.dim() > m - h.dim() ? 0.0 : sv.minCoeff();
    r.separating = smin > kRankTol;
    r.minimal_angle = std::asin(std::clamp(smin, 0.0, 1.0));
    return r;
}

// ---- modular data -------------------------------------------------------------------------

// J and the spectral resolution of Delta: Delta = Q diag(exp(log_lambda)) Q^T with Q orthogonal
// and each eigenspace invariant under multiplication by i.
struct ModularData {
    Mat J;
    Mat Q;
    Vec log_lambda;

    Eigen::Index n() const { return J.rows() / 2; }

    Mat delta_pow(double alpha) const {
        return Q * (alpha * log_lambda).array().exp().matrix().asDiagonal() * Q.transpose();
    }
    Mat delta() const { return delta_pow(1.0); }

    // Delta^{it} as a real matrix: e^{it log lambda} with i acting as J_i on each eigenspace.
    Mat delta_it(double t) const {
        const Vec c = (t * log_lambda).array().cos();
        const Vec s = (t * log_lambda).array().sin();
        return Q * c.asDiagonal() * Q.transpose() + apply_ji(Mat(Q * s.asDiagonal() * Q.transpose()));
    }

    Mat tomita() const { return J * delta_pow(0.5); }

    double lambda_max() const { return log_lambda.size() ? std::exp(log_lambda.maxCoeff()) : 1.0; }

    // From dense operators; Delta is symmetrized and diagonalized.
    static ModularData from_operators(const Mat& j, const Mat& delta) {
        require(j.rows() == j.cols() && delta.rows() == delta.cols() && j.rows() == delta.rows() && j.rows() % 2 == 0,
                "J and Delta must be square of equal even size");
        Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (delta + delta.transpose())));
        require(es.info() == Eigen::Success, "eigendecomposition of Delta failed");
        require(es.eigenvalues().minCoeff() > 0, "Delta must be positive definite");
        return {j, es.eigenvectors(), es.eigenvalues().array().log().matrix()};
    }
};

struct ModularResiduals {
    double j_involution = 0;    // |J^2 - 1|
    double j_antilinear = 0;    // |J J_i + J_i J|
    double j_orthogonal = 0;    // |J^T J - 1|
    double delta_linear = 0;    // |[Delta, J_i]| / |Delta|
    double delta_positive = 0;  // min eigenvalue of Delta (must be > 0)
    double j_delta_j = 0;       // |J Delta J - Delta^{-1}| / max(|Delta|, |Delta^{-1}|)

    double worst() const {
        return std::max({j_involution, j_antilinear, j_orthogonal, delta_linear, j_delta_j});
    }
};

inline ModularResiduals check_invariants(const ModularData& m) {
    ModularResiduals r;
    const Eigen::Index d = m.J.rows();
    const Mat id = Mat::Identity(d, d);
    const Mat ji = ji_matrix(d / 2);
    r.j_involution = opnorm(Mat(m.J * m.J - id));
    r.j_antilinear = opnorm(Mat(m.J * ji + ji * m.J));
    r.j_orthogonal = opnorm(Mat(m.J.transpose() * m.J - id));
    const Mat delta = m.delta(), inv = m.delta_pow(-1.0);
    const double scale = std::max(opnorm(delta), opnorm(inv));
    r.delta_linear = opnorm(Mat(delta * ji - ji * delta)) / scale;
    r.delta_positive = std::exp(m.log_lambda.minCoeff());
    r.j_delta_j = opnorm(Mat(m.J * delta * m.J - inv)) / scale;
    return r;
}

inline void validate(const ModularData& m, double tol = 1e-9) {
    const ModularResiduals r = check_invariants(m);
    if (!(r.worst() <= tol) || !(r.delta_positive > 0))
        throw InvalidArgument("modular data violate their invariants (worst residual " + std::to_string(r.worst()) + ")");
}

namespace detail {

// Orthonormal frame of one principal pair: Ji x = c w + s ux and Ji w = -c x + s uw,
// with x, w in H and ux, uw in H^perp.
struct PrincipalPair {
    Vec x, w, ux, uw;
    double c, s;
};

inline void add_pair(const PrincipalPair& p, Mat& q, Vec& loglam, Mat& j, Eigen::Index& col) {
    const double half = 0.5 * std::atan2(p.s, p.c);
    const double a = std::sin(half), b = std::cos(half);
    const double up = -2.0 * std::log(std::tan(half));
    const Vec p1 = b * p.ux - a * p.w;
    const Vec p2 = b * p.uw + a * p.x;
    const Vec m1 = a * p.ux + b * p.w;
    const Vec m2 = a * p.uw - b * p.x;
    q.col(col) = p1;
    q.col(col + 1) = p2;
    q.col(col + 2) = m1;
    q.col(col + 3) = m2;
    loglam(col) = loglam(col + 1) = up;
    loglam(col + 2) = loglam(col + 3) = -up;
    col += 4;
    j -= p1 * m1.transpose() + m1 * p1.transpose() + p2 * m2.transpose() + m2 * p2.transpose();
}

}  // namespace detail

// Closed-form modular data from the principal angles between H and iH.
inline ModularData modular_data(const RealSubspace& h) {
    const Standardness st = standardness(h);
    if (!st.cyclic) throw NonStandard("cyclic");
    if (!st.separating) throw NonStandard("separating");

    const Mat& b = h.basis;
    const Eigen::Index m = b.rows(), k = b.cols();
    const Mat jb = apply_ji(b);
    const Mat a = b.transpose() * jb;  // antisymmetric
    const Mat rem = jb - b * a;        // component of J_i H orthogonal to H
    const Svd d = svd(rem, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& sv = d.s;
    const Mat& u = d.U;
    const Mat& v = d.V;

    ModularData out{Mat::Zero(m, m), Mat(m, m), Vec(m)};
    Eigen::Index col = 0;

    // Singular values of rem come in equal pairs; cluster them and pair inside each cluster.
    Eigen::Index start = 0;
    while (start < k) {
        Eigen::Index end = start + 1;
        while (end < k && (sv(end - 1) - sv(end) <= 1e-9 * sv(end - 1) + 1e-14 ||
                           ((end - start) % 2 == 1 && sv(start) < 1.0 - 1e-10)))
            ++end;
        const Eigen::Index len = end - start;
        const Mat vc = v.middleCols(start, len);
        const Mat uc = u.middleCols(start, len);
        const Mat acl = vc.transpose() * a * vc;
        Eigen::RealSchur<Mat> schur(acl);
        const Mat& z = schur.matrixU();
        const Mat& t = schur.matrixT();
        const Vec s2 = sv.segment(start, len).array().square();
        Eigen::Index i = 0;
        while (i < len) {
            const bool block = i + 1 < len && std::abs(t(i + 1, i)) > 0.0;
            if (!block) {
                // Ji x orthogonal to H: Delta = 1 there and J fixes x, flips Ji x.
                const Vec x = b * (vc * z.col(i));
                const Vec ux = uc * z.col(i);
                out.Q.col(col) = x;
                out.Q.col(col + 1) = ux;
                out.log_lambda(col) = out.log_lambda(col + 1) = 0.0;
                out.J += x * x.transpose() - ux * ux.transpose();
                col += 2;
                i += 1;
                continue;
            }
            const Vec z1 = z.col(i);
            Vec z2 = z.col(i + 1);
            double c = z2.dot(acl * z1);
            if (c < 0) {
                z2 = -z2;
                c = -c;
            }
            const double s = std::sqrt(z1.dot(s2.asDiagonal() * z1));
            detail::PrincipalPair p{b * (vc * z1), b * (vc * z2), uc * z1, uc * z2, c, s};
            detail::add_pair(p, out.Q, out.log_lambda, out.J, col);
            i += 2;
        }
        start = end;
    }
    if (col != m) throw Error("principal-angle decomposition incomplete");
    return out;
}

// Modular data of H inside its complex span K = H + iH, extended to K^perp by Delta = 1 and the
// conjugation of an orthonormal basis there. H must still be separating.
struct RestrictedModularData {
    ModularData data;
    Eigen::Index complex_dim = 0;  // dim_C K
};

inline RestrictedModularData restricted_modular_data(const RealSubspace& h) {
    const Eigen::Index n = h.n();
    if (h.dim() == 0) return {{conj_matrix(n), Mat::Identity(2 * n, 2 * n), Vec::Zero(2 * n)}, 0};
    Mat both(2 * n, 2 * h.dim());
    both << h.basis, apply_ji(h.basis);
    const CMat span = complex_columns(orth(both));
    Eigen::JacobiSVD<CMat> svd(span, Eigen::ComputeFullU);
    Eigen::Index k = 0;
    const Vec& sv = svd.singularValues();
    while (k < sv.size() && sv(k) > kRankTol * std::max(1.0, sv.size() ? sv(0) : 1.0)) ++k;
    const CMat c = svd.matrixU().leftCols(k), perp = svd.matrixU().rightCols(n - k);
    const Mat e = real_form(c), ep = real_form(perp);
    const RealSubspace local = make_subspace(Mat(e.transpose() * h.basis));
    if (local.dim() != k) throw NonStandard("separating");
    const ModularData md = modular_data(local);
    RestrictedModularData out;
    out.complex_dim = k;
    out.data.J = e * md.J * e.transpose() + ep * conj_matrix(n - k) * ep.transpose();
    out.data.Q.resize(2 * n, 2 * n);
    out.data.Q << e * md.Q, ep;
    out.data.log_lambda = Vec::Zero(2 * n);
    out.data.log_lambda.head(2 * k) = md.log_lambda;
    return out;
}

// ---- subspace from modular data ----------------------------------------------------------

enum class FixedPointMethod { spectral, direct };

struct FixedPointResult {
    RealSubspace subspace;
    double gap = 0;        // kept/discarded singular value ratio (direct method)
    bool warning = false;  // gap below 1e2
};

inline FixedPointResult subspace_from_modular_detail(const ModularData& md,
                                                     FixedPointMethod method = FixedPointMethod::spectral,
                                                     double log_tol = 1e-9) {
    const Eigen::Index m = md.J.rows();
    FixedPointResult res;
    if (method == FixedPointMethod::direct) {
        const Mat s = md.tomita() - Mat::Identity(m, m);
        const Svd d = svd(s, Eigen::ComputeFullV);
        const Vec& sv = d.s;
        Eigen::Index r = 0;
        while (r < sv.size() && sv(r) > kRankTol * sv(0)) ++r;
        res.subspace = {d.V.rightCols(m - r)};
        res.gap = (r > 0 && r < sv.size()) ? sv(r - 1) / std::max(sv(r), 1e-300) : kInf;
        res.warning = res.gap < 1e2;
        return res;
    }
    std::vector<Eigen::Index> up, flat;
    for (Eigen::Index k = 0; k < m; ++k) {
        if (md.log_lambda(k) > log_tol) up.push_back(k);
        else if (md.log_lambda(k) >= -log_tol) flat.push_back(k);
    }
    Mat cols(m, static_cast<Eigen::Index>(up.size()) + static_cast<Eigen::Index>(flat.size()));
    Eigen::Index at = 0;
    for (Eigen::Index k : up) {
        const Vec q = md.Q.col(k);
        const double l4 = std::exp(0.25 * md.log_lambda(k));
        Vec z = q / l4 + l4 * (md.J * q);
        cols.col(at++) = z.normalized();
    }
    if (!flat.empty()) {
        Mat q1(m, static_cast<Eigen::Index>(flat.size()));
        for (std::size_t k = 0; k < flat.size(); ++k) q1.col(static_cast<Eigen::Index>(k)) = md.Q.col(flat[k]);
        const Mat jm = q1.transpose() * md.J * q1;
        Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (jm + jm.transpose())));
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
            if (es.eigenvalues()(k) > 0) cols.col(at++) = q1 * es.eigenvectors().col(k);
    }
    res.subspace = make_subspace(Mat(cols.leftCols(at)));
    res.gap = kInf;
    return res;
}

inline RealSubspace subspace_from_modular(const ModularData& md) { return subspace_from_modular_detail(md).subspace; }

// ---- intersections -------------------------------------------------------------------------

namespace detail {
inline Mat stacked_defect(const std::vector<RealSubspace>& hs, const Mat& domain) {
    const Eigen::Index m = domain.rows();
    Mat st(m * static_cast<Eigen::Index>(hs.size()), domain.cols());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        require(hs[i].basis.rows() == m, "subspaces live in different spaces");
        st.middleRows(static_cast<Eigen::Index>(i) * m, m) = domain - hs[i].basis * (hs[i].basis.transpose() * domain);
    }
    return st;
}
}  // namespace detail

// Kernel of the stacked (1 - P_i).
inline RealSubspace intersect_exact(const std::vector<RealSubspace>& hs, double rel = kRankTol) {
    require(!hs.empty(), "intersection of an empty family");
    const Eigen::Index m = hs.front().basis.rows();
    const Mat st = detail::stacked_defect(hs, Mat::Identity(m, m));
    const Svd d = svd(st, Eigen::ComputeFullV);
    const Vec& sv = d.s;
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > rel) ++r;
    return {d.V.rightCols(m - r)};
}

struct HalperinResult {
    RealSubspace subspace;
    int iterations = 0;
    double residual = 0;
    bool converged = false;
};

// Powers of the cyclic product of projections, started at the identity.
inline HalperinResult intersect_halperin_detail(const std::vector<RealSubspace>& hs, int max_iter = 5000,
                                                double tol = 1e-9) {
    require(!hs.empty(), "intersection of an empty family");
    const Eigen::Index m = hs.front().basis.rows();
    Mat t = Mat::Identity(m, m);
    for (const auto& h : hs) {
        require(h.basis.rows() == m, "subspaces live in different spaces");
        t = h.projector() * t;
    }
    HalperinResult res;
    Mat cur = Mat::Identity(m, m);
    for (int it = 1; it <= max_iter; ++it) {
        Mat next = t * cur;
        res.residual = (next - cur).cwiseAbs().maxCoeff();
        cur = std::move(next);
        res.iterations = it;
        if (res.residual < tol) {
            res.converged = true;
            break;
        }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (cur + cur.transpose())));
    Eigen::Index cnt = 0;
    for (Eigen::Index k = 0; k < m; ++k) cnt += es.eigenvalues()(k) > 0.5;
    res.subspace = {es.eigenvectors().rightCols(cnt)};
    return res;
}

inline RealSubspace intersect_halperin(const std::vector<RealSubspace>& hs, int max_iter = 5000, double tol = 1e-9) {
    HalperinResult r = intersect_halperin_detail(hs, max_iter, tol);
    if (!r.converged) throw ConvergenceError(r.residual, r.iterations);
    return r.subspace;
}

// Vectors (of the anchor subspace, if given) whose summed squared distance to the others is at most tau^2.
inline RealSubspace intersect_near(const std::vector<RealSubspace>& hs, double tau,
                                   std::optional<std::size_t> anchor = std::nullopt) {
    require(!hs.empty(), "intersection of an empty family");
    const Eigen::Index m = hs.front().basis.rows();
    Mat domain = Mat::Identity(m, m);
    std::vector<RealSubspace> rest = hs;
    if (anchor) {
        require(*anchor < hs.size(), "anchor index out of range");
        domain = hs[*anchor].basis;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(*anchor));
    }
    if (rest.empty()) return {domain};
    const Mat st = detail::stacked_defect(rest, domain);
    const Svd d = svd(st, Eigen::ComputeFullV);
    const Vec& sv = d.s;
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > tau) ++r;
    return {domain * d.V.rightCols(domain.cols() - r)};
}

// ---- structural checks ---------------------------------------------------------------------

inline std::vector<double> takesaki_ladder() {
    std::vector<double> ts;
    for (int k = 0; k <= 6; ++k) {
        ts.push_back(0.1 * std::ldexp(1.0, k));
        ts.push_back(-0.1 * std::ldexp(1.0, k));
    }
    return ts;
}

struct TakesakiReport {
    bool invariant = true;
    std::optional<double> violating_t;
    double max_residual = 0;  // largest invariance defect seen
    double equality_distance = 0;
    bool equal = false;
};

// Delta_H^{it} K = K for all sampled t forces K = H.
inline TakesakiReport takesaki_check(const RealSubspace& k, const RealSubspace& h, const std::vector<double>& ts = takesaki_ladder(),
                                     double tol = 1e-8) {
    if (inclusion_defect(k, h) > tol) throw InvalidArgument("takesaki_check needs K inside H");
    const ModularData md = modular_data(h);
    TakesakiReport r;
    for (double t : ts) {
        const double d = subspace_distance(Mat(md.delta_it(t) * k.basis), k.basis);
        r.max_residual = std::max(r.max_residual, d);
        if (d > tol) {
            r.invariant = false;
            r.violating_t = t;
            break;
        }
    }
    r.equality_distance = distance(k, h);
    r.equal = r.equality_distance <= tol;
    return r;
}

struct BorchersReport {
    bool precondition = true;
    std::optional<double> offending_t;
    double inclusion_defect = 0;
    double dilation_residual = 0;
    double reflection_residual = 0;
};

// U(t) H in H for t >= 0 first; then Delta^{is} U(t) Delta^{-is} = U(e^{-+2 pi s} t) and J U(t) J = U(-t).
// Residuals are measured on the columns of probe (orthonormal), defaulting to the whole space.
inline BorchersReport borchers_check(const RealSubspace& h, const std::function<Mat(double)>& u, int spectrum_sign,
                                     const std::vector<double>& ss, const std::vector<double>& ts,
                                     const Mat* probe = nullptr, double tol = 1e-8) {
    require(spectrum_sign == 1 || spectrum_sign == -1, "spectrum sign must be +1 or -1");
    BorchersReport r;
    for (double t : ts) {
        if (t < 0) continue;
        const double d = containment_distance(Mat(u(t) * h.basis), h.basis);
        r.inclusion_defect = std::max(r.inclusion_defect, d);
        if (d > tol && r.precondition) {
            r.precondition = false;
            r.offending_t = t;
        }
    }
    if (!r.precondition) return r;
    const ModularData md = modular_data(h);
    const Eigen::Index m = md.J.rows();
    const Mat p = probe ? *probe : Mat::Identity(m, m);
    for (double s : ss) {
        const Mat dp = md.delta_it(s), dm = md.delta_it(-s);
        for (double t : ts) {
            const Mat lhs = dp * u(t) * dm;
            const Mat rhs = u(std::exp(-spectrum_sign * kTwoPi * s) * t);
            r.dilation_residual = std::max(r.dilation_residual, opnorm(Mat((lhs - rhs) * p)));
        }
    }
    for (double t : ts)
        r.reflection_residual = std::max(r.reflection_residual, opnorm(Mat((md.J * u(t) * md.J - u(-t)) * p)));
    return r;
}

struct HsmiReport {
    bool inclusion = true;
    std::optional<double> offending_t;
    double inclusion_defect = 0;
    double commutation_residual = 0;
};

// +HSMI: Delta_H^{-it} K in K for t >= 0 (sign -1: t <= 0); the flows then reorder like
// Lambda_{R_-} and Lambda_{R_- - 1} (sign -1: Lambda_{R_+}, Lambda_{R_+ + 1}), with Delta^{it} ~ Lambda(-2 pi t).
inline HsmiReport hsmi_check(const RealSubspace& k, const RealSubspace& h, int sign, const std::vector<double>& ts,
                             const std::vector<double>& ss, double tol = 1e-8) {
    require(sign == 1 || sign == -1, "HSMI sign must be +1 or -1");
    if (inclusion_defect(k, h) > tol) throw InvalidArgument("hsmi_check needs K inside H");
    const ModularData mh = modular_data(h), mk = modular_data(k);
    HsmiReport r;
    for (double t : ts) {
        if (sign * t < 0) continue;
        const double d = containment_distance(Mat(mh.delta_it(-t) * k.basis), k.basis);
        r.inclusion_defect = std::max(r.inclusion_defect, d);
        if (d > tol && r.inclusion) {
            r.inclusion = false;
            r.offending_t = t;
        }
    }
    if (!r.inclusion) return r;
    const Interval big = sign > 0 ? Interval::line(-kInf, 0.0) : Interval::line(0.0, kInf);
    const Interval small = sign > 0 ? Interval::line(-kInf, -1.0) : Interval::line(1.0, kInf);
    for (double t : ts)
        for (double s : ss) {
            Reordered ro{};
            try {
                ro = reorder(big, small, -kTwoPi * t, -kTwoPi * s);
            } catch (const Inadmissible&) {
                continue;
            }
            const Mat lhs = mh.delta_it(t) * mk.delta_it(s);
            const Mat rhs = mk.delta_it(-ro.s_prime / kTwoPi) * mh.delta_it(-ro.t_prime / kTwoPi);
            r.commutation_residual = std::max(r.commutation_residual, opnorm(Mat(lhs - rhs)));
        }
    return r;
}

struct SymmetryReport {
    double invariance_defect = 0;
    double s_residual = 0;
    double delta_residual = 0;
    double j_residual = 0;
};

// U H = H implies U commutes with S, Delta and J. Residuals are relative to the operator norms.
inline SymmetryReport symmetry_commutation_check(const RealSubspace& h, const Mat& u, double tol = 1e-8) {
    SymmetryReport r;
    r.invariance_defect = subspace_distance(Mat(u * h.basis), h.basis);
    if (r.invariance_defect > tol)
        throw InvalidArgument("U does not preserve H (defect " + std::to_string(r.invariance_defect) + ")");
    const ModularData md = modular_data(h);
    const Mat ut = u.transpose();
    const Mat s = md.tomita(), d = md.delta();
    r.s_residual = opnorm(Mat(u * s * ut - s)) / opnorm(s);
    r.delta_residual = opnorm(Mat(u * d * ut - d)) / opnorm(d);
    r.j_residual = opnorm(Mat(u * md.J * ut - md.J));
    return r;
}

}  // namespace modnet
