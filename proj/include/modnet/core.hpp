#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace modnet {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// Relative singular-value cutoff used for every rank and kernel decision.
inline constexpr double kRankTol = 1e-8;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

struct NonStandard : Error {
    std::string predicate;
    explicit NonStandard(std::string pred)
        : Error("subspace is not standard: fails " + pred), predicate(std::move(pred)) {}
};

struct Inadmissible : Error {
    using Error::Error;
};

struct Unimplemented : Error {
    std::string factor;
    explicit Unimplemented(std::string f)
        : Error("group element outside the implemented subgroup: " + f), factor(std::move(f)) {}
};

struct ConvergenceError : Error {
    double residual;
    int iterations;
    ConvergenceError(double res, int it)
        : Error("alternating projections did not converge after " + std::to_string(it) +
                " iterations (residual " + std::to_string(res) + ")"),
          residual(res), iterations(it) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidArgument(msg);
}

// ---- real form of C^n: [Re; Im] --------------------------------------------

inline Vec real_form(const CVec& z) {
    const Eigen::Index n = z.size();
    Vec x(2 * n);
    x.head(n) = z.real();
    x.tail(n) = z.imag();
    return x;
}

inline CVec complex_form(const Vec& x) {
    const Eigen::Index n = x.size() / 2;
    CVec z(n);
    for (Eigen::Index k = 0; k < n; ++k) z(k) = cplx(x(k), x(n + k));
    return z;
}

inline Mat real_form(const CMat& a) {
    const Eigen::Index r = a.rows(), c = a.cols();
    Mat m(2 * r, 2 * c);
    m.topLeftCorner(r, c) = a.real();
    m.topRightCorner(r, c) = -a.imag();
    m.bottomLeftCorner(r, c) = a.imag();
    m.bottomRightCorner(r, c) = a.real();
    return m;
}

// Columns are complex vectors in real form; returns them as complex columns.
inline CMat complex_columns(const Mat& b) {
    const Eigen::Index n = b.rows() / 2;
    CMat z(n, b.cols());
    z.real() = b.topRows(n);
    z.imag() = b.bottomRows(n);
    return z;
}

inline Mat ji_matrix(Eigen::Index n) {
    Mat j = Mat::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = -Mat::Identity(n, n);
    j.bottomLeftCorner(n, n) = Mat::Identity(n, n);
    return j;
}

// Multiplication by i applied to each column.
inline Mat apply_ji(const Mat& b) {
    const Eigen::Index n = b.rows() / 2;
    Mat r(b.rows(), b.cols());
    r.topRows(n) = -b.bottomRows(n);
    r.bottomRows(n) = b.topRows(n);
    return r;
}

inline Vec apply_ji(const Vec& v) {
    const Eigen::Index n = v.size() / 2;
    Vec r(v.size());
    r.head(n) = -v.tail(n);
    r.tail(n) = v.head(n);
    return r;
}

inline Mat conj_matrix(Eigen::Index n) {
    Mat c = Mat::Identity(2 * n, 2 * n);
    c.bottomRightCorner(n, n) *= -1.0;
    return c;
}

inline Mat apply_conj(const Mat& b) {
    const Eigen::Index n = b.rows() / 2;
    Mat r = b;
    r.bottomRows(n) *= -1.0;
    return r;
}

// Im <x, y> with the pairing linear in its first slot: sum x_k conj(y_k).
inline double symplectic(const Vec& x, const Vec& y) { return x.dot(apply_ji(y)); }

// Largest singular value from the smaller Gram matrix; relative accuracy matches an SVD.
template <class M>
double opnorm(const M& a) {
    if (a.size() == 0) return 0.0;
    using Gram = Eigen::Matrix<typename M::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Gram g = a.rows() >= a.cols() ? Gram(a.adjoint() * a) : Gram(a * a.adjoint());
    Eigen::SelfAdjointEigenSolver<Gram> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

inline double opnorm(const Mat& a) { return opnorm<Mat>(a); }
inline double opnorm(const CMat& a) { return opnorm<CMat>(a); }

// Thin or full SVD. BDCSVD in Eigen 3.4 can return wrong null vectors after deflation,
// so its output is checked against the factorization and JacobiSVD is the fallback.
struct Svd {
    Mat U, V;
    Vec s;
};

namespace detail {
inline bool svd_ok(const Mat& a, const Svd& d, bool want_u, bool want_v) {
    const double scale = std::max(d.s.size() ? d.s(0) : 0.0, 1.0);
    const double tol = 1e-12 * scale * std::sqrt(static_cast<double>(a.rows() + a.cols()));
    const Eigen::Index p = d.s.size();
    if (!d.s.allFinite()) return false;
    if (want_v) {
        const Mat g = d.V.transpose() * d.V - Mat::Identity(d.V.cols(), d.V.cols());
        if (g.cwiseAbs().maxCoeff() > 1e-12 * std::sqrt(static_cast<double>(d.V.rows()))) return false;
        const Mat av = a * d.V;
        if (want_u) {
            if ((av.leftCols(p) - d.U.leftCols(p) * d.s.asDiagonal()).cwiseAbs().maxCoeff() > tol) return false;
        } else {
            // V must diagonalize a^T a
            const Mat g2 = av.leftCols(p).transpose() * av.leftCols(p);
            const Mat diff = g2 - Mat(d.s.array().square().matrix().asDiagonal());
            if (diff.cwiseAbs().maxCoeff() > tol * scale) return false;
        }
        if (d.V.cols() > p && av.rightCols(d.V.cols() - p).cwiseAbs().maxCoeff() > tol) return false;
    }
    if (want_u) {
        const Mat g = d.U.transpose() * d.U - Mat::Identity(d.U.cols(), d.U.cols());
        if (g.cwiseAbs().maxCoeff() > 1e-12 * std::sqrt(static_cast<double>(d.U.rows()))) return false;
        const Mat ua = d.U.transpose() * a;
        if ((ua.topRows(p).rowwise().norm() - d.s).cwiseAbs().maxCoeff() > tol) return false;
        if (d.U.cols() > p && ua.bottomRows(d.U.cols() - p).cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

template <class S>
Svd unpack(const S& svd, unsigned opts) {
    Svd d;
    d.s = svd.singularValues();
    if (opts & (Eigen::ComputeThinU | Eigen::ComputeFullU)) d.U = svd.matrixU();
    if (opts & (Eigen::ComputeThinV | Eigen::ComputeFullV)) d.V = svd.matrixV();
    return d;
}
}  // namespace detail

inline Svd svd(const Mat& a, unsigned opts = 0) {
    const bool want_u = opts & (Eigen::ComputeThinU | Eigen::ComputeFullU);
    const bool want_v = opts & (Eigen::ComputeThinV | Eigen::ComputeFullV);
    if (a.size() == 0) return detail::unpack(Eigen::JacobiSVD<Mat>(a, opts), opts);
    // Without vectors there is nothing to verify cheaply; BDCSVD values are backward stable.
    if (!want_u && !want_v) return {Mat(), Mat(), Eigen::BDCSVD<Mat>(a).singularValues()};
    Svd d = detail::unpack(Eigen::BDCSVD<Mat>(a, opts), opts);
    if (detail::svd_ok(a, d, want_u, want_v)) return d;
    return detail::unpack(Eigen::JacobiSVD<Mat>(a, opts), opts);
}

// Orthonormal basis of the column span, singular values below rel*max dropped.
inline Mat orth(const Mat& a, double rel = kRankTol) {
    if (a.cols() == 0 || a.rows() == 0) return Mat(a.rows(), 0);
    const Svd d = svd(a, Eigen::ComputeThinU);
    const Vec& s = d.s;
    if (s.size() == 0 || s(0) == 0.0) return Mat(a.rows(), 0);
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > rel * s(0)) ++r;
    return d.U.leftCols(r);
}

// Orthonormal basis of the kernel of a, same relative cutoff.
inline Mat kernel(const Mat& a, double rel = kRankTol) {
    const Eigen::Index n = a.cols();
    if (a.rows() == 0) return Mat::Identity(n, n);
    const Svd d = svd(a, Eigen::ComputeFullV);
    const Vec& s = d.s;
    Eigen::Index r = 0;
    if (s.size() > 0 && s(0) > 0.0)
        while (r < s.size() && s(r) > rel * s(0)) ++r;
    return d.V.rightCols(n - r);
}

inline Mat projector(const Mat& basis) { return basis * basis.transpose(); }

// Largest distance of a unit vector of span(b1) from span(b2).
inline double containment_distance(const Mat& b1, const Mat& b2);

// Operator norm of the difference of the orthogonal projections, via
// |P - Q| = max(|(1 - Q) P|, |(1 - P) Q|) on orthonormal bases.
inline double subspace_distance(const Mat& b1, const Mat& b2) {
    return std::max(containment_distance(b1, b2), containment_distance(b2, b1));
}

inline double containment_distance(const Mat& b1, const Mat& b2) {
    if (b1.cols() == 0) return 0.0;
    Mat r = b1 - b2 * (b2.transpose() * b1);
    return opnorm(r);
}

// ---- deterministic sampling ---------------------------------------------------

using Rng = std::mt19937_64;

inline Mat gaussian_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = nd(rng);
    return m;
}

inline CVec gaussian_cvec(Rng& rng, Eigen::Index n) {
    std::normal_distribution<double> nd(0.0, 1.0);
    CVec z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = nd(rng);
        const double im = nd(rng);
        z(i) = cplx(re, im);
    }
    return z;
}

inline double uniform(Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> ud(lo, hi);
    return ud(rng);
}

inline Mat random_orthogonal(Rng& rng, Eigen::Index n) {
    Eigen::HouseholderQR<Mat> qr(gaussian_matrix(rng, n, n));
    Mat q = qr.householderQ();
    Vec d = qr.matrixQR().diagonal();
    for (Eigen::Index k = 0; k < n; ++k)
        if (d(k) < 0) q.col(k) *= -1.0;
    return q;
}

inline CMat random_unitary(Rng& rng, Eigen::Index n) {
    CMat g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) g.col(j) = gaussian_cvec(rng, n);
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ();
    for (Eigen::Index k = 0; k < n; ++k) {
        cplx d = qr.matrixQR()(k, k);
        if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
    }
    return q;
}

}  // namespace modnet
