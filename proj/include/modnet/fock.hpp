#pragma once

#include "modnet/bgl.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace modnet {

// Inner products follow the core convention <f, g> = sum f_k conj(g_k), so Im <f, g> = symplectic(f, g).
// With it, W(f) W(g) = e^{i Im <f, g>} W(f + g) and W(f) Omega = e^{-|f|^2 / 2} e(i f).
inline double im_pairing(const CVec& f, const CVec& g) { return (f.cwiseProduct(g.conjugate())).sum().imag(); }

// ---- Weyl words ----------------------------------------------------------------------------

struct WeylWord {
    std::vector<CVec> letters;
};

struct WeylReduced {
    cplx phase{1.0, 0.0};
    CVec amplitude;
};

// (p, a) (q, b) = (p q e^{i Im <a, b>}, a + b)
inline WeylReduced weyl_multiply(const WeylReduced& x, const WeylReduced& y) {
    require(x.amplitude.size() == y.amplitude.size(), "Weyl letters of different dimension");
    return {x.phase * y.phase * std::polar(1.0, im_pairing(x.amplitude, y.amplitude)), x.amplitude + y.amplitude};
}

inline WeylReduced weyl_reduce(const WeylWord& w, Eigen::Index n = -1) {
    WeylReduced r;
    if (w.letters.empty()) {
        require(n >= 0, "empty Weyl word needs the one-particle dimension");
        r.amplitude = CVec::Zero(n);
        return r;
    }
    r.amplitude = w.letters.front();
    double angle = 0;
    for (std::size_t k = 1; k < w.letters.size(); ++k) {
        require(w.letters[k].size() == r.amplitude.size(), "Weyl letters of different dimension");
        angle += im_pairing(r.amplitude, w.letters[k]);
        r.amplitude += w.letters[k];
    }
    r.phase = std::polar(1.0, angle);
    return r;
}

inline cplx vacuum_expectation(const WeylWord& w, Eigen::Index n = -1) {
    const WeylReduced r = weyl_reduce(w, n);
    return r.phase * std::exp(-0.5 * r.amplitude.squaredNorm());
}

// ---- truncated Fock space --------------------------------------------------------------------

// Occupation-number basis |alpha> = prod (a_j^*)^{alpha_j} / sqrt(alpha_j!) Omega, grouped by degree.
struct FockLayout {
    Eigen::Index n = 0;
    int N = 0;
    std::vector<std::vector<std::vector<int>>> alphas;  // alphas[k][i]
    std::vector<std::vector<Eigen::Index>> raise;        // raise[k][i * n + j] = index of alpha + e_j in degree k + 1
    std::vector<Vec> sqrt_fact;                          // sqrt(alpha!) per basis element

    Eigen::Index size(int k) const { return static_cast<Eigen::Index>(alphas[static_cast<std::size_t>(k)].size()); }
};

namespace detail {

inline void enumerate_alphas(Eigen::Index n, int k, std::vector<int>& cur, Eigen::Index pos,
                             std::vector<std::vector<int>>& out) {
    if (pos == n - 1) {
        cur[static_cast<std::size_t>(pos)] = k;
        out.push_back(cur);
        return;
    }
    for (int a = k; a >= 0; --a) {
        cur[static_cast<std::size_t>(pos)] = a;
        enumerate_alphas(n, k - a, cur, pos + 1, out);
    }
}

inline std::shared_ptr<const FockLayout> build_layout(Eigen::Index n, int N) {
    auto lay = std::make_shared<FockLayout>();
    lay->n = n;
    lay->N = N;
    std::vector<std::map<std::vector<int>, Eigen::Index>> rank(static_cast<std::size_t>(N + 1));
    for (int k = 0; k <= N; ++k) {
        std::vector<std::vector<int>> al;
        std::vector<int> cur(static_cast<std::size_t>(n), 0);
        if (n > 0) enumerate_alphas(n, k, cur, 0, al);
        else if (k == 0) al.push_back({});
        Vec sf(static_cast<Eigen::Index>(al.size()));
        for (std::size_t i = 0; i < al.size(); ++i) {
            rank[static_cast<std::size_t>(k)][al[i]] = static_cast<Eigen::Index>(i);
            double f = 1;
            for (int a : al[i]) f *= std::tgamma(a + 1.0);
            sf(static_cast<Eigen::Index>(i)) = std::sqrt(f);
        }
        lay->alphas.push_back(std::move(al));
        lay->sqrt_fact.push_back(sf);
    }
    for (int k = 0; k < N; ++k) {
        const auto& al = lay->alphas[static_cast<std::size_t>(k)];
        std::vector<Eigen::Index> up(al.size() * static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < al.size(); ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                std::vector<int> b = al[i];
                ++b[static_cast<std::size_t>(j)];
                up[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] = rank[static_cast<std::size_t>(k + 1)].at(b);
            }
        lay->raise.push_back(std::move(up));
    }
    return lay;
}

}  // namespace detail

inline std::shared_ptr<const FockLayout> fock_layout(Eigen::Index n, int N) {
    require(n >= 0 && N >= 0, "Fock layout needs n >= 0 and N >= 0");
    static std::mutex mu;
    static std::map<std::pair<Eigen::Index, int>, std::shared_ptr<const FockLayout>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, N}];
    if (!slot) slot = detail::build_layout(n, N);
    return slot;
}

struct FockVector {
    std::shared_ptr<const FockLayout> layout;
    std::vector<CVec> comp;  // comp[k]: coefficients in the occupation basis of degree k

    static FockVector zero(Eigen::Index n, int N) {
        FockVector v;
        v.layout = fock_layout(n, N);
        for (int k = 0; k <= N; ++k) v.comp.push_back(CVec::Zero(v.layout->size(k)));
        return v;
    }
    static FockVector vacuum(Eigen::Index n, int N) {
        FockVector v = zero(n, N);
        v.comp[0](0) = 1.0;
        return v;
    }

    Eigen::Index n() const { return layout->n; }
    int order() const { return layout->N; }

    cplx inner(const FockVector& o) const {  // antilinear in the first slot
        require(layout == o.layout, "Fock vectors of different shape");
        cplx s = 0;
        for (std::size_t k = 0; k < comp.size(); ++k) s += comp[k].dot(o.comp[k]);
        return s;
    }
    double norm() const { return std::sqrt(std::max(inner(*this).real(), 0.0)); }

    FockVector& operator+=(const FockVector& o) {
        require(layout == o.layout, "Fock vectors of different shape");
        for (std::size_t k = 0; k < comp.size(); ++k) comp[k] += o.comp[k];
        return *this;
    }
    FockVector& operator*=(cplx s) {
        for (auto& c : comp) c *= s;
        return *this;
    }
    friend FockVector operator+(FockVector a, const FockVector& b) { return a += b; }
    friend FockVector operator-(FockVector a, const FockVector& b) {
        FockVector m = b;
        m *= -1.0;
        return a += m;
    }
    friend FockVector operator*(cplx s, FockVector a) { return a *= s; }
};

// Degree-k component as a full n^k tensor (row-major in the index tuple).
inline CVec to_tensor(const FockVector& v, int k) {
    const Eigen::Index n = v.n();
    require(k >= 0 && k <= v.order(), "degree out of range");
    const double total = std::pow(static_cast<double>(n), k);
    require(total <= 4e6, "tensor too large to expand");
    const auto& lay = *v.layout;
    std::map<std::vector<int>, Eigen::Index> rank;
    for (std::size_t i = 0; i < lay.alphas[static_cast<std::size_t>(k)].size(); ++i)
        rank[lay.alphas[static_cast<std::size_t>(k)][i]] = static_cast<Eigen::Index>(i);
    const auto len = static_cast<Eigen::Index>(total);
    CVec t(len);
    const double kf = std::sqrt(std::tgamma(k + 1.0));
    std::vector<int> occ(static_cast<std::size_t>(n));
    for (Eigen::Index flat = 0; flat < len; ++flat) {
        std::fill(occ.begin(), occ.end(), 0);
        Eigen::Index r = flat;
        for (int m = 0; m < k; ++m) {
            ++occ[static_cast<std::size_t>(r % n)];
            r /= n;
        }
        const Eigen::Index i = rank.at(occ);
        t(flat) = v.comp[static_cast<std::size_t>(k)](i) * lay.sqrt_fact[static_cast<std::size_t>(k)](i) / kf;
    }
    return t;
}

// e(g) = sum_k g^{(x)k} / sqrt(k!), coefficient g^alpha / sqrt(alpha!).
inline FockVector exponential_vector(const CVec& g, int N) {
    FockVector v = FockVector::zero(g.size(), N);
    const auto& lay = *v.layout;
    for (int k = 0; k <= N; ++k)
        for (Eigen::Index i = 0; i < lay.size(k); ++i) {
            cplx p = 1.0;
            const auto& a = lay.alphas[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            for (std::size_t j = 0; j < a.size(); ++j)
                if (a[j]) p *= std::pow(g(static_cast<Eigen::Index>(j)), a[j]);
            v.comp[static_cast<std::size_t>(k)](i) = p / lay.sqrt_fact[static_cast<std::size_t>(k)](i);
        }
    return v;
}

inline FockVector weyl_vacuum_vector(const CVec& f, int N) {
    FockVector v = exponential_vector(cplx(0, 1) * f, N);
    v *= std::exp(-0.5 * f.squaredNorm());
    return v;
}

// | e(g) - truncation | = sqrt(sum_{k > N} |g|^{2k} / k!), bounded by |g|^{N+1} / sqrt((N+1)!) e^{|g|^2 / 2}.
inline double truncation_tail(double norm, int N) {
    const double x = norm * norm;
    return std::pow(norm, N + 1) / std::sqrt(std::tgamma(N + 2.0)) * std::exp(0.5 * x);
}

// ---- ladder operators and the truncated Weyl operator -----------------------------------------

// a^*(h), dropping the degree N + 1 part.
inline FockVector creation(const CVec& h, const FockVector& v) {
    const auto& lay = *v.layout;
    const Eigen::Index n = v.n();
    require(h.size() == n, "creation amplitude has the wrong dimension");
    FockVector out = FockVector::zero(n, v.order());
    for (int k = 0; k < v.order(); ++k) {
        const auto& up = lay.raise[static_cast<std::size_t>(k)];
        for (Eigen::Index i = 0; i < lay.size(k); ++i) {
            const cplx c = v.comp[static_cast<std::size_t>(k)](i);
            if (c == 0.0) continue;
            const auto& a = lay.alphas[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < n; ++j)
                out.comp[static_cast<std::size_t>(k + 1)](up[static_cast<std::size_t>(i * n + j)]) +=
                    h(j) * std::sqrt(a[static_cast<std::size_t>(j)] + 1.0) * c;
        }
    }
    return out;
}

// a(h) = sum conj(h_j) a_j.
inline FockVector annihilation(const CVec& h, const FockVector& v) {
    const auto& lay = *v.layout;
    const Eigen::Index n = v.n();
    require(h.size() == n, "annihilation amplitude has the wrong dimension");
    FockVector out = FockVector::zero(n, v.order());
    for (int k = 0; k < v.order(); ++k) {
        const auto& up = lay.raise[static_cast<std::size_t>(k)];
        for (Eigen::Index i = 0; i < lay.size(k); ++i) {
            const auto& a = lay.alphas[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            cplx s = 0;
            for (Eigen::Index j = 0; j < n; ++j)
                s += std::conj(h(j)) * std::sqrt(a[static_cast<std::size_t>(j)] + 1.0) *
                     v.comp[static_cast<std::size_t>(k + 1)](up[static_cast<std::size_t>(i * n + j)]);
            out.comp[static_cast<std::size_t>(k)](i) = s;
        }
    }
    return out;
}

// W(f) = exp(a^*(i f) - a(i f)) on the truncated space, Taylor series until the terms vanish.
inline FockVector weyl_apply(const CVec& f, const FockVector& v, double tol = 1e-17) {
    const CVec g = cplx(0, 1) * f;
    FockVector term = v, sum = v;
    for (int m = 1; m < 400; ++m) {
        term = creation(g, term) - annihilation(g, term);
        term *= 1.0 / m;
        sum += term;
        if (term.norm() <= tol * std::max(sum.norm(), 1.0)) return sum;
    }
    throw Error("Weyl series did not converge");
}

// ---- second quantization -----------------------------------------------------------------------

// One-particle operator v -> L v, or v -> L conj(v) when antilinear.
struct OneParticleOp {
    CMat L;
    bool antilinear = false;

    static OneParticleOp linear(CMat l) { return {std::move(l), false}; }
    static OneParticleOp anti(CMat l) { return {std::move(l), true}; }

    CVec operator()(const CVec& v) const { return antilinear ? CVec(L * v.conjugate()) : CVec(L * v); }

    // From a real 2n x 2n matrix that is purely linear or purely antilinear.
    static OneParticleOp from_real(const Mat& m, double tol = 1e-10) {
        require(m.rows() == m.cols() && m.rows() % 2 == 0, "real form must be square of even size");
        const Eigen::Index n = m.rows() / 2;
        const Mat a = m.topLeftCorner(n, n), b = m.topRightCorner(n, n), c = m.bottomLeftCorner(n, n),
                  d = m.bottomRightCorner(n, n);
        // linear part (a + d) / 2 + i (c - b) / 2, antilinear part (a - d) / 2 + i (c + b) / 2
        const CMat lin = 0.5 * (a + d).cast<cplx>() + cplx(0, 0.5) * (c - b).cast<cplx>();
        const CMat anti_part = 0.5 * (a - d).cast<cplx>() + cplx(0, 0.5) * (c + b).cast<cplx>();
        const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
        if (anti_part.cwiseAbs().maxCoeff() <= tol * scale) return linear(lin);
        if (lin.cwiseAbs().maxCoeff() <= tol * scale) return anti(anti_part);
        throw InvalidArgument("operator is neither linear nor antilinear");
    }
};

// Gamma(A) maps the degree-k part by A^{(x)k}. In polynomial form, p(x) = sum c_alpha x^alpha / sqrt(alpha!)
// is sent to p(A^T x); images of monomials are built depth first, one linear factor at a time.
inline FockVector gamma_apply(const OneParticleOp& a, const FockVector& v) {
    const auto& lay = *v.layout;
    const Eigen::Index n = v.n();
    const int N = v.order();
    require(a.L.rows() == n && a.L.cols() == n, "operator dimension does not match the Fock vector");
    FockVector out = FockVector::zero(n, N);
    out.comp[0](0) = a.antilinear ? std::conj(v.comp[0](0)) : v.comp[0](0);
    if (N == 0 || n == 0) return out;
    // rank lookup of a multi-index through the raise tables: walk from degree 0
    auto index_of = [&](const std::vector<int>& alpha) {
        Eigen::Index idx = 0;
        int k = 0;
        for (Eigen::Index j = 0; j < n; ++j)
            for (int r = 0; r < alpha[static_cast<std::size_t>(j)]; ++r)
                idx = lay.raise[static_cast<std::size_t>(k++)][static_cast<std::size_t>(idx * n + j)];
        return idx;
    };
    std::vector<CVec> images(static_cast<std::size_t>(N + 1));
    images[0] = CVec::Ones(1);
    std::vector<int> alpha(static_cast<std::size_t>(n), 0);
    // depth-first over multisets j_1 <= j_2 <= ... <= j_k
    auto visit = [&](auto&& self, int k, Eigen::Index last) -> void {
        for (Eigen::Index j = last; j < n; ++j) {
            const CVec& prev = images[static_cast<std::size_t>(k - 1)];
            CVec& cur = images[static_cast<std::size_t>(k)];
            cur = CVec::Zero(lay.size(k));
            const auto& up = lay.raise[static_cast<std::size_t>(k - 1)];
            for (Eigen::Index b = 0; b < prev.size(); ++b) {
                if (prev(b) == 0.0) continue;
                for (Eigen::Index i = 0; i < n; ++i)
                    cur(up[static_cast<std::size_t>(b * n + i)]) += prev(b) * a.L(i, j);
            }
            ++alpha[static_cast<std::size_t>(j)];
            const Eigen::Index src = index_of(alpha);
            cplx c = v.comp[static_cast<std::size_t>(k)](src);
            if (a.antilinear) c = std::conj(c);
            c /= lay.sqrt_fact[static_cast<std::size_t>(k)](src);
            if (c != 0.0) out.comp[static_cast<std::size_t>(k)] += c * cur;
            if (k < N) self(self, k + 1, j);
            --alpha[static_cast<std::size_t>(j)];
        }
    };
    visit(visit, 1, 0);
    for (int k = 1; k <= N; ++k) out.comp[static_cast<std::size_t>(k)].array() *= lay.sqrt_fact[static_cast<std::size_t>(k)].array();
    return out;
}

// ---- checks ----------------------------------------------------------------------------------

struct TomitaFockCheck {
    double residual = 0;
    double tail_bound = 0;
    bool pass = false;
};

// | Gamma(S_H) W(f) Omega - W(-f) Omega | at truncation N, for f in H.
// Evaluated in the eigenbasis U of Delta: Gamma(S) = Gamma(U) Gamma(U^* J U) Gamma(Delta^{1/2}) Gamma(U^*), and
// Gamma(U^*) W(f) Omega = W(U^* f) Omega. Coefficients there are products of per-mode factors, so the growth
// of Delta^{1/2} on high modes multiplies them without cancellation.
inline TomitaFockCheck second_quantized_tomita_check(const RealSubspace& h, const CVec& f, int N) {
    const Vec x = real_form(f);
    require(x.size() == h.basis.rows(), "vector outside the one-particle space");
    const double nf = x.norm();
    if (nf > 0) {
        const double off = (x - h.basis * (h.basis.transpose() * x)).norm() / nf;
        if (off > 1e-10) throw InvalidArgument("vector is not in H");
    }
    const ModularData md = modular_data(h);
    const Mat log_delta = md.Q * md.log_lambda.asDiagonal() * md.Q.transpose();
    const CMat lg = OneParticleOp::from_real(log_delta, 1e-9).L;
    Eigen::SelfAdjointEigenSolver<CMat> es(CMat(0.5 * (lg + lg.adjoint())));
    const CMat& u = es.eigenvectors();
    const OneParticleOp j = OneParticleOp::from_real(md.J, 1e-9);
    if (!j.antilinear) throw InvalidArgument("modular conjugation came out linear");
    const OneParticleOp half = OneParticleOp::linear(CMat((0.5 * es.eigenvalues()).array().exp().matrix().cast<cplx>().asDiagonal()));
    const OneParticleOp jt = OneParticleOp::anti(CMat(u.adjoint() * j.L * u.conjugate()));

    const CVec ft = u.adjoint() * f;
    const FockVector lhs = gamma_apply(jt, gamma_apply(half, weyl_vacuum_vector(ft, N)));
    TomitaFockCheck r;
    r.residual = (lhs - weyl_vacuum_vector(CVec(-ft), N)).norm();
    r.tail_bound = truncation_tail(nf, N);
    r.pass = r.residual < r.tail_bound + 1e-8;
    return r;
}

struct LocalityReport {
    double max_im = 0;   // max |Im <f, g>| over basis pairs
    double leakage = 0;  // worst basis-vector leakage under the translation across the gap
    double budget = 0;
    bool pass = false;
    Eigen::Index dim1 = 0, dim2 = 0;
};

// One-particle locality between spacelike regions; Im <f, g> = 0 makes W(f) and W(g) commute.
// Each region is anchored in the minimal wedge facing the other one. When the regions touch these wedges are
// mutual complements and duality makes the pairing exact; across a gap the lattice isotony defect enters,
// which the budget tracks through the resolution leakage of the gap translation.
inline LocalityReport locality_commutation_check(const NetModel& net, const Region& o1, const Region& o2) {
    if (!spacelike(o1, o2)) throw InvalidArgument("regions are not spacelike separated");
    const bool o1_right = o1.left.hi <= o2.left.lo && o1.right.lo >= o2.right.hi;
    const Region& r = o1_right ? o1 : o2;  // the one on the W_R side
    const Region& l = o1_right ? o2 : o1;
    const double gl = l.left.lo - r.left.hi, gr = l.right.hi - r.right.lo;
    const RealSubspace hr = net.region_subspace_dual(r, Anchor::wedge_right), hl = net.region_subspace_dual(l, Anchor::wedge_left);
    LocalityReport rep;
    rep.dim1 = (o1_right ? hr : hl).dim();
    rep.dim2 = (o1_right ? hl : hr).dim();
    if (hr.dim() > 0 && hl.dim() > 0) rep.max_im = Mat(hr.basis.transpose() * apply_ji(hl.basis)).cwiseAbs().maxCoeff();
    const bool finite_gap = std::isfinite(gl) && std::isfinite(gr);
    for (const RealSubspace* h : {&hr, &hl})
        for (Eigen::Index c = 0; c < h->dim(); ++c) {
            const CVec z = complex_form(Vec(h->basis.col(c)));
            const double leak = finite_gap ? vector_leakage(net.rep(), z, gl, gr) : boundary_leakage(net.rep(), z);
            rep.leakage = std::max(rep.leakage, leak);
        }
    const bool local = !(o1.is_wedge() && o2.is_wedge());
    rep.budget = net.budget().eval(rep.leakage, 0.0, local);
    rep.pass = rep.max_im < rep.budget;
    return rep;
}

}  // namespace modnet
