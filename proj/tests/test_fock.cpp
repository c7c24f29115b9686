#include "modnet/fock.hpp"

#include <gtest/gtest.h>

using namespace modnet;

namespace {

CVec small_cvec(Rng& rng, Eigen::Index n, double size) {
    CVec v = gaussian_cvec(rng, n);
    return size * v / v.norm();
}

FockVector random_fock(Rng& rng, Eigen::Index n, int N) {
    FockVector v = FockVector::zero(n, N);
    for (auto& c : v.comp) c = gaussian_cvec(rng, c.size());
    v *= 1.0 / v.norm();
    return v;
}

// Every bracketing of letters [lo, hi).
std::vector<WeylReduced> bracketings(const std::vector<CVec>& w, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return {WeylReduced{1.0, w[lo]}};
    std::vector<WeylReduced> out;
    for (std::size_t mid = lo + 1; mid < hi; ++mid)
        for (const auto& a : bracketings(w, lo, mid))
            for (const auto& b : bracketings(w, mid, hi)) out.push_back(weyl_multiply(a, b));
    return out;
}

}  // namespace

TEST(Weyl, ReductionExamples) {
    Rng rng(31);
    const CVec f = gaussian_cvec(rng, 3), g = gaussian_cvec(rng, 3);
    WeylReduced r = weyl_reduce({{f, CVec::Zero(3)}});
    EXPECT_EQ(r.phase, cplx(1.0));
    EXPECT_EQ((r.amplitude - f).norm(), 0.0);
    r = weyl_reduce({{f, f}});
    EXPECT_NEAR(std::abs(r.phase - 1.0), 0.0, 1e-15);
    EXPECT_LT((r.amplitude - 2.0 * f).norm(), 1e-15);
    r = weyl_reduce({{f, g, CVec(-f - g)}});
    EXPECT_NEAR(std::abs(r.phase), 1.0, 1e-15);
    EXPECT_LT(r.amplitude.norm(), 1e-14);
    EXPECT_NEAR(std::arg(r.phase), im_pairing(f, g), 1e-14);
    EXPECT_EQ(weyl_reduce({}, 4).amplitude.size(), 4);
    EXPECT_THROW(weyl_reduce({}), InvalidArgument);
}

TEST(Weyl, ImPairingMatchesSymplecticForm) {
    Rng rng(32);
    for (int k = 0; k < 20; ++k) {
        const CVec f = gaussian_cvec(rng, 5), g = gaussian_cvec(rng, 5);
        EXPECT_NEAR(im_pairing(f, g), symplectic(real_form(f), real_form(g)), 1e-12);
        EXPECT_NEAR(im_pairing(f, g), -im_pairing(g, f), 1e-12);
    }
}

TEST(Weyl, AssociativityOverAllBracketings) {
    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<CVec> w;
        for (int k = 0; k < 5; ++k) w.push_back(gaussian_cvec(rng, 3));
        const auto all = bracketings(w, 0, w.size());
        ASSERT_EQ(all.size(), 14u);
        const WeylReduced ref = weyl_reduce({w});
        for (const auto& b : all) {
            EXPECT_LT(std::abs(b.phase - ref.phase), 1e-12);
            EXPECT_LT((b.amplitude - ref.amplitude).norm(), 1e-12);
        }
    }
}

TEST(Weyl, VacuumExpectation) {
    EXPECT_EQ(vacuum_expectation({{CVec::Zero(2)}}), cplx(1.0));
    CVec f(2);
    f << 1.0, cplx(0, 1);  // |f|^2 = 2
    EXPECT_NEAR(std::abs(vacuum_expectation({{f}}) - std::exp(-1.0)), 0.0, 1e-15);
    Rng rng(34);
    for (int k = 0; k < 10; ++k) {
        const CVec g = gaussian_cvec(rng, 4);
        EXPECT_NEAR(std::abs(vacuum_expectation({{g, CVec(-g)}}) - 1.0), 0.0, 1e-14);
    }
}

TEST(Fock, ExponentialVectors) {
    const FockVector e0 = exponential_vector(CVec::Zero(3), 12);
    EXPECT_NEAR(std::abs(e0.inner(FockVector::vacuum(3, 12)) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(e0.norm(), 1.0, 1e-15);
    Rng rng(35);
    const CVec f = small_cvec(rng, 3, 1.0);
    const FockVector w = weyl_vacuum_vector(f, 12);
    EXPECT_NEAR(w.norm(), 1.0, 1e-8);
    EXPECT_LE(std::abs(w.norm() - 1.0), truncation_tail(1.0, 12));
    EXPECT_NEAR(std::abs(FockVector::vacuum(3, 12).inner(w) - std::exp(-0.5)), 0.0, 1e-15);
    // <e(g), e(h)> = e^{conj(g) . h}
    const CVec g = small_cvec(rng, 3, 0.6), h = small_cvec(rng, 3, 0.7);
    const cplx exact = std::exp(g.dot(h));
    EXPECT_LT(std::abs(exponential_vector(g, 12).inner(exponential_vector(h, 12)) - exact), 1e-10);
}

TEST(Fock, WeylVectorOverlapsMatchTheVacuumFunctional) {
    Rng rng(36);
    for (int k = 0; k < 10; ++k) {
        const CVec f = small_cvec(rng, 2, 0.8), g = small_cvec(rng, 2, 0.9);
        const cplx lhs = weyl_vacuum_vector(f, 12).inner(weyl_vacuum_vector(g, 12));
        const cplx rhs = vacuum_expectation({{CVec(-f), g}});
        EXPECT_LE(std::abs(lhs - rhs), 2 * truncation_tail(0.9, 12) + 1e-14);
    }
}

TEST(Fock, TensorComponentsAreSymmetric) {
    Rng rng(37);
    const CVec g = gaussian_cvec(rng, 3);
    const FockVector e = exponential_vector(g, 4);
    for (int k = 0; k <= 4; ++k) {
        const CVec t = to_tensor(e, k);
        // g^{(x)k} / sqrt(k!)
        CVec ref = CVec::Ones(1);
        for (int m = 0; m < k; ++m) {
            CVec next(ref.size() * 3);
            for (Eigen::Index a = 0; a < ref.size(); ++a)
                for (Eigen::Index b = 0; b < 3; ++b) next(b * ref.size() + a) = ref(a) * g(b);
            ref = next;
        }
        ref /= std::sqrt(std::tgamma(k + 1.0));
        EXPECT_LT((t - ref).norm(), 1e-12);
    }
    const FockVector v = random_fock(rng, 3, 3);
    const CVec t = to_tensor(v, 3);
    EXPECT_NEAR(t.norm(), v.comp[3].norm(), 1e-12);
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 3; ++j)
            for (Eigen::Index k = 0; k < 3; ++k) {
                const cplx x = t(i + 3 * j + 9 * k);
                EXPECT_LT(std::abs(x - t(j + 3 * i + 9 * k)), 1e-12);
                EXPECT_LT(std::abs(x - t(k + 3 * j + 9 * i)), 1e-12);
            }
}

TEST(Fock, LadderOperatorsSatisfyCCR) {
    Rng rng(38);
    const FockVector v = random_fock(rng, 2, 6);
    const CVec g = gaussian_cvec(rng, 2), h = gaussian_cvec(rng, 2);
    // [a(g), a^*(h)] = conj(g) . h on vectors that stay below the cutoff
    FockVector low = v;
    for (int k = 4; k <= 6; ++k) low.comp[static_cast<std::size_t>(k)].setZero();
    const FockVector comm = annihilation(g, creation(h, low)) - creation(h, annihilation(g, low));
    FockVector expected = low;
    expected *= g.dot(h);
    EXPECT_LT((comm - expected).norm(), 1e-12);
    // a(h) is the adjoint of a^*(h)
    const FockVector u = random_fock(rng, 2, 6);
    EXPECT_LT(std::abs(u.inner(creation(h, v)) - annihilation(h, u).inner(v)), 1e-12);
}

TEST(Fock, WeylPhasesMatchTruncatedOracle) {
    Rng rng(39);
    for (Eigen::Index n = 1; n <= 4; ++n) {
        const FockVector omega = FockVector::vacuum(n, 12);
        for (int trial = 0; trial < 3; ++trial) {
            const CVec f = small_cvec(rng, n, 0.5), g = small_cvec(rng, n, 0.4);
            // W(f) W(g) W(-f-g) Omega = phase Omega
            const FockVector chain = weyl_apply(f, weyl_apply(g, weyl_apply(CVec(-f - g), omega)));
            const WeylReduced r = weyl_reduce({{f, g, CVec(-f - g)}});
            EXPECT_LT(std::abs(omega.inner(chain) - r.phase), 1e-8) << "n " << n;
            // W(f) Omega from the series agrees with the closed form
            // the truncated generator only reproduces exp up to the N-particle tail
            const double tail = 2 * truncation_tail(f.norm() + g.norm(), 12) + 1e-12;
            EXPECT_LT((weyl_apply(f, omega) - weyl_vacuum_vector(f, 12)).norm(), tail);
            // W(f) W(g) Omega = e^{i Im <f, g>} W(f + g) Omega
            FockVector rhs = weyl_vacuum_vector(CVec(f + g), 12);
            rhs *= std::polar(1.0, im_pairing(f, g));
            EXPECT_LT((weyl_apply(f, weyl_apply(g, omega)) - rhs).norm(), tail);
        }
    }
}

TEST(Gamma, IdentityAndExponentialVectors) {
    Rng rng(40);
    const FockVector v = random_fock(rng, 3, 5);
    EXPECT_LT((gamma_apply(OneParticleOp::linear(CMat::Identity(3, 3)), v) - v).norm(), 1e-14);
    const CMat a = CMat::Random(3, 3);
    const CVec g = gaussian_cvec(rng, 3);
    EXPECT_LT((gamma_apply(OneParticleOp::linear(a), exponential_vector(g, 8)) - exponential_vector(CVec(a * g), 8)).norm(),
              1e-10);
    const OneParticleOp anti = OneParticleOp::anti(a);
    EXPECT_LT((gamma_apply(anti, exponential_vector(g, 8)) - exponential_vector(anti(g), 8)).norm(), 1e-10);
}

TEST(Gamma, Functoriality) {
    Rng rng(41);
    for (int trial = 0; trial < 5; ++trial) {
        const FockVector v = random_fock(rng, 3, 6), u = random_fock(rng, 3, 6);
        const CMat a = random_unitary(rng, 3) * 0.9, b = CMat::Random(3, 3);
        const OneParticleOp A = OneParticleOp::linear(a), B = OneParticleOp::linear(b);
        EXPECT_LT((gamma_apply(OneParticleOp::linear(a * b), v) - gamma_apply(A, gamma_apply(B, v))).norm(), 1e-10);
        // <u, Gamma(A) v> = <Gamma(A^*) u, v>
        const cplx lhs = u.inner(gamma_apply(A, v));
        const cplx rhs = gamma_apply(OneParticleOp::linear(a.adjoint()), u).inner(v);
        EXPECT_LT(std::abs(lhs - rhs), 1e-10);
        // antilinear composition: (L1 C)(L2 C) = L1 conj(L2)
        const OneParticleOp C1 = OneParticleOp::anti(a), C2 = OneParticleOp::anti(b);
        EXPECT_LT((gamma_apply(OneParticleOp::linear(a * b.conjugate()), v) - gamma_apply(C1, gamma_apply(C2, v))).norm(), 1e-10);
    }
}

TEST(Gamma, OperatorFromRealForm) {
    Rng rng(42);
    const CMat a = CMat::Random(3, 3);
    const OneParticleOp lin = OneParticleOp::from_real(real_form(a));
    EXPECT_FALSE(lin.antilinear);
    EXPECT_LT((lin.L - a).norm(), 1e-14);
    const OneParticleOp anti = OneParticleOp::from_real(Mat(real_form(a) * conj_matrix(3)));
    EXPECT_TRUE(anti.antilinear);
    EXPECT_LT((anti.L - a).norm(), 1e-14);
    EXPECT_THROW(OneParticleOp::from_real(Mat(real_form(a) + real_form(a) * conj_matrix(3))), InvalidArgument);
}

TEST(Tomita, SecondQuantizedOnRealSlice) {
    const RealSubspace h = real_slice(3);
    const TomitaFockCheck zero = second_quantized_tomita_check(h, CVec::Zero(3), 12);
    EXPECT_EQ(zero.residual, 0.0);
    CVec f(3);
    f << 0.6, 0.0, 0.8;
    const TomitaFockCheck r = second_quantized_tomita_check(h, f, 12);
    EXPECT_LT(r.residual, 1e-8);
    EXPECT_TRUE(r.pass);
    CVec off = f;
    off(1) = cplx(0, 0.3);
    EXPECT_THROW(second_quantized_tomita_check(h, off, 12), InvalidArgument);
}

TEST(Tomita, SecondQuantizedOnRandomStandardSubspaces) {
    Rng rng(43);
    for (int trial = 0; trial < 5; ++trial) {
        const RealSubspace h = make_subspace(gaussian_matrix(rng, 6, 3));
        const Vec x = h.basis * Vec::Random(3);
        const CVec f = complex_form(Vec(0.8 * x / x.norm()));
        const TomitaFockCheck r = second_quantized_tomita_check(h, f, 12);
        EXPECT_TRUE(r.pass) << r.residual;
    }
}

TEST(Tomita, SecondQuantizedOnMassiveWedge) {
    RepSpec rs;
    rs.kind = ModelKind::massive;
    rs.n = 4;
    const NetModel net(build_rep(rs));
    const RealSubspace h = net.wedge_subspace(regions::wedge_right());
    for (int c = 0; c < h.dim(); ++c) {
        const CVec f = complex_form(Vec(h.basis.col(c)));
        const TomitaFockCheck r = second_quantized_tomita_check(h, f, 12);
        EXPECT_LT(r.residual, net.budget().eval(0.0) + r.tail_bound);
    }
}

TEST(Fock, GramMatrixIsPositive) {
    Rng rng(44);
    std::vector<CVec> fs;
    for (int k = 0; k < 12; ++k) fs.push_back(small_cvec(rng, 3, uniform(rng, 0.1, 1.2)));
    CMat g(12, 12);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) g(i, j) = vacuum_expectation({{CVec(-fs[static_cast<std::size_t>(i)]), fs[static_cast<std::size_t>(j)]}});
    EXPECT_LT((g - g.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
    Eigen::SelfAdjointEigenSolver<CMat> es(g);
    EXPECT_GE(es.eigenvalues().minCoeff(), -truncation_tail(1.2, 12));
    // same Gram matrix from truncated vectors
    CMat gt(12, 12);
    std::vector<FockVector> ws;
    for (const auto& f : fs) ws.push_back(weyl_vacuum_vector(f, 12));
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) gt(i, j) = ws[static_cast<std::size_t>(i)].inner(ws[static_cast<std::size_t>(j)]);
    EXPECT_LT((g - gt).cwiseAbs().maxCoeff(), 2 * truncation_tail(1.2, 12));
}

TEST(Locality, ChiralSumReflectedDoubleCones) {
    RepSpec rs;
    rs.n = 128;
    rs.h = 0.25;
    Budget b;
    b.tau_loc = 1e-2;
    const NetModel net(build_rep(rs), b);
    // touching across the edge of W_R: the anchors are complementary wedges
    const Region o1 = regions::double_cone(-1, 0, 0, 1), o2 = regions::double_cone(0, 1, -1, 0);
    const LocalityReport r = locality_commutation_check(net, o1, o2);
    EXPECT_GT(r.dim1, 0);
    EXPECT_GT(r.dim2, 0);
    EXPECT_LT(r.max_im, 1e-9);
    EXPECT_TRUE(r.pass);
    EXPECT_LT(locality_commutation_check(net, o2, o1).max_im, 1e-9);
    // across a gap the lattice pairing is only controlled by the leakage budget
    const LocalityReport far =
        locality_commutation_check(net, regions::double_cone(-2, -1, 1, 2), regions::double_cone(1, 2, -2, -1));
    EXPECT_GT(far.leakage, far.max_im);
    EXPECT_TRUE(far.pass) << far.max_im << " budget " << far.budget;
    EXPECT_THROW(locality_commutation_check(net, regions::d0(), regions::double_cone(0.5, 1.5, 0.5, 1.5)), InvalidArgument);
}

TEST(Locality, MassiveDoubleConesAndWedges) {
    RepSpec rs;
    rs.kind = ModelKind::massive;
    rs.n = 64;
    rs.h = 0.25;
    const NetModel net(build_rep(rs));
    const LocalityReport r =
        locality_commutation_check(net, regions::double_cone(-1.5, -0.5, 0.5, 1.5), regions::double_cone(0.5, 1.5, -1.5, -0.5));
    EXPECT_GT(r.dim1, 0);
    EXPECT_LT(r.max_im, 1e-8);
    const LocalityReport w = locality_commutation_check(net, regions::wedge_right(), regions::wedge_left());
    EXPECT_LT(w.max_im, 1e-8);
    EXPECT_TRUE(w.pass);
}
