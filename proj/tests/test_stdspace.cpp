#include "modnet/stdspace.hpp"

#include <gtest/gtest.h>

using namespace modnet;

namespace {

RealSubspace random_subspace(Rng& rng, Eigen::Index n, Eigen::Index k) { return make_subspace(gaussian_matrix(rng, 2 * n, k)); }

// Independent construction of admissible modular data: J = U (swap o conj) U^*, Delta = U diag(d, 1/d) U^*.
struct PlantedModular {
    Mat J, delta;
    ModularData spectral;  // same data, handed over in spectral form
};

PlantedModular planted(Rng& rng, Eigen::Index pairs, double max_log) {
    const Eigen::Index n = 2 * pairs;
    const CMat u = random_unitary(rng, n);
    CMat c0 = CMat::Zero(n, n);  // swap, to be composed with conjugation
    CMat d = CMat::Zero(n, n);
    Vec logs(2 * n);
    for (Eigen::Index k = 0; k < pairs; ++k) {
        c0(2 * k, 2 * k + 1) = c0(2 * k + 1, 2 * k) = 1.0;
        const double l = std::exp(uniform(rng, -max_log, max_log));
        d(2 * k, 2 * k) = l;
        d(2 * k + 1, 2 * k + 1) = 1.0 / l;
        logs(2 * k) = logs(n + 2 * k) = std::log(l);
        logs(2 * k + 1) = logs(n + 2 * k + 1) = -std::log(l);
    }
    // U C0 conj U^* = U C0 conj(U)^T conj in real form.
    const Mat j = real_form(CMat(u * c0 * u.conjugate().transpose().conjugate())) * conj_matrix(n);
    const Mat delta = real_form(CMat(u * d * u.adjoint()));
    return {j, delta, {j, real_form(u), logs}};
}

// Tomita operator straight from the definition: S (x + i y) = x - i y for x, y in H.
Mat tomita_oracle(const RealSubspace& h) {
    const Eigen::Index m = h.basis.rows();
    Mat in(m, m), out(m, m);
    in << h.basis, apply_ji(h.basis);
    out << h.basis, -apply_ji(h.basis);
    return out * in.inverse();
}

}  // namespace

TEST(MakeSubspace, Examples) {
    EXPECT_EQ(make_subspace(Vectors{CVec::Zero(3)}, 3).dim(), 0);
    CVec e1 = CVec::Zero(2);
    e1(0) = 1;
    const RealSubspace ce1 = make_subspace(Vectors{e1, cplx(0, 1) * e1}, 2);
    EXPECT_EQ(ce1.dim(), 2);
    Rng rng(1);
    std::vector<CVec> many;
    for (int k = 0; k < 50; ++k) many.push_back(gaussian_cvec(rng, 10));
    const RealSubspace h = make_subspace(many, 10);
    EXPECT_EQ(h.dim(), 20);
    EXPECT_LT((h.basis.transpose() * h.basis - Mat::Identity(20, 20)).norm(), 1e-10);
}

TEST(SymplecticComplement, Examples) {
    EXPECT_EQ(symplectic_complement(whole_space(4)).dim(), 0);
    EXPECT_LT(distance(symplectic_complement(real_slice(5)), real_slice(5)), 1e-14);
}

TEST(SymplecticComplement, ImaginaryPartVanishesAndDoubleComplement) {
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(uniform(rng, 0, 6));
        const Eigen::Index k = static_cast<Eigen::Index>(uniform(rng, 0, 2 * n + 1));
        const RealSubspace h = random_subspace(rng, n, k);
        const RealSubspace hc = symplectic_complement(h);
        EXPECT_EQ(hc.dim(), 2 * n - h.dim());
        EXPECT_LT(distance(symplectic_complement(hc), h), 1e-10);
        // Im <xi, eta> computed on complex vectors.
        const CMat a = complex_columns(hc.basis), b = complex_columns(h.basis);
        if (a.cols() && b.cols()) EXPECT_LT((a.adjoint() * b).imag().cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Standardness, Examples) {
    const Standardness rs = standardness(real_slice(3));
    EXPECT_TRUE(rs.cyclic && rs.separating);
    EXPECT_NEAR(rs.minimal_angle, kPi / 2, 1e-12);

    CVec e1 = CVec::Zero(2);
    e1(0) = 1;
    const Standardness ce = standardness(make_subspace(Vectors{e1, cplx(0, 1) * e1}, 2));
    EXPECT_FALSE(ce.cyclic);
    EXPECT_FALSE(ce.separating);

    CVec v1(2), v2(2);
    v1 << 1, 2;
    v2 << cplx(0, 1), cplx(0, -2);
    EXPECT_TRUE(standardness(make_subspace(Vectors{v1, v2}, 2)).standard());
}

TEST(ModularData, RealSliceIsConjugation) {
    const ModularData md = modular_data(real_slice(4));
    EXPECT_LT((md.J - conj_matrix(4)).norm(), 1e-13);
    EXPECT_LT((md.delta() - Mat::Identity(8, 8)).norm(), 1e-13);
    EXPECT_LT((md.tomita() - conj_matrix(4)).norm(), 1e-13);
}

TEST(ModularData, EveryLineInC1HasTrivialDelta) {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        CVec z(1);
        z(0) = std::polar(uniform(rng, 0.1, 3), uniform(rng, -kPi, kPi));
        const ModularData md = modular_data(make_subspace(Vectors{z}, 1));
        EXPECT_LT((md.delta() - Mat::Identity(2, 2)).norm(), 1e-12);
    }
}

TEST(ModularData, HandSolvedC2Example) {
    CVec v1(2), v2(2);
    v1 << 1, 2;
    v2 << cplx(0, 1), cplx(0, -2);
    const RealSubspace h = make_subspace(Vectors{v1, v2}, 2);
    const ModularData md = modular_data(h);
    CMat d = CMat::Zero(2, 2);
    d(0, 0) = 4;
    d(1, 1) = 0.25;
    CMat sw = CMat::Zero(2, 2);
    sw(0, 1) = sw(1, 0) = 1;
    EXPECT_LT((md.delta() - real_form(d)).norm(), 1e-12);
    EXPECT_LT((md.J - real_form(sw) * conj_matrix(2)).norm(), 1e-12);
    // Backwards: the fixed points of J Delta^{1/2} are {(w, 2 conj w)}.
    const RealSubspace back = subspace_from_modular(ModularData::from_operators(real_form(sw) * conj_matrix(2), real_form(d)));
    EXPECT_LT(distance(back, h), 1e-12);
}

TEST(ModularData, RejectsNonStandardNamingPredicate) {
    CVec e1 = CVec::Zero(2);
    e1(0) = 1;
    try {
        modular_data(make_subspace(Vectors{e1, cplx(0, 1) * e1}, 2));
        FAIL();
    } catch (const NonStandard& e) {
        EXPECT_EQ(e.predicate, "cyclic");
    }
    Rng rng(4);
    // Cyclic but not separating: too many dimensions.
    try {
        modular_data(random_subspace(rng, 3, 4));
        FAIL();
    } catch (const NonStandard& e) {
        EXPECT_EQ(e.predicate, "separating");
    }
}

TEST(ModularData, TomitaContractsOnRandomStandardSubspaces) {
    Rng rng(5);
    for (int i = 0; i < 60; ++i) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(uniform(rng, 0, 7));
        const RealSubspace h = random_subspace(rng, n, n);
        const ModularData md = modular_data(h);
        const Mat s = md.tomita();
        const Mat id = Mat::Identity(2 * n, 2 * n);
        EXPECT_LT(check_invariants(md).worst(), 1e-10);
        EXPECT_LT((s - tomita_oracle(h)).norm() / s.norm(), 1e-9);
        EXPECT_LT((s * s - id).norm(), 1e-9 * s.norm() * s.norm());
        EXPECT_LT((s * h.basis - h.basis).norm(), 1e-10 * s.norm());
        // S_{H'} is the adjoint of S_H.
        const RealSubspace hc = symplectic_complement(h);
        EXPECT_LT((modular_data(hc).tomita() - s.transpose()).norm() / s.norm(), 1e-9);
        EXPECT_LT(distance(image(md.J, h), hc), 1e-9);
        for (double t : {0.1, -0.1, 1.0, -1.0, 5.0, -5.0})
            EXPECT_LT(subspace_distance(Mat(md.delta_it(t) * h.basis), h.basis), 1e-8);
        // Antilinearity of S, linearity of Delta^{it}.
        EXPECT_LT((s * ji_matrix(n) + ji_matrix(n) * s).norm() / s.norm(), 1e-12);
        EXPECT_LT((md.delta_it(0.7) * ji_matrix(n) - ji_matrix(n) * md.delta_it(0.7)).norm(), 1e-10);
    }
}

TEST(ModularData, DenseOperatorsForModerateSpectra) {
    Rng rng(16);
    for (int i = 0; i < 20; ++i) {
        const PlantedModular pm = planted(rng, 3, 2.0);
        const ModularData given = ModularData::from_operators(pm.J, pm.delta);
        EXPECT_LT(check_invariants(given).worst(), 1e-11);
        const RealSubspace h = subspace_from_modular(given);
        EXPECT_LT(distance(h, subspace_from_modular(pm.spectral)), 1e-10);
        EXPECT_LT(opnorm(Mat(modular_data(h).delta() - pm.delta)), 1e-10);
    }
}

TEST(ModularData, RoundTripOnPlantedIllConditionedData) {
    Rng rng(6);
    for (double max_log : {1.0, 8.0, 20.0}) {
        for (int i = 0; i < 10; ++i) {
            const PlantedModular pm = planted(rng, 3, max_log);
            const ModularData& given = pm.spectral;
            const RealSubspace h = subspace_from_modular(given);
            EXPECT_EQ(h.dim(), 6);
            EXPECT_TRUE(standardness(h).standard());
            const ModularData back = modular_data(h);
            const double lmax = std::exp(max_log);
            EXPECT_LT(opnorm(Mat(back.J - pm.J)), 1e-13 * lmax);
            for (double t : {0.05, 0.5, 2.0})
                EXPECT_LT(opnorm(Mat(back.delta_it(t) - given.delta_it(t))), 1e-13 * lmax);
            EXPECT_LT((back.tomita() - given.tomita()).norm() / given.tomita().norm(), 1e-13 * lmax);
            // Spectral and kernel-of-(S-1) extractions agree while the gap is healthy.
            const FixedPointResult direct = subspace_from_modular_detail(given, FixedPointMethod::direct);
            if (!direct.warning) EXPECT_LT(distance(direct.subspace, h), 1e-13 * lmax);
        }
    }
}

TEST(SubspaceFromModular, ConjugationGivesRealSlice) {
    const ModularData md{conj_matrix(3), Mat::Identity(6, 6), Vec::Zero(6)};
    EXPECT_LT(distance(subspace_from_modular(md), real_slice(3)), 1e-14);
    EXPECT_LT(distance(subspace_from_modular_detail(md, FixedPointMethod::direct).subspace, real_slice(3)), 1e-14);
}

TEST(SubspaceFromModular, RejectsBrokenData) {
    const Mat bad = Mat::Identity(4, 4);  // linear, not antilinear
    EXPECT_THROW(validate(ModularData::from_operators(bad, Mat::Identity(4, 4))), InvalidArgument);
    EXPECT_THROW(ModularData::from_operators(conj_matrix(2), -Mat::Identity(4, 4)), InvalidArgument);
}

TEST(Intersect, Examples) {
    Mat e12 = Mat::Zero(4, 2), e23 = Mat::Zero(4, 2), e2 = Mat::Zero(4, 1);
    e12(0, 0) = e12(1, 1) = 1;
    e23(1, 0) = e23(2, 1) = 1;
    e2(1, 0) = 1;
    const RealSubspace a{e12}, b{e23};
    EXPECT_LT(subspace_distance(intersect_exact({a, b}).basis, e2), 1e-14);
    EXPECT_LT(subspace_distance(intersect_halperin({a, b}).basis, e2), 1e-12);
    Rng rng(7);
    const RealSubspace h = random_subspace(rng, 4, 5);
    EXPECT_LT(distance(intersect_exact({h, h}), h), 1e-12);
    EXPECT_LT(distance(intersect_halperin({h, h}), h), 1e-12);
}

TEST(Intersect, HalperinAgreesWithExactOnRandomPairs) {
    Rng rng(8);
    const Eigen::Index m = 16;  // C^8
    for (int i = 0; i < 100; ++i) {
        const Eigen::Index c = 1 + static_cast<Eigen::Index>(uniform(rng, 0, 3));
        const Eigen::Index ea = 1 + static_cast<Eigen::Index>(uniform(rng, 0, 4));
        const Eigen::Index eb = 1 + static_cast<Eigen::Index>(uniform(rng, 0, 4));
        const Mat common = gaussian_matrix(rng, m, c);
        Mat ba(m, c + ea), bb(m, c + eb);
        ba << common, gaussian_matrix(rng, m, ea);
        bb << common, gaussian_matrix(rng, m, eb);
        const RealSubspace ha = make_subspace(ba), hb = make_subspace(bb);
        const RealSubspace ex = intersect_exact({ha, hb});
        EXPECT_EQ(ex.dim(), c);
        EXPECT_LT(distance(ex, make_subspace(common)), 1e-10);
        const HalperinResult hr = intersect_halperin_detail({ha, hb}, 5000, 1e-9);
        EXPECT_TRUE(hr.converged);
        EXPECT_LT(distance(hr.subspace, ex), 1e-7);
    }
}

TEST(Intersect, HalperinReportsNonConvergence) {
    // Two lines at a tiny angle: the product of projections contracts very slowly.
    Mat a = Mat::Zero(4, 1), b = Mat::Zero(4, 1);
    a(0, 0) = 1;
    b(0, 0) = std::cos(1e-3);
    b(1, 0) = std::sin(1e-3);
    try {
        intersect_halperin({RealSubspace{a}, RealSubspace{b}}, 50, 1e-12);
        FAIL();
    } catch (const ConvergenceError& e) {
        EXPECT_EQ(e.iterations, 50);
        EXPECT_GT(e.residual, 1e-12);
    }
}

TEST(Intersect, NearIntersectionStaysInsideAnchor) {
    Rng rng(9);
    const RealSubspace a = random_subspace(rng, 4, 4);
    Mat tilted = a.basis.leftCols(2) + 1e-5 * gaussian_matrix(rng, 8, 2);
    Mat bcols(8, 4);
    bcols << tilted, gaussian_matrix(rng, 8, 2);
    const RealSubspace b = make_subspace(bcols);
    EXPECT_EQ(intersect_exact({a, b}).dim(), 0);
    const RealSubspace near = intersect_near({a, b}, 1e-3, 0);
    EXPECT_EQ(near.dim(), 2);
    EXPECT_LT(inclusion_defect(near, a), 1e-14);
    EXPECT_LT(inclusion_defect(near, b), 1e-3);
}

TEST(SumClosure, ExamplesAndDeMorgan) {
    Rng rng(10);
    const RealSubspace h = random_subspace(rng, 4, 3);
    EXPECT_LT(distance(sum_closure({h, zero_subspace(4)}), h), 1e-12);
    const RealSubspace h1{h.basis.leftCols(1)}, h2{h.basis.leftCols(2)};
    EXPECT_LT(distance(sum_closure({h1, h2, h}), h), 1e-12);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(uniform(rng, 0, 5));
        const RealSubspace a = random_subspace(rng, n, static_cast<Eigen::Index>(uniform(rng, 0, n + 1)));
        const RealSubspace b = random_subspace(rng, n, static_cast<Eigen::Index>(uniform(rng, 0, n + 1)));
        const RealSubspace lhs = symplectic_complement(sum_closure({a, b}));
        const RealSubspace rhs = intersect_exact({symplectic_complement(a), symplectic_complement(b)});
        EXPECT_LT(distance(lhs, rhs), 1e-8);
        const RealSubspace lhs2 = symplectic_complement(intersect_exact({a, b}));
        const RealSubspace rhs2 = sum_closure({symplectic_complement(a), symplectic_complement(b)});
        EXPECT_LT(distance(lhs2, rhs2), 1e-8);
    }
}

TEST(Takesaki, TrivialAndSearch) {
    Rng rng(11);
    const RealSubspace h = random_subspace(rng, 4, 4);
    const TakesakiReport same = takesaki_check(h, h);
    EXPECT_TRUE(same.invariant && same.equal);

    // Modular-flow invariant proper subspaces exist, but none of them is standard.
    const ModularData md = modular_data(h);
    int disproofs = 0;
    for (int i = 0; i < 1000; ++i) {
        const Eigen::Index k = 1 + static_cast<Eigen::Index>(uniform(rng, 0, 3));
        const RealSubspace kk = make_subspace(Mat(h.basis * gaussian_matrix(rng, 4, k)));
        const TakesakiReport r = takesaki_check(kk, h);
        if (r.invariant && !r.equal && standardness(kk).standard()) ++disproofs;
        EXPECT_FALSE(r.equal);
    }
    EXPECT_EQ(disproofs, 0);

    EXPECT_THROW(takesaki_check(random_subspace(rng, 4, 2), h), InvalidArgument);
}

TEST(Takesaki, InvariantSpectralPieceIsNotStandard) {
    Rng rng(12);
    const RealSubspace h = random_subspace(rng, 4, 4);
    const ModularData md = modular_data(h);
    // Fixed vectors built from one conjugate pair of eigenvalues span a flow-invariant piece of H.
    Eigen::Index top = 0;
    md.log_lambda.maxCoeff(&top);
    const double l4 = std::exp(0.25 * md.log_lambda(top));
    const Vec q = md.Q.col(top);
    Mat piece(8, 2);
    piece.col(0) = q / l4 + l4 * (md.J * q);
    piece.col(1) = apply_ji(q) / l4 + l4 * (md.J * apply_ji(q));
    const RealSubspace k = make_subspace(piece);
    ASSERT_EQ(k.dim(), 2);
    EXPECT_LT(inclusion_defect(k, h), 1e-10);
    const TakesakiReport r = takesaki_check(k, h);
    EXPECT_TRUE(r.invariant);
    EXPECT_FALSE(r.equal);
    EXPECT_FALSE(standardness(k).cyclic);
}

TEST(Symmetry, IdentityFlowAndGauge) {
    Rng rng(13);
    const RealSubspace h = random_subspace(rng, 3, 3);
    const SymmetryReport id = symmetry_commutation_check(h, Mat::Identity(6, 6));
    EXPECT_LT(std::max({id.s_residual, id.delta_residual, id.j_residual}), 1e-14);
    const ModularData md = modular_data(h);
    const SymmetryReport fl = symmetry_commutation_check(h, md.delta_it(0.37));
    EXPECT_LT(std::max({fl.s_residual, fl.delta_residual, fl.j_residual}), 1e-9);

    // Two copies of a subspace, rotated into each other by a real charge rotation.
    const Eigen::Index n = 3;
    Mat b2 = Mat::Zero(4 * n, 2 * n);
    // Real form of C^n (+) C^n: [Re1; Re2; Im1; Im2].
    for (Eigen::Index c = 0; c < n; ++c) {
        b2.block(0, c, n, 1) = h.basis.block(0, c, n, 1);
        b2.block(2 * n, c, n, 1) = h.basis.block(n, c, n, 1);
        b2.block(n, n + c, n, 1) = h.basis.block(0, c, n, 1);
        b2.block(3 * n, n + c, n, 1) = h.basis.block(n, c, n, 1);
    }
    const RealSubspace hh{b2};
    for (double s : {0.3, 1.1, -2.5}) {
        CMat rot = CMat::Zero(2 * n, 2 * n);
        rot.topLeftCorner(n, n) = std::cos(s) * CMat::Identity(n, n);
        rot.bottomRightCorner(n, n) = std::cos(s) * CMat::Identity(n, n);
        rot.topRightCorner(n, n) = -std::sin(s) * CMat::Identity(n, n);
        rot.bottomLeftCorner(n, n) = std::sin(s) * CMat::Identity(n, n);
        const SymmetryReport g = symmetry_commutation_check(hh, real_form(rot));
        EXPECT_LT(std::max({g.s_residual, g.delta_residual, g.j_residual}), 1e-9);
    }
    // A non-symmetry is rejected.
    EXPECT_THROW(symmetry_commutation_check(h, real_form(random_unitary(rng, 3))), InvalidArgument);
}

TEST(Borchers, ZeroDilationIsTrivial) {
    Rng rng(14);
    const RealSubspace h = random_subspace(rng, 3, 3);
    const ModularData md = modular_data(h);
    // Any one-parameter group commuting with H's modular flow satisfies the s = 0 relation.
    auto u = [&](double t) { return md.delta_it(t); };
    const BorchersReport r = borchers_check(h, u, 1, {0.0}, {0.0, 1.0, 2.0});
    EXPECT_TRUE(r.precondition);
    EXPECT_LT(r.dilation_residual, 1e-13);
}

TEST(Hsmi, EqualPairIsTrivial) {
    Rng rng(15);
    const RealSubspace h = random_subspace(rng, 3, 3);
    const HsmiReport r = hsmi_check(h, h, 1, {0.0, 0.5, 1.0}, {0.0});
    EXPECT_TRUE(r.inclusion);
    EXPECT_LT(r.inclusion_defect, 1e-10);
}
