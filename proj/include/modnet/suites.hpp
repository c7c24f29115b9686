#pragma once

// Verification batteries shared by the command-line runner and the acceptance binary.
// Each suite returns named checks (residual against budget) plus optional study tables.

#include "modnet/fock.hpp"

#include <functional>
#include <string>
#include <vector>

namespace modnet {

struct Check {
    std::string name;
    double residual = 0;
    double budget = 0;
    std::string formula;  // how the budget was obtained
    bool pass = false;
    bool required = true;
    std::string note;
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct SuiteResult {
    std::string command;
    std::vector<Check> checks;
    std::vector<Table> tables;

    Check& add(std::string name, double residual, double budget, std::string formula, std::string note = {}) {
        Check c{std::move(name), residual, budget, std::move(formula), false, true, std::move(note)};
        c.pass = std::isfinite(residual) && residual < budget;
        checks.push_back(std::move(c));
        return checks.back();
    }
    // Boolean outcomes are stored as residual 0 (holds) or 1 (violated) against budget 0.5.
    Check& add_flag(std::string name, bool holds, std::string note = {}) {
        return add(std::move(name), holds ? 0.0 : 1.0, 0.5, "boolean", std::move(note));
    }
    const Check& at(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return c;
        throw InvalidArgument("no check named " + name);
    }
    bool pass() const {
        for (const auto& c : checks)
            if (c.required && !c.pass) return false;
        return true;
    }
    double max_residual() const {
        double r = 0;
        for (const auto& c : checks) r = std::max(r, c.residual);
        return r;
    }
};

inline constexpr const char* kFixedTol = "fixed tolerance";
inline constexpr const char* kModelBudget = Budget::formula;

// ---- mobius ------------------------------------------------------------------------------

struct MobiusSuiteConfig {
    int samples = 1000;         // admissible (t, s) per commutation pair
    int family_samples = 200;   // per ordered pair of the three interval families
    int group_samples = 10000;  // random compositions for det and projection checks
    double range = 2.0;         // |t|, |s| sampling range for the commutation pairs
    double tol = 1e-11;
};

namespace detail {
inline CoverElement random_cover(Rng& rng, int letters) {
    CoverElement g = rotation(0.0);
    for (int k = 0; k < letters; ++k) {
        const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
        const double x = uniform(rng, -2.0, 2.0);
        g = compose(g, one_param(static_cast<OneParam>(kind), x));
    }
    return g;
}
}  // namespace detail

inline SuiteResult mobius_suite(const MobiusSuiteConfig& cfg, Rng& rng) {
    SuiteResult out;
    out.command = "verify-mobius";
    for (CommutationPair pair : {CommutationPair::halfline_shifted, CommutationPair::halfline_bounded}) {
        double worst = 0;
        int counted = 0, rejected = 0;
        while (counted < cfg.samples) {
            const double t = uniform(rng, -cfg.range, cfg.range), s = uniform(rng, -cfg.range, cfg.range);
            try {
                worst = std::max(worst, commutation_residual(t, s, pair));
                ++counted;
            } catch (const Inadmissible&) {
                ++rejected;
            }
        }
        const std::string name = pair == CommutationPair::halfline_shifted ? "mobius.commutation.halfline_shifted"
                                                                           : "mobius.commutation.halfline_bounded";
        out.add(name, worst, cfg.tol, kFixedTol,
                std::to_string(counted) + " admissible samples, " + std::to_string(rejected) + " inadmissible skipped");
    }
    {
        const double l2 = std::log(2.0);
        const Interval rplus = Interval::line(0.0, kInf), unit = Interval::line(0.0, 1.0);
        const MobiusElement lhs = interval_dilation(rplus, l2).base * interval_dilation(unit, l2).base;
        const MobiusElement rhs = interval_dilation(unit, std::log(3.0)).base * interval_dilation(rplus, std::log(4.0 / 3.0)).base;
        out.add("mobius.commutation.ln2_example", psl_distance(lhs, rhs), 1e-12, kFixedTol);
    }
    {
        const Interval i1 = Interval::line(-kInf, 1.0), i2 = Interval::line(0.0, 1.0), i3 = Interval::line(0.0, kInf);
        const std::vector<std::pair<Interval, Interval>> pairs = {{i1, i2}, {i2, i1}, {i2, i3}, {i3, i2}, {i3, i1}, {i1, i3}};
        double worst = 0;
        int counted = 0;
        for (const auto& [a, b] : pairs)
            for (int k = 0; k < cfg.family_samples; ++k) {
                const double t = uniform(rng, -0.7, 0.7), s = uniform(rng, -0.7, 0.7);
                try {
                    worst = std::max(worst, reorder_residual(a, b, t, s));
                    ++counted;
                } catch (const Inadmissible&) {
                }
            }
        out.add("mobius.three_interval_families", worst, cfg.tol, kFixedTol, std::to_string(counted) + " reorderings");
    }
    {
        double det = 0, hom = 0;
        for (int k = 0; k < cfg.group_samples; ++k) {
            const CoverElement g = detail::random_cover(rng, 3), h = detail::random_cover(rng, 3);
            const CoverElement gh = compose(g, h);
            det = std::max(det, std::abs(gh.base.det() - 1.0));
            const Eigen::Matrix2d prod = g.base.matrix() * h.base.matrix();
            const MobiusElement ref = MobiusElement::from(prod(0, 0), prod(0, 1), prod(1, 0), prod(1, 1));
            hom = std::max(hom, psl_distance(gh.base, ref) / std::max(1.0, prod.norm()));
        }
        out.add("mobius.determinant", det, 1e-12, kFixedTol);
        out.add("mobius.projection_homomorphism", hom, 1e-12, kFixedTol, "relative to the product's Frobenius norm");
    }
    {
        double add = 0;
        for (int k = 0; k < 100; ++k) {
            const double s = uniform(rng, -10, 10), t = uniform(rng, -10, 10);
            add = std::max(add, std::abs(compose(rotation(s), rotation(t)).phi - (s + t)));
        }
        out.add("mobius.rotation_additivity", add, 1e-12, kFixedTol);
        const GElement one = to_G(rotation(0.0), rotation(0.0));
        out.add_flag("mobius.quotient", approx_equal(to_G(rotation(-kTwoPi), rotation(kTwoPi)), one));
    }
    return out;
}

// ---- standard subspaces -----------------------------------------------------------------

struct StdspaceSuiteConfig {
    int count = 200;
    Eigen::Index n = 8;  // complex dimension
    std::vector<double> ts{0.1, -0.1, 1.0, -1.0, 5.0, -5.0};
    double tol = 1e-8;
};

inline SuiteResult stdspace_suite(const StdspaceSuiteConfig& cfg, Rng& rng) {
    require(cfg.count > 0 && cfg.n > 0, "stdspace suite needs a positive count and dimension");
    SuiteResult out;
    out.command = "verify-stdspace";
    double jdj = 0, adj = 0, jh = 0, flow = 0, bicomm = 0, angle = kPi;
    int nonstandard = 0;
    const Eigen::Index n = cfg.n;
    for (int k = 0; k < cfg.count; ++k) {
        const RealSubspace h = make_subspace(gaussian_matrix(rng, 2 * n, n));
        const Standardness st = standardness(h);
        if (!st.standard()) {
            ++nonstandard;
            continue;
        }
        angle = std::min(angle, st.minimal_angle);
        const ModularData md = modular_data(h);
        jdj = std::max(jdj, check_invariants(md).j_delta_j);
        const Mat s = md.tomita();
        const RealSubspace hc = symplectic_complement(h);
        adj = std::max(adj, opnorm(Mat(modular_data(hc).tomita() - s.transpose())) / opnorm(s));
        jh = std::max(jh, distance(image(md.J, h), hc));
        for (double t : cfg.ts) flow = std::max(flow, subspace_distance(Mat(md.delta_it(t) * h.basis), h.basis));
        bicomm = std::max(bicomm, distance(symplectic_complement(hc), h));
    }
    const std::string rel = "relative to the larger of |Delta|, |Delta^-1|";
    out.add("stdspace.j_delta_j", jdj, cfg.tol, kFixedTol, rel);
    out.add("stdspace.tomita_of_complement", adj, cfg.tol, kFixedTol, "|S_{H'} - S^*| / |S|");
    out.add("stdspace.j_maps_to_complement", jh, cfg.tol, kFixedTol);
    out.add("stdspace.modular_flow_invariance", flow, cfg.tol, kFixedTol);
    out.add("stdspace.double_complement", bicomm, cfg.tol, kFixedTol);
    out.add_flag("stdspace.samples_standard", nonstandard == 0,
                 std::to_string(nonstandard) + " non-standard samples; smallest angle " + std::to_string(angle));
    return out;
}

struct HalperinSuiteConfig {
    int pairs = 100;
    Eigen::Index n = 8;
    int max_iter = 5000;
    double tol = 1e-9;    // Halperin stopping tolerance
    double agree = 1e-7;  // allowed subspace distance to the exact intersection
};

inline SuiteResult halperin_suite(const HalperinSuiteConfig& cfg, Rng& rng) {
    require(cfg.pairs > 0 && cfg.n > 0, "halperin bench needs pairs and a dimension");
    SuiteResult out;
    out.command = "halperin-bench";
    Table tab{"halperin", {"pair", "common_dim", "exact_dim", "iterations", "residual", "distance"}, {}};
    const Eigen::Index m = 2 * cfg.n;
    double worst = 0, dim_err = 0;
    int unconverged = 0, most_iter = 0;
    for (int i = 0; i < cfg.pairs; ++i) {
        const Eigen::Index c = 1 + static_cast<Eigen::Index>(uniform(rng, 0, 3));
        const Eigen::Index ea = 1 + static_cast<Eigen::Index>(uniform(rng, 0, 4));
        const Eigen::Index eb = 1 + static_cast<Eigen::Index>(uniform(rng, 0, 4));
        const Mat common = gaussian_matrix(rng, m, c);
        Mat ba(m, c + ea), bb(m, c + eb);
        ba << common, gaussian_matrix(rng, m, ea);
        bb << common, gaussian_matrix(rng, m, eb);
        const RealSubspace ha = make_subspace(ba), hb = make_subspace(bb);
        const RealSubspace ex = intersect_exact({ha, hb});
        dim_err = std::max(dim_err, std::abs(static_cast<double>(ex.dim() - c)));
        const HalperinResult hr = intersect_halperin_detail({ha, hb}, cfg.max_iter, cfg.tol);
        if (!hr.converged) ++unconverged;
        most_iter = std::max(most_iter, hr.iterations);
        const double d = distance(hr.subspace, ex);
        worst = std::max(worst, d);
        tab.rows.push_back({static_cast<double>(i), static_cast<double>(c), static_cast<double>(ex.dim()),
                            static_cast<double>(hr.iterations), hr.residual, d});
    }
    out.add("halperin.agrees_with_exact", worst, cfg.agree, kFixedTol, "largest iteration count " + std::to_string(most_iter));
    out.add_flag("halperin.converged", unconverged == 0, std::to_string(unconverged) + " pairs hit the iteration cap");
    out.add_flag("halperin.exact_dimension", dim_err == 0.0);
    out.tables.push_back(std::move(tab));
    return out;
}

// ---- nets -----------------------------------------------------------------------------------

struct ModelConfig {
    RepSpec rep;
    Budget budget;
    int cones = 8;
    bool twist_charge = false;  // rotate the charged copies of a chiral sum by the charge
    double q = 0.0;
};

inline NetModel make_net(const ModelConfig& c) {
    LatticeRep rep = build_rep(c.rep);
    if (c.twist_charge) rep = twist(rep, {c.q});
    return NetModel(std::move(rep), c.budget, c.cones);
}

inline void add_axioms(SuiteResult& out, const AxiomReport& rep, const std::string& prefix) {
    for (const auto& e : rep.entries) {
        Check& c = out.add(prefix + e.code, e.residual, e.budget, e.applicable ? kModelBudget : "not applicable", e.name);
        if (!e.note.empty()) c.note += "; " + e.note;
        c.required = e.applicable && e.required;
        if (!e.applicable) c.pass = true;
    }
}

struct AxiomSuiteConfig {
    ModelConfig model;
    AxiomSampling sampling;
    bool round_trip = true;  // wedge BW round trip and duality on W_R, W_L
    bool axioms = true;      // full axiom report (skipped for direct integrals)
    // direct-integral block laws, for direct-integral models only
    Region block_o1 = regions::double_cone(-0.5, 0.5, -0.5, 0.5);
    Region block_o2 = regions::double_cone(0.0, 1.0, 0.0, 1.0);
    double block_tol = 1e-8;
};

inline SuiteResult axiom_suite(const AxiomSuiteConfig& cfg) {
    SuiteResult out;
    out.command = "bgl-axioms";
    const NetModel net = make_net(cfg.model);
    const double eps = net.budget().eval(0.0);
    if (cfg.round_trip) {
        double bw = 0, dual = 0;
        std::string note = "J and Delta^{it} of H(W) against U(j_W), boosts";
        try {
            for (const Region& w : {regions::wedge_right(), regions::wedge_left()})
                bw = std::max(bw, detail::bw_residual(net.flow_modular_data(w), modular_data(net.wedge_subspace(w)), cfg.sampling.ts));
        } catch (const NonStandard& e) {
            bw = 1.0;
            note = e.what();
        }
        dual = distance(symplectic_complement(net.wedge_subspace(regions::wedge_right())), net.wedge_subspace(regions::wedge_left()));
        out.add("bgl.wedge_bw_round_trip", bw, eps, kModelBudget, note);
        out.add("bgl.wedge_duality", dual, eps, kModelBudget, "H(W_R)' against H(W_L)");
    }
    if (net.kind() == ModelKind::direct_integral) {
        const BlockLawReport b = block_law_report(net, cfg.block_o1, cfg.block_o2);
        out.add("bgl.block.complement", b.complement, cfg.block_tol, kFixedTol);
        out.add("bgl.block.intersection", b.intersection, cfg.block_tol, kFixedTol);
        out.add("bgl.block.sum", b.sum, cfg.block_tol, kFixedTol);
        out.add("bgl.block.dual_region", b.dual_region, cfg.block_tol, kFixedTol);
    } else if (cfg.axioms) {
        add_axioms(out, axioms_report(net, cfg.sampling), "axiom.");
    }
    return out;
}

// Flow times are multiples of step/(2 pi) so that boosts stay on the grid.
struct ReconstructSuiteConfig {
    ModelConfig model = [] {
        ModelConfig m;
        m.rep.n = 128;
        m.rep.h = 0.25;
        m.budget.tau_loc = 1e-2;
        return m;
    }();
    std::vector<int> t_steps{1, 2, -1};
    std::vector<int> s_steps{1, -3};
    double tol = 1e-7;
};

inline SuiteResult reconstruct_suite(const ReconstructSuiteConfig& cfg) {
    SuiteResult out;
    out.command = "reconstruct-mobius";
    const NetModel net = make_net(cfg.model);
    const double step = net.rep().fibers.front().grid.h / kTwoPi;
    std::vector<double> ts, ss;
    for (int k : cfg.t_steps) ts.push_back(k * step);
    for (int k : cfg.s_steps) ss.push_back(k * step);
    const ReconstructionReport r = reconstruct_ur(net, ts, ss);
    out.add("reconstruct.identity", r.identity_residual, cfg.tol, kFixedTol, "Delta_{D0}^{it} against U_R(t) U_L(t)");
    out.add("reconstruct.commutator", r.commutator_residual, cfg.tol, kFixedTol, "[U_R(t), U_L(s)]");
    out.add("reconstruct.group_law", r.group_law_residual, cfg.tol, kFixedTol, r.mobius_note);
    return out;
}

struct BreakBwSuiteConfig {
    Eigen::Index n = 32;
    double q = 1.0;
    std::vector<double> ts{0.1, 0.25, 0.5, -0.3};
    double tol = 1e-8;
    bool axioms = true;  // also run SS1-SS6 and wedge BW on the twisted net
};

inline SuiteResult break_bw_suite(const BreakBwSuiteConfig& cfg) {
    SuiteResult out;
    out.command = "break-bw";
    ModelConfig mc;
    mc.rep.n = cfg.n;
    mc.rep.charged = true;
    mc.twist_charge = true;
    mc.q = cfg.q;
    const NetModel net = make_net(mc);
    const CounterexampleReport r = counterexample_bw(net, cfg.ts);
    Table tab{"break_bw", {"t", "deviation", "expected"}, {}};
    for (std::size_t k = 0; k < r.ts.size(); ++k) tab.rows.push_back({r.ts[k], r.deviation[k], r.expected[k]});
    out.tables.push_back(std::move(tab));
    if (cfg.q == 0.0)
        out.add("break_bw.untwisted_deviation", r.sup_deviation, cfg.tol, kFixedTol, "sup_t |Delta^{it} - U(dilation(-2 pi t))|");
    else
        out.add("break_bw.expected_failure", r.max_mismatch, cfg.tol, kFixedTol,
                "deviation(t) against |e^{2 pi i q t} - 1|; sup deviation " + std::to_string(r.sup_deviation));
    if (cfg.axioms) {
        const AxiomReport ax = axioms_report(net);
        for (const auto& e : ax.entries) {
            if (e.code.rfind("SS", 0) != 0) continue;
            Check& c = out.add("axiom." + e.code, e.residual, e.budget, kModelBudget, e.name);
            if (!e.note.empty()) c.note += "; " + e.note;
        }
    }
    return out;
}

struct LightconeSuiteConfig {
    LightconeSpec spec = [] {
        LightconeSpec s;
        s.grids = {{32, 0.5}, {64, 0.25}, {128, 0.125}};
        s.cone_counts = {4, 8, 16};
        return s;
    }();
    double frozen = 0.375;  // finest-level defect recorded at bring-up
};

inline SuiteResult lightcone_suite(const LightconeSuiteConfig& cfg) {
    SuiteResult out;
    out.command = "lightcone-defect";
    const auto rows = lightcone_separating_study(cfg.spec);
    Table tab{"lightcone_defect", {"n", "h", "cones", "defect"}, {}};
    for (const auto& r : rows) tab.rows.push_back({static_cast<double>(r.n), r.h, static_cast<double>(r.cones), r.defect});
    out.tables.push_back(std::move(tab));
    out.add_flag("lightcone.monotone", lightcone_monotone(rows, cfg.spec.cone_counts.size()),
                 "nonincreasing in grid size and in cone count");
    out.add("lightcone.finest_below_frozen", rows.back().defect, cfg.frozen + 1e-12, "frozen regression value",
            "coarsest " + std::to_string(rows.front().defect));
    return out;
}

struct SpinStatisticsSuiteConfig {
    int pairs = 50;
    int left_size = 4, right_size = 3;
};

// Even-numbered pairs differ by integers and must pass; odd ones carry a half-integer offset and must fail.
inline SuiteResult spin_statistics_suite(const SpinStatisticsSuiteConfig& cfg, Rng& rng) {
    SuiteResult out;
    out.command = "spin-statistics";
    int wrong = 0, passed = 0, failed = 0;
    Table tab{"spin_statistics", {"pair", "offset", "verdict"}, {}};
    for (int k = 0; k < cfg.pairs; ++k) {
        const double base = uniform(rng, -3, 3);
        const bool integral = k % 2 == 0;
        std::vector<double> left, right;
        for (int i = 0; i < cfg.left_size; ++i) left.push_back(base + std::uniform_int_distribution<int>(-5, 5)(rng));
        for (int i = 0; i < cfg.right_size; ++i)
            right.push_back(base + std::uniform_int_distribution<int>(-5, 5)(rng) + (integral ? 0.0 : 0.5));
        const bool ok = spin_statistics_spectrum_check(left, right);
        if (ok != integral) ++wrong;
        (ok ? passed : failed)++;
        tab.rows.push_back({static_cast<double>(k), integral ? 0.0 : 0.5, ok ? 1.0 : 0.0});
    }
    out.tables.push_back(std::move(tab));
    out.add_flag("spin_statistics.battery", wrong == 0,
                 std::to_string(passed) + " integer-difference pairs passed, " + std::to_string(failed) + " half-integer pairs failed");
    return out;
}

struct TraceClassSuiteConfig {
    std::vector<double> betas{0.5, std::log(2.0), 2.0};
    int cutoff = 200;
    double rel_tol = 1e-20;
};

inline SuiteResult trace_class_suite(const TraceClassSuiteConfig& cfg) {
    SuiteResult out;
    out.command = "trace-class";
    Table tab{"trace_class", {"beta", "truncated", "closed_form", "error", "tail_bound"}, {}};
    double rel = 0, loop = 0;
    for (double beta : cfg.betas) {
        const PartitionResult r = trace_class_partition(beta, cfg.cutoff);
        rel = std::max(rel, r.error / r.closed_form);
        long double s = 0;
        for (int n = 1; n <= cfg.cutoff; ++n) s += std::exp(-static_cast<long double>(beta) * n);
        loop = std::max(loop, std::abs(static_cast<double>(s * s) - r.truncated) / r.truncated);
        tab.rows.push_back({beta, r.truncated, r.closed_form, r.error, r.tail_bound});
    }
    out.tables.push_back(std::move(tab));
    out.add("trace.truncation_relative", rel, cfg.rel_tol, kFixedTol, "closed-form gap (sum past the cutoff) over the full value");
    out.add("trace.loop_oracle", loop, 1e-14, kFixedTol, "finite geometric sum against a long-double loop");
    out.add("trace.ln2_is_one", std::abs(trace_class_partition(std::log(2.0), cfg.cutoff).closed_form - 1.0), 1e-15, kFixedTol);
    return out;
}

// ---- fock -----------------------------------------------------------------------------------

struct FockSuiteConfig {
    int max_n = 4;
    int order = 12;
    int trials = 3;
    int gram_size = 12;
    Eigen::Index wedge_n = 4;  // massive wedge grid for the Tomita check
};

namespace detail {
inline CVec sized_cvec(Rng& rng, Eigen::Index n, double size) {
    CVec v = gaussian_cvec(rng, n);
    return size * v / v.norm();
}

inline std::vector<WeylReduced> bracketings(const std::vector<CVec>& w, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return {WeylReduced{1.0, w[lo]}};
    std::vector<WeylReduced> out;
    for (std::size_t mid = lo + 1; mid < hi; ++mid)
        for (const auto& a : bracketings(w, lo, mid))
            for (const auto& b : bracketings(w, mid, hi)) out.push_back(weyl_multiply(a, b));
    return out;
}
}  // namespace detail

inline SuiteResult fock_suite(const FockSuiteConfig& cfg, Rng& rng) {
    SuiteResult out;
    out.command = "fock-checks";
    const int N = cfg.order;
    {
        double phase = 0;
        for (Eigen::Index n = 1; n <= cfg.max_n; ++n) {
            const FockVector omega = FockVector::vacuum(n, N);
            for (int trial = 0; trial < cfg.trials; ++trial) {
                const CVec f = detail::sized_cvec(rng, n, 0.5), g = detail::sized_cvec(rng, n, 0.4);
                const FockVector chain = weyl_apply(f, weyl_apply(g, weyl_apply(CVec(-f - g), omega)));
                phase = std::max(phase, std::abs(omega.inner(chain) - weyl_reduce({{f, g, CVec(-f - g)}}).phase));
            }
        }
        out.add("fock.weyl_phase_oracle", phase, 1e-8, kFixedTol, "<Omega, W(f)W(g)W(-f-g) Omega> on the truncated space");
    }
    {
        double assoc = 0;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<CVec> w;
            for (int k = 0; k < 5; ++k) w.push_back(gaussian_cvec(rng, 3));
            const WeylReduced ref = weyl_reduce({w});
            for (const auto& b : detail::bracketings(w, 0, w.size()))
                assoc = std::max({assoc, std::abs(b.phase - ref.phase), (b.amplitude - ref.amplitude).norm()});
        }
        out.add("fock.weyl_associativity", assoc, 1e-12, kFixedTol, "14 bracketings of 5-letter words");
    }
    // Tomita: the check's own pass flag is residual < tail + 1e-8; the worst margin is reported.
    auto tomita = [&](const std::string& name, const RealSubspace& h, const std::vector<CVec>& fs) {
        double res = 0, bud = 0, margin = -kInf;
        for (const CVec& f : fs) {
            const TomitaFockCheck r = second_quantized_tomita_check(h, f, N);
            const double b = r.tail_bound + 1e-8;
            if (r.residual - b > margin) {
                margin = r.residual - b;
                res = r.residual;
                bud = b;
            }
        }
        out.add(name, res, bud, "tail bound + 1e-8", std::to_string(fs.size()) + " vectors");
    };
    {
        const RealSubspace h = real_slice(3);
        std::vector<CVec> fs;
        for (int k = 0; k < 5; ++k) fs.push_back(detail::sized_cvec(rng, 3, 1.0).real().cast<cplx>());
        for (auto& f : fs) f /= f.norm();
        tomita("fock.tomita.real_slice", h, fs);
    }
    {
        double res = 0, bud = 0, margin = -kInf;
        for (int trial = 0; trial < 5; ++trial) {
            const RealSubspace h = make_subspace(gaussian_matrix(rng, 6, 3));
            const Vec x = h.basis * gaussian_matrix(rng, 3, 1).col(0);
            const TomitaFockCheck r = second_quantized_tomita_check(h, complex_form(Vec(0.8 * x / x.norm())), N);
            const double b = r.tail_bound + 1e-8;
            if (r.residual - b > margin) {
                margin = r.residual - b;
                res = r.residual;
                bud = b;
            }
        }
        out.add("fock.tomita.random_subspaces", res, bud, "tail bound + 1e-8", "5 random standard subspaces of C^3");
    }
    {
        RepSpec rs;
        rs.kind = ModelKind::massive;
        rs.n = cfg.wedge_n;
        const NetModel net(build_rep(rs));
        const RealSubspace h = net.wedge_subspace(regions::wedge_right());
        std::vector<CVec> fs;
        for (Eigen::Index c = 0; c < h.dim(); ++c) fs.push_back(complex_form(Vec(h.basis.col(c))));
        tomita("fock.tomita.massive_wedge", h, fs);
    }
    {
        const int m = cfg.gram_size;
        std::vector<CVec> fs;
        for (int k = 0; k < m; ++k) fs.push_back(detail::sized_cvec(rng, 3, uniform(rng, 0.1, 1.2)));
        CMat g(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                g(i, j) = vacuum_expectation({{CVec(-fs[static_cast<std::size_t>(i)]), fs[static_cast<std::size_t>(j)]}});
        Eigen::SelfAdjointEigenSolver<CMat> es(CMat(0.5 * (g + g.adjoint())));
        out.add("fock.gram_positivity", std::max(0.0, -es.eigenvalues().minCoeff()), truncation_tail(1.2, N) + 1e-14,
                "tail bound", "smallest eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
    }
    {
        RepSpec rs;
        rs.n = 128;
        rs.h = 0.25;
        Budget b;
        b.tau_loc = 1e-2;
        const NetModel net(build_rep(rs), b);
        const LocalityReport r =
            locality_commutation_check(net, regions::double_cone(-1, 0, 0, 1), regions::double_cone(0, 1, -1, 0));
        out.add("fock.locality.chiral_reflected", r.max_im, 1e-9, kFixedTol,
                "double cones exchanged by j across the edge of W_R; dims " + std::to_string(r.dim1) + ", " + std::to_string(r.dim2));
    }
    {
        RepSpec rs;
        rs.kind = ModelKind::massive;
        rs.n = 64;
        rs.h = 0.25;
        const NetModel net(build_rep(rs));
        const LocalityReport r = locality_commutation_check(net, regions::double_cone(-1.5, -0.5, 0.5, 1.5),
                                                            regions::double_cone(0.5, 1.5, -1.5, -0.5));
        out.add("fock.locality.massive_separated", r.max_im, r.budget, kModelBudget,
                "leakage " + std::to_string(r.leakage));
    }
    return out;
}

}  // namespace modnet
