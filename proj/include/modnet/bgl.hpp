#pragma once

#include "modnet/reps.hpp"

#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

namespace modnet {

// eps_model = C (leakage + interpolation [+ tau_loc]) + floor.
struct Budget {
    double scale = 10.0;
    double floor = 1e-8;    // conditioning floor of the BW data at the default spacing
    double tau_loc = 1e-3;  // near-intersection threshold for local subspaces

    double eval(double leakage, double interp = 0.0, bool local = false) const {
        return scale * (leakage + interp + (local ? tau_loc : 0.0)) + floor;
    }
    static constexpr const char* formula = "C*(leakage + interp [+ tau_loc]) + floor";
};

namespace detail {

// Row indices of fiber i inside the model's [Re; Im] layout.
inline std::vector<Eigen::Index> fiber_rows(const LatticeRep& rep, std::size_t i) {
    const Eigen::Index o = rep.offset(i), n = rep.fibers[i].grid.n, d = rep.dim();
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(2 * n));
    for (Eigen::Index k = 0; k < n; ++k) {
        rows[static_cast<std::size_t>(k)] = o + k;
        rows[static_cast<std::size_t>(n + k)] = d + o + k;
    }
    return rows;
}

inline Mat embed_rows(const LatticeRep& rep, std::size_t i, const Mat& local) {
    const auto rows = fiber_rows(rep, i);
    Mat out = Mat::Zero(2 * rep.dim(), local.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) out.row(rows[k]) = local.row(static_cast<Eigen::Index>(k));
    return out;
}

inline Mat restrict_rows(const LatticeRep& rep, std::size_t i, const Mat& global) {
    const auto rows = fiber_rows(rep, i);
    Mat out(static_cast<Eigen::Index>(rows.size()), global.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = global.row(rows[k]);
    return out;
}

// Delta^{it} = T(a) Sh(sign 2 pi t) T(-a) on one fiber, with J = T(2a) conj.
inline ModularData flow_data(const Fiber& f, double sign, double al, double ar) {
    const Eigen::Index n = f.grid.n;
    const CMat modes = fourier(f.grid).adjoint();
    ModularData m;
    m.Q = real_form(CMat(f.translation_phase(al, ar).asDiagonal() * modes));
    m.J = real_form(CMat(f.translation_phase(2 * al, 2 * ar).asDiagonal())) * conj_matrix(n);
    const Vec nu = f.nu();
    m.log_lambda.resize(2 * n);
    m.log_lambda << sign * kTwoPi * nu, sign * kTwoPi * nu;
    return m;
}

inline ModularData direct_sum(const LatticeRep& rep, const std::vector<ModularData>& parts) {
    const Eigen::Index m = 2 * rep.dim();
    ModularData out{Mat::Zero(m, m), Mat(m, m), Vec(m)};
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto rows = fiber_rows(rep, i);
        const Mat q = embed_rows(rep, i, parts[i].Q);
        out.Q.middleCols(col, q.cols()) = q;
        out.log_lambda.segment(col, q.cols()) = parts[i].log_lambda;
        col += q.cols();
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < rows.size(); ++c)
                out.J(rows[r], rows[c]) = parts[i].J(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    return out;
}

inline std::string region_key(const Region& r, int anchor) {
    std::ostringstream os;
    os.precision(17);
    os << r.left.lo << ',' << r.left.hi << ',' << r.right.lo << ',' << r.right.hi << '#' << anchor;
    return os.str();
}

}  // namespace detail

// Which of the two minimal wedges a near-intersection is taken inside.
enum class Anchor { wedge_right, wedge_left };

struct WedgeSubspace {
    RealSubspace subspace;
    Standardness standardness;
    bool warning = false;  // not numerically standard at this spacing
};

// Dyadic double cones accumulating at the tip and along the spine of a lightcone.
inline std::vector<Region> lightcone_family(const Region& cone, int count) {
    require(cone.kind == RegionKind::LightconeFwd || cone.kind == RegionKind::LightconeBwd, "lightcone expected");
    require(count >= 0, "cone count must be nonnegative");
    const bool fwd = cone.kind == RegionKind::LightconeFwd;
    const auto [xl, xr] = cone.apex();
    std::vector<Region> out;
    auto push = [&](double a, double b, double c, double d) {
        if (static_cast<int>(out.size()) >= count) return;
        if (fwd) out.push_back(regions::double_cone(xl + a, xl + b, xr + c, xr + d));
        else out.push_back(regions::double_cone(xl - b, xl - a, xr - d, xr - c));
    };
    for (int k = 0; static_cast<int>(out.size()) < count; ++k) {
        const int e = (k % 2 == 0) ? k / 2 : -(k + 1) / 2;  // 0, -1, 1, -2, 2, ...
        const double s = std::ldexp(1.0, e);
        push(s, 2 * s, s, 2 * s);
        push(s, 2 * s, 2 * s, 4 * s);
        push(2 * s, 4 * s, s, 2 * s);
    }
    return out;
}

class NetModel {
public:
    explicit NetModel(LatticeRep rep, Budget budget = {}, int lightcone_cones = 8)
        : rep_(std::move(rep)), budget_(budget), cones_(lightcone_cones) {
        rep_.validate();
    }

    const LatticeRep& rep() const { return rep_; }
    ModelKind kind() const { return rep_.kind; }
    const Budget& budget() const { return budget_; }
    Eigen::Index dim() const { return rep_.dim(); }
    int lightcone_cones() const { return cones_; }

    bool chiral() const {
        return rep_.kind == ModelKind::chiral || rep_.kind == ModelKind::chiral_sum || rep_.kind == ModelKind::twisted;
    }

    Mat U(const PDElement& g, bool twisted = true) const { return rep_.real_matrix(g, twisted); }
    Mat j_implementation() const { return U(PDElement::j()); }

    // Regions whose modular group the representation implements: wedges, and in chiral models any
    // product of half-lines.
    bool has_flow(const Region& r) const {
        if (r.is_wedge()) return true;
        if (!chiral()) return false;
        auto ray = [](const Span& s) { return s.lower_ray() || s.upper_ray(); };
        return ray(r.left) && ray(r.right);
    }

    // BW-defined data: Delta_R^{it} = U(Lambda_R(2 pi t)), J_R = U(j_R).
    ModularData flow_modular_data(const Region& r) const {
        if (!has_flow(r)) throw InvalidArgument("no implemented modular flow for region " + to_string(r.kind));
        std::vector<ModularData> parts;
        for (const Fiber& f : rep_.fibers) {
            if (f.kind == FiberKind::massive) {
                const auto [xl, xr] = r.apex();
                parts.push_back(detail::flow_data(f, r.kind == RegionKind::WedgeRight ? 1.0 : -1.0, xl, xr));
                continue;
            }
            const bool left = f.kind == FiberKind::chiral_left;
            const Span& s = left ? r.left : r.right;
            const double c = s.upper_ray() ? s.lo : s.hi;
            parts.push_back(detail::flow_data(f, s.upper_ray() ? -1.0 : 1.0, left ? c : 0.0, left ? 0.0 : c));
        }
        return detail::direct_sum(rep_, parts);
    }

    WedgeSubspace wedge_subspace_detail(const Region& w) const {
        if (!w.is_wedge()) throw InvalidArgument("wedge_subspace needs a wedge, got " + to_string(w.kind));
        WedgeSubspace out;
        out.subspace = subspace_from_modular(flow_modular_data(w));
        out.standardness = standardness(out.subspace);
        out.warning = !out.standardness.standard();
        return out;
    }

    RealSubspace wedge_subspace(const Region& w) const {
        if (!w.is_wedge()) throw InvalidArgument("wedge_subspace needs a wedge, got " + to_string(w.kind));
        return cached(w, 0, [&] { return wedge_subspace_detail(w).subspace; });
    }

    // H^d(O): intersection of the minimal wedges for double cones, closed sums for lightcones; products of
    // half-lines and bounded intervals fiberwise in chiral models.
    RealSubspace region_subspace_dual(const Region& o, Anchor anchor = Anchor::wedge_right) const {
        return cached(o, anchor == Anchor::wedge_right ? 1 : 2, [&] { return compute_dual(o, anchor); });
    }

    // Modular data of H^d(O): the flow where implemented, otherwise Tomita on K = H + iH.
    // Chiral models assemble it fiberwise, so a poorly conditioned half-line block never enters a Tomita solve.
    ModularData local_modular_data(const Region& o, Anchor anchor = Anchor::wedge_right) const {
        if (has_flow(o)) return flow_modular_data(o);
        if (!chiral()) return restricted_modular_data(region_subspace_dual(o, anchor)).data;
        std::vector<ModularData> parts;
        for (const Fiber& f : rep_.fibers) {
            const bool left = f.kind == FiberKind::chiral_left;
            const Span& s = left ? o.left : o.right;
            if (s.bounded()) {
                const RealSubspace local{chiral_span(f, s, (anchor == Anchor::wedge_right) == left)};
                parts.push_back(restricted_modular_data(local).data);
            } else {
                const double c = s.upper_ray() ? s.lo : s.hi;
                parts.push_back(detail::flow_data(f, s.upper_ray() ? -1.0 : 1.0, left ? c : 0.0, left ? 0.0 : c));
            }
        }
        return detail::direct_sum(rep_, parts);
    }

    std::size_t cache_size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return cache_.size();
    }

private:
    template <class F>
    RealSubspace cached(const Region& r, int tag, F&& make) const {
        const std::string key = detail::region_key(r, tag);
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        RealSubspace h = make();
        std::lock_guard<std::mutex> lock(mu_);
        return cache_.emplace(key, std::move(h)).first->second;
    }

    // One chiral fiber's subspace for a span, in fiber coordinates.
    Mat chiral_span(const Fiber& f, const Span& s, bool anchor_lower) const {
        const bool left = f.kind == FiberKind::chiral_left;
        auto ray = [&](bool upper, double c) {
            return subspace_from_modular(detail::flow_data(f, upper ? -1.0 : 1.0, left ? c : 0.0, left ? 0.0 : c));
        };
        if (s.upper_ray()) return ray(true, s.lo).basis;
        if (s.lower_ray()) return ray(false, s.hi).basis;
        if (!s.bounded()) throw InvalidArgument("full line has no local subspace here");
        const RealSubspace lower = ray(false, s.hi), upper = ray(true, s.lo);
        return intersect_near({lower, upper}, budget_.tau_loc, anchor_lower ? 0 : 1).basis;
    }

    RealSubspace compute_dual(const Region& o, Anchor anchor) const {
        if (o.is_wedge()) return wedge_subspace(o);
        if (chiral()) {
            std::vector<Mat> cols;
            Eigen::Index total = 0;
            for (std::size_t i = 0; i < rep_.fibers.size(); ++i) {
                const Fiber& f = rep_.fibers[i];
                const bool left = f.kind == FiberKind::chiral_left;
                // The W_R-type wedge sees a lower ray on the left and an upper ray on the right.
                const bool lower = (anchor == Anchor::wedge_right) == left;
                cols.push_back(detail::embed_rows(rep_, i, chiral_span(f, left ? o.left : o.right, lower)));
                total += cols.back().cols();
            }
            Mat b(2 * dim(), total);
            Eigen::Index at = 0;
            for (const Mat& c : cols) {
                b.middleCols(at, c.cols()) = c;
                at += c.cols();
            }
            return {b};
        }
        switch (o.kind) {
            case RegionKind::DoubleCone: {
                // Minimal wedges containing O = (a,b) x (c,d): W_R + (b,c) and W_L + (a,d).
                const Region wr_min = regions::wedge_right(o.left.hi, o.right.lo);
                const Region wl_min = regions::wedge_left(o.left.lo, o.right.hi);
                return intersect_near({wedge_subspace(wr_min), wedge_subspace(wl_min)}, budget_.tau_loc,
                                      anchor == Anchor::wedge_right ? 0 : 1);
            }
            case RegionKind::LightconeFwd:
            case RegionKind::LightconeBwd: {
                std::vector<RealSubspace> parts;
                for (const Region& d : lightcone_family(o, cones_)) parts.push_back(region_subspace_dual(d));
                if (parts.empty()) return zero_subspace(dim());
                return sum_closure(parts);
            }
            default:
                throw InvalidArgument("unsupported region kind for the dual net: " + to_string(o.kind));
        }
    }

    LatticeRep rep_;
    Budget budget_;
    int cones_;
    mutable std::mutex mu_;
    mutable std::map<std::string, RealSubspace> cache_;
};

// ---- test vectors and leakage ---------------------------------------------------------------

// Norm fraction at grid points where the translation phase advances more than one radian per step.
inline double resolution_leakage(const LatticeRep& rep, const CVec& xi, double al, double ar) {
    double bad = 0, all = xi.squaredNorm();
    for (std::size_t i = 0; i < rep.fibers.size(); ++i) {
        const Fiber& f = rep.fibers[i];
        const Vec pl = f.p_left(), pr = f.p_right();
        const Eigen::Index n = f.grid.n, o = rep.offset(i);
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index k = j + 1 < n ? j + 1 : j - 1;
            const double step = std::abs(al * (pl(k) - pl(j))) + std::abs(ar * (pr(k) - pr(j)));
            if (step > 1.0) bad += std::norm(xi(o + j));
        }
    }
    return all > 0 ? std::sqrt(bad / all) : 0.0;
}

inline double vector_leakage(const LatticeRep& rep, const CVec& xi, double al = 0, double ar = 0) {
    return boundary_leakage(rep, xi) + resolution_leakage(rep, xi, al, ar);
}

struct TestVectorSpec {
    std::vector<double> chiral_centers{-6.0, -4.5, -3.0};
    double chiral_sigma = 1.6;
    std::vector<double> massive_centers{-0.5, 0.0, 0.5};
    double massive_sigma = 1.3;
};

// Vectors of H(W) (W with a flow): Delta_W^{-1/4} applied to J_W-fixed Gaussian bumps T(apex) g.
inline std::vector<Vec> flow_test_vectors(const NetModel& net, const Region& w, const TestVectorSpec& spec = {}) {
    const ModularData md = net.flow_modular_data(w);
    const Mat d = md.delta_pow(-0.25);
    const LatticeRep& rep = net.rep();
    std::vector<Vec> out;
    for (std::size_t i = 0; i < rep.fibers.size(); ++i) {
        const Fiber& f = rep.fibers[i];
        const bool massive = f.kind == FiberKind::massive;
        double al = 0, ar = 0;
        if (massive || w.is_wedge()) std::tie(al, ar) = w.apex();
        if (!massive) {
            const Span& s = f.kind == FiberKind::chiral_left ? w.left : w.right;
            const double c = s.upper_ray() ? s.lo : s.hi;
            al = f.kind == FiberKind::chiral_left ? c : 0.0;
            ar = f.kind == FiberKind::chiral_left ? 0.0 : c;
        }
        const CVec ph = f.translation_phase(al, ar);
        const Vec u = f.grid.points();
        const auto& centers = massive ? spec.massive_centers : spec.chiral_centers;
        const double sig = massive ? spec.massive_sigma : spec.chiral_sigma;
        for (double c0 : centers) {
            CVec g = CVec::Zero(rep.dim());
            for (Eigen::Index j = 0; j < f.grid.n; ++j)
                g(rep.offset(i) + j) = ph(j) * std::exp(-(u(j) - c0) * (u(j) - c0) / (2 * sig * sig));
            Vec v = d * real_form(g);
            out.push_back(v / v.norm());
        }
    }
    return out;
}

// ---- axiom report ---------------------------------------------------------------------------

struct AxiomEntry {
    std::string code;
    std::string name;
    double residual = 0;
    double budget = 0;
    bool pass = true;
    bool applicable = true;
    bool required = true;
    std::string note;
};

struct AxiomReport {
    std::vector<AxiomEntry> entries;

    const AxiomEntry& at(const std::string& code) const {
        for (const auto& e : entries)
            if (e.code == code) return e;
        throw InvalidArgument("no axiom entry " + code);
    }
    bool passed(const std::string& code) const { return at(code).pass; }
    bool all_required_pass() const {
        for (const auto& e : entries)
            if (e.applicable && e.required && !e.pass) return false;
        return true;
    }
};

struct AxiomSampling {
    std::vector<double> translations{0.05, 0.3};
    std::vector<double> massive_translations{0.002, 0.01};  // rapidity grids resolve only small shifts
    std::vector<int> boost_steps{-2, 1, 3};
    std::vector<double> ts{0.1, -0.25, 0.5};
    TestVectorSpec vectors;
    bool local_checks = true;
};

namespace detail {

inline AxiomEntry entry(std::string code, std::string name, double residual, double budget, std::string note = {}) {
    AxiomEntry e{std::move(code), std::move(name), residual, budget, false, true, true, std::move(note)};
    e.pass = std::isfinite(residual) && residual >= 0 && residual < budget;
    return e;
}

inline AxiomEntry not_applicable(std::string code, std::string name, std::string why) {
    AxiomEntry e{std::move(code), std::move(name), 0.0, 0.0, true, false, false, std::move(why)};
    return e;
}

inline double bw_residual(const ModularData& defined, const ModularData& tomita, const std::vector<double>& ts) {
    double r = opnorm(Mat(defined.J - tomita.J));
    for (double t : ts) r = std::max(r, opnorm(Mat(defined.delta_it(t) - tomita.delta_it(t))));
    const double half = std::sqrt(defined.lambda_max());
    r = std::max(r, opnorm(Mat(defined.delta_pow(0.5) - tomita.delta_pow(0.5))) / half);
    return r;
}

// Keeps the sample with the smallest budget margin, plus the largest raw residual for the note.
struct Worst {
    double residual = 0, budget = 0, largest = 0;
    bool any = false;
    void add(double r, double e) {
        largest = std::max(largest, r);
        if (!any || r - e > residual - budget) {
            residual = r;
            budget = e;
            any = true;
        }
    }
};

inline double vector_distance(const Vec& v, const RealSubspace& h) {
    return (v - h.basis * (h.basis.transpose() * v)).norm() / v.norm();
}

}  // namespace detail

inline AxiomReport axioms_report(const NetModel& net, const AxiomSampling& cfg = {}) {
    AxiomReport rep;
    const Budget& b = net.budget();
    const LatticeRep& lr = net.rep();
    const Region wr = regions::wedge_right(), wl = regions::wedge_left();
    const RealSubspace hr = net.wedge_subspace(wr), hl = net.wedge_subspace(wl);
    const double h0 = lr.fibers.front().grid.h;
    const std::vector<double>& shifts = net.chiral() ? cfg.translations : cfg.massive_translations;
    const double far = shifts.empty() ? 0.0 : shifts.back();

    // SS1: T(a) H(W) inside H(W) for W + a inside W, on test vectors.
    {
        detail::Worst w1;
        for (const Region& w : {wr, wl}) {
            const RealSubspace hw = net.wedge_subspace(w);
            const double sl = w.kind == RegionKind::WedgeRight ? -1.0 : 1.0;
            for (double a : shifts)
                for (const Vec& f : flow_test_vectors(net, w, cfg.vectors)) {
                    const Vec y = net.U(PDElement::translation(sl * a, -sl * a)) * f;
                    w1.add(detail::vector_distance(y, hw), b.eval(vector_leakage(lr, complex_form(y), a, a)));
                }
        }
        if (cfg.local_checks && net.chiral()) {
            const RealSubspace big = net.region_subspace_dual(regions::d0());
            const RealSubspace small = net.region_subspace_dual(regions::double_cone(0.25, 0.75, 0.25, 0.75));
            w1.add(containment_distance(small.basis, big.basis), b.eval(0.0, 0.0, true));
        }
        std::ostringstream note;
        note << "translated wedges and nested double cones; largest residual " << w1.largest;
        rep.entries.push_back(detail::entry("SS1", "Isotony", w1.residual, w1.budget, note.str()));
    }
    // SS2: U(g) H(W) = H(gW) for g = T(b) boost(k h) j^r on apex-zero wedges.
    {
        double res = 0;
        for (const Region& w : {wr, wl})
            for (int k : cfg.boost_steps)
                for (bool refl : {false, true}) {
                    const PDElement g = PDElement::translation(0.2, -0.35) * PDElement::boost_right(k * h0) *
                                        (refl ? PDElement::j() : PDElement::identity());
                    res = std::max(res, distance(image(net.U(g), net.wedge_subspace(w)), net.wedge_subspace(act(g, w))));
                }
        rep.entries.push_back(detail::entry("SS2", "Poincaré Covariance", res, b.eval(0.0)));
    }
    // SS3: translation spectrum in the closed forward cone.
    {
        double worst = 0;
        for (const Fiber& f : lr.fibers) worst = std::max({worst, -f.p_left().minCoeff(), -f.p_right().minCoeff()});
        rep.entries.push_back(detail::entry("SS3", "Positivity of energy", std::max(worst, 0.0), b.eval(0.0)));
    }
    // SS4: wedge subspaces are standard.
    {
        double res = 0, angle = kPi;
        for (const Region& w : {wr, wl, regions::wedge_right(0.4, -0.7)}) {
            const WedgeSubspace ws = net.wedge_subspace_detail(w);
            angle = std::min(angle, ws.standardness.minimal_angle);
            if (!ws.standardness.standard()) res = 1.0;
        }
        std::ostringstream note;
        note << "minimal angle " << angle;
        rep.entries.push_back(detail::entry("SS4", "Reeh-Schlieder property", res, b.eval(0.0), note.str()));
    }
    // SS5: wedge duality, and symplectic orthogonality of test vectors for translated spacelike wedges.
    {
        detail::Worst w5;
        w5.add(distance(symplectic_complement(hr), hl), b.eval(0.0));
        const Region w1 = regions::wedge_right(-far, far), w2 = regions::wedge_left(0.0, 0.0);
        for (const Vec& f : flow_test_vectors(net, w1, cfg.vectors))
            for (const Vec& g : flow_test_vectors(net, w2, cfg.vectors))
                w5.add(std::abs(symplectic(f, g)),
                       b.eval(vector_leakage(lr, complex_form(f), far, far) + vector_leakage(lr, complex_form(g))));
        std::ostringstream note;
        note << "wedge duality and spacelike test-vector pairs; largest residual " << w5.largest;
        rep.entries.push_back(detail::entry("SS5", "Locality", w5.residual, w5.budget, note.str()));
    }
    // SS6: Tomita data of H(W) reproduce the BW-defined data.
    {
        double res = 0;
        std::string note;
        try {
            for (const Region& w : {wr, wl, regions::wedge_right(0.3, -0.2)})
                res = std::max(res, detail::bw_residual(net.flow_modular_data(w), modular_data(net.wedge_subspace(w)), cfg.ts));
        } catch (const NonStandard& e) {
            res = 1.0;
            note = e.what();
        }
        rep.entries.push_back(detail::entry("SS6", "Bisognano-Wichmann property", res, b.eval(0.0), note));
    }

    if (!net.chiral()) {
        const char* why = "dilations are not implemented in massive models";
        rep.entries.push_back(detail::not_applicable("HK7", "Dilation covariance", why));
        // Separating fails for massive lightcones (their sum is dense); reported, not required.
        const RealSubspace hv = net.region_subspace_dual(regions::forward_cone());
        const Standardness st = standardness(hv);
        AxiomEntry e = detail::entry("HK8", "cyclic and separating for A(V+)", st.standard() ? 0.0 : 1.0, b.eval(0.0),
                                     "dimension fraction " + std::to_string(double(hv.dim()) / double(2 * net.dim())));
        e.required = false;
        rep.entries.push_back(e);
        rep.entries.push_back(detail::not_applicable("HK9", "Bisognano-Wichmann property for dilations", why));
        rep.entries.push_back(detail::not_applicable("HK10a", "Modular covariance", why));
        rep.entries.push_back(detail::not_applicable("HK10b", "M-strong additivity", why));
        return rep;
    }

    const Region vp = regions::forward_cone(), vm = regions::backward_cone();
    const RealSubspace hvp = net.region_subspace_dual(vp);
    // HK7: grid dilations preserve the apex-zero wedges and lightcones.
    {
        double res = 0;
        for (int k : cfg.boost_steps)
            for (const Region& r : {wr, wl, vp, vm})
                res = std::max(res, distance(image(net.U(PDElement::dilation(k * h0)), net.region_subspace_dual(r)),
                                             net.region_subspace_dual(r)));
        rep.entries.push_back(detail::entry("HK7", "Dilation covariance", res, b.eval(0.0)));
    }
    // HK8
    {
        const Standardness st = standardness(hvp);
        std::ostringstream note;
        note << "minimal angle " << st.minimal_angle;
        rep.entries.push_back(detail::entry("HK8", "cyclic and separating for A(V+)", st.standard() ? 0.0 : 1.0, b.eval(0.0), note.str()));
    }
    // HK9: Tomita flow of H(V+) against U(Lambda_{V+}(2 pi t)) = U(delta(-2 pi t) x delta(-2 pi t)).
    {
        double res = 0;
        std::string note;
        try {
            const ModularData md = modular_data(hvp);
            for (double t : cfg.ts) res = std::max(res, opnorm(Mat(md.delta_it(t) - net.U(PDElement::dilation(-kTwoPi * t)))));
        } catch (const NonStandard& e) {
            res = 1.0;
            note = e.what();
        }
        rep.entries.push_back(detail::entry("HK9", "Bisognano-Wichmann property for dilations", res, b.eval(0.0), note));
    }
    if (!cfg.local_checks || lr.kind == ModelKind::chiral) {
        rep.entries.push_back(detail::not_applicable("HK10a", "Modular covariance", "local checks disabled"));
        rep.entries.push_back(detail::not_applicable("HK10b", "M-strong additivity", "local checks disabled"));
        return rep;
    }
    // HK10a: Ad Delta_{B_L}^{it} acts on H(D0) as U(delta(-2 pi t) x iota).
    {
        const ModularData mb = net.local_modular_data(regions::band_left());
        const RealSubspace hd = net.region_subspace_dual(regions::d0());
        double res = 0;
        for (double t : cfg.ts) {
            const PDElement g{-kTwoPi * t, 0.0, 0.0, 0.0, false};
            res = std::max(res, distance(image(mb.delta_it(t), hd), image(net.U(g), hd)));
        }
        rep.entries.push_back(detail::entry("HK10a", "Modular covariance", res, b.eval(0.0, 0.0, true),
                                            "dim H(D0) = " + std::to_string(hd.dim())));
    }
    // HK10b (informational): H(D0) against H(B_L) intersected with H(W_L + (1,0))'.
    {
        const RealSubspace hb = net.region_subspace_dual(regions::band_left());
        const RealSubspace hc = symplectic_complement(net.wedge_subspace(regions::wedge_left(1.0, 0.0)));
        const RealSubspace cut = intersect_near({hb, hc}, b.tau_loc, 0);
        AxiomEntry e = detail::entry("HK10b", "M-strong additivity", distance(cut, net.region_subspace_dual(regions::d0())),
                                     b.eval(0.0, 0.0, true), "informational");
        e.required = false;
        rep.entries.push_back(e);
    }
    return rep;
}

// ---- reconstruction of U_R on the chiral sum -----------------------------------------------

struct ReconstructionReport {
    double identity_residual = 0;    // Delta_{D0}^{it} against U_R U_L
    double commutator_residual = 0;  // [U_R(t), U_L(s)]
    double group_law_residual = 0;   // U_R(t) U_R(s) against U_R(t + s)
    std::string mobius_note = "the grid carries no action of Lambda_(0,1); agreement is checked through the group law";
};

inline ReconstructionReport reconstruct_ur(const NetModel& net, const std::vector<double>& ts, const std::vector<double>& ss) {
    if (net.kind() != ModelKind::chiral_sum) throw InvalidArgument("reconstruct_ur needs the chiralSum model");
    const ModularData bl = net.local_modular_data(regions::band_left());
    const ModularData br = net.local_modular_data(regions::band_right());
    const ModularData d0 = restricted_modular_data(net.region_subspace_dual(regions::d0())).data;
    auto ur = [&](double t) { return Mat(bl.delta_it(t) * net.U({kTwoPi * t, 0, 0, 0, false})); };
    auto ul = [&](double t) { return Mat(br.delta_it(t) * net.U({0, kTwoPi * t, 0, 0, false})); };
    ReconstructionReport r;
    for (double t : ts) {
        r.identity_residual = std::max(r.identity_residual, opnorm(Mat(d0.delta_it(t) - ur(t) * ul(t))));
        for (double s : ss) {
            r.commutator_residual = std::max(r.commutator_residual, opnorm(Mat(ur(t) * ul(s) - ul(s) * ur(t))));
            r.group_law_residual = std::max(r.group_law_residual, opnorm(Mat(ur(t) * ur(s) - ur(t + s))));
        }
    }
    return r;
}

// ---- dilation BW counterexample -------------------------------------------------------------

struct CounterexampleReport {
    std::vector<double> ts, deviation, expected;
    double sup_deviation = 0;
    double max_mismatch = 0;  // |deviation - |e^{2 pi i q t} - 1||
};

inline CounterexampleReport counterexample_bw(const NetModel& net, const std::vector<double>& ts) {
    const LatticeRep& lr = net.rep();
    require(net.chiral() && lr.kind != ModelKind::chiral, "counterexample_bw needs a chiral sum model");
    const RealSubspace hv = net.region_subspace_dual(regions::forward_cone());
    if (!lr.charge_pairs.empty()) {
        try {
            symmetry_commutation_check(hv, real_form(lr.charge_rotation(0.7)), 1e-8);
        } catch (const InvalidArgument&) {
            throw InvalidArgument("net is not gauge invariant");
        }
    }
    const ModularData md = modular_data(hv);
    CounterexampleReport r;
    for (double t : ts) {
        const double dev = opnorm(Mat(md.delta_it(t) - net.U(PDElement::dilation(-kTwoPi * t))));
        const double q = lr.charge_pairs.empty() ? 0.0 : lr.charge.q;
        const double exp = std::abs(std::polar(1.0, kTwoPi * q * t) - 1.0);
        r.ts.push_back(t);
        r.deviation.push_back(dev);
        r.expected.push_back(exp);
        r.sup_deviation = std::max(r.sup_deviation, dev);
        r.max_mismatch = std::max(r.max_mismatch, std::abs(dev - exp));
    }
    return r;
}

// ---- lightcone separating defect ------------------------------------------------------------

// Real dimension of H(V+)' as a fraction of 2n, the sum running over the first `cones` dyadic double cones.
inline double lightcone_defect(const NetModel& net, int cones) {
    require(!net.chiral(), "lightcone defect study needs a massive or direct-integral model");
    std::vector<RealSubspace> parts;
    for (const Region& d : lightcone_family(regions::forward_cone(), cones)) parts.push_back(net.region_subspace_dual(d));
    const RealSubspace sum = parts.empty() ? zero_subspace(net.dim()) : sum_closure(parts);
    return static_cast<double>(symplectic_complement(sum).dim()) / static_cast<double>(2 * net.dim());
}

struct LightconeRow {
    Eigen::Index n = 0;
    double h = 0;
    int cones = 0;
    double defect = 0;
};

struct LightconeSpec {
    std::vector<double> masses{1.0};
    std::vector<std::pair<Eigen::Index, double>> grids{{32, 0.5}, {64, 0.25}};
    std::vector<int> cone_counts{4, 8, 16};
    double tau = 1e-3;
};

inline std::vector<LightconeRow> lightcone_separating_study(const LightconeSpec& spec) {
    require(!spec.cone_counts.empty() && !spec.grids.empty(), "empty cone sampling");
    std::vector<LightconeRow> rows;
    for (const auto& [n, h] : spec.grids) {
        RepSpec rs;
        rs.kind = spec.masses.size() == 1 ? ModelKind::massive : ModelKind::direct_integral;
        rs.n = n;
        rs.h = h;
        rs.masses = spec.masses;
        Budget b;
        b.tau_loc = spec.tau;
        const NetModel net(build_rep(rs), b);
        for (int k : spec.cone_counts) rows.push_back({n, h, k, lightcone_defect(net, k)});
    }
    return rows;
}

// Nonincreasing along both ladders (grids in the given order, cone counts in the given order).
inline bool lightcone_monotone(const std::vector<LightconeRow>& rows, std::size_t cone_levels) {
    const std::size_t grids = rows.size() / cone_levels;
    for (std::size_t g = 0; g < grids; ++g)
        for (std::size_t c = 0; c < cone_levels; ++c) {
            const double d = rows[g * cone_levels + c].defect;
            if (c + 1 < cone_levels && rows[g * cone_levels + c + 1].defect > d) return false;
            if (g + 1 < grids && rows[(g + 1) * cone_levels + c].defect > d) return false;
        }
    return true;
}

// ---- direct-integral block laws -------------------------------------------------------------

struct BlockLawReport {
    double complement = 0;
    double intersection = 0;
    double sum = 0;
    double dual_region = 0;
};

inline BlockLawReport block_law_report(const NetModel& net, const Region& o1, const Region& o2) {
    require(net.kind() == ModelKind::direct_integral, "block laws need a direct-integral model");
    const LatticeRep& lr = net.rep();
    std::deque<NetModel> blocks;
    for (const Fiber& f : lr.fibers) {
        LatticeRep one;
        one.kind = ModelKind::massive;
        one.fibers = {f};
        blocks.emplace_back(one, net.budget(), net.lightcone_cones());
    }
    auto glue = [&](const std::function<RealSubspace(const NetModel&)>& op) {
        std::vector<Mat> cols;
        Eigen::Index total = 0;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            cols.push_back(detail::embed_rows(lr, i, op(blocks[i]).basis));
            total += cols.back().cols();
        }
        Mat b(2 * lr.dim(), total);
        Eigen::Index at = 0;
        for (const Mat& c : cols) {
            b.middleCols(at, c.cols()) = c;
            at += c.cols();
        }
        return RealSubspace{b};
    };
    const Region w1 = regions::wedge_right(), w2 = regions::wedge_right(-0.5, 0.5);
    BlockLawReport r;
    r.complement = distance(symplectic_complement(net.wedge_subspace(w1)),
                            glue([&](const NetModel& m) { return symplectic_complement(m.wedge_subspace(w1)); }));
    r.intersection = distance(intersect_near({net.wedge_subspace(w1), net.wedge_subspace(w2)}, net.budget().tau_loc, 1),
                              glue([&](const NetModel& m) {
                                  return intersect_near({m.wedge_subspace(w1), m.wedge_subspace(w2)}, net.budget().tau_loc, 1);
                              }));
    r.sum = distance(sum_closure({net.region_subspace_dual(o1), net.region_subspace_dual(o2)}),
                     glue([&](const NetModel& m) { return sum_closure({m.region_subspace_dual(o1), m.region_subspace_dual(o2)}); }));
    r.dual_region = distance(net.region_subspace_dual(o1), glue([&](const NetModel& m) { return m.region_subspace_dual(o1); }));
    return r;
}

// ---- spectral checks -----------------------------------------------------------------------

// U(rho_{-2pi} x rho_{2pi}) = 1 on the joint spectrum iff all differences are integers.
inline bool spin_statistics_spectrum_check(const std::vector<double>& left, const std::vector<double>& right, double tol = 1e-9) {
    for (double l : left)
        for (double r : right) {
            const double d = r - l;
            if (std::abs(d - std::round(d)) > tol) return false;
        }
    return true;
}

struct PartitionResult {
    double truncated = 0;
    double closed_form = 0;
    double error = 0;
    double tail_bound = 0;
};

// (sum_{n=1}^N e^{-beta n})^2 against (e^{-beta} / (1 - e^{-beta}))^2.
inline PartitionResult trace_class_partition(double beta, int cutoff) {
    require(beta > 0 && std::isfinite(beta), "beta must be positive");
    require(cutoff >= 1, "cutoff must be at least 1");
    const double q = std::exp(-beta);
    const double one = -std::expm1(-beta);
    PartitionResult r;
    const double single = q / one;
    // Finite geometric series q (1 - q^N) / (1 - q); the gap to the full series is q^{N+1} / (1 - q).
    const double qn = std::exp(-beta * cutoff);
    const double trunc = q * (-std::expm1(-beta * cutoff)) / one;
    const double gap = q * qn / one;
    r.truncated = trunc * trunc;
    r.closed_form = single * single;
    r.error = gap * (single + trunc);
    r.tail_bound = 2 * single * gap;
    return r;
}

}  // namespace modnet
