#pragma once

// Experiment configs (JSON key-value trees) and run reports.
// Parsing is strict: unknown keys and wrong types are config errors.

#include "modnet/suites.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <variant>

namespace modnet {

using json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "modnet.report/1";
inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct ConfigError : Error {
    using Error::Error;
};

// ---- scalar and region literals ----------------------------------------------------------

// Infinite endpoints are written as the strings "inf" / "-inf".
inline json endpoint_to_json(double x) {
    if (x == kInf) return "inf";
    if (x == -kInf) return "-inf";
    return x;
}

inline double endpoint_from_json(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    throw ConfigError(where + ": expected a number, \"inf\" or \"-inf\"");
}

inline json region_to_json(const Region& r) {
    return json{{"kind", to_string(r.kind)},
                {"left", {endpoint_to_json(r.left.lo), endpoint_to_json(r.left.hi)}},
                {"right", {endpoint_to_json(r.right.lo), endpoint_to_json(r.right.hi)}}};
}

inline Region region_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": region must be an object");
    for (const auto& [k, v] : j.items())
        if (k != "kind" && k != "left" && k != "right") throw ConfigError(where + ": unknown key '" + k + "'");
    auto span = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2)
            throw ConfigError(where + "." + key + ": expected a two-element array");
        return Span{endpoint_from_json(j[key][0], where + "." + key), endpoint_from_json(j[key][1], where + "." + key)};
    };
    Region r;
    try {
        r = Region::make(span("left"), span("right"));
    } catch (const InvalidArgument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    if (j.contains("kind")) {
        if (!j["kind"].is_string()) throw ConfigError(where + ".kind: expected a string");
        const std::string k = j["kind"].get<std::string>();
        if (k != to_string(r.kind)) throw ConfigError(where + ": kind '" + k + "' does not match the intervals (" + to_string(r.kind) + ")");
    }
    return r;
}

// ---- strict object reader -------------------------------------------------------------------

class Fields {
public:
    Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        if (!j_.contains(key)) return;
        seen_.insert(key);
        try {
            out = j_.at(key).template get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(path(key) + ": wrong type");
        }
    }

    void get_region(const char* key, Region& out) {
        if (!j_.contains(key)) return;
        seen_.insert(key);
        out = region_from_json(j_.at(key), path(key));
    }

    // Nested object handled by a callback that receives its own reader.
    template <class F>
    void nested(const char* key, F&& f) {
        if (!j_.contains(key)) return;
        seen_.insert(key);
        Fields sub(j_.at(key), path(key));
        f(sub);
        sub.finish();
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
    }

    std::string path(const char* key) const { return where_ + "." + key; }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

inline void require_config(bool cond, const std::string& msg) {
    if (!cond) throw ConfigError(msg);
}

// ---- model ----------------------------------------------------------------------------------

inline ModelKind model_kind_from_string(const std::string& s, const std::string& where) {
    for (ModelKind k : {ModelKind::chiral, ModelKind::chiral_sum, ModelKind::massive, ModelKind::direct_integral, ModelKind::twisted})
        if (to_string(k) == s) return k;
    throw ConfigError(where + ": unknown model kind '" + s + "'");
}

inline json to_json(const Budget& b) { return {{"scale", b.scale}, {"floor", b.floor}, {"tau_loc", b.tau_loc}}; }

inline void read(Fields& f, Budget& b) {
    f.get("scale", b.scale);
    f.get("floor", b.floor);
    f.get("tau_loc", b.tau_loc);
    require_config(b.scale > 0 && b.floor >= 0 && b.tau_loc > 0, f.path("scale") + ": budget parameters must be positive");
}

inline json to_json(const ModelConfig& m) {
    return {{"kind", to_string(m.rep.kind)}, {"n", m.rep.n},           {"h", m.rep.h},
            {"masses", m.rep.masses},       {"mass_step", m.rep.mass_step}, {"charge", m.rep.charge},
            {"charged", m.rep.charged},     {"twist_charge", m.twist_charge}, {"q", m.q},
            {"cones", m.cones},             {"budget", to_json(m.budget)}};
}

inline void read(Fields& f, ModelConfig& m) {
    std::string kind = to_string(m.rep.kind);
    f.get("kind", kind);
    m.rep.kind = model_kind_from_string(kind, f.path("kind"));
    f.get("n", m.rep.n);
    f.get("h", m.rep.h);
    f.get("masses", m.rep.masses);
    f.get("mass_step", m.rep.mass_step);
    f.get("charge", m.rep.charge);
    f.get("charged", m.rep.charged);
    f.get("twist_charge", m.twist_charge);
    f.get("q", m.q);
    f.get("cones", m.cones);
    f.nested("budget", [&](Fields& b) { read(b, m.budget); });
    require_config(m.rep.n >= 2 && m.rep.h > 0, f.path("n") + ": grid needs n >= 2 and h > 0");
}

// ---- per-command parameters -----------------------------------------------------------------

inline json to_json(const MobiusSuiteConfig& c) {
    return {{"samples", c.samples}, {"family_samples", c.family_samples}, {"group_samples", c.group_samples},
            {"range", c.range},     {"tol", c.tol}};
}
inline void read(Fields& f, MobiusSuiteConfig& c) {
    f.get("samples", c.samples);
    f.get("family_samples", c.family_samples);
    f.get("group_samples", c.group_samples);
    f.get("range", c.range);
    f.get("tol", c.tol);
    require_config(c.samples > 0 && c.range > 0, f.path("samples") + ": need positive samples and range");
}

inline json to_json(const StdspaceSuiteConfig& c) { return {{"count", c.count}, {"n", c.n}, {"ts", c.ts}, {"tol", c.tol}}; }
inline void read(Fields& f, StdspaceSuiteConfig& c) {
    f.get("count", c.count);
    f.get("n", c.n);
    f.get("ts", c.ts);
    f.get("tol", c.tol);
    require_config(c.count > 0 && c.n > 0, f.path("count") + ": need positive count and n");
}

inline json to_json(const HalperinSuiteConfig& c) {
    return {{"pairs", c.pairs}, {"n", c.n}, {"max_iter", c.max_iter}, {"tol", c.tol}, {"agree", c.agree}};
}
inline void read(Fields& f, HalperinSuiteConfig& c) {
    f.get("pairs", c.pairs);
    f.get("n", c.n);
    f.get("max_iter", c.max_iter);
    f.get("tol", c.tol);
    f.get("agree", c.agree);
    require_config(c.pairs > 0 && c.n > 0 && c.max_iter > 0, f.path("pairs") + ": need positive pairs, n, max_iter");
}

inline json to_json(const AxiomSampling& s) {
    return {{"translations", s.translations},
            {"massive_translations", s.massive_translations},
            {"boost_steps", s.boost_steps},
            {"ts", s.ts},
            {"local_checks", s.local_checks},
            {"vectors",
             {{"chiral_centers", s.vectors.chiral_centers},
              {"chiral_sigma", s.vectors.chiral_sigma},
              {"massive_centers", s.vectors.massive_centers},
              {"massive_sigma", s.vectors.massive_sigma}}}};
}
inline void read(Fields& f, AxiomSampling& s) {
    f.get("translations", s.translations);
    f.get("massive_translations", s.massive_translations);
    f.get("boost_steps", s.boost_steps);
    f.get("ts", s.ts);
    f.get("local_checks", s.local_checks);
    f.nested("vectors", [&](Fields& v) {
        v.get("chiral_centers", s.vectors.chiral_centers);
        v.get("chiral_sigma", s.vectors.chiral_sigma);
        v.get("massive_centers", s.vectors.massive_centers);
        v.get("massive_sigma", s.vectors.massive_sigma);
    });
}

inline json to_json(const AxiomSuiteConfig& c) {
    return {{"model", to_json(c.model)},
            {"sampling", to_json(c.sampling)},
            {"round_trip", c.round_trip},
            {"axioms", c.axioms},
            {"block", {{"o1", region_to_json(c.block_o1)}, {"o2", region_to_json(c.block_o2)}, {"tol", c.block_tol}}}};
}
inline void read(Fields& f, AxiomSuiteConfig& c) {
    f.nested("model", [&](Fields& m) { read(m, c.model); });
    f.nested("sampling", [&](Fields& s) { read(s, c.sampling); });
    f.get("round_trip", c.round_trip);
    f.get("axioms", c.axioms);
    f.nested("block", [&](Fields& b) {
        b.get_region("o1", c.block_o1);
        b.get_region("o2", c.block_o2);
        b.get("tol", c.block_tol);
    });
}

inline json to_json(const ReconstructSuiteConfig& c) {
    return {{"model", to_json(c.model)}, {"t_steps", c.t_steps}, {"s_steps", c.s_steps}, {"tol", c.tol}};
}
inline void read(Fields& f, ReconstructSuiteConfig& c) {
    f.nested("model", [&](Fields& m) { read(m, c.model); });
    f.get("t_steps", c.t_steps);
    f.get("s_steps", c.s_steps);
    f.get("tol", c.tol);
}

inline json to_json(const BreakBwSuiteConfig& c) {
    return {{"n", c.n}, {"q", c.q}, {"ts", c.ts}, {"tol", c.tol}, {"axioms", c.axioms}};
}
inline void read(Fields& f, BreakBwSuiteConfig& c) {
    f.get("n", c.n);
    f.get("q", c.q);
    f.get("ts", c.ts);
    f.get("tol", c.tol);
    f.get("axioms", c.axioms);
    require_config(c.n >= 2 && !c.ts.empty(), f.path("n") + ": need n >= 2 and at least one t");
}

inline json to_json(const LightconeSuiteConfig& c) {
    json grids = json::array();
    for (const auto& [n, h] : c.spec.grids) grids.push_back({n, h});
    return {{"masses", c.spec.masses}, {"grids", grids}, {"cone_counts", c.spec.cone_counts}, {"tau", c.spec.tau}, {"frozen", c.frozen}};
}
inline void read(Fields& f, LightconeSuiteConfig& c) {
    f.get("masses", c.spec.masses);
    f.get("grids", c.spec.grids);
    f.get("cone_counts", c.spec.cone_counts);
    f.get("tau", c.spec.tau);
    f.get("frozen", c.frozen);
    require_config(!c.spec.grids.empty() && !c.spec.cone_counts.empty() && !c.spec.masses.empty(),
                   f.path("grids") + ": need grids, cone counts and masses");
}

inline json to_json(const SpinStatisticsSuiteConfig& c) {
    return {{"pairs", c.pairs}, {"left_size", c.left_size}, {"right_size", c.right_size}};
}
inline void read(Fields& f, SpinStatisticsSuiteConfig& c) {
    f.get("pairs", c.pairs);
    f.get("left_size", c.left_size);
    f.get("right_size", c.right_size);
    require_config(c.pairs > 0 && c.left_size > 0 && c.right_size > 0, f.path("pairs") + ": sizes must be positive");
}

inline json to_json(const TraceClassSuiteConfig& c) { return {{"betas", c.betas}, {"cutoff", c.cutoff}, {"rel_tol", c.rel_tol}}; }
inline void read(Fields& f, TraceClassSuiteConfig& c) {
    f.get("betas", c.betas);
    f.get("cutoff", c.cutoff);
    f.get("rel_tol", c.rel_tol);
    require_config(!c.betas.empty() && c.cutoff >= 1, f.path("betas") + ": need betas and cutoff >= 1");
    for (double b : c.betas) require_config(b > 0, f.path("betas") + ": beta must be positive");
}

inline json to_json(const FockSuiteConfig& c) {
    return {{"max_n", c.max_n}, {"order", c.order}, {"trials", c.trials}, {"gram_size", c.gram_size}, {"wedge_n", c.wedge_n}};
}
inline void read(Fields& f, FockSuiteConfig& c) {
    f.get("max_n", c.max_n);
    f.get("order", c.order);
    f.get("trials", c.trials);
    f.get("gram_size", c.gram_size);
    f.get("wedge_n", c.wedge_n);
    require_config(c.max_n >= 1 && c.order >= 1 && c.gram_size >= 1 && c.wedge_n >= 2, f.path("order") + ": sizes must be positive");
}

// ---- experiment config ----------------------------------------------------------------------

using SuiteParams = std::variant<MobiusSuiteConfig, StdspaceSuiteConfig, HalperinSuiteConfig, AxiomSuiteConfig,
                                 ReconstructSuiteConfig, BreakBwSuiteConfig, LightconeSuiteConfig,
                                 SpinStatisticsSuiteConfig, TraceClassSuiteConfig, FockSuiteConfig>;

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"verify-mobius",   "verify-stdspace",  "halperin-bench", "bgl-axioms",
                                                "reconstruct-mobius", "break-bw",      "lightcone-defect", "spin-statistics",
                                                "trace-class",     "fock-checks"};
    return names;
}

inline SuiteParams default_params(const std::string& command) {
    const auto& n = command_names();
    const auto it = std::find(n.begin(), n.end(), command);
    if (it == n.end()) throw ConfigError("unknown experiment '" + command + "'");
    switch (it - n.begin()) {
        case 0: return MobiusSuiteConfig{};
        case 1: return StdspaceSuiteConfig{};
        case 2: return HalperinSuiteConfig{};
        case 3: return AxiomSuiteConfig{};
        case 4: return ReconstructSuiteConfig{};
        case 5: return BreakBwSuiteConfig{};
        case 6: return LightconeSuiteConfig{};
        case 7: return SpinStatisticsSuiteConfig{};
        case 8: return TraceClassSuiteConfig{};
        default: return FockSuiteConfig{};
    }
}

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = kDefaultSeed;
    SuiteParams params;
};

inline json to_json(const ExperimentConfig& c) {
    json j{{"experiment", c.experiment}, {"seed", c.seed}};
    j["params"] = std::visit([](const auto& p) { return to_json(p); }, c.params);
    return j;
}

inline ExperimentConfig config_from_json(const json& j) {
    Fields f(j, "config");
    ExperimentConfig c;
    f.get("experiment", c.experiment);
    require_config(!c.experiment.empty(), "config: missing 'experiment'");
    c.params = default_params(c.experiment);
    f.get("seed", c.seed);
    f.nested("params", [&](Fields& p) { std::visit([&](auto& q) { read(p, q); }, c.params); });
    f.finish();
    return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ConfigError("config is empty");
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

inline ExperimentConfig load_config(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot read config " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// The --budget-scale option multiplies the model constant C wherever a model budget is in play.
inline void apply_budget_scale(ExperimentConfig& c, double factor) {
    require_config(factor > 0 && std::isfinite(factor), "budget scale must be positive");
    std::visit(
        [&](auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, AxiomSuiteConfig> || std::is_same_v<P, ReconstructSuiteConfig>) p.model.budget.scale *= factor;
        },
        c.params);
}

inline SuiteResult run_suite(const ExperimentConfig& c) {
    Rng rng(c.seed);
    return std::visit(
        [&](const auto& p) -> SuiteResult {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MobiusSuiteConfig>) return mobius_suite(p, rng);
            else if constexpr (std::is_same_v<P, StdspaceSuiteConfig>) return stdspace_suite(p, rng);
            else if constexpr (std::is_same_v<P, HalperinSuiteConfig>) return halperin_suite(p, rng);
            else if constexpr (std::is_same_v<P, AxiomSuiteConfig>) return axiom_suite(p);
            else if constexpr (std::is_same_v<P, ReconstructSuiteConfig>) return reconstruct_suite(p);
            else if constexpr (std::is_same_v<P, BreakBwSuiteConfig>) return break_bw_suite(p);
            else if constexpr (std::is_same_v<P, LightconeSuiteConfig>) return lightcone_suite(p);
            else if constexpr (std::is_same_v<P, SpinStatisticsSuiteConfig>) return spin_statistics_suite(p, rng);
            else if constexpr (std::is_same_v<P, TraceClassSuiteConfig>) return trace_class_suite(p);
            else return fock_suite(p, rng);
        },
        c.params);
}

// ---- report ---------------------------------------------------------------------------------

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json environment_fingerprint() {
    json e;
#if defined(__clang__)
    e["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
    e["compiler"] = std::string("gcc ") + __VERSION__;
#else
    e["compiler"] = "unknown";
#endif
    e["cplusplus"] = static_cast<long>(__cplusplus);
    e["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION);
#ifdef NDEBUG
    e["assertions"] = false;
#else
    e["assertions"] = true;
#endif
    return e;
}

inline std::string csv_name(const std::string& command, const Table& t) { return command + "_" + t.name + ".csv"; }

// Everything except "timestamp" is a function of the config and the build.
inline json make_report(const ExperimentConfig& c, const SuiteResult& r, double wall_seconds, const std::string& utc) {
    json j;
    j["schema"] = kReportSchema;
    j["command"] = c.experiment;
    j["seed"] = c.seed;
    j["config"] = to_json(c);
    j["pass"] = r.pass();
    j["max_residual"] = number_or_null(r.max_residual());
    json checks = json::array();
    for (const auto& k : r.checks)
        checks.push_back({{"name", k.name},
                          {"residual", number_or_null(k.residual)},
                          {"budget", number_or_null(k.budget)},
                          {"formula", k.formula},
                          {"pass", k.pass},
                          {"required", k.required},
                          {"note", k.note}});
    j["checks"] = checks;
    json tables = json::array();
    for (const auto& t : r.tables) tables.push_back({{"name", t.name}, {"file", csv_name(c.experiment, t)}, {"columns", t.columns}, {"rows", t.rows.size()}});
    j["tables"] = tables;
    j["environment"] = environment_fingerprint();
    j["timestamp"] = {{"utc", utc}, {"wall_seconds", wall_seconds}};
    return j;
}

inline std::string table_csv(const Table& t) {
    std::ostringstream os;
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
    os << "\n";
    os << std::setprecision(17);
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
        os << "\n";
    }
    return os.str();
}

inline std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace modnet
