#include "modnet/io.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace modnet;

namespace {

const std::filesystem::path kSource = MODNET_SOURCE_DIR;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json strip_timestamp(json j) {
    j.erase("timestamp");
    return j;
}

// Small settings for every command so the whole catalogue can be exercised quickly.
std::vector<ExperimentConfig> small_configs() {
    std::vector<ExperimentConfig> out;
    auto add = [&](const std::string& cmd, auto params) { out.push_back({cmd, 7, params}); };
    add("verify-mobius", MobiusSuiteConfig{50, 20, 100, 2.0, 1e-11});
    add("verify-stdspace", StdspaceSuiteConfig{10, 4, {0.1, -1.0}, 1e-8});
    add("halperin-bench", HalperinSuiteConfig{10, 4, 5000, 1e-9, 1e-7});
    for (ModelKind k : {ModelKind::chiral_sum, ModelKind::massive}) {
        AxiomSuiteConfig a;
        a.model.rep.kind = k;
        a.model.rep.n = 16;
        add("bgl-axioms", a);
    }
    AxiomSuiteConfig d;
    d.model.rep.kind = ModelKind::direct_integral;
    d.model.rep.n = 16;
    d.model.rep.masses = {1.0, 2.0};
    d.round_trip = false;
    add("bgl-axioms", d);
    ReconstructSuiteConfig r;
    r.model.rep.n = 32;
    add("reconstruct-mobius", r);
    add("break-bw", BreakBwSuiteConfig{16, 1.0, {0.25}, 1e-8, true});
    add("break-bw", BreakBwSuiteConfig{16, 0.0, {0.25}, 1e-8, false});
    LightconeSuiteConfig l;
    l.spec.grids = {{16, 1.0}};
    l.spec.cone_counts = {2};
    l.frozen = 1.0;
    add("lightcone-defect", l);
    add("spin-statistics", SpinStatisticsSuiteConfig{6, 2, 2});
    add("trace-class", TraceClassSuiteConfig{});
    add("fock-checks", FockSuiteConfig{2, 8, 1, 4, 4});
    return out;
}

}  // namespace

TEST(Config, DefaultsRoundTripForEveryCommand) {
    for (const auto& name : command_names()) {
        const ExperimentConfig c{name, 42, default_params(name)};
        const json j = to_json(c);
        const ExperimentConfig back = config_from_json(j);
        EXPECT_EQ(to_json(back).dump(), j.dump()) << name;
        EXPECT_EQ(back.seed, 42u);
    }
}

TEST(Config, ShippedConfigsParseAndRoundTrip) {
    int count = 0;
    for (const auto& e : std::filesystem::directory_iterator(kSource / "configs")) {
        if (e.path().extension() != ".json") continue;
        const ExperimentConfig c = load_config(e.path());
        const json j = to_json(c);
        EXPECT_EQ(to_json(config_from_json(j)).dump(), j.dump()) << e.path();
        // the file name starts with its command
        EXPECT_EQ(e.path().stem().string().rfind(c.experiment, 0), 0u) << e.path();
        ++count;
    }
    EXPECT_GE(count, static_cast<int>(command_names().size()));
}

TEST(Config, ParseErrors) {
    EXPECT_THROW(parse_config(""), ConfigError);
    EXPECT_THROW(parse_config("  \n"), ConfigError);
    EXPECT_THROW(parse_config("{}"), ConfigError);
    EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
    EXPECT_THROW(parse_config("{\"experiment\": \"trace-class\""), ConfigError);
    EXPECT_THROW(parse_config(R"({"experiment": "no-such-thing"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"experiment": "trace-class", "sede": 3})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"experiment": "trace-class", "params": {"betas": "x"}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"experiment": "trace-class", "params": {"betas": [-1]}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"experiment": "bgl-axioms", "params": {"model": {"kind": "scalar"}}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"experiment": "bgl-axioms", "params": {"model": {"budget": {"scale": 0}}}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"experiment": "bgl-axioms", "params": {"block": {"o1": {"left": [0, 1]}}}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"experiment": "bgl-axioms",
        "params": {"block": {"o1": {"kind": "WedgeRight", "left": [0, 1], "right": [0, 1]}}}})"),
                 ConfigError);
    try {
        parse_config(R"({"experiment": "fock-checks", "params": {"order": 12, "extra": 1}})");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("extra"), std::string::npos);
    }
    // a minimal valid config takes every default
    const ExperimentConfig c = parse_config(R"({"experiment": "trace-class"})");
    EXPECT_EQ(c.seed, kDefaultSeed);
    EXPECT_EQ(std::get<TraceClassSuiteConfig>(c.params).cutoff, TraceClassSuiteConfig{}.cutoff);
}

TEST(Config, RegionLiteralsWithInfiniteEndpoints) {
    for (const Region& r : {regions::wedge_right(), regions::wedge_left(0.5, -1), regions::forward_cone(), regions::d0(),
                            regions::band_left(), regions::backward_cone(2, 3)}) {
        const json j = region_to_json(r);
        EXPECT_TRUE(region_from_json(j, "r") == r) << j.dump();
    }
    const json w = region_to_json(regions::wedge_right());
    EXPECT_EQ(w["left"][0], "-inf");
    EXPECT_EQ(w["right"][1], "inf");
    EXPECT_THROW(region_from_json(json{{"left", {0, "infinity"}}, {"right", {0, 1}}}, "r"), ConfigError);
}

TEST(Config, BudgetScaleOnlyTouchesModelBudgets) {
    ExperimentConfig a = parse_config(R"({"experiment": "bgl-axioms", "params": {"model": {"budget": {"scale": 4}}}})");
    apply_budget_scale(a, 2.5);
    EXPECT_EQ(std::get<AxiomSuiteConfig>(a.params).model.budget.scale, 10.0);
    ExperimentConfig t = parse_config(R"({"experiment": "trace-class"})");
    const std::string before = to_json(t).dump();
    apply_budget_scale(t, 3.0);
    EXPECT_EQ(to_json(t).dump(), before);
    EXPECT_THROW(apply_budget_scale(t, 0.0), ConfigError);
}

TEST(Report, DeterministicApartFromTimestamp) {
    const ExperimentConfig c{"verify-mobius", 99, MobiusSuiteConfig{200, 20, 200, 2.0, 1e-11}};
    const json a = make_report(c, run_suite(c), 0.5, "2000-01-01T00:00:00Z");
    const json b = make_report(c, run_suite(c), 1.5, "2001-01-01T00:00:00Z");
    EXPECT_NE(a.dump(), b.dump());
    EXPECT_EQ(strip_timestamp(a).dump(), strip_timestamp(b).dump());
    EXPECT_EQ(a["schema"], kReportSchema);
    EXPECT_EQ(a["seed"], 99u);
    EXPECT_EQ(a["config"]["seed"], 99u);
    // a different seed samples different parameters
    ExperimentConfig c2 = c;
    c2.seed = 100;
    EXPECT_NE(strip_timestamp(make_report(c2, run_suite(c2), 0, "")).dump(), strip_timestamp(a).dump());
}

TEST(Report, EveryCheckCitesItsBudgetAndIsCatalogued) {
    const std::string catalogue = slurp(kSource / "docs" / "checks.md");
    ASSERT_FALSE(catalogue.empty());
    std::set<std::string> seen;
    for (const ExperimentConfig& c : small_configs()) {
        const SuiteResult r = run_suite(c);
        EXPECT_FALSE(r.checks.empty()) << c.experiment;
        const json rep = make_report(c, r, 0, "");
        for (const auto& k : rep["checks"]) {
            const std::string name = k["name"];
            EXPECT_FALSE(k["formula"].get<std::string>().empty()) << name;
            seen.insert(name);
        }
        for (const auto& t : r.tables) EXPECT_NE(catalogue.find("Table `" + t.name + "`"), std::string::npos) << t.name;
    }
    for (const auto& name : seen) EXPECT_NE(catalogue.find("`" + name + "`"), std::string::npos) << name << " missing from docs/checks.md";
    EXPECT_GE(seen.size(), 40u);
}

TEST(Report, CsvKeepsFullPrecision) {
    const Table t{"demo", {"x", "y"}, {{0.1, 1.0 / 3.0}, {-2.0, 1e-300}}};
    const std::string csv = table_csv(t);
    std::istringstream in(csv);
    std::string header, line;
    std::getline(in, header);
    EXPECT_EQ(header, "x,y");
    std::getline(in, line);
    const auto comma = line.find(',');
    EXPECT_EQ(std::stod(line.substr(0, comma)), 0.1);
    EXPECT_EQ(std::stod(line.substr(comma + 1)), 1.0 / 3.0);
    EXPECT_EQ(csv_name("trace-class", t), "trace-class_demo.csv");
}

TEST(Report, NonFiniteResidualsBecomeNull) {
    SuiteResult r;
    r.command = "trace-class";
    r.add("x", std::nan(""), 1.0, kFixedTol);
    EXPECT_FALSE(r.pass());
    const json rep = make_report({"trace-class", 1, TraceClassSuiteConfig{}}, r, 0, "");
    EXPECT_TRUE(rep["checks"][0]["residual"].is_null());
    EXPECT_FALSE(rep["pass"].get<bool>());
}
