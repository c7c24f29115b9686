// modnet <command> --config <path> --out <dir> [--seed N] [--budget-scale X]
// Exit status: 0 all checks pass, 1 a check failed, 2 config or usage error, 3 internal error.

#include "modnet/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kConfigError = 2, kInternalError = 3 };

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    double budget_scale = 1.0;
    bool quiet = false;
};

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw modnet::Error("cannot write " + p.string());
    f << text;
    if (!f) throw modnet::Error("write failed for " + p.string());
}

int run(const std::string& command, const Options& opt) {
    using namespace modnet;
    ExperimentConfig cfg;
    try {
        cfg = load_config(opt.config);
        if (cfg.experiment != command)
            throw ConfigError("config is for '" + cfg.experiment + "' but the command is '" + command + "'");
        if (opt.seed) cfg.seed = *opt.seed;
        apply_budget_scale(cfg, opt.budget_scale);
    } catch (const ConfigError& e) {
        std::cerr << "modnet: config error: " << e.what() << "\n";
        return kConfigError;
    }

    std::string out = opt.out;
    if (out.empty()) {
        const char* env = std::getenv("MODNET_OUT_DIR");
        out = env && *env ? env : "modnet-out";
    }

    SuiteResult res;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        res = run_suite(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "modnet: config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const InvalidArgument& e) {
        // preconditions of the library are config problems from the runner's point of view
        std::cerr << "modnet: config error: " << e.what() << "\n";
        return kConfigError;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::filesystem::create_directories(out);
    const json report = make_report(cfg, res, wall, utc_now());
    write_file(std::filesystem::path(out) / (command + ".json"), report.dump(2) + "\n");
    for (const auto& t : res.tables) write_file(std::filesystem::path(out) / csv_name(command, t), table_csv(t));

    if (!opt.quiet) {
        for (const auto& c : res.checks)
            std::cout << (c.pass ? "pass " : (c.required ? "FAIL " : "info ")) << c.name << "  residual " << c.residual
                      << "  budget " << c.budget << " (" << c.formula << ")\n";
        std::cout << command << ": " << (res.pass() ? "pass" : "FAIL") << ", report in " << out << "\n";
    }
    return res.pass() ? kPass : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification suites and studies for modular nets on lattice models"};
    app.require_subcommand(1);
    Options opt;
    std::string chosen;
    for (const auto& name : modnet::command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory (default $MODNET_OUT_DIR, then ./modnet-out)");
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_option("--budget-scale", opt.budget_scale, "multiply the model budget constant C")->check(CLI::PositiveNumber);
        sub->add_flag("--quiet", opt.quiet, "no per-check lines on stdout");
        sub->callback([&chosen, name] { chosen = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kConfigError;
    }
    try {
        return run(chosen, opt);
    } catch (const std::exception& e) {
        std::cerr << "modnet: internal error: " << e.what() << "\n";
        return kInternalError;
    }
}
