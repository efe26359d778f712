// Command-line front end: loads kernel/polynomial specs, runs the checkers,
// ships the built-in scenarios, and writes JSON reports plus CSV residuals.
//
// Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 input error.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <iostream>

#include "CLI11.hpp"
#include "opkernel/config.hpp"
#include "opkernel/fixtures.hpp"
#include "opkernel/report.hpp"

namespace {

namespace fs = std::filesystem;
using namespace opkernel;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitInputError = 3;

struct CommonFlags {
    std::string spec;
    std::string out_dir;
    double tol_eps = 0.0;
    double tol_measure = 0.0;
    int nodes = 0;
    double panel_width = 0.0;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void apply_overrides(RunConfig& cfg, const CommonFlags& flags) {
    if (flags.nodes > 0) cfg.rule.nodes_per_panel = flags.nodes;
    if (flags.panel_width > 0.0) cfg.rule.max_panel_width = flags.panel_width;
    if (flags.tol_eps > 0.0) {
        cfg.tolerance.eps_value = flags.tol_eps;
        cfg.tolerance.eps_rel = flags.tol_eps;
        cfg.tolerance_given = true;
    }
    if (flags.tol_measure > 0.0) {
        cfg.tolerance.eps_measure = flags.tol_measure;
        cfg.tolerance_given = true;
    }
    if (flags.seed_given) cfg.seed = flags.seed;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

int verdict_exit_code(const CheckReport& report) {
    if (report.verdict == "pass") return kExitPass;
    if (report.verdict == "inconclusive") return kExitInconclusive;
    return kExitFail;
}

int cmd_verify(const CommonFlags& flags) {
    RunConfig cfg = load_run_config(flags.spec);
    apply_overrides(cfg, flags);
    const CheckReport report = run_configured_check(cfg);

    const std::string json = report_to_json(report);
    std::cout << json;
    if (!flags.out_dir.empty()) {
        fs::create_directories(flags.out_dir);
        write_file(fs::path(flags.out_dir) / "report.json", json);
        write_file(fs::path(flags.out_dir) / "residuals.csv", report_to_csv(report));
    }
    return verdict_exit_code(report);
}

int cmd_fixture(const std::string& name, const CommonFlags& flags) {
    QuadratureRule rule;
    if (flags.nodes > 0) rule.nodes_per_panel = flags.nodes;
    if (flags.panel_width > 0.0) rule.max_panel_width = flags.panel_width;
    const std::uint64_t seed = flags.seed_given ? flags.seed : 1;

    const fixtures::FixtureResult result = fixtures::run_fixture(name, rule, seed);
    std::cout << fixtures::format_table(result);
    if (!flags.out_dir.empty()) {
        fs::create_directories(flags.out_dir);
        write_file(fs::path(flags.out_dir) / (name + "_report.json"),
                   report_to_json(result.report));
    }
    return verdict_exit_code(result.report);
}

int cmd_compose(const CommonFlags& flags) {
    RunConfig cfg = load_run_config(flags.spec);
    apply_overrides(cfg, flags);
    if (!cfg.kernel_a) throw ConfigError("compose needs kernel A");

    LebesgueSet g = cfg.kernel_a->support();
    if (!g.bounded()) {
        if (!cfg.window) throw ConfigError("unbounded kernel support requires a \"window\"");
        g = intersect(g, LebesgueSet::interval(cfg.window->lo, cfg.window->hi));
    }

    GridKernel gk;
    if (cfg.kernel_b) {
        gk = compose_kernels(cfg.kernel_a->with_support(g), g, *cfg.kernel_b, cfg.rule);
    } else if (cfg.has_f) {
        gk = polynomial_kernel(cfg.kernel_a->with_support(g), g, cfg.poly, cfg.rule);
    } else {
        const int m = cfg.iterate_m.value_or(1);
        gk = iterated_kernel(cfg.kernel_a->with_support(g), g, m, cfg.rule);
    }

    std::ostringstream norms;
    norms << "p,norm_bound\n";
    norms << "1," << kernel_norm_bound(gk, 1.0) << "\n";
    norms << "2," << kernel_norm_bound(gk, 2.0) << "\n";
    norms << "inf," << kernel_norm_bound(gk, kInfNorm) << "\n";

    std::cout << norms.str();
    if (!flags.out_dir.empty()) {
        fs::create_directories(flags.out_dir);
        write_file(fs::path(flags.out_dir) / "kernel.csv", grid_kernel_to_csv(gk));
        write_file(fs::path(flags.out_dir) / "norms.csv", norms.str());
    }
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernel-condition checker for integral-operator commutation relations"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string fixture_name;

    auto add_common = [&](CLI::App* cmd, bool needs_spec) {
        if (needs_spec) {
            cmd->add_option("--spec", flags.spec, "JSON spec file")->required();
        }
        cmd->add_option("--tol-eps", flags.tol_eps, "override eps_value and eps_rel");
        cmd->add_option("--tol-measure", flags.tol_measure, "override eps_measure");
        cmd->add_option("--nodes", flags.nodes, "Gauss nodes per panel");
        cmd->add_option("--panel-width", flags.panel_width, "maximum panel width");
        cmd->add_option("--out", flags.out_dir, "output directory for reports");
        cmd->add_option("--seed", flags.seed, "battery seed")
            ->each([&](const std::string&) { flags.seed_given = true; });
    };

    CLI::App* verify = app.add_subcommand("verify", "run a configured checker");
    add_common(verify, true);

    CLI::App* fixture = app.add_subcommand("fixture", "run a built-in scenario");
    fixture->add_option("name", fixture_name, "fixture name")->required();
    add_common(fixture, false);

    CLI::App* compose = app.add_subcommand("compose", "compose/iterate kernels to CSV");
    add_common(compose, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitPass : kExitInputError;
    }

    try {
        if (verify->parsed()) return cmd_verify(flags);
        if (fixture->parsed()) return cmd_fixture(fixture_name, flags);
        if (compose->parsed()) return cmd_compose(flags);
    } catch (const ConfigError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
