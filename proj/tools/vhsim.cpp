// Command-line front end: run, eig, check and plot.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "vhsim/config.hpp"
#include "vhsim/errors.hpp"
#include "vhsim/output.hpp"
#include "vhsim/plot.hpp"
#include "vhsim/spectral.hpp"

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kInvariant = 3, kIo = 4 };

int cmd_run(const std::string& source, const std::string& output, const std::string& policy, bool plot) {
    vhsim::ScenarioConfig cfg = vhsim::load_config(source);
    if (!policy.empty()) cfg.diagnostics.policy = vhsim::violation_policy_from_string(policy);
    const vhsim::Scenario scenario = vhsim::build_scenario(cfg);
    std::optional<std::filesystem::path> root;
    if (!output.empty()) root = output;
    const auto outcome = vhsim::run_scenario(scenario, root);
    std::cout << vhsim::format_report(cfg, outcome);
    std::cout << "artifacts: " << outcome.run_dir.string() << "\n";
    if (plot) {
        for (const auto& p : vhsim::emit_plots(outcome.run_dir)) std::cout << "plot: " << p.string() << "\n";
    }
    return kOk;
}

int cmd_eig(const std::string& source, double tol) {
    const vhsim::Scenario s = vhsim::build_scenario(vhsim::load_config(source));
    const auto domain = vhsim::full_mask(s.grid);
    vhsim::EigenOptions opt;
    opt.tol = tol;
    const auto eig = vhsim::principal_eigenvalue(s.grid, s.params.diffusivity, s.params.birth, domain, opt);
    const auto bounds = vhsim::param_bounds(s.params);
    const auto verdict = vhsim::persistence_criterion(s.grid, s.params.birth, bounds.D_M);
    std::printf("principal_eigenvalue_per_month: %.10g\n", eig.lambda1);
    std::printf("iterations: %zu\n", eig.iterations);
    std::printf("residual: %.3e\n", eig.residual);
    std::printf("vector_persistence: %s\n", eig.lambda1 > 0.0 ? "yes (lambda1 > 0)" : "not guaranteed (lambda1 <= 0)");
    std::printf("integral_beta: %.10g\n", verdict.lhs);
    std::printf("pi2_DM_over_2: %.10g\n", verdict.rhs);
    std::printf("persistence_criterion: %s\n", verdict.satisfied ? "satisfied" : "not satisfied");
    return kOk;
}

int cmd_check(const std::string& source, bool echo) {
    const vhsim::ScenarioConfig cfg = vhsim::load_config(source);
    if (echo) {
        std::cout << vhsim::write_config(cfg);
        return kOk;
    }
    const vhsim::Scenario s = vhsim::build_scenario(cfg);
    const vhsim::Integrator integrator(s.grid, s.masks, s.params, cfg.domain.boundary_mode, cfg.solver.cfl_safety,
                                       s.initial);
    const auto& lim = integrator.limits();
    std::printf("config %s: ok\n", cfg.name.c_str());
    std::printf("grid: %zu x %zu cells, h = %g km\n", s.grid.nx(), s.grid.ny(), s.grid.h());
    std::printf("subregions: %zu\n", s.masks.size());
    std::printf("stable dt (months): advection %.4g, diffusion %.4g, reaction %.4g -> %.4g\n", lim.advection_dt,
                lim.diffusion_dt, lim.reaction_dt, std::min(lim.dt(), cfg.solver.dt_max));
    return kOk;
}

int cmd_plot(const std::string& run_dir) {
    for (const auto& p : vhsim::emit_plots(run_dir)) std::cout << p.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatial vector-host epidemic simulator"};
    app.require_subcommand(1);

    std::string source;
    std::string output;
    std::string policy;
    bool plot = false;
    auto* run = app.add_subcommand("run", "Run a scenario and write its artifacts");
    run->add_option("config", source, "Config file or preset name")->required();
    run->add_option("-o,--output", output, "Output root (overrides VHSIM_OUTPUT_ROOT and the config)");
    run->add_option("--policy", policy, "Invariant violation policy: abort or warn");
    run->add_flag("--plot", plot, "Render plots after the run");

    double tol = 1e-8;
    auto* eig = app.add_subcommand("eig", "Principal eigenvalue of div(D grad) + beta on the domain");
    eig->add_option("config", source, "Config file or preset name")->required();
    eig->add_option("--tol", tol, "Relative eigenvalue tolerance")->check(CLI::PositiveNumber);

    bool echo = false;
    auto* check = app.add_subcommand("check", "Validate a config");
    check->add_option("config", source, "Config file or preset name")->required();
    check->add_flag("--echo", echo, "Print the config with all defaults applied");

    std::string run_dir;
    auto* plot_cmd = app.add_subcommand("plot", "Render plots of a run directory");
    plot_cmd->add_option("run-dir", run_dir, "Directory written by 'run'")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*run) return cmd_run(source, output, policy, plot);
        if (*eig) return cmd_eig(source, tol);
        if (*check) return cmd_check(source, echo);
        if (*plot_cmd) return cmd_plot(run_dir);
    } catch (const vhsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const vhsim::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kInvariant;
    } catch (const vhsim::StabilityError& e) {
        std::cerr << "stability violation: " << e.what() << "\n";
        return kInvariant;
    } catch (const vhsim::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
