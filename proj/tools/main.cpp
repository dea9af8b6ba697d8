#include "leosched/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace leosched;

int main(int argc, char** argv) {
    CLI::App app{"Battery-aware receding-horizon task scheduling for LEO satellites"};
    app.require_subcommand(1);

    RunManifest manifest;
    double t0 = 0.0;

    auto add_common = [&](CLI::App* cmd, bool needs_out) {
        cmd->add_option("--scenario-dir", manifest.scenario_dir, "Scenario directory")
            ->required();
        cmd->add_option("--battery", manifest.battery_file,
                        "Battery config (default: <scenario-dir>/battery.cfg)");
        cmd->add_option("--truth", manifest.truth_file,
                        "Truth config (default: <scenario-dir>/truth.cfg)");
        cmd->add_option("--horizon-h", manifest.horizon_hours, "Scheduling horizon in hours");
        cmd->add_option("--min-elevation-deg", manifest.min_elevation_deg,
                        "Minimum pass elevation for uploads");
        double floor;
        cmd->add_option_function<double>(
            "--soc-floor", [&manifest](double v) { manifest.soc_floor = v; },
            "SoC floor override");
        (void)floor;
        std::uint64_t seed;
        cmd->add_option_function<std::uint64_t>(
            "--seed", [&manifest](std::uint64_t v) { manifest.seed = v; }, "Seed override");
        (void)seed;
        cmd->add_option("--fail-script", manifest.fail_script, "Upload failure script CSV");
        if (needs_out) cmd->add_option("--out", manifest.out_dir, "Output directory");
    };

    CLI::App* validate = app.add_subcommand("validate", "Load and check all inputs");
    add_common(validate, false);

    CLI::App* plan = app.add_subcommand("plan", "Compute a single schedule");
    add_common(plan, true);
    plan->add_option("--t0-s", t0, "Horizon start in seconds since the epoch");

    CLI::App* run = app.add_subcommand("run", "Closed-loop run against the simulated satellite");
    add_common(run, true);

    CLI::App* compare =
        app.add_subcommand("compare", "Closed-loop run versus one monolithic schedule");
    add_common(compare, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(manifest, std::cout);
        if (plan->parsed())
            return cmd_plan(manifest, t0, manifest.horizon_hours * 3600.0, std::cout);
        if (run->parsed()) return cmd_run(manifest, std::cout);
        if (compare->parsed()) return cmd_compare(manifest, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
