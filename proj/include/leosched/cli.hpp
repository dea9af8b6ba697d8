#pragma once

#include "leosched/mission.hpp"
#include "leosched/orchestrator.hpp"
#include "leosched/satsim.hpp"
#include "leosched/scheduler.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace leosched {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitInternal = 3;

struct RunManifest {
    std::filesystem::path scenario_dir;
    std::filesystem::path battery_file;  // defaults to scenario_dir/battery.cfg
    std::filesystem::path truth_file;    // defaults to scenario_dir/truth.cfg
    std::filesystem::path fail_script;   // optional upload failure CSV
    std::filesystem::path out_dir = "out";
    double horizon_hours = 24.0;
    double min_elevation_deg = 25.0;
    std::optional<double> soc_floor;       // overrides scenario.cfg
    std::optional<std::uint64_t> seed;     // overrides truth.cfg

    std::filesystem::path battery_path() const {
        return battery_file.empty() ? scenario_dir / "battery.cfg" : battery_file;
    }
    std::filesystem::path truth_path() const {
        return truth_file.empty() ? scenario_dir / "truth.cfg" : truth_file;
    }
};

int cmd_validate(const RunManifest& manifest, std::ostream& out);
int cmd_plan(const RunManifest& manifest, double t0, double horizon_s, std::ostream& out);
int cmd_run(const RunManifest& manifest, std::ostream& out);
int cmd_compare(const RunManifest& manifest, std::ostream& out);

// Output writers, shared with the test suites.
void write_schedule_csv(const Schedule& schedule, const std::filesystem::path& path);
void write_trace_csv(const std::vector<TracePoint>& trace, const BatteryParams& params,
                     const std::filesystem::path& path);
void write_telemetry_csv(const std::vector<TelemetrySample>& samples,
                         const std::filesystem::path& path);
void write_runlog_csv(const RunLog& log, const std::filesystem::path& path);

// Run span implied by the scenario content: epoch to the last timed event.
TimeSpan scenario_span(const Scenario& scenario);

} // namespace leosched
