#pragma once

#include "leosched/battery.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace leosched {

struct TimeSpan {
    double start = 0.0;
    double end = 0.0;
    double length() const { return end - start; }
};

struct PayloadDef {
    std::string name;
    double power_draw = 0.0;        // A while active
    double reward_per_window = 0.0;
    std::string exclusion_group;    // empty = none; sharers may not run concurrently
};

struct TaskWindow {
    std::string id;
    std::string payload;
    double start = 0.0;  // s since epoch
    double end = 0.0;
    bool selectable = true;               // all-or-nothing execution
    std::optional<double> reward_override;  // blank CSV reward -> payload default
};

struct SunlightEpisode {
    double start = 0.0;
    double end = 0.0;
    double infeed = 0.0;  // A charging current
};

struct GroundPass {
    double start = 0.0;
    double end = 0.0;
    double max_elevation = 0.0;  // degrees
    std::string station;
};

struct Scenario {
    std::string epoch;  // ISO-8601 UTC; all times in files are seconds from it
    std::vector<PayloadDef> payloads;
    std::vector<TaskWindow> windows;
    std::vector<SunlightEpisode> sunlight;
    std::vector<GroundPass> passes;
    double background_load = 0.0;  // A, always-on platform draw
    double uhf_pass_draw = 0.0;    // A, extra draw while inside a ground pass
    double soc_floor = 0.0;
    double initial_soc = 1.0;      // planner belief at epoch

    const PayloadDef* find_payload(const std::string& name) const;
    double window_reward(const TaskWindow& w) const;
    double window_draw(const TaskWindow& w) const;

    void validate() const;  // throws ValidationError naming the violated invariant
};

// CSV/config contracts (see README): windows `id,payload,start_s,end_s,reward`,
// sunlight `start_s,end_s,infeed_a`, passes `station,start_s,end_s,max_elevation_deg`,
// payload config as `payload.<name>.power_a|reward|exclusion_group` keys plus the
// scenario-level keys (epoch, background_load_a, uhf_pass_draw_a, soc_floor, initial_soc).
Scenario load_scenario(const std::filesystem::path& windows_file,
                       const std::filesystem::path& sunlight_file,
                       const std::filesystem::path& passes_file,
                       const std::filesystem::path& payload_config);

// Conventional file names inside one directory: windows.csv, sunlight.csv,
// passes.csv, scenario.cfg.
Scenario load_scenario_dir(const std::filesystem::path& dir);
void save_scenario_dir(const Scenario& scenario, const std::filesystem::path& dir);

// Maximal run of contiguous `chunk`-second windows from the parent's start;
// a shorter trailing remainder is dropped. Child ids get -1, -2, ... suffixes.
std::vector<TaskWindow> partition_window(const TaskWindow& window, double chunk);

// Passes with max elevation strictly above the threshold, order preserved.
std::vector<GroundPass> filter_passes(const std::vector<GroundPass>& passes,
                                      double min_elevation);

// Deterministic pseudo-orbital pattern standing in for a propagator:
// sunlight on ~60% of every period, ground passes clustered twice a day with
// start-to-start gaps inside [90 min, 15 h].
std::pair<std::vector<GroundPass>, std::vector<SunlightEpisode>>
synthesize_passes(double orbit_period, double visibility_fraction, double horizon,
                  std::uint64_t seed);

// Background + sunlight + per-pass UHF draw as one net-load profile.
LoadProfile base_load_profile(const Scenario& scenario, double from, double to);

} // namespace leosched
