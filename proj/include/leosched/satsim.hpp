#pragma once

#include "leosched/mission.hpp"
#include "leosched/orchestrator.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

namespace leosched {

// Ground truth configuration: the "real" battery the simulator runs, which
// may diverge from the planner's model.
struct TruthConfig {
    BatteryParams true_params;
    KibamState true_initial;          // at the scenario epoch
    double noise_sigma_v = 0.0;       // V
    double noise_sigma_i = 0.0;       // A
    double telemetry_cadence = 120.0; // s
    std::vector<TimeSpan> gap_script; // downlink blackouts: samples suppressed
    std::uint64_t seed = 0;

    // Keys: capacity_as, diffusion_per_s, well_split, voltage_full,
    // voltage_floor, soc_at_floor, initial_soc, noise_sigma_v, noise_sigma_i,
    // telemetry_cadence_s, seed, gap_csv (optional, `start_s,end_s` rows).
    static TruthConfig from_config(const std::filesystem::path& file);
};

// Upload outcomes per attempt. CSV rows `pass_index,fail` index upload
// attempts 1-based; attempts beyond the script fall back to the seeded
// probability (default: always succeed).
struct FailureScript {
    std::vector<bool> fail_by_attempt;
    double fail_probability = 0.0;

    static FailureScript from_csv(const std::filesystem::path& file);
};

// Stands in for the real spacecraft: executes the on-board flight plan
// against the true battery, produces noisy gapped telemetry, arbitrates
// uploads, and sheds payloads in safe mode.
class SimulatedSatellite final : public SatelliteInterface {
public:
    SimulatedSatellite(const Scenario& scenario, const TruthConfig& truth,
                       FailureScript failures = {});

    void install(const FlightPlan& plan) override;
    bool upload(const FlightPlan& plan) override;
    TelemetryLog fetch_telemetry(double since) override;
    void advance(double until) override;

    double now() const { return now_; }
    const KibamState& true_state() const { return truth_state_; }
    const FlightPlan& onboard() const { return onboard_; }
    const std::vector<TelemetrySample>& all_samples() const { return samples_; }
    const std::vector<TimeSpan>& shed_intervals() const { return shed_intervals_; }
    int safe_mode_activations() const { return safe_mode_activations_; }

private:
    double current_load(double time) const;  // net draw, right-continuous
    bool in_gap(double time) const;
    double next_boundary_after(double time) const;

    Scenario scenario_;
    TruthConfig truth_;
    FailureScript failures_;
    KibamState truth_state_;
    double now_ = 0.0;
    double next_sample_ = 0.0;
    FlightPlan onboard_;
    std::vector<TelemetrySample> samples_;
    std::mt19937_64 rng_;
    int upload_attempts_ = 0;

    bool safe_mode_ = false;
    bool dead_bus_ = false;  // available well hit zero even after shedding
    double shed_since_ = 0.0;
    int safe_mode_activations_ = 0;
    std::vector<TimeSpan> shed_intervals_;
    double recovery_soc_ = 0.0;  // soc_at_floor + hysteresis
};

} // namespace leosched
