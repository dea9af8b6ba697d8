#pragma once

#include "leosched/battery.hpp"

#include <vector>

namespace leosched {

struct TelemetrySample {
    double time = 0.0;     // s since epoch
    double voltage = 0.0;  // V
    double current = 0.0;  // A, positive = discharge
};

struct TelemetryLog {
    std::vector<TelemetrySample> samples;  // strictly increasing times
    double cadence = 120.0;                // nominal sampling period, s

    bool empty() const { return samples.empty(); }
    double start() const { return samples.front().time; }
    double end() const { return samples.back().time; }
};

struct SocEstimate {
    double time = 0.0;
    KibamState state;
    double confidence_window = 0.0;   // +- total-SoC fraction
    double correction_applied = 0.0;  // signed total-SoC fraction, |.| <= cap
};

struct EstimatorOptions {
    double voltage_weight = 0.3;   // blend weight on the trailing-voltage estimate
    int robust_window = 5;         // median-of-k voltage reads
    double max_gap = 1800.0;       // s; longer telemetry gaps stop trusting interpolation
    const LoadProfile* scheduled = nullptr;  // fallback load across long gaps
};

// Trapezoidal integration of the measured current over the log span; the
// (a, b) split is reconstructed by running the battery forward under the
// sample-midpoint piecewise-constant load. Throws EmptyLogError.
SocEstimate coulomb_count(const TelemetryLog& log, double initial_soc,
                          const BatteryParams& params, const EstimatorOptions& options = {});

// Blends the trailing voltage-implied SoC with the Coulomb-counted SoC
// (anchored at the leading voltage reads) and applies the clamped correction
// to `predicted`, preserving its well split. Pass the belief state at the log
// end; a later predicted.time only shifts the reference, not the telemetry
// side. Throws EmptyLogError.
SocEstimate reconcile(const KibamState& predicted, const TelemetryLog& log,
                      const BatteryParams& params, double cap,
                      const EstimatorOptions& options = {});

// Carries an estimate forward under the scheduled load to the planning epoch.
// Throws DepletedError when the plan itself is battery-infeasible.
KibamState propagate_to(const SocEstimate& estimate, const LoadProfile& scheduled, double t0,
                        const BatteryParams& params);

} // namespace leosched
