#pragma once

#include <filesystem>
#include <optional>
#include <vector>

namespace leosched {

// Kinetic battery model parameters. Charge is tracked in ampere-seconds.
struct BatteryParams {
    double total_capacity = 0.0;  // As
    double diffusion_rate = 0.0;  // 1/s, rate v of charge exchange between the wells
    double well_split = 0.5;      // fraction of capacity held by the available well
    double voltage_full = 16.2;   // V at SoC 1.0
    double voltage_floor = 14.8;  // V at soc_at_floor
    double soc_at_floor = 0.55;

    double available_cap() const { return well_split * total_capacity; }
    double bound_cap() const { return (1.0 - well_split) * total_capacity; }

    void validate() const;  // throws ValidationError on a bad parameter set
    static BatteryParams from_config(const std::filesystem::path& file);
};

// Two-well charge state at an instant.
struct KibamState {
    double available = 0.0;  // a(t), As, the well the load draws from
    double bound = 0.0;      // b(t), As, chemically bound charge
    double time = 0.0;       // s since scenario epoch
};

// Net battery load over time: positive = discharge, negative = charge.
// Segments are sorted, non-overlapping; uncovered spans mean zero load.
struct LoadSegment {
    double start = 0.0;
    double end = 0.0;
    double net_load = 0.0;  // A
};

class LoadProfile {
public:
    LoadProfile() = default;
    // Validates ordering/overlap; throws ValidationError.
    explicit LoadProfile(std::vector<LoadSegment> segments);

    const std::vector<LoadSegment>& segments() const { return segments_; }
    bool empty() const { return segments_.empty(); }

    double load_at(double time) const;           // right-continuous
    double integral(double from, double to) const;  // ∫ load dt, As

    // Segment boundaries intersecting [from, to], including both ends.
    std::vector<double> breakpoints(double from, double to) const;

private:
    std::vector<LoadSegment> segments_;
};

// Accumulates possibly-overlapping load contributions and flattens them
// into a piecewise-constant profile.
class LoadProfileBuilder {
public:
    void add(double start, double end, double amps);
    void add(const LoadProfile& other);
    LoadProfile build() const;

private:
    std::vector<LoadSegment> parts_;
};

struct Depletion {
    double time = 0.0;  // instant the available charge reached zero
};

struct StepResult {
    KibamState state;  // at the requested end time, or at the depletion instant
    std::optional<Depletion> depleted;
};

// Exact solution of the coupled pair  ȧ = -l + v(b-a),  ḃ = v(a-b)
// under constant load, with clamping at the well capacities (excess solar
// infeed is discarded). Depletion is detected inside the step.
StepResult try_step_constant(const KibamState& state, double net_load, double duration,
                             const BatteryParams& params);
KibamState step_constant(const KibamState& state, double net_load, double duration,
                         const BatteryParams& params);  // throws DepletedError

// Sequential application of step_constant over every profile segment
// intersecting [state.time, until]; gaps evolve load-free.
StepResult try_evolve(const KibamState& state, const LoadProfile& profile, double until,
                      const BatteryParams& params);
KibamState evolve(const KibamState& state, const LoadProfile& profile, double until,
                  const BatteryParams& params);  // throws DepletedError

// Total-charge state of charge, (a + b) / capacity, in [0, 1].
double soc(const KibamState& state, const BatteryParams& params);

// Affine voltage map through (soc_at_floor -> voltage_floor) and
// (1.0 -> voltage_full); extrapolates linearly below the floor anchor.
double soc_to_voltage(double soc, const BatteryParams& params);
double voltage_to_soc(double voltage, const BatteryParams& params);  // clamped to [0, 1]

// State with the given total SoC split proportionally to the well capacities.
KibamState state_at_soc(double soc, const BatteryParams& params, double time);

} // namespace leosched
