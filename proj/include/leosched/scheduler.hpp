#pragma once

#include "leosched/battery.hpp"
#include "leosched/mission.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace leosched {

// Partial solution stored in the DP table: accumulated reward plus the
// battery state at the decision epoch the label lives at. The chosen window
// set is reconstructible through the parent chain.
struct DpLabel {
    double reward = 0.0;
    KibamState state;
    std::int32_t parent = -1;  // arena index of the predecessor label
    std::int32_t window = -1;  // candidate selected when this label was created
};

// Pareto order on (reward, available, bound): l1 dominates l2 iff it is at
// least as good in every component with at least one strictly better.
// `charge_eps` gives slack on the charge comparisons so that float noise of
// that size neither blocks nor fakes a strict improvement.
bool dominates(const DpLabel& l1, const DpLabel& l2, double charge_eps = 0.0);

// Inserts unless an existing label dominates the candidate; evicts every
// label the candidate dominates. Returns whether the label went in.
bool insert_pruned(std::vector<DpLabel>& antichain, const DpLabel& label,
                   double charge_eps = 0.0);

struct ScheduledTask {
    std::string window_id;
    std::string payload;
    double start = 0.0;
    double end = 0.0;
    double reward = 0.0;
};

struct TracePoint {
    double time = 0.0;
    double available = 0.0;
    double bound = 0.0;
};

struct PlanStats {
    std::size_t labels_created = 0;
    std::size_t labels_stored = 0;   // table size summed over epochs
    std::size_t peak_antichain = 0;
    std::size_t epochs = 0;
};

struct Schedule {
    std::vector<ScheduledTask> tasks;  // sorted by (start, id)
    double total_reward = 0.0;
    std::vector<TracePoint> trace;     // predicted battery evolution over the horizon
    bool heuristic = false;            // true when a beam cap forfeited optimality
    PlanStats stats;
};

struct PlanOptions {
    bool prune = true;
    std::optional<std::size_t> beam_cap;  // max labels kept per epoch bucket
    LoadProfile extra_load;               // committed residual draws (handover straddlers)
    double trace_step = 60.0;             // s between trace samples
};

// Reward-maximal all-or-nothing window selection whose induced load keeps the
// total SoC at or above scenario.soc_floor throughout [horizon.start,
// horizon.end] and never depletes the available well. Only windows fully
// inside the horizon are candidates. Throws InfeasibleError when already the
// empty selection violates the floor.
Schedule plan(const Scenario& scenario, const BatteryParams& params, const KibamState& initial,
              TimeSpan horizon, const PlanOptions& options = {});

// Identical contract; named entry point for the whole-span comparison flow.
Schedule plan_monolithic(const Scenario& scenario, const BatteryParams& params,
                         const KibamState& initial, TimeSpan horizon,
                         const PlanOptions& options = {});

// Replays a task set against the battery from `initial` and reports the first
// floor/ depletion violation, if any. Exact within each constant-load piece:
// total charge is linear there, so endpoint checks plus the depletion
// root-finder cover interior dips.
struct SocViolation {
    double time = 0.0;
    bool depleted = false;  // false: floor crossing
};
std::optional<SocViolation> find_soc_violation(const LoadProfile& induced,
                                               const KibamState& initial, TimeSpan span,
                                               double soc_floor, const BatteryParams& params);

// Base + task draws as one profile; shared by the planner, the plausibility
// checker, and the simulator.
LoadProfile induced_load_profile(const Scenario& scenario,
                                 const std::vector<ScheduledTask>& tasks, TimeSpan span,
                                 const LoadProfile& extra = {});

} // namespace leosched
