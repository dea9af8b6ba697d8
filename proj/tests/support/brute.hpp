#pragma once

// Exhaustive enumeration oracle for the DP planner: every subset of the
// candidate windows is replayed through the same battery evolution and
// feasibility definition, independently of the DP search and its pruning.

#include "leosched/scheduler.hpp"

#include <cstdint>
#include <vector>

namespace leosched::testing {

struct BruteResult {
    double best_reward = 0.0;
    bool any_feasible = false;  // false when even the empty set violates the floor
};

inline BruteResult brute_force_plan(const Scenario& scenario, const BatteryParams& params,
                                    const KibamState& initial, TimeSpan horizon) {
    // Candidate order matches the planner's so equal subsets accumulate their
    // rewards in the same float order.
    std::vector<const TaskWindow*> cands;
    for (const TaskWindow& w : scenario.windows)
        if (w.selectable && w.start >= horizon.start && w.end <= horizon.end)
            cands.push_back(&w);
    std::sort(cands.begin(), cands.end(), [](const TaskWindow* a, const TaskWindow* b) {
        return a->start != b->start ? a->start < b->start : a->id < b->id;
    });

    const std::size_t n = cands.size();
    BruteResult out;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        std::vector<ScheduledTask> tasks;
        double reward = 0.0;
        bool exclusion_ok = true;
        for (std::size_t i = 0; i < n && exclusion_ok; ++i) {
            if (!(mask & (1ull << i))) continue;
            const TaskWindow& w = *cands[i];
            const PayloadDef* p = scenario.find_payload(w.payload);
            for (const ScheduledTask& t : tasks) {
                const PayloadDef* q = scenario.find_payload(t.payload);
                bool overlap = t.start < w.end && w.start < t.end;
                if (overlap && p && q && !p->exclusion_group.empty() &&
                    p->exclusion_group == q->exclusion_group)
                    exclusion_ok = false;
            }
            tasks.push_back({w.id, w.payload, w.start, w.end, scenario.window_reward(w)});
            reward += scenario.window_reward(w);
        }
        if (!exclusion_ok) continue;

        LoadProfile induced = induced_load_profile(scenario, tasks, horizon);
        if (find_soc_violation(induced, initial, horizon, scenario.soc_floor, params)) continue;

        if (!out.any_feasible || reward > out.best_reward) out.best_reward = reward;
        out.any_feasible = true;
    }
    return out;
}

} // namespace leosched::testing
