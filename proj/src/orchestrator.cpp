#include "leosched/orchestrator.hpp"

#include "leosched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace leosched {

FlightPlan merge_plans(const FlightPlan& active, const FlightPlan& incoming) {
    FlightPlan merged;
    merged.plan_id = incoming.plan_id;
    merged.valid_from = incoming.valid_from;
    merged.supersedes = active.plan_id;

    std::set<std::string> retained_ids;
    for (const ScheduledTask& t : active.schedule.tasks) {
        if (t.start < incoming.valid_from) {
            merged.schedule.tasks.push_back(t);
            retained_ids.insert(t.window_id);
        }
    }
    for (const ScheduledTask& t : incoming.schedule.tasks) {
        if (t.start >= incoming.valid_from && !retained_ids.count(t.window_id))
            merged.schedule.tasks.push_back(t);
    }
    std::sort(merged.schedule.tasks.begin(), merged.schedule.tasks.end(),
              [](const ScheduledTask& a, const ScheduledTask& b) {
                  return a.start != b.start ? a.start < b.start : a.window_id < b.window_id;
              });
    for (const ScheduledTask& t : merged.schedule.tasks) merged.schedule.total_reward += t.reward;
    return merged;
}

std::optional<Rejection> plausibility_check(const FlightPlan& plan, const Scenario& scenario,
                                            const BatteryParams& params,
                                            const KibamState& initial, double soc_floor,
                                            const LoadProfile& extra) {
    // Structural checks first: every task must sit exactly on a scenario
    // window of the same payload.
    for (const ScheduledTask& t : plan.schedule.tasks) {
        if (t.start < initial.time) continue;  // history from a superseded plan
        const TaskWindow* match = nullptr;
        for (const TaskWindow& w : scenario.windows)
            if (w.id == t.window_id) match = &w;
        if (!match)
            return Rejection{"unknown-window", t.start, t.window_id};
        if (match->payload != t.payload)
            return Rejection{"payload-mismatch", t.start, t.window_id};
        if (t.start < match->start || t.end > match->end)
            return Rejection{"outside-access-window", t.start, t.window_id};
    }

    // Exclusion groups: no two overlapping tasks may share one.
    for (std::size_t i = 0; i < plan.schedule.tasks.size(); ++i) {
        const ScheduledTask& a = plan.schedule.tasks[i];
        const PayloadDef* pa = scenario.find_payload(a.payload);
        if (!pa || pa->exclusion_group.empty()) continue;
        for (std::size_t j = i + 1; j < plan.schedule.tasks.size(); ++j) {
            const ScheduledTask& b = plan.schedule.tasks[j];
            if (b.start >= a.end) break;  // sorted by start
            const PayloadDef* pb = scenario.find_payload(b.payload);
            if (pb && pb->exclusion_group == pa->exclusion_group && b.end > a.start)
                return Rejection{"exclusion-group", std::max(a.start, b.start),
                                 a.window_id + "+" + b.window_id};
        }
    }

    // Battery replay from the handover belief over the remaining tasks.
    double replay_end = initial.time;
    for (const ScheduledTask& t : plan.schedule.tasks) replay_end = std::max(replay_end, t.end);
    replay_end = std::max(replay_end, plan.valid_from);
    std::vector<ScheduledTask> remaining;
    for (const ScheduledTask& t : plan.schedule.tasks)
        if (t.end > initial.time) remaining.push_back(t);
    TimeSpan span{initial.time, replay_end};
    LoadProfile induced = induced_load_profile(scenario, remaining, span, extra);
    if (auto v = find_soc_violation(induced, initial, span, soc_floor, params))
        return Rejection{v->depleted ? "battery-depleted" : "soc-floor", v->time, ""};
    return std::nullopt;
}

namespace {

LoadProfile plan_load_profile(const Scenario& scenario, const FlightPlan& plan, TimeSpan span) {
    return induced_load_profile(scenario, plan.schedule.tasks, span);
}

// Residual draw of tasks already running at the handover instant. The old
// plan owns them; the new plan sees their tails as fixed load.
LoadProfile straddler_residual(const Scenario& scenario, const FlightPlan& onboard, double t0) {
    LoadProfileBuilder b;
    for (const ScheduledTask& t : onboard.schedule.tasks)
        if (t.start < t0 && t.end > t0) {
            const PayloadDef* p = scenario.find_payload(t.payload);
            if (p) b.add(t0, t.end, p->power_draw);
        }
    return b.build();
}

} // namespace

RunLog run(const Scenario& scenario, const BatteryParams& params, const HorizonConfig& config,
           SatelliteInterface& sat, TimeSpan span) {
    RunLog log;

    Scenario sc = scenario;
    sc.soc_floor = config.soc_floor;

    KibamState belief = state_at_soc(sc.initial_soc, params, span.start);
    int next_plan_id = 1;

    // Bootstrap plan: the satellite starts the span with a stored flight plan.
    FlightPlan onboard;
    onboard.plan_id = 0;
    onboard.valid_from = span.start;
    try {
        onboard.schedule = plan(sc, params, belief, {span.start, span.start + config.interval});
    } catch (const InfeasibleError& e) {
        log.alerts.push_back("bootstrap plan infeasible: " + std::string(e.what()));
    }
    sat.install(onboard);
    log.plans.push_back(onboard);

    double last_fetch = span.start;
    for (const GroundPass& pass : filter_passes(sc.passes, config.min_elevation)) {
        if (pass.start < span.start || pass.end > span.end) continue;
        sat.advance(pass.start);

        // Telemetry downlinked strictly before the pass.
        TelemetryLog telemetry = sat.fetch_telemetry(last_fetch);
        std::erase_if(telemetry.samples,
                      [&](const TelemetrySample& s) { return s.time >= pass.start; });
        last_fetch = pass.start;

        LoadProfile onboard_load = plan_load_profile(sc, onboard, {span.start, span.end});

        // Belief update: propagate to the log end, reconcile, then carry the
        // corrected state to the handover instant at the end of the pass.
        double correction = 0.0;
        SocEstimate estimate;
        estimate.time = belief.time;
        estimate.state = belief;
        if (!telemetry.empty() && telemetry.end() >= belief.time) {
            StepResult pred = try_evolve(belief, onboard_load, telemetry.end(), params);
            if (pred.depleted) {
                log.alerts.push_back("belief depleted before telemetry end at t=" +
                                     std::to_string(pred.depleted->time));
                pred.state.time = telemetry.end();
            }
            EstimatorOptions opts;
            opts.scheduled = &onboard_load;
            estimate = reconcile(pred.state, telemetry, params, config.correction_cap, opts);
            correction = estimate.correction_applied;
        }

        const double t0 = pass.end;
        KibamState state0;
        {
            StepResult carried = try_evolve(estimate.state, onboard_load, t0, params);
            state0 = carried.state;
            state0.time = t0;
            if (carried.depleted)
                log.alerts.push_back("belief depleted while propagating to handover at t=" +
                                     std::to_string(carried.depleted->time));
        }

        PassRecord row;
        row.pass = pass;
        row.plan_id = next_plan_id;
        row.correction = correction;
        row.predicted_soc = soc(state0, params);

        LoadProfile residual = straddler_residual(sc, onboard, t0);
        FlightPlan attempt;
        attempt.plan_id = next_plan_id++;
        attempt.valid_from = t0;
        attempt.supersedes = onboard.plan_id;

        bool viable = true;
        try {
            PlanOptions popt;
            popt.extra_load = residual;
            attempt.schedule = plan(sc, params, state0, {t0, t0 + config.interval}, popt);
        } catch (const InfeasibleError& e) {
            log.alerts.push_back("pass at t=" + std::to_string(pass.start) +
                                 ": replan infeasible: " + e.what());
            viable = false;
        }

        if (viable) {
            if (auto rej = plausibility_check(attempt, sc, params, state0, config.soc_floor,
                                              residual)) {
                log.alerts.push_back("pass at t=" + std::to_string(pass.start) +
                                     ": plan rejected (" + rej->rule + " at t=" +
                                     std::to_string(rej->time) + " " + rej->detail + ")");
                viable = false;
            }
        }

        bool accepted = false;
        if (viable) accepted = sat.upload(attempt);

        if (accepted) {
            onboard = merge_plans(onboard, attempt);
            row.outcome = PassRecord::Outcome::Executed;
        } else {
            row.outcome = PassRecord::Outcome::BackupPlan;
            if (viable)
                row.note = "upload failed";
            else
                row.note = log.alerts.back();
        }

        belief = state0;
        log.plans.push_back(attempt);
        log.rows.push_back(std::move(row));
    }

    sat.advance(span.end);
    log.executed = onboard;
    return log;
}

} // namespace leosched
