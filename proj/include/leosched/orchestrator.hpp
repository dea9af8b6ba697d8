#pragma once

#include "leosched/battery.hpp"
#include "leosched/estimator.hpp"
#include "leosched/mission.hpp"
#include "leosched/scheduler.hpp"

#include <optional>
#include <string>
#include <vector>

namespace leosched {

// A committed task timeline. `valid_from` marks the handover instant; tasks
// before it are the retained history of superseded plans, so the final
// on-board plan doubles as the as-flown record.
struct FlightPlan {
    int plan_id = 0;
    double valid_from = 0.0;
    Schedule schedule;
    std::optional<int> supersedes;
};

// Tasks of `active` starting strictly before incoming.valid_from are kept --
// a task straddling the handover runs to completion -- and everything else
// comes from `incoming`, minus duplicates of retained straddlers.
FlightPlan merge_plans(const FlightPlan& active, const FlightPlan& incoming);

struct HorizonConfig {
    double interval = 86400.0;     // scheduling horizon I, s
    double min_elevation = 25.0;   // deg; passes below are not upload opportunities
    double correction_cap = 0.08;  // max |SoC correction| per reconcile
    double soc_floor = 0.0;
};

struct Rejection {
    std::string rule;    // violated rule name
    double time = 0.0;   // first violation instant
    std::string detail;  // offending window id or similar
};

// Independent replay of a plan: window containment, exclusion compliance and
// the SoC floor / depletion along the induced load. nullopt = plausible.
std::optional<Rejection> plausibility_check(const FlightPlan& plan, const Scenario& scenario,
                                            const BatteryParams& params,
                                            const KibamState& initial,
                                            double soc_floor,
                                            const LoadProfile& extra = {});

// What a satellite must expose to the control loop. Implemented by the
// simulator; a live adapter would speak to an operations platform instead.
class SatelliteInterface {
public:
    virtual ~SatelliteInterface() = default;
    virtual void install(const FlightPlan& plan) = 0;  // pre-mission load, no pass needed
    virtual bool upload(const FlightPlan& plan) = 0;   // throws OutOfPassError outside passes
    virtual TelemetryLog fetch_telemetry(double since) = 0;
    virtual void advance(double until) = 0;
};

struct PassRecord {
    GroundPass pass;
    int plan_id = 0;
    enum class Outcome { Executed, BackupPlan } outcome = Outcome::Executed;
    double correction = 0.0;     // SoC fraction applied by reconcile
    double predicted_soc = 0.0;  // belief at the handover instant
    std::string note;            // empty, or why this pass fell back
};

struct RunLog {
    std::vector<PassRecord> rows;
    std::vector<FlightPlan> plans;    // bootstrap plus one attempt per pass
    FlightPlan executed;              // final on-board timeline
    std::vector<std::string> alerts;  // planner infeasibilities, rejections
};

// The receding-horizon loop: per qualifying pass, fetch telemetry, reconcile
// the battery belief, replan over the next interval, plausibility-check and
// upload. Failures of any kind leave the previous plan running.
RunLog run(const Scenario& scenario, const BatteryParams& params, const HorizonConfig& config,
           SatelliteInterface& sat, TimeSpan span);

} // namespace leosched
