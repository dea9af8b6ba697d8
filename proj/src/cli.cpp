#include "leosched/cli.hpp"

#include "leosched/csv.hpp"
#include "leosched/errors.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace leosched {

namespace {

struct Inputs {
    Scenario scenario;
    BatteryParams battery;
    TruthConfig truth;
    FailureScript failures;
};

Inputs load_inputs(const RunManifest& m, bool need_truth) {
    Inputs in;
    in.scenario = load_scenario_dir(m.scenario_dir);
    in.battery = BatteryParams::from_config(m.battery_path());
    if (need_truth) {
        in.truth = TruthConfig::from_config(m.truth_path());
        if (m.seed) in.truth.seed = *m.seed;
        if (!m.fail_script.empty()) in.failures = FailureScript::from_csv(m.fail_script);
    }
    if (m.soc_floor) in.scenario.soc_floor = *m.soc_floor;
    return in;
}

HorizonConfig make_horizon_config(const RunManifest& m, const Scenario& sc) {
    HorizonConfig cfg;
    cfg.interval = m.horizon_hours * 3600.0;
    cfg.min_elevation = m.min_elevation_deg;
    cfg.soc_floor = sc.soc_floor;
    return cfg;
}

std::string plan_file_stem(int plan_id) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "plan_%03d", plan_id);
    return buf;
}

void print_payload_totals(std::ostream& out, const Scenario& sc,
                          const std::vector<ScheduledTask>& tasks) {
    std::map<std::string, int> counts;
    for (const PayloadDef& p : sc.payloads) counts[p.name] = 0;
    for (const ScheduledTask& t : tasks) counts[t.payload]++;
    for (const auto& [name, count] : counts)
        out << "  " << name << ": " << count << " task(s)\n";
}

void write_run_outputs(const RunLog& log, const BatteryParams& params,
                       const SimulatedSatellite& sat, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_runlog_csv(log, dir / "runlog.csv");
    write_telemetry_csv(sat.all_samples(), dir / "telemetry.csv");
    write_schedule_csv(log.executed.schedule, dir / "executed.csv");
    for (const FlightPlan& p : log.plans) {
        write_schedule_csv(p.schedule, dir / (plan_file_stem(p.plan_id) + ".csv"));
        write_trace_csv(p.schedule.trace, params, dir / (plan_file_stem(p.plan_id) + "_trace.csv"));
    }

    std::ofstream txt(dir / "runlog.txt", std::ios::binary);
    for (const PassRecord& r : log.rows) {
        txt << "pass t=" << csv::fmt(r.pass.start) << "s " << r.pass.station << " el="
            << csv::fmt(r.pass.max_elevation) << " plan=" << r.plan_id << " "
            << (r.outcome == PassRecord::Outcome::Executed ? "Executed" : "BackupPlan")
            << " correction=" << csv::fmt(r.correction)
            << " pred_soc=" << csv::fmt(r.predicted_soc);
        if (!r.note.empty()) txt << " note=" << r.note;
        txt << "\n";
    }
    for (const std::string& a : log.alerts) txt << "alert: " << a << "\n";
}

// Tasks that both schedulers could have chosen: fully inside the span.
std::set<std::string> task_ids_within(const std::vector<ScheduledTask>& tasks, TimeSpan span) {
    std::set<std::string> ids;
    for (const ScheduledTask& t : tasks)
        if (t.start >= span.start && t.end <= span.end) ids.insert(t.window_id);
    return ids;
}

} // namespace

TimeSpan scenario_span(const Scenario& sc) {
    double end = 0.0;
    for (const TaskWindow& w : sc.windows) end = std::max(end, w.end);
    for (const SunlightEpisode& s : sc.sunlight) end = std::max(end, s.end);
    for (const GroundPass& g : sc.passes) end = std::max(end, g.end);
    return {0.0, end};
}

void write_schedule_csv(const Schedule& schedule, const std::filesystem::path& path) {
    csv::Writer w({"window_id", "payload", "start_s", "end_s", "reward"});
    for (const ScheduledTask& t : schedule.tasks)
        w.row({t.window_id, t.payload, csv::fmt(t.start), csv::fmt(t.end), csv::fmt(t.reward)});
    w.save(path);
}

void write_trace_csv(const std::vector<TracePoint>& trace, const BatteryParams& params,
                     const std::filesystem::path& path) {
    csv::Writer w({"time_s", "available_as", "bound_as", "soc", "voltage_v"});
    for (const TracePoint& p : trace) {
        double s = std::clamp((p.available + p.bound) / params.total_capacity, 0.0, 1.0);
        w.row({csv::fmt(p.time), csv::fmt(p.available), csv::fmt(p.bound), csv::fmt(s),
               csv::fmt(soc_to_voltage(s, params))});
    }
    w.save(path);
}

void write_telemetry_csv(const std::vector<TelemetrySample>& samples,
                         const std::filesystem::path& path) {
    csv::Writer w({"time_s", "voltage_v", "current_a"});
    for (const TelemetrySample& s : samples)
        w.row({csv::fmt(s.time), csv::fmt(s.voltage), csv::fmt(s.current)});
    w.save(path);
}

void write_runlog_csv(const RunLog& log, const std::filesystem::path& path) {
    csv::Writer w({"pass_start_s", "station", "max_el_deg", "plan_id", "outcome", "correction",
                   "pred_soc"});
    for (const PassRecord& r : log.rows)
        w.row({csv::fmt(r.pass.start), r.pass.station, csv::fmt(r.pass.max_elevation),
               std::to_string(r.plan_id),
               r.outcome == PassRecord::Outcome::Executed ? "Executed" : "BackupPlan",
               csv::fmt(r.correction), csv::fmt(r.predicted_soc)});
    w.save(path);
}

int cmd_validate(const RunManifest& manifest, std::ostream& out) {
    int status = kExitOk;
    auto check = [&](const std::string& label, auto&& loader) {
        try {
            loader();
            out << label << ": ok\n";
        } catch (const std::exception& e) {
            out << label << ": " << e.what() << "\n";
            status = kExitInputError;
        }
    };

    Scenario sc;
    check("scenario", [&] {
        sc = load_scenario_dir(manifest.scenario_dir);
        out << "  payloads: " << sc.payloads.size() << ", windows: " << sc.windows.size()
            << ", sunlight episodes: " << sc.sunlight.size() << ", passes: " << sc.passes.size()
            << "\n";
    });
    check("battery config " + manifest.battery_path().string(),
          [&] { BatteryParams::from_config(manifest.battery_path()); });
    if (std::filesystem::exists(manifest.truth_path()))
        check("truth config " + manifest.truth_path().string(),
              [&] { TruthConfig::from_config(manifest.truth_path()); });
    if (!manifest.fail_script.empty())
        check("failure script " + manifest.fail_script.string(),
              [&] { FailureScript::from_csv(manifest.fail_script); });
    return status;
}

int cmd_plan(const RunManifest& manifest, double t0, double horizon_s, std::ostream& out) {
    try {
        Inputs in = load_inputs(manifest, false);
        KibamState initial = state_at_soc(in.scenario.initial_soc, in.battery, t0);

        auto started = std::chrono::steady_clock::now();
        Schedule schedule;
        try {
            schedule = plan(in.scenario, in.battery, initial, {t0, t0 + horizon_s});
        } catch (const InfeasibleError& e) {
            out << "infeasible: " << e.what() << "\n";
            return kExitInfeasible;
        }
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                             .count();

        std::filesystem::create_directories(manifest.out_dir);
        write_schedule_csv(schedule, manifest.out_dir / "schedule.csv");
        write_trace_csv(schedule.trace, in.battery, manifest.out_dir / "trace.csv");

        out << "total reward: " << csv::fmt(schedule.total_reward) << "\n";
        out << "tasks: " << schedule.tasks.size() << "\n";
        print_payload_totals(out, in.scenario, schedule.tasks);
        out << "wall time: " << csv::fmt(elapsed) << " s\n";
        return kExitOk;
    } catch (const ParseError& e) {
        out << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ValidationError& e) {
        out << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        out << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

int cmd_run(const RunManifest& manifest, std::ostream& out) {
    try {
        Inputs in = load_inputs(manifest, true);
        HorizonConfig cfg = make_horizon_config(manifest, in.scenario);
        TimeSpan span = scenario_span(in.scenario);

        SimulatedSatellite sat(in.scenario, in.truth, in.failures);
        RunLog log = run(in.scenario, in.battery, cfg, sat, span);

        write_run_outputs(log, in.battery, sat, manifest.out_dir);

        out << "passes handled: " << log.rows.size() << "\n";
        for (const PassRecord& r : log.rows)
            out << "  t=" << csv::fmt(r.pass.start) << "s plan " << r.plan_id << ": "
                << (r.outcome == PassRecord::Outcome::Executed ? "Executed" : "BackupPlan")
                << " (correction " << csv::fmt(r.correction) << ")\n";
        out << "executed tasks: " << log.executed.schedule.tasks.size() << "\n";
        out << "safe-mode activations: " << sat.safe_mode_activations() << "\n";
        return kExitOk;
    } catch (const ParseError& e) {
        out << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ValidationError& e) {
        out << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        out << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

int cmd_compare(const RunManifest& manifest, std::ostream& out) {
    try {
        Inputs in = load_inputs(manifest, true);
        HorizonConfig cfg = make_horizon_config(manifest, in.scenario);
        TimeSpan span = scenario_span(in.scenario);

        SimulatedSatellite sat(in.scenario, in.truth, in.failures);
        RunLog log = run(in.scenario, in.battery, cfg, sat, span);
        write_run_outputs(log, in.battery, sat, manifest.out_dir);

        Scenario sc = in.scenario;
        if (manifest.soc_floor) sc.soc_floor = *manifest.soc_floor;
        Schedule mono;
        try {
            mono = plan_monolithic(sc, in.battery,
                                   state_at_soc(sc.initial_soc, in.battery, span.start), span);
        } catch (const InfeasibleError& e) {
            out << "monolithic plan infeasible: " << e.what() << "\n";
            return kExitInfeasible;
        }
        write_schedule_csv(mono, manifest.out_dir / "monolithic.csv");
        write_trace_csv(mono.trace, in.battery, manifest.out_dir / "monolithic_trace.csv");

        std::set<std::string> receding = task_ids_within(log.executed.schedule.tasks, span);
        std::set<std::string> monolithic = task_ids_within(mono.tasks, span);

        csv::Writer diff({"window_id", "payload", "chosen_by"});
        std::map<std::string, std::pair<int, int>> by_payload;  // receding, monolithic
        double receding_reward = 0.0, monolithic_reward = 0.0;
        for (const PayloadDef& p : in.scenario.payloads) by_payload[p.name] = {0, 0};
        for (const TaskWindow& w : in.scenario.windows) {
            bool r = receding.count(w.id) != 0;
            bool m = monolithic.count(w.id) != 0;
            const char* chosen = r && m ? "both" : r ? "receding" : m ? "monolithic" : "neither";
            diff.row({w.id, w.payload, chosen});
            if (r) {
                by_payload[w.payload].first++;
                receding_reward += in.scenario.window_reward(w);
            }
            if (m) {
                by_payload[w.payload].second++;
                monolithic_reward += in.scenario.window_reward(w);
            }
        }
        diff.save(manifest.out_dir / "diff.csv");

        csv::Writer totals({"payload", "receding_count", "monolithic_count"});
        for (const auto& [name, counts] : by_payload)
            totals.row({name, std::to_string(counts.first), std::to_string(counts.second)});
        totals.save(manifest.out_dir / "compare_totals.csv");

        out << "receding executed reward: " << csv::fmt(receding_reward) << "\n";
        out << "monolithic reward: " << csv::fmt(monolithic_reward) << "\n";
        for (const auto& [name, counts] : by_payload)
            out << "  " << name << ": receding " << counts.first << ", monolithic "
                << counts.second << "\n";
        return kExitOk;
    } catch (const ParseError& e) {
        out << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ValidationError& e) {
        out << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        out << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

} // namespace leosched
