#include "leosched/satsim.hpp"

#include "leosched/config.hpp"
#include "leosched/csv.hpp"
#include "leosched/errors.hpp"

#include <algorithm>
#include <cmath>

namespace leosched {

TruthConfig TruthConfig::from_config(const std::filesystem::path& file) {
    Config cfg = Config::load(file);
    TruthConfig tc;
    tc.true_params.total_capacity = cfg.num("capacity_as");
    tc.true_params.diffusion_rate = cfg.num("diffusion_per_s");
    tc.true_params.well_split = cfg.num_or("well_split", 0.5);
    tc.true_params.voltage_full = cfg.num("voltage_full");
    tc.true_params.voltage_floor = cfg.num("voltage_floor");
    tc.true_params.soc_at_floor = cfg.num("soc_at_floor");
    tc.true_params.validate();
    tc.true_initial = state_at_soc(cfg.num("initial_soc"), tc.true_params, 0.0);
    tc.noise_sigma_v = cfg.num_or("noise_sigma_v", 0.0);
    tc.noise_sigma_i = cfg.num_or("noise_sigma_i", 0.0);
    tc.telemetry_cadence = cfg.num_or("telemetry_cadence_s", 120.0);
    tc.seed = (std::uint64_t)cfg.num_or("seed", 0.0);
    if (!(tc.telemetry_cadence > 0)) throw ValidationError("truth: cadence must be > 0");
    if (tc.noise_sigma_v < 0 || tc.noise_sigma_i < 0)
        throw ValidationError("truth: noise sigmas must be >= 0");
    if (cfg.has("gap_csv")) {
        std::filesystem::path gaps = file.parent_path() / cfg.str("gap_csv");
        csv::Reader rd(gaps, {"start_s", "end_s"});
        for (const csv::Row& row : rd.rows())
            tc.gap_script.push_back({rd.num(row, 0), rd.num(row, 1)});
    }
    return tc;
}

FailureScript FailureScript::from_csv(const std::filesystem::path& file) {
    FailureScript fs;
    csv::Reader rd(file, {"pass_index", "fail"});
    for (const csv::Row& row : rd.rows()) {
        int index = (int)rd.num(row, 0);
        bool fail = rd.num(row, 1) != 0;
        if (index < 1) throw ValidationError("failure script: pass_index is 1-based");
        if ((int)fs.fail_by_attempt.size() < index) fs.fail_by_attempt.resize(index, false);
        fs.fail_by_attempt[index - 1] = fail;
    }
    return fs;
}

SimulatedSatellite::SimulatedSatellite(const Scenario& scenario, const TruthConfig& truth,
                                       FailureScript failures)
    : scenario_(scenario), truth_(truth), failures_(std::move(failures)),
      truth_state_(truth.true_initial), now_(truth.true_initial.time),
      next_sample_(truth.true_initial.time), rng_(truth.seed) {
    truth_.true_params.validate();
    recovery_soc_ = std::min(truth_.true_params.soc_at_floor + 0.02, 1.0);
    onboard_.plan_id = -1;  // nothing stored yet
    onboard_.valid_from = now_;
}

void SimulatedSatellite::install(const FlightPlan& plan) { onboard_ = plan; }

bool SimulatedSatellite::upload(const FlightPlan& plan) {
    bool inside = false;
    for (const GroundPass& g : scenario_.passes)
        if (now_ >= g.start && now_ <= g.end) inside = true;
    if (!inside) throw OutOfPassError(now_);

    int attempt = upload_attempts_++;
    bool fail;
    if (attempt < (int)failures_.fail_by_attempt.size())
        fail = failures_.fail_by_attempt[attempt];
    else if (failures_.fail_probability > 0)
        fail = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < failures_.fail_probability;
    else
        fail = false;

    if (fail) return false;
    onboard_ = merge_plans(onboard_, plan);
    return true;
}

TelemetryLog SimulatedSatellite::fetch_telemetry(double since) {
    TelemetryLog log;
    log.cadence = truth_.telemetry_cadence;
    for (const TelemetrySample& s : samples_)
        if (s.time > since && s.time <= now_) log.samples.push_back(s);
    return log;
}

bool SimulatedSatellite::in_gap(double time) const {
    for (const TimeSpan& g : truth_.gap_script)
        if (time >= g.start && time < g.end) return true;
    return false;
}

double SimulatedSatellite::current_load(double time) const {
    double load = dead_bus_ ? 0.0 : scenario_.background_load;
    for (const SunlightEpisode& s : scenario_.sunlight)
        if (time >= s.start && time < s.end) load -= s.infeed;
    if (dead_bus_) return load;
    if (scenario_.uhf_pass_draw != 0.0)
        for (const GroundPass& g : scenario_.passes)
            if (time >= g.start && time < g.end) load += scenario_.uhf_pass_draw;
    if (!safe_mode_)
        for (const ScheduledTask& t : onboard_.schedule.tasks)
            if (time >= t.start && time < t.end) {
                const PayloadDef* p = scenario_.find_payload(t.payload);
                if (p) load += p->power_draw;
            }
    return load;
}

double SimulatedSatellite::next_boundary_after(double time) const {
    double next = std::numeric_limits<double>::infinity();
    auto consider = [&](double t) {
        if (t > time && t < next) next = t;
    };
    for (const ScheduledTask& t : onboard_.schedule.tasks) {
        consider(t.start);
        consider(t.end);
    }
    for (const SunlightEpisode& s : scenario_.sunlight) {
        consider(s.start);
        consider(s.end);
    }
    for (const GroundPass& g : scenario_.passes) {
        consider(g.start);
        consider(g.end);
    }
    return next;
}

void SimulatedSatellite::advance(double until) {
    if (until < now_) throw ValidationError("satsim: cannot advance backwards");
    const BatteryParams& p = truth_.true_params;
    const double cap = p.total_capacity;

    auto emit_due_sample = [&] {
        if (now_ != next_sample_) return;
        if (!in_gap(now_)) {
            TelemetrySample s;
            s.time = now_;
            double v = soc_to_voltage(soc(truth_state_, p), p);
            double i = current_load(now_);
            if (truth_.noise_sigma_v > 0)
                v += std::normal_distribution<double>(0.0, truth_.noise_sigma_v)(rng_);
            if (truth_.noise_sigma_i > 0)
                i += std::normal_distribution<double>(0.0, truth_.noise_sigma_i)(rng_);
            s.voltage = v;
            s.current = i;
            samples_.push_back(s);
        }
        next_sample_ += truth_.telemetry_cadence;
    };
    emit_due_sample();

    while (now_ < until) {
        double load = current_load(now_);
        double c0 = truth_state_.available + truth_state_.bound;

        // Instant transitions at the cursor.
        if (!safe_mode_ && load > 0 && c0 <= p.soc_at_floor * cap) {
            safe_mode_ = true;
            ++safe_mode_activations_;
            shed_since_ = now_;
            continue;
        }
        if (safe_mode_ && c0 >= recovery_soc_ * cap) {
            safe_mode_ = false;
            dead_bus_ = false;
            shed_intervals_.push_back({shed_since_, now_});
            continue;
        }

        double next = std::min(until, next_boundary_after(now_));
        if (next_sample_ > now_) next = std::min(next, next_sample_);

        // Threshold crossings: total charge is linear inside the piece, so
        // the safe-mode voltage crossing solves exactly.
        enum { None, Enter, Exit } transition = None;
        if (!safe_mode_ && load > 0) {
            double t_cross = now_ + (c0 - p.soc_at_floor * cap) / load;
            if (t_cross <= next) {
                next = t_cross;
                transition = Enter;
            }
        } else if (safe_mode_ && load < 0) {
            double t_cross = now_ + (recovery_soc_ * cap - c0) / (-load);
            if (t_cross <= next) {
                next = t_cross;
                transition = Exit;
            }
        }

        StepResult r = try_step_constant(truth_state_, load, next - now_, p);
        truth_state_ = r.state;
        if (r.depleted) {
            // Available well hit zero. Shed payloads, and if that already
            // happened, drop to a dead bus where only solar infeed remains.
            now_ = r.depleted->time;
            if (!safe_mode_) {
                safe_mode_ = true;
                ++safe_mode_activations_;
                shed_since_ = now_;
            } else {
                dead_bus_ = true;
            }
            continue;
        }
        truth_state_.time = next;
        now_ = next;

        if (transition == Enter) {
            safe_mode_ = true;
            ++safe_mode_activations_;
            shed_since_ = now_;
        } else if (transition == Exit) {
            safe_mode_ = false;
            dead_bus_ = false;
            shed_intervals_.push_back({shed_since_, now_});
        }

        emit_due_sample();
    }
}

} // namespace leosched
