#include "leosched/estimator.hpp"

#include "leosched/errors.hpp"

#include <algorithm>
#include <cmath>

namespace leosched {

namespace {

void check_log(const TelemetryLog& log) {
    if (log.empty()) throw EmptyLogError();
    for (std::size_t i = 0; i + 1 < log.samples.size(); ++i)
        if (!(log.samples[i].time < log.samples[i + 1].time))
            throw ValidationError("telemetry log times must be strictly increasing");
}

// Cumulative discharge (As) up to each sample. Short gaps interpolate the
// current linearly (trapezoid); gaps beyond max_gap integrate the scheduled
// load instead when one is available.
std::vector<double> cumulative_charge(const TelemetryLog& log, const EstimatorOptions& opt) {
    const auto& s = log.samples;
    std::vector<double> cum(s.size(), 0.0);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        double dt = s[i + 1].time - s[i].time;
        double piece;
        if (dt > opt.max_gap && opt.scheduled != nullptr)
            piece = opt.scheduled->integral(s[i].time, s[i + 1].time);
        else
            piece = 0.5 * (s[i].current + s[i + 1].current) * dt;
        cum[i + 1] = cum[i] + piece;
    }
    return cum;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

SocEstimate coulomb_count(const TelemetryLog& log, double initial_soc,
                          const BatteryParams& params, const EstimatorOptions& opt) {
    check_log(log);
    const auto& s = log.samples;

    // Forward KiBaM run under the midpoint-constant load: its total drop per
    // interval equals the trapezoid integral, so the split reconstruction and
    // the charge bookkeeping agree by construction.
    KibamState state = state_at_soc(std::clamp(initial_soc, 0.0, 1.0), params, s.front().time);
    double gap_time = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        double dt = s[i + 1].time - s[i].time;
        if (dt > opt.max_gap && opt.scheduled != nullptr) {
            StepResult r = try_evolve(state, *opt.scheduled, s[i + 1].time, params);
            state = r.state;
            if (r.depleted) state = {0.0, r.state.bound, s[i + 1].time};
            gap_time += dt;
        } else {
            double load = 0.5 * (s[i].current + s[i + 1].current);
            StepResult r = try_step_constant(state, load, dt, params);
            state = r.state;
            if (r.depleted) state = {0.0, r.state.bound, s[i + 1].time};
            if (dt > opt.max_gap) gap_time += dt;
        }
        state.time = s[i + 1].time;
    }

    SocEstimate est;
    est.time = s.back().time;
    est.state = state;
    double span = std::max(s.back().time - s.front().time, 1.0);
    est.confidence_window = 0.005 + 0.05 * (gap_time / span);
    est.correction_applied = 0.0;
    return est;
}

SocEstimate reconcile(const KibamState& predicted, const TelemetryLog& log,
                      const BatteryParams& params, double cap, const EstimatorOptions& opt) {
    check_log(log);
    if (!(predicted.time >= log.end()))
        throw ValidationError("reconcile: log must end at or before the predicted state");

    const auto& s = log.samples;
    const std::vector<double> cum = cumulative_charge(log, opt);
    const double capacity = params.total_capacity;
    const std::size_t n = s.size();
    const std::size_t k = std::min<std::size_t>(std::max(opt.robust_window, 1), n);

    // Every sample yields an end-of-log SoC estimate: invert its voltage and
    // carry the result to the log end with the integrated current. The
    // trailing median is the voltage-implied SoC; the leading median is the
    // Coulomb-counting estimate (level anchored at the start, shape from the
    // full integration).
    auto end_aligned = [&](std::size_t j) {
        return voltage_to_soc(s[j].voltage, params) - (cum[n - 1] - cum[j]) / capacity;
    };
    std::vector<double> trailing, leading;
    for (std::size_t j = n - k; j < n; ++j) trailing.push_back(end_aligned(j));
    for (std::size_t j = 0; j < k; ++j) leading.push_back(end_aligned(j));

    double soc_voltage = median(trailing);
    double soc_coulomb = median(leading);
    double measured = opt.voltage_weight * soc_voltage + (1.0 - opt.voltage_weight) * soc_coulomb;

    double soc_pred = soc(predicted, params);
    double correction = std::clamp(measured - soc_pred, -cap, cap);

    double total = std::clamp(soc_pred + correction, 0.0, 1.0) * capacity;
    double pred_total = predicted.available + predicted.bound;
    double ratio = pred_total > 0 ? predicted.available / pred_total : params.well_split;
    double a = ratio * total;
    double b = total - a;
    if (a > params.available_cap()) {  // spill into the other well
        b += a - params.available_cap();
        a = params.available_cap();
    }
    if (b > params.bound_cap()) {
        a = std::min(a + (b - params.bound_cap()), params.available_cap());
        b = params.bound_cap();
    }

    SocEstimate est;
    est.time = log.end();
    est.state = {a, b, log.end()};
    double spread = *std::max_element(trailing.begin(), trailing.end()) -
                    *std::min_element(trailing.begin(), trailing.end());
    est.confidence_window = 0.002 + 0.5 * spread;
    est.correction_applied = correction;
    return est;
}

KibamState propagate_to(const SocEstimate& estimate, const LoadProfile& scheduled, double t0,
                        const BatteryParams& params) {
    if (!(t0 >= estimate.time))
        throw ValidationError("propagate_to: t0 precedes the estimate time");
    return evolve(estimate.state, scheduled, t0, params);
}

} // namespace leosched
