#include "leosched/battery.hpp"

#include "leosched/config.hpp"
#include "leosched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace leosched {

void BatteryParams::validate() const {
    if (!(total_capacity > 0)) throw ValidationError("battery: total_capacity must be > 0");
    if (!(diffusion_rate >= 0)) throw ValidationError("battery: diffusion_rate must be >= 0");
    if (!(well_split > 0 && well_split < 1))
        throw ValidationError("battery: well_split must be in (0, 1)");
    if (!(voltage_floor < voltage_full))
        throw ValidationError("battery: voltage_floor must be below voltage_full");
    if (!(soc_at_floor >= 0 && soc_at_floor < 1))
        throw ValidationError("battery: soc_at_floor must be in [0, 1)");
}

BatteryParams BatteryParams::from_config(const std::filesystem::path& file) {
    Config cfg = Config::load(file);
    BatteryParams p;
    p.total_capacity = cfg.num("capacity_as");
    p.diffusion_rate = cfg.num("diffusion_per_s");
    p.well_split = cfg.num_or("well_split", 0.5);
    p.voltage_full = cfg.num("voltage_full");
    p.voltage_floor = cfg.num("voltage_floor");
    p.soc_at_floor = cfg.num("soc_at_floor");
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------
// LoadProfile

LoadProfile::LoadProfile(std::vector<LoadSegment> segments) : segments_(std::move(segments)) {
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const LoadSegment& s = segments_[i];
        if (!(s.start < s.end))
            throw ValidationError("load profile: segment with start >= end");
        if (i > 0 && segments_[i - 1].end > s.start)
            throw ValidationError("load profile: overlapping or unsorted segments");
    }
}

double LoadProfile::load_at(double time) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), time,
                               [](double t, const LoadSegment& s) { return t < s.start; });
    if (it == segments_.begin()) return 0.0;
    --it;
    return (time < it->end) ? it->net_load : 0.0;
}

double LoadProfile::integral(double from, double to) const {
    double total = 0.0;
    for (const LoadSegment& s : segments_) {
        double lo = std::max(from, s.start);
        double hi = std::min(to, s.end);
        if (hi > lo) total += s.net_load * (hi - lo);
    }
    return total;
}

std::vector<double> LoadProfile::breakpoints(double from, double to) const {
    std::vector<double> pts = {from, to};
    for (const LoadSegment& s : segments_) {
        if (s.start > from && s.start < to) pts.push_back(s.start);
        if (s.end > from && s.end < to) pts.push_back(s.end);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

void LoadProfileBuilder::add(double start, double end, double amps) {
    if (end > start && amps != 0.0) parts_.push_back({start, end, amps});
}

void LoadProfileBuilder::add(const LoadProfile& other) {
    for (const LoadSegment& s : other.segments()) add(s.start, s.end, s.net_load);
}

LoadProfile LoadProfileBuilder::build() const {
    std::vector<double> times;
    times.reserve(parts_.size() * 2);
    for (const LoadSegment& p : parts_) {
        times.push_back(p.start);
        times.push_back(p.end);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    std::vector<LoadSegment> segs;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        double t0 = times[i], t1 = times[i + 1];
        // Re-summing per span keeps spans that cancel out exactly at zero.
        double load = 0.0;
        for (const LoadSegment& p : parts_)
            if (p.start <= t0 && p.end >= t1) load += p.net_load;
        if (load != 0.0) {
            if (!segs.empty() && segs.back().end == t0 && segs.back().net_load == load)
                segs.back().end = t1;
            else
                segs.push_back({t0, t1, load});
        }
    }
    return LoadProfile(std::move(segs));
}

// ---------------------------------------------------------------------------
// KiBaM step

namespace {

constexpr double kBisectTol = 1e-6;   // s; depletion/cap crossing localization
constexpr double kRateEps = 1e-15;    // A; treat tinier net flows as zero

// Closed form of the unclamped pair under constant load:
//   c(t) = a+b = c0 - l*t            (total charge)
//   d(t) = b-a = dinf + (d0-dinf)*exp(-2vt),  dinf = l/(2v)   [v > 0]
//   d(t) = d0 + l*t                                           [v = 0]
struct FreeCurve {
    double c0, d0, l, v, dinf;

    FreeCurve(const KibamState& s, double load, double rate)
        : c0(s.available + s.bound), d0(s.bound - s.available), l(load), v(rate),
          dinf(rate > 0 ? load / (2 * rate) : 0.0) {}

    double d(double t) const { return v > 0 ? dinf + (d0 - dinf) * std::exp(-2 * v * t) : d0 + l * t; }
    double a(double t) const { return 0.5 * (c0 - l * t - d(t)); }
    double b(double t) const { return 0.5 * (c0 - l * t + d(t)); }
    double adot(double t) const {
        if (v > 0) return -0.5 * l + v * (d0 - dinf) * std::exp(-2 * v * t);
        return -l;
    }

    // Interior extremum of a(t) or b(t), if any. The derivative of either
    // well is monotone in t, so there is at most one.
    std::optional<double> extremum_a(double horizon) const {
        if (v <= 0) return std::nullopt;
        double k = v * (d0 - dinf);
        if (k == 0.0) return std::nullopt;
        double q = (0.5 * l) / k;  // exp(-2vt*) = q
        if (q <= 0.0 || q >= 1.0) return std::nullopt;
        double t = -std::log(q) / (2 * v);
        return (t > 0 && t < horizon) ? std::optional<double>(t) : std::nullopt;
    }
    std::optional<double> extremum_b(double horizon) const {
        if (v <= 0) return std::nullopt;
        double k = v * (d0 - dinf);
        if (k == 0.0) return std::nullopt;
        double q = (-0.5 * l) / k;
        if (q <= 0.0 || q >= 1.0) return std::nullopt;
        double t = -std::log(q) / (2 * v);
        return (t > 0 && t < horizon) ? std::optional<double>(t) : std::nullopt;
    }
};

template <class F>
double bisect(F f, double lo, double hi) {
    // f(lo) and f(hi) bracket a sign change; returns the crossing to kBisectTol.
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > kBisectTol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((flo <= 0) == (fm <= 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Earliest t in (0, horizon] where value(t) crosses below `target`,
// scanning the monotone pieces induced by `knots`.
template <class F>
std::optional<double> earliest_down(F value, const std::vector<double>& knots, double target) {
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double p = knots[i], q = knots[i + 1];
        double vp = value(p), vq = value(q);
        if (vp > target && vq <= target) {
            if (vq == target) return q;
            return bisect([&](double t) { return value(t) - target; }, p, q);
        }
    }
    return std::nullopt;
}

template <class F>
std::optional<double> earliest_up(F value, const std::vector<double>& knots, double target) {
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double p = knots[i], q = knots[i + 1];
        double vp = value(p), vq = value(q);
        if (vp < target && vq >= target) {
            if (vq == target) return q;
            return bisect([&](double t) { return target - value(t); }, p, q);
        }
    }
    return std::nullopt;
}

enum class Regime { Free, Full, AFill, ABlocked, APassthru, BBlocked };

Regime classify(const KibamState& s, double l, const BatteryParams& p, double cap_tol) {
    const double cap_a = p.available_cap(), cap_b = p.bound_cap();
    const double v = p.diffusion_rate;
    bool at_a = s.available >= cap_a - cap_tol;
    bool at_b = s.bound >= cap_b - cap_tol;

    if (at_a && at_b && l <= 0) return Regime::Full;
    if (at_a) {
        double diffusion_in = v * (s.bound - s.available);
        double net_in = -l + diffusion_in;
        if (net_in > kRateEps) {
            if (diffusion_in > kRateEps) return l > kRateEps ? Regime::APassthru : Regime::ABlocked;
            return Regime::AFill;
        }
    }
    if (at_b && p.diffusion_rate * (s.available - s.bound) > kRateEps) return Regime::BBlocked;
    return Regime::Free;
}

} // namespace

StepResult try_step_constant(const KibamState& state, double net_load, double duration,
                             const BatteryParams& params) {
    if (!(duration >= 0) || !std::isfinite(duration))
        throw ValidationError("step_constant: duration must be finite and >= 0");
    if (!std::isfinite(net_load)) throw ValidationError("step_constant: non-finite load");

    const double cap_a = params.available_cap();
    const double cap_b = params.bound_cap();
    const double v = params.diffusion_rate;
    const double cap_tol = 1e-9 * std::max(1.0, params.total_capacity);

    KibamState s = state;
    const double end_time = state.time + duration;
    double remaining = duration;

    for (int iter = 0; remaining > 0; ++iter) {
        if (iter > 100) throw std::logic_error("step_constant: regime iteration did not settle");

        switch (classify(s, net_load, params, cap_tol)) {
        case Regime::Full:
        case Regime::ABlocked: {
            // Both flows blocked or discarded; state holds.
            s.time += remaining;
            remaining = 0;
            break;
        }
        case Regime::AFill: {
            // a pinned at its cap by infeed; b relaxes toward a's level.
            double b0 = s.bound;
            s.available = cap_a;
            double t_event = remaining;
            bool hits_cap_b = false;
            if (v > 0 && cap_b < cap_a && b0 < cap_b) {
                double ratio = (cap_a - cap_b) / (cap_a - b0);
                if (ratio > 0 && ratio < 1) {
                    double t_hit = -std::log(ratio) / v;
                    if (t_hit <= remaining) {
                        t_event = t_hit;
                        hits_cap_b = true;
                    }
                }
            }
            s.bound = hits_cap_b ? cap_b
                      : (v > 0 ? cap_a - (cap_a - b0) * std::exp(-v * t_event) : b0);
            s.bound = std::min(s.bound, cap_b);
            s.time += t_event;
            remaining -= t_event;
            break;
        }
        case Regime::APassthru: {
            // a pinned at its cap while the load is served through it from b.
            double b0 = s.bound;
            s.available = cap_a;
            double t_exit = (b0 - cap_a - net_load / v) / net_load;
            double t_event = std::min(remaining, std::max(t_exit, 0.0));
            s.bound = b0 - net_load * t_event;
            s.time += t_event;
            remaining -= t_event;
            if (t_event == 0 && remaining > 0)
                throw std::logic_error("step_constant: stalled in pass-through regime");
            break;
        }
        case Regime::BBlocked: {
            // b pinned at its cap, diffusion into it blocked; a sees the load alone.
            double a0 = s.available;
            double t_event = remaining;
            if (net_load > 0) {
                double t_release = (a0 - cap_b) / net_load;  // a falls to b's level
                t_event = std::min(t_event, std::max(t_release, 0.0));
            } else if (net_load < 0) {
                double t_full = (cap_a - a0) / (-net_load);
                t_event = std::min(t_event, std::max(t_full, 0.0));
            }
            s.available = std::min(a0 - net_load * t_event, cap_a);
            s.time += t_event;
            remaining -= t_event;
            if (t_event == 0 && remaining > 0)
                throw std::logic_error("step_constant: stalled in blocked regime");
            break;
        }
        case Regime::Free: {
            FreeCurve curve(s, net_load, v);

            std::vector<double> knots_a = {0.0};
            if (auto t = curve.extremum_a(remaining)) knots_a.push_back(*t);
            knots_a.push_back(remaining);
            std::vector<double> knots_b = {0.0};
            if (auto t = curve.extremum_b(remaining)) knots_b.push_back(*t);
            knots_b.push_back(remaining);

            auto a_of = [&](double t) { return curve.a(t); };
            auto b_of = [&](double t) { return curve.b(t); };

            // Depletion: a reaches zero strictly inside the step.
            std::optional<double> t_dep;
            if (s.available <= cap_tol && curve.adot(0.0) < -kRateEps) {
                t_dep = 0.0;
            } else {
                t_dep = earliest_down(a_of, knots_a, 0.0);
                if (t_dep && *t_dep >= remaining && curve.a(remaining) >= 0.0) t_dep.reset();
            }

            std::optional<double> t_cap_a =
                (s.available < cap_a - cap_tol) ? earliest_up(a_of, knots_a, cap_a) : std::nullopt;
            std::optional<double> t_cap_b =
                (s.bound < cap_b - cap_tol) ? earliest_up(b_of, knots_b, cap_b) : std::nullopt;

            double t_event = remaining;
            int which = 0;  // 0 none, 1 depleted, 2 cap_a, 3 cap_b
            if (t_cap_a && *t_cap_a < t_event) { t_event = *t_cap_a; which = 2; }
            if (t_cap_b && *t_cap_b < t_event) { t_event = *t_cap_b; which = 3; }
            if (t_dep && *t_dep <= t_event) { t_event = *t_dep; which = 1; }

            if (which == 1) {
                KibamState dead;
                dead.available = 0.0;
                dead.bound = std::clamp(curve.b(t_event), 0.0, cap_b);
                dead.time = s.time + t_event;
                return {dead, Depletion{dead.time}};
            }

            s = {curve.a(t_event), curve.b(t_event), s.time + t_event};
            if (which == 2) s.available = cap_a;
            if (which == 3) s.bound = cap_b;
            s.available = std::clamp(s.available, 0.0, cap_a);
            s.bound = std::clamp(s.bound, 0.0, cap_b);
            remaining -= t_event;
            if (which == 0) remaining = 0;
            break;
        }
        }
    }

    s.time = end_time;
    return {s, std::nullopt};
}

KibamState step_constant(const KibamState& state, double net_load, double duration,
                         const BatteryParams& params) {
    StepResult r = try_step_constant(state, net_load, duration, params);
    if (r.depleted) throw DepletedError(r.depleted->time);
    return r.state;
}

StepResult try_evolve(const KibamState& state, const LoadProfile& profile, double until,
                      const BatteryParams& params) {
    if (!(until >= state.time)) throw ValidationError("evolve: until precedes state.time");

    KibamState s = state;
    double cursor = state.time;
    auto advance = [&](double to, double load) -> std::optional<Depletion> {
        if (to <= cursor) return std::nullopt;
        StepResult r = try_step_constant(s, load, to - cursor, params);
        s = r.state;
        if (!r.depleted) s.time = to;  // keep segment boundaries exact
        cursor = to;
        return r.depleted;
    };

    for (const LoadSegment& seg : profile.segments()) {
        if (seg.end <= cursor) continue;
        if (seg.start >= until) break;
        if (auto dep = advance(std::min(seg.start, until), 0.0)) return {s, dep};
        if (auto dep = advance(std::min(seg.end, until), seg.net_load)) return {s, dep};
    }
    if (auto dep = advance(until, 0.0)) return {s, dep};
    return {s, std::nullopt};
}

KibamState evolve(const KibamState& state, const LoadProfile& profile, double until,
                  const BatteryParams& params) {
    StepResult r = try_evolve(state, profile, until, params);
    if (r.depleted) throw DepletedError(r.depleted->time);
    return r.state;
}

double soc(const KibamState& state, const BatteryParams& params) {
    return std::clamp((state.available + state.bound) / params.total_capacity, 0.0, 1.0);
}

double soc_to_voltage(double soc, const BatteryParams& params) {
    double u = (soc - params.soc_at_floor) / (1.0 - params.soc_at_floor);
    return params.voltage_floor * (1.0 - u) + params.voltage_full * u;
}

double voltage_to_soc(double voltage, const BatteryParams& params) {
    double u = (voltage - params.voltage_floor) / (params.voltage_full - params.voltage_floor);
    double s = params.soc_at_floor * (1.0 - u) + 1.0 * u;
    return std::clamp(s, 0.0, 1.0);
}

KibamState state_at_soc(double soc, const BatteryParams& params, double time) {
    if (!(soc >= 0 && soc <= 1)) throw ValidationError("state_at_soc: soc must be in [0, 1]");
    return {soc * params.available_cap(), soc * params.bound_cap(), time};
}

} // namespace leosched
