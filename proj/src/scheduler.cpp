#include "leosched/scheduler.hpp"

#include "leosched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace leosched {

bool dominates(const DpLabel& l1, const DpLabel& l2, double charge_eps) {
    bool ge = l1.reward >= l2.reward &&
              l1.state.available >= l2.state.available - charge_eps &&
              l1.state.bound >= l2.state.bound - charge_eps;
    if (!ge) return false;
    bool strict = l1.reward > l2.reward ||
                  l1.state.available > l2.state.available + charge_eps ||
                  l1.state.bound > l2.state.bound + charge_eps;
    return strict;
}

bool insert_pruned(std::vector<DpLabel>& antichain, const DpLabel& label, double charge_eps) {
    for (const DpLabel& kept : antichain)
        if (dominates(kept, label, charge_eps)) return false;
    std::erase_if(antichain, [&](const DpLabel& kept) { return dominates(label, kept, charge_eps); });
    antichain.push_back(label);
    return true;
}

namespace {

constexpr double kChargeEps = 1e-9;  // As; antichain slack against float churn

struct Candidate {
    const TaskWindow* window = nullptr;
    double draw = 0.0;
    double reward = 0.0;
    int group = -1;  // interned exclusion group, -1 = none
};

// DP working set: per active-window signature, an antichain of arena indices.
using Buckets = std::map<std::vector<std::int32_t>, std::vector<std::int32_t>>;

bool chain_insert(std::vector<std::int32_t>& chain, std::int32_t idx,
                  const std::vector<DpLabel>& arena, bool prune) {
    if (!prune) {
        chain.push_back(idx);
        return true;
    }
    const DpLabel& label = arena[idx];
    for (std::int32_t k : chain)
        if (dominates(arena[k], label, kChargeEps)) return false;
    std::erase_if(chain,
                  [&](std::int32_t k) { return dominates(label, arena[k], kChargeEps); });
    chain.push_back(idx);
    return true;
}

std::vector<std::string> chosen_ids(const std::vector<DpLabel>& arena, std::int32_t leaf,
                                    const std::vector<Candidate>& cands) {
    std::vector<std::string> ids;
    for (std::int32_t i = leaf; i >= 0; i = arena[i].parent)
        if (arena[i].window >= 0) ids.push_back(cands[arena[i].window].window->id);
    std::reverse(ids.begin(), ids.end());  // chronological selection order
    return ids;
}

} // namespace

LoadProfile induced_load_profile(const Scenario& scenario,
                                 const std::vector<ScheduledTask>& tasks, TimeSpan span,
                                 const LoadProfile& extra) {
    LoadProfileBuilder builder;
    builder.add(base_load_profile(scenario, span.start, span.end));
    for (const ScheduledTask& t : tasks) {
        const PayloadDef* p = scenario.find_payload(t.payload);
        double draw = p ? p->power_draw : 0.0;
        builder.add(std::max(t.start, span.start), std::min(t.end, span.end), draw);
    }
    builder.add(extra);
    return builder.build();
}

std::optional<SocViolation> find_soc_violation(const LoadProfile& induced,
                                               const KibamState& initial, TimeSpan span,
                                               double soc_floor, const BatteryParams& params) {
    if (soc(initial, params) < soc_floor) return SocViolation{span.start, false};

    KibamState s = initial;
    std::vector<double> pts = induced.breakpoints(span.start, span.end);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double load = induced.load_at(pts[i]);
        StepResult r = try_step_constant(s, load, pts[i + 1] - pts[i], params);
        if (r.depleted) return SocViolation{r.depleted->time, true};
        r.state.time = pts[i + 1];
        if (soc(r.state, params) < soc_floor) {
            // Total charge falls linearly at rate `load` inside the piece, so
            // the first crossing instant solves exactly.
            double c0 = s.available + s.bound;
            double target = soc_floor * params.total_capacity;
            double cross = load > 0 ? pts[i] + (c0 - target) / load : pts[i + 1];
            return SocViolation{std::min(cross, pts[i + 1]), false};
        }
        s = r.state;
    }
    return std::nullopt;
}

Schedule plan(const Scenario& scenario, const BatteryParams& params, const KibamState& initial,
              TimeSpan horizon, const PlanOptions& options) {
    params.validate();
    if (initial.time != horizon.start)
        throw ValidationError("plan: initial state time must equal the horizon start");
    if (!(horizon.end >= horizon.start)) throw ValidationError("plan: empty horizon");

    // Candidates: selectable windows fully inside the horizon, in (start, id) order.
    std::vector<Candidate> cands;
    std::map<std::string, int> groups;
    {
        std::vector<const TaskWindow*> inside;
        for (const TaskWindow& w : scenario.windows)
            if (w.selectable && w.start >= horizon.start && w.end <= horizon.end)
                inside.push_back(&w);
        std::sort(inside.begin(), inside.end(), [](const TaskWindow* a, const TaskWindow* b) {
            return a->start != b->start ? a->start < b->start : a->id < b->id;
        });
        for (const TaskWindow* w : inside) {
            Candidate c;
            c.window = w;
            c.draw = scenario.window_draw(*w);
            c.reward = scenario.window_reward(*w);
            const PayloadDef* p = scenario.find_payload(w->payload);
            if (p && !p->exclusion_group.empty())
                c.group = groups.emplace(p->exclusion_group, (int)groups.size()).first->second;
            cands.push_back(c);
        }
    }

    LoadProfile base;
    {
        LoadProfileBuilder b;
        b.add(base_load_profile(scenario, horizon.start, horizon.end));
        b.add(options.extra_load);
        base = b.build();
    }

    // Even the empty selection must hold the floor.
    if (auto v = find_soc_violation(base, initial, horizon, scenario.soc_floor, params))
        throw InfeasibleError(v->time, v->depleted ? "battery depletes under base load"
                                                   : "base load alone breaks the SoC floor");

    // Decision epochs: window bounds plus every load breakpoint.
    std::vector<double> events = base.breakpoints(horizon.start, horizon.end);
    for (const Candidate& c : cands) {
        events.push_back(c.window->start);
        events.push_back(c.window->end);
    }
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());

    std::vector<DpLabel> arena;
    arena.push_back({0.0, initial, -1, -1});
    Buckets buckets;
    buckets[{}] = {0};

    Schedule out;
    out.stats.epochs = events.size();
    bool truncated = false;

    for (std::size_t ei = 0; ei < events.size(); ++ei) {
        double t = events[ei];

        // Close windows ending here; signatures shrink and lineages merge.
        {
            Buckets merged;
            for (auto& [key, chain] : buckets) {
                std::vector<std::int32_t> nk;
                for (std::int32_t c : key)
                    if (cands[c].window->end != t) nk.push_back(c);
                std::vector<std::int32_t>& target = merged[std::move(nk)];
                for (std::int32_t idx : chain) chain_insert(target, idx, arena, options.prune);
            }
            buckets = std::move(merged);
        }

        // Open windows starting here: branch select/skip per label.
        for (std::size_t c = 0; c < cands.size(); ++c) {
            if (cands[c].window->start != t) continue;
            std::vector<std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>>> snapshot(
                buckets.begin(), buckets.end());
            for (auto& [key, chain] : snapshot) {
                if (cands[c].group >= 0) {
                    bool conflict = false;
                    for (std::int32_t o : key)
                        if (cands[o].group == cands[c].group) conflict = true;
                    if (conflict) continue;
                }
                std::vector<std::int32_t> nk = key;
                nk.push_back((std::int32_t)c);
                std::sort(nk.begin(), nk.end());
                std::vector<std::int32_t>& target = buckets[std::move(nk)];
                for (std::int32_t idx : chain) {
                    DpLabel next{arena[idx].reward + cands[c].reward, arena[idx].state, idx,
                                 (std::int32_t)c};
                    std::int32_t ni = (std::int32_t)arena.size();
                    arena.push_back(next);
                    chain_insert(target, ni, arena, options.prune);
                }
            }
        }

        // Evolve every surviving label to the next epoch under its own load.
        if (ei + 1 < events.size()) {
            double next = events[ei + 1];
            double base_load = base.load_at(t);
            Buckets evolved;
            for (auto& [key, chain] : buckets) {
                double load = base_load;
                for (std::int32_t c : key) load += cands[c].draw;
                std::vector<std::int32_t>& target = evolved[key];
                for (std::int32_t idx : chain) {
                    StepResult r = try_step_constant(arena[idx].state, load, next - t, params);
                    if (r.depleted) continue;
                    r.state.time = next;
                    if (soc(r.state, params) < scenario.soc_floor) continue;
                    // Evolution is not a decision: advance the label in place.
                    arena[idx].state = r.state;
                    chain_insert(target, idx, arena, options.prune);
                }
                if (target.empty()) evolved.erase(key);
            }
            buckets = std::move(evolved);

            if (options.beam_cap) {
                for (auto& [key, chain] : buckets) {
                    if (chain.size() <= *options.beam_cap) continue;
                    std::sort(chain.begin(), chain.end(), [&](std::int32_t x, std::int32_t y) {
                        const DpLabel &lx = arena[x], &ly = arena[y];
                        double tx = lx.state.available + lx.state.bound;
                        double ty = ly.state.available + ly.state.bound;
                        if (lx.reward != ly.reward) return lx.reward > ly.reward;
                        if (tx != ty) return tx > ty;
                        if (lx.state.available != ly.state.available)
                            return lx.state.available > ly.state.available;
                        return x < y;
                    });
                    chain.resize(*options.beam_cap);
                    truncated = true;
                }
            }
        }

        for (const auto& [key, chain] : buckets) {
            out.stats.labels_stored += chain.size();
            out.stats.peak_antichain = std::max(out.stats.peak_antichain, chain.size());
        }
        if (buckets.empty())
            throw std::logic_error("plan: DP table emptied despite feasible base load");
    }

    out.stats.labels_created = arena.size();
    out.heuristic = truncated;

    // All windows closed at the final epoch: exactly one signature remains.
    std::vector<std::int32_t> finals;
    for (const auto& [key, chain] : buckets)
        finals.insert(finals.end(), chain.begin(), chain.end());

    double best = -1.0;
    for (std::int32_t idx : finals) best = std::max(best, arena[idx].reward);
    std::int32_t winner = -1;
    std::vector<std::string> winner_ids;
    for (std::int32_t idx : finals) {
        if (arena[idx].reward != best) continue;
        std::vector<std::string> ids = chosen_ids(arena, idx, cands);
        if (winner < 0 || std::lexicographical_compare(ids.begin(), ids.end(), winner_ids.begin(),
                                                       winner_ids.end())) {
            winner = idx;
            winner_ids = std::move(ids);
        }
    }
    if (winner < 0) throw std::logic_error("plan: final DP table is empty");
    out.total_reward = arena[winner].reward;

    // Rebuild the chosen tasks from the parent chain.
    std::vector<std::int32_t> chosen;
    for (std::int32_t i = winner; i >= 0; i = arena[i].parent)
        if (arena[i].window >= 0) chosen.push_back(arena[i].window);
    std::sort(chosen.begin(), chosen.end());
    for (std::int32_t c : chosen) {
        const TaskWindow& w = *cands[c].window;
        out.tasks.push_back({w.id, w.payload, w.start, w.end, cands[c].reward});
    }

    // Predicted trace: replay the final selection with periodic samples.
    LoadProfile induced = induced_load_profile(scenario, out.tasks, horizon, options.extra_load);
    std::vector<double> pts = induced.breakpoints(horizon.start, horizon.end);
    if (options.trace_step > 0)
        for (double t = horizon.start; t < horizon.end; t += options.trace_step)
            pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    KibamState s = initial;
    out.trace.push_back({s.time, s.available, s.bound});
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        StepResult r = try_step_constant(s, induced.load_at(pts[i]), pts[i + 1] - pts[i], params);
        s = r.state;
        if (r.depleted) break;  // cannot happen for a feasible plan
        s.time = pts[i + 1];
        out.trace.push_back({s.time, s.available, s.bound});
    }
    return out;
}

Schedule plan_monolithic(const Scenario& scenario, const BatteryParams& params,
                         const KibamState& initial, TimeSpan horizon,
                         const PlanOptions& options) {
    return plan(scenario, params, initial, horizon, options);
}

} // namespace leosched
