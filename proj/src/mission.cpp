#include "leosched/mission.hpp"

#include "leosched/config.hpp"
#include "leosched/csv.hpp"
#include "leosched/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

namespace leosched {

namespace {

bool iso8601_like(const std::string& s) {
    // YYYY-MM-DDThh:mm:ssZ
    if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
        s[16] != ':' || s[19] != 'Z')
        return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u, 11u, 12u, 14u, 15u, 17u, 18u})
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

} // namespace

const PayloadDef* Scenario::find_payload(const std::string& name) const {
    for (const PayloadDef& p : payloads)
        if (p.name == name) return &p;
    return nullptr;
}

double Scenario::window_reward(const TaskWindow& w) const {
    if (w.reward_override) return *w.reward_override;
    const PayloadDef* p = find_payload(w.payload);
    return p ? p->reward_per_window : 0.0;
}

double Scenario::window_draw(const TaskWindow& w) const {
    const PayloadDef* p = find_payload(w.payload);
    return p ? p->power_draw : 0.0;
}

void Scenario::validate() const {
    if (!epoch.empty() && !iso8601_like(epoch))
        throw ValidationError("scenario: epoch is not ISO-8601 UTC (YYYY-MM-DDThh:mm:ssZ): '" +
                              epoch + "'");
    std::set<std::string> names;
    for (const PayloadDef& p : payloads) {
        if (!names.insert(p.name).second)
            throw ValidationError("scenario: duplicate payload name '" + p.name + "'");
        if (p.power_draw < 0)
            throw ValidationError("payload '" + p.name + "': power_a must be >= 0");
        if (p.reward_per_window < 0)
            throw ValidationError("payload '" + p.name + "': reward must be >= 0");
    }
    std::set<std::string> window_ids;
    for (const TaskWindow& w : windows) {
        if (!(w.start < w.end))
            throw ValidationError("window '" + w.id + "': end must be after start");
        if (!names.count(w.payload))
            throw ValidationError("window '" + w.id + "': unknown payload '" + w.payload + "'");
        if (!window_ids.insert(w.id).second)
            throw ValidationError("window '" + w.id + "': duplicate id");
    }
    for (const SunlightEpisode& s : sunlight) {
        if (!(s.start < s.end)) throw ValidationError("sunlight episode: end must be after start");
        if (s.infeed < 0) throw ValidationError("sunlight episode: infeed must be >= 0");
    }
    for (const GroundPass& g : passes) {
        if (!(g.start < g.end))
            throw ValidationError("pass over '" + g.station + "': end must be after start");
        if (!(g.max_elevation >= 0 && g.max_elevation <= 90))
            throw ValidationError("pass over '" + g.station + "': max elevation out of [0, 90]");
    }
    if (background_load < 0) throw ValidationError("scenario: background_load_a must be >= 0");
    if (uhf_pass_draw < 0) throw ValidationError("scenario: uhf_pass_draw_a must be >= 0");
    if (!(soc_floor >= 0 && soc_floor < 1))
        throw ValidationError("scenario: soc_floor must be in [0, 1)");
    if (!(initial_soc >= 0 && initial_soc <= 1))
        throw ValidationError("scenario: initial_soc must be in [0, 1]");
}

Scenario load_scenario(const std::filesystem::path& windows_file,
                       const std::filesystem::path& sunlight_file,
                       const std::filesystem::path& passes_file,
                       const std::filesystem::path& payload_config) {
    Scenario sc;

    Config cfg = Config::load(payload_config);
    sc.epoch = cfg.str_or("epoch", "");
    sc.background_load = cfg.num_or("background_load_a", 0.0);
    sc.uhf_pass_draw = cfg.num_or("uhf_pass_draw_a", 0.0);
    sc.soc_floor = cfg.num_or("soc_floor", 0.0);
    sc.initial_soc = cfg.num_or("initial_soc", 1.0);
    for (const std::string& name : cfg.group_names("payload")) {
        PayloadDef p;
        p.name = name;
        p.power_draw = cfg.num("payload." + name + ".power_a");
        p.reward_per_window = cfg.num("payload." + name + ".reward");
        p.exclusion_group = cfg.str_or("payload." + name + ".exclusion_group", "");
        sc.payloads.push_back(std::move(p));
    }

    {
        csv::Reader rd(windows_file, {"id", "payload", "start_s", "end_s", "reward"});
        for (const csv::Row& row : rd.rows()) {
            TaskWindow w;
            w.id = rd.str(row, 0);
            w.payload = rd.str(row, 1);
            w.start = rd.num(row, 2);
            w.end = rd.num(row, 3);
            if (!rd.blank(row, 4)) w.reward_override = rd.num(row, 4);
            sc.windows.push_back(std::move(w));
        }
    }
    {
        csv::Reader rd(sunlight_file, {"start_s", "end_s", "infeed_a"});
        for (const csv::Row& row : rd.rows())
            sc.sunlight.push_back({rd.num(row, 0), rd.num(row, 1), rd.num(row, 2)});
    }
    {
        csv::Reader rd(passes_file, {"station", "start_s", "end_s", "max_elevation_deg"});
        for (const csv::Row& row : rd.rows())
            sc.passes.push_back({rd.num(row, 1), rd.num(row, 2), rd.num(row, 3), rd.str(row, 0)});
    }

    auto by_start = [](const auto& x, const auto& y) { return x.start < y.start; };
    std::stable_sort(sc.windows.begin(), sc.windows.end(), by_start);
    std::stable_sort(sc.sunlight.begin(), sc.sunlight.end(), by_start);
    std::stable_sort(sc.passes.begin(), sc.passes.end(), by_start);

    sc.validate();
    return sc;
}

Scenario load_scenario_dir(const std::filesystem::path& dir) {
    return load_scenario(dir / "windows.csv", dir / "sunlight.csv", dir / "passes.csv",
                         dir / "scenario.cfg");
}

void save_scenario_dir(const Scenario& sc, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    std::string cfg;
    if (!sc.epoch.empty()) cfg += "epoch = " + sc.epoch + "\n";
    cfg += "background_load_a = " + csv::fmt(sc.background_load) + "\n";
    cfg += "uhf_pass_draw_a = " + csv::fmt(sc.uhf_pass_draw) + "\n";
    cfg += "soc_floor = " + csv::fmt(sc.soc_floor) + "\n";
    cfg += "initial_soc = " + csv::fmt(sc.initial_soc) + "\n";
    for (const PayloadDef& p : sc.payloads) {
        cfg += "payload." + p.name + ".power_a = " + csv::fmt(p.power_draw) + "\n";
        cfg += "payload." + p.name + ".reward = " + csv::fmt(p.reward_per_window) + "\n";
        if (!p.exclusion_group.empty())
            cfg += "payload." + p.name + ".exclusion_group = " + p.exclusion_group + "\n";
    }
    {
        std::ofstream out(dir / "scenario.cfg", std::ios::binary);
        out << cfg;
    }

    csv::Writer windows({"id", "payload", "start_s", "end_s", "reward"});
    for (const TaskWindow& w : sc.windows)
        windows.row({w.id, w.payload, csv::fmt(w.start), csv::fmt(w.end),
                     w.reward_override ? csv::fmt(*w.reward_override) : ""});
    windows.save(dir / "windows.csv");

    csv::Writer sun({"start_s", "end_s", "infeed_a"});
    for (const SunlightEpisode& s : sc.sunlight)
        sun.row({csv::fmt(s.start), csv::fmt(s.end), csv::fmt(s.infeed)});
    sun.save(dir / "sunlight.csv");

    csv::Writer passes({"station", "start_s", "end_s", "max_elevation_deg"});
    for (const GroundPass& g : sc.passes)
        passes.row({g.station, csv::fmt(g.start), csv::fmt(g.end), csv::fmt(g.max_elevation)});
    passes.save(dir / "passes.csv");
}

std::vector<TaskWindow> partition_window(const TaskWindow& window, double chunk) {
    if (!(chunk > 0)) throw ValidationError("partition_window: chunk must be > 0");
    std::vector<TaskWindow> out;
    int index = 1;
    for (double t = window.start; t + chunk <= window.end + 1e-9; t += chunk, ++index) {
        TaskWindow c = window;
        c.id = window.id + "-" + std::to_string(index);
        c.start = t;
        c.end = t + chunk;
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<GroundPass> filter_passes(const std::vector<GroundPass>& passes,
                                      double min_elevation) {
    std::vector<GroundPass> out;
    for (const GroundPass& g : passes)
        if (g.max_elevation > min_elevation) out.push_back(g);
    return out;
}

std::pair<std::vector<GroundPass>, std::vector<SunlightEpisode>>
synthesize_passes(double orbit_period, double visibility_fraction, double horizon,
                  std::uint64_t seed) {
    if (!(orbit_period > 0)) throw ValidationError("synthesize_passes: orbit_period must be > 0");
    if (!(visibility_fraction > 0 && visibility_fraction < 1))
        throw ValidationError("synthesize_passes: visibility_fraction must be in (0, 1)");

    std::vector<GroundPass> passes;
    std::vector<SunlightEpisode> sunlight;
    if (horizon <= 0) return {passes, sunlight};

    for (double t = 0; t < horizon; t += orbit_period) {
        double end = std::min(t + 0.6 * orbit_period, horizon);
        if (end > t) sunlight.push_back({t, end, 1.0});
    }

    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    auto uniform_int = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };

    const double min_gap = 5400.0;   // 90 min between pass starts
    const double max_gap = 54000.0;  // 15 h
    double prev_start = -1.0;
    for (double day = 0; day < horizon; day += 86400.0) {
        // Two visibility clusters per day, passes on consecutive orbits within each.
        double cluster_starts[2] = {day + uniform(1800.0, 6000.0),
                                    day + uniform(47000.0, 54000.0)};
        for (double cluster : cluster_starts) {
            int count = uniform_int(1, 3);
            for (int k = 0; k < count; ++k) {
                double start = cluster + k * orbit_period;
                if (prev_start >= 0 && start - prev_start < min_gap)
                    start = prev_start + min_gap;
                if (prev_start >= 0 && start - prev_start > max_gap)
                    start = prev_start + max_gap;
                double duration = visibility_fraction * orbit_period * uniform(0.6, 1.0);
                if (start + duration > horizon) continue;
                passes.push_back({start, start + duration, uniform(26.0, 89.0), "aalborg"});
                prev_start = start;
            }
        }
    }
    std::sort(passes.begin(), passes.end(),
              [](const GroundPass& a, const GroundPass& b) { return a.start < b.start; });
    return {passes, sunlight};
}

LoadProfile base_load_profile(const Scenario& sc, double from, double to) {
    LoadProfileBuilder builder;
    if (sc.background_load != 0.0) builder.add(from, to, sc.background_load);
    for (const SunlightEpisode& s : sc.sunlight)
        builder.add(std::max(s.start, from), std::min(s.end, to), -s.infeed);
    if (sc.uhf_pass_draw != 0.0)
        for (const GroundPass& g : sc.passes)
            builder.add(std::max(g.start, from), std::min(g.end, to), sc.uhf_pass_draw);
    return builder.build();
}

} // namespace leosched
