// Generates the committed sample scenarios under fixtures/.
//
// gomx4ish: a 48 h two-satellite-style scenario with four payloads, five
// upload passes shaped like a real two-day pass table, and a truth battery
// seeded 5% above the planner's belief. Every load breakpoint is snapped to
// 30 s past the minute, halfway between the 60 s telemetry samples, so a
// current step inside a sampling interval integrates exactly under the
// trapezoid rule.
//
// oracle12: a 12-window instance small enough for exhaustive verification.

#include "leosched/csv.hpp"
#include "leosched/mission.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

using namespace leosched;
namespace fs = std::filesystem;

namespace {

constexpr double kOrbit = 5700.0;           // s
constexpr double kSpan = 48 * 3600.0;       // windows/passes live here
constexpr double kEnvSpan = 72 * 3600.0;    // sunlight extends past the last horizon
constexpr double kCadence = 60.0;

double snap(double t) { return 30.0 + kCadence * std::round((t - 30.0) / kCadence); }

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

void gen_gomx4ish(const fs::path& dir, double sun_infeed) {
    fs::create_directories(dir);
    std::mt19937_64 rng(20210510);
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    auto chance = [&](double p) { return uniform(0.0, 1.0) < p; };

    Scenario sc;
    sc.epoch = "2021-05-10T00:00:00Z";
    sc.background_load = 0.12;
    sc.uhf_pass_draw = 0.35;
    sc.soc_floor = 0.62;
    sc.initial_soc = 0.75;
    sc.payloads = {
        {"camera", 0.35, 4.0, ""},
        {"adsb", 0.09, 2.0, ""},
        {"hsl", 1.0, 10.0, "sband"},
        {"isl", 0.9, 6.0, "sband"},
    };

    // Sunlight pattern from the pass synthesizer, rescaled and snapped.
    auto [unused_passes, sun] = synthesize_passes(kOrbit, 0.1, kEnvSpan, 1);
    for (SunlightEpisode s : sun) {
        s.start = snap(s.start);
        s.end = snap(s.end);
        s.infeed = sun_infeed;
        if (s.end > s.start) sc.sunlight.push_back(s);
    }

    // Upload passes: the two-day five-pass table, elevations as flown.
    sc.passes = {{3450, 4050, 85.85, "aalborg"},
                 {49770, 50310, 36.22, "aalborg"},
                 {55410, 55890, 28.42, "aalborg"},
                 {88470, 89070, 53.59, "aalborg"},
                 {140490, 141030, 44.67, "aalborg"}};

    int isl_seq = 0, hsl_seq = 0, adsb_seq = 0, cam_seq = 0;
    char id[32];
    for (int orbit = 0; orbit * kOrbit < kSpan; ++orbit) {
        double base = orbit * kOrbit;
        // Fixed number of draws per orbit keeps the pattern stable when one
        // payload's availability is retuned.
        bool roll_pole1 = chance(0.42), roll_pole2 = chance(0.42);
        bool roll_hsl = chance(0.5), roll_adsb = chance(0.6), roll_cam = chance(0.18);
        double off_hsl = uniform(600.0, kOrbit - 1200.0);
        double off_adsb = uniform(300.0, kOrbit - 1500.0);
        double off_cam = uniform(300.0, kOrbit - 900.0);

        // Inter-satellite linking over either pole, roughly 21 minute
        // episodes split into three 7 minute chunks.
        int pole = 0;
        for (double pole_frac : {0.25, 0.75}) {
            bool roll = (pole++ == 0) ? roll_pole1 : roll_pole2;
            if (!roll) continue;
            double center = base + pole_frac * kOrbit;
            double start = snap(center - 630.0);
            if (start < 0 || start + 1260.0 > kSpan) continue;
            std::snprintf(id, sizeof(id), "isl-%02d", ++isl_seq);
            TaskWindow episode{id, "isl", start, start + 1260.0, true, std::nullopt};
            for (TaskWindow& chunk : partition_window(episode, 420.0))
                sc.windows.push_back(chunk);
        }

        // Payload data downlink over the polar or mid-latitude station.
        if (roll_hsl) {
            double start = snap(base + off_hsl);
            if (start >= 0 && start + 480.0 <= kSpan) {
                std::snprintf(id, sizeof(id), "hsl-%02d", ++hsl_seq);
                sc.windows.push_back({id, "hsl", start, start + 480.0, true, std::nullopt});
            }
        }

        // Aircraft tracking over the ocean.
        if (roll_adsb) {
            double start = snap(base + off_adsb);
            if (start >= 0 && start + 600.0 <= kSpan) {
                std::snprintf(id, sizeof(id), "adsb-%02d", ++adsb_seq);
                sc.windows.push_back({id, "adsb", start, start + 600.0, true, std::nullopt});
            }
        }

        // Imaging opportunities.
        if (roll_cam) {
            double start = snap(base + off_cam);
            if (start >= 0 && start + 120.0 <= kSpan) {
                std::snprintf(id, sizeof(id), "cam-%02d", ++cam_seq);
                sc.windows.push_back({id, "camera", start, start + 120.0, true, std::nullopt});
            }
        }
    }

    save_scenario_dir(sc, dir);

    write_file(dir / "battery.cfg",
               "# Planner battery model\n"
               "capacity_as = 18000\n"
               "diffusion_per_s = 0.0002\n"
               "well_split = 0.5\n"
               "voltage_full = 16.2\n"
               "voltage_floor = 14.8\n"
               "soc_at_floor = 0.55\n");

    write_file(dir / "truth.cfg",
               "# True battery: the pack holds 5% more than the model believes\n"
               "capacity_as = 18000\n"
               "diffusion_per_s = 0.0002\n"
               "well_split = 0.5\n"
               "voltage_full = 16.2\n"
               "voltage_floor = 14.8\n"
               "soc_at_floor = 0.55\n"
               "initial_soc = 0.80\n"
               "noise_sigma_v = 0.02\n"
               "noise_sigma_i = 0.05\n"
               "telemetry_cadence_s = 60\n"
               "seed = 4242\n");

    write_file(dir / "truth_nominal.cfg",
               "# Truth identical to the planner model, noise-free\n"
               "capacity_as = 18000\n"
               "diffusion_per_s = 0.0002\n"
               "well_split = 0.5\n"
               "voltage_full = 16.2\n"
               "voltage_floor = 14.8\n"
               "soc_at_floor = 0.55\n"
               "initial_soc = 0.75\n"
               "noise_sigma_v = 0\n"
               "noise_sigma_i = 0\n"
               "telemetry_cadence_s = 60\n"
               "seed = 1\n");

    write_file(dir / "fail.csv", "pass_index,fail\n5,1\n");

    std::printf("gomx4ish: %zu windows (%d isl episodes, %d hsl, %d adsb, %d camera), "
                "%zu sunlight episodes\n",
                sc.windows.size(), isl_seq, hsl_seq, adsb_seq, cam_seq, sc.sunlight.size());
}

void gen_oracle12(const fs::path& dir) {
    fs::create_directories(dir);

    Scenario sc;
    sc.epoch = "2021-05-10T00:00:00Z";
    sc.background_load = 0.1;
    sc.uhf_pass_draw = 0.0;
    sc.soc_floor = 0.5;
    sc.initial_soc = 0.8;
    sc.payloads = {
        {"cam", 0.5, 4.0, ""},
        {"radio_a", 1.2, 9.0, "radio"},
        {"radio_b", 0.8, 6.0, "radio"},
    };
    sc.sunlight = {{2000, 5000, 0.6}, {9000, 12000, 0.6}, {16000, 19000, 0.6}};
    sc.windows = {
        {"w01", "radio_a", 500, 2300, true, std::nullopt},
        {"w02", "cam", 1000, 2200, true, std::nullopt},
        {"w03", "radio_b", 1800, 3600, true, std::nullopt},
        {"w04", "cam", 4000, 5200, true, std::nullopt},
        {"w05", "radio_a", 4800, 6600, true, std::nullopt},
        {"w06", "radio_b", 6000, 7800, true, std::nullopt},
        {"w07", "cam", 8000, 9200, true, std::nullopt},
        {"w08", "radio_a", 9000, 10800, true, std::nullopt},
        {"w09", "radio_b", 10500, 12300, true, std::nullopt},
        {"w10", "cam", 13000, 14200, true, std::nullopt},
        {"w11", "radio_a", 14000, 15800, true, 12.0},
        {"w12", "radio_b", 15500, 17300, true, std::nullopt},
    };
    save_scenario_dir(sc, dir);

    write_file(dir / "battery.cfg",
               "capacity_as = 12000\n"
               "diffusion_per_s = 0.0001\n"
               "well_split = 0.5\n"
               "voltage_full = 16.2\n"
               "voltage_floor = 14.8\n"
               "soc_at_floor = 0.55\n");

    std::printf("oracle12: %zu windows over %g s\n", sc.windows.size(), 18000.0);
}

} // namespace

int main(int argc, char** argv) {
    fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("fixtures");
    double infeed = argc > 2 ? std::atof(argv[2]) : 0.45;
    gen_gomx4ish(root / "gomx4ish", infeed);
    gen_oracle12(root / "oracle12");
    return 0;
}
