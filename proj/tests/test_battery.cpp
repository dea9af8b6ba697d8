#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "leosched/battery.hpp"
#include "leosched/errors.hpp"
#include "support/rk4.hpp"

#include <cmath>
#include <random>

using namespace leosched;
using leosched::testing::rk4_integrate;
using leosched::testing::rk4_profile;

namespace {

BatteryParams make_params(double capacity = 400.0, double v = 1e-3, double split = 0.5) {
    BatteryParams p;
    p.total_capacity = capacity;
    p.diffusion_rate = v;
    p.well_split = split;
    return p;
}

} // namespace

TEST_CASE("symmetric equilibrium stays put under zero load") {
    BatteryParams p = make_params(400.0, 1e-3);
    KibamState s{100.0, 100.0, 0.0};
    KibamState r = step_constant(s, 0.0, 12345.0, p);
    CHECK(r.available == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(r.bound == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(r.time == 12345.0);
}

TEST_CASE("zero-load diffusion equalizes the wells and conserves charge") {
    BatteryParams p = make_params(400.0, 1e-3);
    KibamState s{150.0, 50.0, 0.0};
    KibamState r = step_constant(s, 0.0, 1e7, p);  // >> 1/(2v), effectively the limit
    CHECK(r.available == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(r.bound == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(r.available + r.bound == doctest::Approx(200.0).epsilon(1e-12));
}

TEST_CASE("closed form matches the RK4 oracle on the documented case") {
    BatteryParams p = make_params(400.0, 1e-4);
    KibamState s{180.0, 180.0, 0.0};
    KibamState got = step_constant(s, 2.0, 60.0, p);
    KibamState want = rk4_integrate(s, 2.0, 60.0, p.diffusion_rate);
    CHECK(std::abs(got.available - want.available) < 1e-6);
    CHECK(std::abs(got.bound - want.bound) < 1e-6);
}

TEST_CASE("closed form matches RK4 across randomized states, loads and rates") {
    std::mt19937_64 rng(7);
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    for (int i = 0; i < 200; ++i) {
        BatteryParams p = make_params(uniform(200.0, 2000.0), uniform(1e-5, 5e-3));
        double cap_a = p.available_cap(), cap_b = p.bound_cap();
        KibamState s{uniform(0.3, 0.95) * cap_a, uniform(0.3, 0.95) * cap_b, 0.0};
        double load = uniform(-0.5, 1.5);
        double duration = uniform(5.0, 400.0);

        StepResult r = try_step_constant(s, load, duration, p);
        if (r.depleted) continue;  // oracle handles the unclamped interior only
        if (r.state.available >= cap_a - 1e-6 || r.state.bound >= cap_b - 1e-6) continue;

        KibamState want = rk4_integrate(s, load, duration, p.diffusion_rate);
        CHECK(std::abs(r.state.available - want.available) < 1e-6);
        CHECK(std::abs(r.state.bound - want.bound) < 1e-6);
    }
}

TEST_CASE("unclamped total charge change is exactly the integrated load") {
    BatteryParams p = make_params(1000.0, 3e-4);
    KibamState s{300.0, 350.0, 0.0};
    KibamState r = step_constant(s, 0.8, 250.0, p);
    double total0 = s.available + s.bound;
    double total1 = r.available + r.bound;
    CHECK(total0 - total1 == doctest::Approx(0.8 * 250.0).epsilon(1e-12));
}

TEST_CASE("depletion reports the crossing instant") {
    BatteryParams p = make_params(400.0, 0.0);  // v = 0: a drains linearly
    KibamState s{100.0, 150.0, 0.0};
    StepResult r = try_step_constant(s, 2.0, 100.0, p);
    REQUIRE(r.depleted.has_value());
    CHECK(r.depleted->time == doctest::Approx(50.0).epsilon(1e-6));
    CHECK(r.state.available == 0.0);

    CHECK_THROWS_AS(step_constant(s, 2.0, 100.0, p), DepletedError);
}

TEST_CASE("depletion instant matches a dense scan with diffusion active") {
    BatteryParams p = make_params(400.0, 2e-3);
    KibamState s{40.0, 180.0, 0.0};
    double load = 1.2;
    StepResult r = try_step_constant(s, load, 500.0, p);
    REQUIRE(r.depleted.has_value());

    // Dense RK4 scan for the first instant a(t) <= 0.
    double t_scan = -1.0;
    KibamState w = s;
    for (double t = 0.0; t < 500.0; t += 0.005) {
        w = rk4_integrate(w, load, 0.005, p.diffusion_rate, 0.001);
        if (w.available <= 0.0) {
            t_scan = t + 0.005;
            break;
        }
    }
    REQUIRE(t_scan > 0.0);
    CHECK(std::abs(r.depleted->time - t_scan) < 1e-2);
}

TEST_CASE("touching zero exactly at the end of the step is not depletion") {
    BatteryParams p = make_params(400.0, 0.0);
    KibamState s{100.0, 150.0, 0.0};
    StepResult r = try_step_constant(s, 2.0, 50.0, p);
    CHECK_FALSE(r.depleted.has_value());
    CHECK(r.state.available == doctest::Approx(0.0));
}

TEST_CASE("overcharge clamps at the well caps and discards the excess") {
    BatteryParams p = make_params(400.0, 1e-3);
    KibamState s{190.0, 190.0, 0.0};
    KibamState r = step_constant(s, -1.0, 20000.0, p);  // heavy infeed, >> 1/v
    CHECK(r.available == doctest::Approx(p.available_cap()).epsilon(1e-9));
    CHECK(r.bound <= p.bound_cap() + 1e-9);
    CHECK(r.bound == doctest::Approx(p.bound_cap()).epsilon(1e-6));
}

TEST_CASE("evolve: empty profile leaves an equalized state unchanged") {
    BatteryParams p = make_params(400.0, 1e-3);
    KibamState s{100.0, 100.0, 0.0};
    KibamState r = evolve(s, LoadProfile{}, 600.0, p);
    CHECK(r.available == doctest::Approx(100.0));
    CHECK(r.bound == doctest::Approx(100.0));
    CHECK(r.time == 600.0);
}

TEST_CASE("evolve: v=0 makes equal and opposite segments cancel exactly") {
    BatteryParams p = make_params(400.0, 0.0);
    LoadProfileBuilder b;
    b.add(0.0, 100.0, 1.0);
    b.add(100.0, 200.0, -1.0);
    KibamState s{150.0, 120.0, 0.0};
    KibamState r = evolve(s, b.build(), 200.0, p);
    CHECK(r.available == doctest::Approx(150.0).epsilon(1e-12));
    CHECK(r.bound == doctest::Approx(120.0).epsilon(1e-12));
}

TEST_CASE("evolve: three-segment profile tracks one continuous RK4 integration") {
    BatteryParams p = make_params(1600.0, 4e-4);
    LoadProfileBuilder b;
    b.add(0.0, 300.0, 0.9);
    b.add(450.0, 700.0, -0.4);
    b.add(700.0, 1000.0, 1.4);
    LoadProfile profile = b.build();
    KibamState s{700.0, 660.0, 0.0};

    KibamState got = evolve(s, profile, 1100.0, p);
    KibamState want = rk4_profile(s, profile, 1100.0, p.diffusion_rate);
    CHECK(std::abs(got.available - want.available) < 1e-6);
    CHECK(std::abs(got.bound - want.bound) < 1e-6);
}

TEST_CASE("evolve propagates the earliest depletion instant") {
    BatteryParams p = make_params(400.0, 0.0);
    LoadProfileBuilder b;
    b.add(0.0, 60.0, 1.0);
    b.add(60.0, 600.0, 3.0);
    KibamState s{100.0, 150.0, 0.0};
    StepResult r = try_evolve(s, b.build(), 600.0, p);
    REQUIRE(r.depleted.has_value());
    // 60 As gone in the first segment, the rest at 3 A.
    CHECK(r.depleted->time == doctest::Approx(60.0 + 40.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("soc is the total charge fraction") {
    BatteryParams p = make_params(400.0);
    CHECK(soc({200.0, 200.0, 0.0}, p) == 1.0);
    CHECK(soc({0.0, 0.0, 0.0}, p) == 0.0);
    CHECK(soc({110.0, 110.0, 0.0}, p) == doctest::Approx(0.55).epsilon(1e-15));
}

TEST_CASE("voltage map hits the pack anchor points exactly") {
    BatteryParams p = make_params(400.0);
    CHECK(soc_to_voltage(0.55, p) == 14.8);
    CHECK(soc_to_voltage(1.0, p) == 16.2);
    CHECK(soc_to_voltage(0.775, p) == 15.5);
    CHECK(voltage_to_soc(14.8, p) == 0.55);
    CHECK(voltage_to_soc(16.2, p) == 1.0);
}

TEST_CASE("voltage round trip is the identity above the floor anchor") {
    BatteryParams p = make_params(400.0);
    for (double s = 0.55; s <= 1.0; s += 0.01)
        CHECK(voltage_to_soc(soc_to_voltage(s, p), p) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("conservation: soc change equals the integrated load over capacity") {
    std::mt19937_64 rng(11);
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    for (int i = 0; i < 50; ++i) {
        BatteryParams p = make_params(uniform(500.0, 5000.0), uniform(0.0, 1e-3));
        KibamState s{0.45 * p.available_cap(), 0.5 * p.bound_cap(), 0.0};
        LoadProfileBuilder b;
        double t = 0.0;
        for (int k = 0; k < 5; ++k) {
            double len = uniform(50.0, 400.0);
            b.add(t, t + len, uniform(-0.3, 0.4));
            t += len + uniform(0.0, 100.0);
        }
        LoadProfile profile = b.build();
        StepResult r = try_evolve(s, profile, t + 100.0, p);
        if (r.depleted) continue;
        double expected = -profile.integral(0.0, t + 100.0) / p.total_capacity;
        CHECK(soc(r.state, p) - soc(s, p) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("diffusion drains the fuller available well monotonically") {
    BatteryParams p = make_params(400.0, 5e-4);
    KibamState s{180.0, 60.0, 0.0};
    double prev_a = s.available, prev_b = s.bound;
    KibamState cur = s;
    for (int i = 0; i < 40; ++i) {
        cur = step_constant(cur, 0.0, 120.0, p);
        CHECK(cur.available <= prev_a + 1e-12);
        CHECK(cur.bound >= prev_b - 1e-12);
        prev_a = cur.available;
        prev_b = cur.bound;
    }
    CHECK(cur.available > 115.0);  // approaching equilibrium from above
}

TEST_CASE("rate-capacity effect: doubling the load more than halves the runtime") {
    BatteryParams p = make_params(400.0, 1e-5);
    KibamState s{200.0, 200.0, 0.0};
    double load = 0.5;

    StepResult slow = try_step_constant(s, load, 1e6, p);
    StepResult fast = try_step_constant(s, 2 * load, 1e6, p);
    REQUIRE(slow.depleted.has_value());
    REQUIRE(fast.depleted.has_value());

    double delivered_slow = load * slow.depleted->time;
    double delivered_fast = 2 * load * fast.depleted->time;
    CHECK(delivered_fast < delivered_slow);
}

TEST_CASE("recovery effect: resting between bursts delivers more charge") {
    BatteryParams p = make_params(400.0, 1e-4);
    double load = 1.0, burst = 120.0;

    auto delivered_intermittent = [&] {
        KibamState s{200.0, 200.0, 0.0};
        double total = 0.0;
        while (true) {
            StepResult r = try_step_constant(s, load, burst, p);
            if (r.depleted) return total + load * (r.depleted->time - s.time);
            total += load * burst;
            s = r.state;
            StepResult rest = try_step_constant(s, 0.0, burst, p);
            s = rest.state;
        }
    };
    auto delivered_continuous = [&] {
        KibamState s{200.0, 200.0, 0.0};
        StepResult r = try_step_constant(s, load, 1e6, p);
        REQUIRE(r.depleted.has_value());
        return load * r.depleted->time;
    };

    CHECK(delivered_intermittent() > delivered_continuous());
}

TEST_CASE("state invariants are preserved through arbitrary evolutions") {
    std::mt19937_64 rng(23);
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    for (int i = 0; i < 100; ++i) {
        BatteryParams p =
            make_params(uniform(300.0, 3000.0), uniform(0.0, 2e-3), uniform(0.3, 0.7));
        KibamState s{uniform(0.1, 1.0) * p.available_cap(), uniform(0.1, 1.0) * p.bound_cap(),
                     0.0};
        StepResult r = try_step_constant(s, uniform(-2.0, 2.0), uniform(1.0, 5000.0), p);
        CHECK(r.state.available >= -1e-9);
        CHECK(r.state.available <= p.available_cap() + 1e-9);
        CHECK(r.state.bound >= -1e-9);
        CHECK(r.state.bound <= p.bound_cap() + 1e-9);
    }
}

TEST_CASE("parameter validation rejects bad configs") {
    BatteryParams p = make_params();
    p.total_capacity = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = make_params();
    p.well_split = 1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = make_params();
    p.voltage_floor = p.voltage_full;
    CHECK_THROWS_AS(p.validate(), ValidationError);
}
