#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "tempsense/changepoint.hpp"
#include "tempsense/errors.hpp"
#include "tempsense/io_util.hpp"
#include "tempsense/simulator.hpp"
#include "tempsense/stats.hpp"

using namespace tempsense;

namespace {

TimePoint ts(const char* s) {
    return *parse_iso8601(s);
}

Scenario base_scenario() {
    Scenario sc;
    sc.start = ts("2024-01-01T00:00:00Z");  // a Monday
    sc.end = ts("2024-01-08T00:00:00Z");
    sc.grid_interval = Seconds{3600};
    sc.seed = 11;
    sc.sensor_noise_sigma_c = 0.0;
    sc.load.daily_amplitude = 0.0;
    sc.load.weekend_ratio = 1.0;
    sc.load.noise_sigma = 0.0;
    sc.outdoor = {30.0, 0.0, 0.0};  // chiller mode throughout
    RoomSpec r;
    r.room_id = "r1";
    r.base_compute_kw = 100.0;
    r.schedule = {{sc.start, 24.0}};
    sc.rooms = {r};
    return sc;
}

}  // namespace

TEST_CASE("constant shape yields a constant load profile") {
    auto sc = base_scenario();
    auto load = generate_load_profile(sc, "r1");
    REQUIRE(!load.empty());
    for (double v : load) {
        CHECK(v == doctest::Approx(100.0));
    }
    CHECK_THROWS_AS(generate_load_profile(sc, "nope"), std::invalid_argument);
}

TEST_CASE("weekend ratio scales Saturday and Sunday exactly") {
    auto sc = base_scenario();
    sc.load.weekend_ratio = 0.7;
    sc.load.daily_amplitude = 0.12;
    sc.end = ts("2024-01-15T00:00:00Z");
    auto load = generate_load_profile(sc, "r1");
    double weekday_sum = 0.0, weekend_sum = 0.0;
    std::size_t weekday_n = 0, weekend_n = 0;
    for (std::size_t i = 0; i + 1 < load.size(); ++i) {  // drop the closing grid point
        const TimePoint t = sc.start + Seconds{3600} * static_cast<std::int64_t>(i);
        if (is_weekend_utc(t)) {
            weekend_sum += load[i];
            ++weekend_n;
        } else {
            weekday_sum += load[i];
            ++weekday_n;
        }
    }
    const double weekday_mean = weekday_sum / static_cast<double>(weekday_n);
    const double weekend_mean = weekend_sum / static_cast<double>(weekend_n);
    CHECK(weekend_mean / weekday_mean == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("daily amplitude saturates at the documented extremes") {
    auto sc = base_scenario();
    sc.load.daily_amplitude = 0.10;
    auto load = generate_load_profile(sc, "r1");
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < 24; ++i) {  // one weekday
        lo = std::min(lo, load[i]);
        hi = std::max(hi, load[i]);
    }
    CHECK(hi == doctest::Approx(110.0));
    CHECK(lo == doctest::Approx(90.0));
    CHECK(hi / lo == doctest::Approx(1.1 / 0.9));
}

TEST_CASE("drift grows the load linearly with elapsed months") {
    auto sc = base_scenario();
    sc.load.drift_per_month = 0.10;
    sc.end = ts("2024-01-31T00:00:00Z");
    auto load = generate_load_profile(sc, "r1");
    CHECK(load.front() == doctest::Approx(100.0));
    // after 30 days: +10 %
    CHECK(load[30 * 24] == doctest::Approx(110.0));
}

TEST_CASE("simulate applies the schedule through a first-order lag") {
    auto sc = base_scenario();
    sc.grid_interval = Seconds{60};
    sc.end = ts("2024-01-03T00:00:00Z");
    sc.rooms[0].schedule = {{sc.start, 24.0}, {ts("2024-01-02T00:00:00Z"), 27.0}};
    auto out = simulate(sc);
    REQUIRE(out.rooms.size() == 1);
    const auto& points = out.rooms[0].points;
    const std::size_t step_idx = 24 * 60;
    CHECK(points[step_idx - 1].temperature_c == doctest::Approx(24.0));
    // one time constant (15 min) after the switch: ~63 % of the way
    const double at_tau = points[step_idx + 15].temperature_c;
    CHECK(at_tau > 24.0 + 3.0 * 0.55);
    CHECK(at_tau < 24.0 + 3.0 * 0.72);
    // an hour in, settled
    CHECK(points[step_idx + 60].temperature_c == doctest::Approx(27.0).epsilon(0.01));
}

TEST_CASE("room meters see compute plus fans") {
    auto sc = base_scenario();
    auto out = simulate(sc);
    const auto expected = server_room_power(24.0, 100.0, sc.plant.fan);
    for (const auto& p : out.rooms[0].points) {
        CHECK(p.power_kw == doctest::Approx(expected.compute_kw + expected.fans_kw));
    }
    // building adds cooling and overhead
    const auto bd = building_power(24.0, 100.0, 30.0, sc.plant);
    for (const auto& s : out.building_power.samples) {
        CHECK(s.value == doctest::Approx(bd.total_kw));
    }
}

TEST_CASE("two identical rooms double the one-room run exactly") {
    auto sc = base_scenario();
    auto one = simulate(sc);
    auto two_rooms = sc;
    RoomSpec r2 = sc.rooms[0];
    r2.room_id = "r2";
    two_rooms.rooms.push_back(r2);
    auto two = simulate(two_rooms);
    REQUIRE(two.building_power.samples.size() == one.building_power.samples.size());
    for (std::size_t i = 0; i < one.building_power.samples.size(); ++i) {
        CHECK(two.building_power.samples[i].value == 2.0 * one.building_power.samples[i].value);
    }
}

TEST_CASE("building equals room power plus infrastructure, exactly") {
    auto sc = base_scenario();
    sc.load.noise_sigma = 0.01;
    sc.load.daily_amplitude = 0.1;
    sc.sensor_noise_sigma_c = 0.05;
    RoomSpec r2 = sc.rooms[0];
    r2.room_id = "r2";
    r2.base_compute_kw = 55.0;
    sc.rooms.push_back(r2);
    auto out = simulate(sc);
    for (std::size_t k = 0; k < out.grid.size(); ++k) {
        double room_sum = 0.0;
        for (const auto& room : out.rooms) {
            room_sum += room.points[k].power_kw;
        }
        CHECK(out.building_power.samples[k].value == room_sum + out.infrastructure_power[k]);
    }
}

TEST_CASE("identical scenarios produce identical bytes") {
    namespace fs = std::filesystem;
    auto sc = base_scenario();
    sc.load.noise_sigma = 0.01;
    sc.sensor_noise_sigma_c = 0.05;
    const auto dir1 = fs::temp_directory_path() / "tempsense_sim_a";
    const auto dir2 = fs::temp_directory_path() / "tempsense_sim_b";
    write_sim_output(simulate(sc), sc, dir1);
    write_sim_output(simulate(sc), sc, dir2);
    for (const char* name : {"r1_temperature.csv", "r1_power.csv", "building_power.csv", "modes.csv"}) {
        CHECK(read_file(dir1 / name) == read_file(dir2 / name));
    }
    // a different seed changes the noise
    auto sc2 = sc;
    sc2.seed = 12;
    const auto dir3 = fs::temp_directory_path() / "tempsense_sim_c";
    write_sim_output(simulate(sc2), sc2, dir3);
    CHECK(read_file(dir1 / "r1_power.csv") != read_file(dir3 / "r1_power.csv"));
}

TEST_CASE("detect recovers scheduled changes at and above the threshold") {
    auto sc = base_scenario();
    sc.end = ts("2024-01-29T00:00:00Z");
    sc.sensor_noise_sigma_c = 0.05;
    sc.rooms[0].schedule = {{sc.start, 24.0},
                            {ts("2024-01-08T00:00:00Z"), 25.0},   // +1.0: detected
                            {ts("2024-01-15T00:00:00Z"), 25.4},   // +0.4: below threshold
                            {ts("2024-01-22T00:00:00Z"), 23.9}};  // -1.5: detected
    auto out = simulate(sc);
    auto events = detect_changes(out.rooms[0], DetectorConfig{});
    REQUIRE(events.size() == 2);
    CHECK(std::abs((events[0].event_time - ts("2024-01-08T00:00:00Z")).count()) <= 2 * 3600);
    CHECK(events[0].magnitude_c == doctest::Approx(1.0).epsilon(0.1));
    CHECK(std::abs((events[1].event_time - ts("2024-01-22T00:00:00Z")).count()) <= 2 * 3600);
    CHECK(events[1].magnitude_c == doctest::Approx(-1.5).epsilon(0.07));
}

TEST_CASE("infeasible setpoints are rejected") {
    auto sc = base_scenario();
    sc.rooms[0].schedule = {{sc.start, 61.0}};
    CHECK_THROWS_AS(simulate(sc), InfeasibleCoolingError);
}

TEST_CASE("scenario validation") {
    auto sc = base_scenario();
    sc.rooms[0].schedule.clear();
    CHECK_THROWS_AS(simulate(sc), std::invalid_argument);

    sc = base_scenario();
    sc.rooms[0].schedule = {{sc.end + Seconds{3600}, 24.0}};
    CHECK_THROWS_AS(simulate(sc), std::invalid_argument);

    sc = base_scenario();
    sc.end = sc.start;
    CHECK_THROWS_AS(simulate(sc), std::invalid_argument);
}

TEST_CASE("scenario json round trip") {
    auto sc = base_scenario();
    sc.load.noise_sigma = 0.002;
    sc.chiller_cycling_amplitude = 0.25;
    sc.rooms[0].schedule.push_back({ts("2024-01-04T12:00:00Z"), 27.0});
    auto j = scenario_to_json(sc);
    auto back = scenario_from_json(j);
    CHECK(back.rooms.size() == 1);
    CHECK(back.rooms[0].schedule.size() == 2);
    CHECK(back.rooms[0].schedule[1].inlet_c == 27.0);
    CHECK(back.seed == sc.seed);
    CHECK(back.grid_interval == sc.grid_interval);
    CHECK(back.chiller_cycling_amplitude == 0.25);
    CHECK(back.load.noise_sigma == 0.002);
    CHECK(back.outdoor.mean_c == 30.0);
}

TEST_CASE("analytic sensitivity of the fan-free plant is zero") {
    PlantConfig plant;
    plant.fan.reference_fan_fraction = 0.0;
    CHECK(analytic_sensitivity(plant, 24.0, SensitivityLevel::room) == doctest::Approx(0.0));
}

TEST_CASE("analytic room sensitivity at defaults") {
    PlantConfig plant;
    const double s = analytic_sensitivity(plant, 24.0, SensitivityLevel::room);
    CHECK(s == doctest::Approx(0.4294504544).epsilon(1e-6));
}

TEST_CASE("building-level sensitivity is reduced by the cooling savings") {
    PlantConfig plant;
    const double room = analytic_sensitivity(plant, 24.0, SensitivityLevel::room);
    const double building = analytic_sensitivity(plant, 24.0, SensitivityLevel::building, 30.0);
    CHECK(building < room);
}

TEST_CASE("analytic sensitivity refuses to straddle the mode switch") {
    PlantConfig plant;
    // outdoor 12: switch at t = 25
    CHECK_THROWS_AS(analytic_sensitivity(plant, 25.0, SensitivityLevel::building, 12.0),
                    ModeBoundaryError);
    CHECK_NOTHROW(analytic_sensitivity(plant, 26.0, SensitivityLevel::building, 12.0));
}

TEST_CASE("pipeline recovers the analytic room sensitivity from one run") {
    // controlled experiment: constant load, small noise, +2 degC step
    Scenario sc;
    sc.start = ts("2024-01-01T00:00:00Z");
    sc.end = ts("2024-01-05T00:00:00Z");
    sc.grid_interval = Seconds{60};
    sc.seed = 5;
    sc.sensor_noise_sigma_c = 0.02;
    sc.load = {0.0, 1.0, 0.002, 0.0};
    sc.outdoor = {30.0, 0.0, 0.0};
    RoomSpec r;
    r.room_id = "lab";
    r.base_compute_kw = 200.0;
    r.schedule = {{sc.start, 24.0}, {ts("2024-01-03T00:00:00Z"), 26.0}};
    sc.rooms = {r};

    auto out = simulate(sc);
    auto events = detect_changes(out.rooms[0], DetectorConfig{});
    REQUIRE(events.size() == 1);
    const double target = analytic_sensitivity(sc.plant, 25.0, SensitivityLevel::room);
    for (const Seconds L : {Seconds{3600}, Seconds{2 * 3600}}) {
        auto res = window_analysis(out.rooms[0], events[0], L, default_guard(sc.grid_interval));
        CHECK(std::abs(res.sensitivity_rel_pct_per_c - target) <= 0.05);
    }
}
