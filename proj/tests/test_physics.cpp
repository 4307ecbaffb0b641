#include <doctest.h>

#include <cmath>
#include <random>

#include "tempsense/errors.hpp"
#include "tempsense/physics.hpp"

using namespace tempsense;

TEST_CASE("cop_from_energy") {
    CHECK(cop_from_energy(100, 25) == doctest::Approx(4.0));
    CHECK(cop_from_energy(-100, 25) == doctest::Approx(4.0));
    CHECK(cop_from_energy(120, 30) == doctest::Approx(4.0));
    CHECK_THROWS_AS(cop_from_energy(100, 0), std::invalid_argument);
    CHECK_THROWS_AS(cop_from_energy(100, -5), std::invalid_argument);
}

TEST_CASE("convective heat rate") {
    CHECK(convective_heat_rate(10, 2, 60, 30) == doctest::Approx(600.0));
    CHECK(convective_heat_rate(7, 3, 45, 45) == 0.0);
    // linear in each factor
    const double q = convective_heat_rate(10, 2, 60, 30);
    CHECK(convective_heat_rate(20, 2, 60, 30) == doctest::Approx(2 * q));
    CHECK(convective_heat_rate(10, 4, 60, 30) == doctest::Approx(2 * q));
    CHECK(convective_heat_rate(10, 2, 45, 30) == doctest::Approx(q / 2));
    CHECK(convective_heat_rate(10, 2, 30, 60) == doctest::Approx(-q));
    CHECK_THROWS_AS(convective_heat_rate(10, 0, 60, 30), std::invalid_argument);
}

TEST_CASE("fan speed ratio for setpoint") {
    FanModel fan;
    CHECK(fan_speed_ratio_for_setpoint(24.0, fan) == doctest::Approx(1.0));
    CHECK(fan_speed_ratio_for_setpoint(30.0, fan) ==
          doctest::Approx(std::pow(36.0 / 30.0, 1.25)).epsilon(1e-14));
    CHECK(fan_speed_ratio_for_setpoint(30.0, fan) == doctest::Approx(1.2559621672705266));
    // monotone increasing towards the pole
    double prev = 0.0;
    for (double t = 18.0; t < 59.5; t += 0.5) {
        const double r = fan_speed_ratio_for_setpoint(t, fan);
        CHECK(r > prev);
        prev = r;
    }
    CHECK(fan_speed_ratio_for_setpoint(59.9, fan) > 100.0);
    CHECK_THROWS_AS(fan_speed_ratio_for_setpoint(60.0, fan), InfeasibleCoolingError);
    CHECK_THROWS_AS(fan_speed_ratio_for_setpoint(75.0, fan), InfeasibleCoolingError);
}

TEST_CASE("fan power follows the cube law") {
    CHECK(fan_power(2.0, 1.0) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(fan_power(1.1, 1.0) == doctest::Approx(1.331).epsilon(1e-14));
    CHECK(fan_power(1.0, 3.7) == 3.7);
    CHECK(fan_power(0.0, 3.7) == 0.0);
    CHECK_THROWS_AS(fan_power(-0.1, 1.0), std::invalid_argument);

    // exact scaling: fan_power(k*s, P) = k^3 * fan_power(s, P)
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int i = 0; i < 200; ++i) {
        const double s = u(rng);
        const double k = u(rng);
        const double p = u(rng);
        CHECK(fan_power(k * s, p) ==
              doctest::Approx(k * k * k * fan_power(s, p)).epsilon(1e-12));
    }
}

TEST_CASE("compensation holds the heat rate constant") {
    // h ~ v^alpha with v from the setpoint formula keeps h * (T_hot - t) fixed
    FanModel fan;
    const double q_ref = 1.0 * (fan.hot_surface_temp_c - fan.reference_inlet_c);
    for (double t = 18.0; t <= 35.0; t += 0.1) {
        const double v = fan_speed_ratio_for_setpoint(t, fan);
        const double h = std::pow(v, fan.velocity_exponent);
        const double q = h * (fan.hot_surface_temp_c - t);
        CHECK(q == doctest::Approx(q_ref).epsilon(1e-9));
    }
}

TEST_CASE("server room power at the reference point") {
    FanModel fan;
    auto p = server_room_power(24.0, 100.0, fan);
    CHECK(p.compute_kw == 100.0);
    CHECK(p.fans_kw == doctest::Approx(4.3));
    CHECK(server_room_power(27.0, 0.0, fan).fans_kw == 0.0);
    CHECK_THROWS_AS(server_room_power(24.0, -1.0, fan), std::invalid_argument);
    CHECK_THROWS_AS(server_room_power(61.0, 100.0, fan), InfeasibleCoolingError);
}

TEST_CASE("room-level sensitivity at defaults sits in the observed band") {
    // finite difference of the closed form at the reference inlet
    FanModel fan;
    const double h = 0.01;
    auto total = [&](double t) { return server_room_power(t, 100.0, fan).total(); };
    const double sens = 100.0 * (total(24.0 + h) - total(24.0 - h)) / (2 * h) / total(24.0);
    CHECK(sens == doctest::Approx(0.4294504).epsilon(1e-5));
    CHECK(sens > 0.35);
    CHECK(sens < 0.5);
}

TEST_CASE("chiller cop responds linearly to the chilled water temperature") {
    ChillerModel c;
    CHECK(chiller_cop_at(24.0, c) == doctest::Approx(4.0));  // T_chw = 16 = reference
    CHECK(chiller_cop_at(26.0, c) == doctest::Approx(4.252).epsilon(1e-12));
    for (double t = 10.0; t < 40.0; t += 1.0) {
        CHECK(chiller_cop_at(t + 1.0, c) > chiller_cop_at(t, c));
    }
    // floor at 0.1
    ChillerModel steep = c;
    steep.cop_gain_per_degc = 0.5;
    CHECK(chiller_cop_at(-100.0, steep) == doctest::Approx(0.1));
}

TEST_CASE("cooling power by mode") {
    PlantConfig plant;
    // economizer: T_chw = 24 - 8 = 16, threshold 11
    auto econ = cooling_power(100.0, 24.0, 10.0, plant);
    CHECK(econ.mode == CoolingMode::economizer);
    CHECK(econ.power_kw == doctest::Approx(3.0));
    // chiller: COP 4 at the reference
    auto chill = cooling_power(100.0, 24.0, 30.0, plant);
    CHECK(chill.mode == CoolingMode::chiller);
    CHECK(chill.power_kw == doctest::Approx(28.0));
    CHECK(cooling_power(0.0, 24.0, 10.0, plant).power_kw == 0.0);
    CHECK(cooling_power(0.0, 24.0, 30.0, plant).power_kw == 0.0);
    CHECK_THROWS_AS(cooling_power(-1.0, 24.0, 30.0, plant), std::invalid_argument);
}

TEST_CASE("building power composes exactly") {
    PlantConfig plant;
    auto b = building_power(24.0, 100.0, 30.0, plant);
    CHECK(b.mode == CoolingMode::chiller);
    CHECK(b.total_kw == b.compute_kw + b.fans_kw + b.cooling_kw + b.overhead_kw);
    CHECK(b.pue > 1.0);
    CHECK(b.pue == doctest::Approx(b.total_kw / (b.compute_kw + b.fans_kw)));

    auto again = building_power(24.0, 100.0, 30.0, plant);
    CHECK(b.total_kw == again.total_kw);
    CHECK(b.cooling_kw == again.cooling_kw);
}

TEST_CASE("raising the inlet in chiller mode moves every term the expected way") {
    PlantConfig plant;
    auto lo = building_power(24.0, 100.0, 30.0, plant);
    auto hi = building_power(25.0, 100.0, 30.0, plant);
    REQUIRE(lo.mode == CoolingMode::chiller);
    REQUIRE(hi.mode == CoolingMode::chiller);
    CHECK(hi.fans_kw > lo.fans_kw);
    CHECK(hi.cooling_kw < lo.cooling_kw);
    CHECK(hi.pue < lo.pue);
}

TEST_CASE("building power is continuous except at the mode switch") {
    PlantConfig plant;
    // outdoor 12 -> switch when T_chw - 5 = 12, i.e. t = 25
    const double just_below = building_power(24.999999, 100.0, 12.0, plant).total_kw;
    const double just_above = building_power(25.000001, 100.0, 12.0, plant).total_kw;
    CHECK(building_power(24.999999, 100.0, 12.0, plant).mode == CoolingMode::chiller);
    CHECK(building_power(25.000001, 100.0, 12.0, plant).mode == CoolingMode::economizer);
    CHECK(just_below - just_above > 1.0);  // the chiller draw disappears

    // within one mode, small steps move the total by small amounts
    for (double t = 26.0; t < 28.0; t += 0.1) {
        const double a = building_power(t, 100.0, 12.0, plant).total_kw;
        const double b = building_power(t + 1e-6, 100.0, 12.0, plant).total_kw;
        CHECK(std::abs(a - b) < 1e-3);
    }
}

TEST_CASE("pue arithmetic") {
    CHECK(pue(800, 200) == doctest::Approx(1.25));
    CHECK(pue(123, 0) == doctest::Approx(1.0));
    CHECK(pue(100, 100) == doctest::Approx(2.0));
    CHECK_THROWS_AS(pue(0, 10), std::invalid_argument);
    CHECK_THROWS_AS(pue(-5, 10), std::invalid_argument);
    CHECK_THROWS_AS(pue(5, -1), std::invalid_argument);
}

TEST_CASE("pue always drops when non-IT falls and IT rises") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> it(400, 1200);
    std::uniform_real_distribution<double> non_it(50, 300);
    std::uniform_real_distribution<double> frac(0.001, 0.1);
    int total_increased = 0;
    for (int i = 0; i < 200; ++i) {
        const double it1 = it(rng);
        const double non1 = non_it(rng);
        const double it2 = it1 * (1.0 + frac(rng));
        const double non2 = non1 * (1.0 - frac(rng));
        CHECK(pue(it2, non2) < pue(it1, non1));
        if (it2 + non2 > it1 + non1) {
            ++total_increased;
        }
    }
    CHECK(total_increased > 0);
}

TEST_CASE("airflow scales linearly with speed") {
    FanModel fan;
    CHECK(airflow_m3_per_min(100.0, 1.0, fan) == doctest::Approx(475.0));
    CHECK(airflow_m3_per_min(100.0, 2.0, fan) == doctest::Approx(950.0));
}

TEST_CASE("plant config json round trip and validation") {
    PlantConfig p;
    p.fan.reference_fan_fraction = 0.06;
    p.chiller.cop_gain_per_degc = 0.02;
    p.economizer.approach_c = 4.0;
    p.fixed_overhead_fraction = 0.07;
    auto j = plant_to_json(p);
    auto q = plant_from_json(j);
    CHECK(q.fan.reference_fan_fraction == p.fan.reference_fan_fraction);
    CHECK(q.chiller.cop_gain_per_degc == p.chiller.cop_gain_per_degc);
    CHECK(q.economizer.approach_c == p.economizer.approach_c);
    CHECK(q.fixed_overhead_fraction == p.fixed_overhead_fraction);

    // partial configs fall back to defaults
    auto partial = plant_from_json(nlohmann::json::parse(R"({"fan": {"velocity_exponent": 0.9}})"));
    CHECK(partial.fan.velocity_exponent == 0.9);
    CHECK(partial.chiller.reference_cop == 4.0);

    auto bad = nlohmann::json::parse(R"({"fan": {"velocity_exponent": 1.5}})");
    CHECK_THROWS_AS(plant_from_json(bad), DataError);
}

TEST_CASE("documented setpoint presets") {
    CHECK(presets::kAshraeUpperInletC == 27.0);
    CHECK(presets::kGoogleInletC == 26.6);
    CHECK(presets::kMicrosoftInletC == 27.0);
    CHECK(presets::kMetaInletC == 29.4);
}
