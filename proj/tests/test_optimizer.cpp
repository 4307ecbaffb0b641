#include <doctest.h>

#include <cmath>
#include <random>

#include "tempsense/errors.hpp"
#include "tempsense/io_util.hpp"
#include "tempsense/optimizer.hpp"

using namespace tempsense;

namespace {

LoadProfile constant_profile(double load, double outdoor, std::size_t n = 168) {
    LoadProfile p;
    p.load_kw.assign(n, load);
    p.outdoor_c.assign(n, outdoor);
    return p;
}

// Brute-force oracle: argmin over a fine grid, ties to the lowest temperature.
double grid_argmin(const PlantConfig& plant, const LoadProfile& profile, double t_min, double t_max,
                   double step) {
    double best_t = t_min;
    double best_v = mean_total_power(plant, profile, t_min);
    for (double t = t_min + step; t <= t_max + 1e-12; t += step) {
        const double v = mean_total_power(plant, profile, t);
        if (v < best_v) {
            best_v = v;
            best_t = t;
        }
    }
    return best_t;
}

PlantConfig fan_only_plant() {
    PlantConfig p;
    p.chiller.cop_gain_per_degc = 0.0;   // constant chiller efficiency
    p.economizer.approach_c = 1000.0;    // free cooling never available
    return p;
}

PlantConfig cooling_only_plant() {
    PlantConfig p;
    p.fan.reference_fan_fraction = 0.0;  // no temperature-dependent fan term
    p.economizer.approach_c = 1000.0;
    return p;
}

}  // namespace

TEST_CASE("fan-only configuration is minimized at the lower bound") {
    auto plant = fan_only_plant();
    auto profile = constant_profile(100.0, 30.0);
    auto curve = sweep_temperature(plant, profile, 18.0, 32.0, 0.5);
    for (std::size_t i = 1; i < curve.size(); ++i) {
        CHECK(curve[i].mean_total_kw > curve[i - 1].mean_total_kw);
    }
    auto res = find_sweet_spot(plant, profile, 18.0, 32.0, 0.05);
    CHECK(res.optimal_t_c == doctest::Approx(18.0));
    CHECK(!res.plateau);
}

TEST_CASE("cooling-only configuration is minimized at the upper bound") {
    auto plant = cooling_only_plant();
    auto profile = constant_profile(100.0, 30.0);
    auto curve = sweep_temperature(plant, profile, 18.0, 32.0, 0.5);
    for (std::size_t i = 1; i < curve.size(); ++i) {
        CHECK(curve[i].mean_total_kw <= curve[i - 1].mean_total_kw);
    }
    auto res = find_sweet_spot(plant, profile, 18.0, 32.0, 0.05);
    CHECK(res.optimal_t_c == doctest::Approx(32.0));
}

TEST_CASE("interior optimum matches the brute-force grid") {
    PlantConfig plant;
    auto profile = reference_year_profile(100.0, LoadShape{}, OutdoorModel{});
    auto res = find_sweet_spot(plant, profile, 18.0, 32.0, 0.05);
    const double oracle = grid_argmin(plant, profile, 18.0, 32.0, 0.01);
    CHECK(std::abs(res.optimal_t_c - oracle) <= 0.05 + 1e-9);
    CHECK(res.optimal_t_c > 18.0);
    CHECK(res.optimal_t_c < 32.0);
    // the documented interior optimum of the reference configuration
    CHECK(res.optimal_t_c > 25.0);
    CHECK(res.optimal_t_c < 28.0);
}

TEST_CASE("randomized plants agree with the oracle") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        PlantConfig plant;
        plant.fan.reference_fan_fraction = 0.01 + 0.08 * u01(rng);
        plant.fan.velocity_exponent = 0.6 + 0.4 * u01(rng);
        plant.fan.hot_surface_temp_c = 50.0 + 20.0 * u01(rng);
        plant.chiller.reference_cop = 2.0 + 4.0 * u01(rng);
        plant.chiller.cop_gain_per_degc = 0.05 * u01(rng);
        plant.economizer.approach_c = 3.0 + 5.0 * u01(rng);
        plant.economizer.overhead_fraction = 0.01 + 0.04 * u01(rng);
        plant.fixed_overhead_fraction = 0.02 + 0.06 * u01(rng);
        OutdoorModel outdoor{5.0 + 20.0 * u01(rng), 8.0 * u01(rng), 4.0 * u01(rng)};
        LoadShape shape;
        LoadProfile profile;
        {
            auto year = reference_year_profile(50.0 + 100.0 * u01(rng), shape, outdoor);
            profile.load_kw.assign(year.load_kw.begin(), year.load_kw.begin() + 336);
            profile.outdoor_c.assign(year.outdoor_c.begin(), year.outdoor_c.begin() + 336);
        }
        const double t_max = std::min(32.0, plant.fan.hot_surface_temp_c - 2.0);
        auto res = find_sweet_spot(plant, profile, 18.0, t_max, 0.1);
        const double oracle = grid_argmin(plant, profile, 18.0, res.t_max, 0.01);
        CHECK(std::abs(res.optimal_t_c - oracle) <= 0.1 + 1e-9);
    }
}

TEST_CASE("tolerance refinement is consistent") {
    PlantConfig plant;
    auto profile = reference_year_profile(100.0, LoadShape{}, OutdoorModel{});
    auto coarse = find_sweet_spot(plant, profile, 18.0, 32.0, 0.1);
    auto fine = find_sweet_spot(plant, profile, 18.0, 32.0, 0.001);
    CHECK(std::abs(coarse.optimal_t_c - fine.optimal_t_c) <= 0.1);
}

TEST_CASE("scaling the load does not move the optimum") {
    PlantConfig plant;
    auto profile = reference_year_profile(100.0, LoadShape{}, OutdoorModel{});
    auto base = find_sweet_spot(plant, profile, 18.0, 32.0, 0.05);
    for (double scale : {0.25, 4.0, 3.7}) {
        LoadProfile scaled = profile;
        for (double& v : scaled.load_kw) {
            v *= scale;
        }
        auto res = find_sweet_spot(plant, scaled, 18.0, 32.0, 0.05);
        CHECK(std::abs(res.optimal_t_c - base.optimal_t_c) <= 0.05 + 1e-9);
    }
}

TEST_CASE("pue decreases along the curve in pure chiller mode") {
    PlantConfig plant;
    auto profile = constant_profile(100.0, 35.0);  // hot outdoors: chiller everywhere
    auto curve = sweep_temperature(plant, profile, 18.0, 32.0, 0.5);
    for (std::size_t i = 1; i < curve.size(); ++i) {
        CHECK(curve[i].economizer_share == 0.0);
        CHECK(curve[i].mean_pue < curve[i - 1].mean_pue);
    }
}

TEST_CASE("economizer share grows with the setpoint") {
    PlantConfig plant;
    auto profile = reference_year_profile(100.0, LoadShape{}, OutdoorModel{});
    auto curve = sweep_temperature(plant, profile, 18.0, 32.0, 1.0);
    for (std::size_t i = 1; i < curve.size(); ++i) {
        CHECK(curve[i].economizer_share >= curve[i - 1].economizer_share);
    }
    CHECK(curve.back().economizer_share > curve.front().economizer_share);
}

TEST_CASE("infeasible upper bounds are truncated") {
    PlantConfig plant;
    plant.fan.hot_surface_temp_c = 30.0;
    plant.fan.reference_inlet_c = 20.0;
    auto profile = constant_profile(100.0, 35.0);
    auto res = find_sweet_spot(plant, profile, 18.0, 40.0, 0.05);
    CHECK(res.truncated);
    CHECK(res.t_max == doctest::Approx(29.0));
    CHECK_THROWS_AS(find_sweet_spot(plant, profile, 29.5, 40.0, 0.05), DataError);
    CHECK_THROWS_AS(find_sweet_spot(plant, profile, 18.0, 25.0, -1.0), std::invalid_argument);
}

TEST_CASE("curve and result serialization") {
    PlantConfig plant;
    auto profile = constant_profile(100.0, 30.0, 24);
    auto res = find_sweet_spot(plant, profile, 20.0, 30.0, 0.1);
    namespace fs = std::filesystem;
    const auto curve_path = fs::temp_directory_path() / "tempsense_curve.csv";
    const auto json_path = fs::temp_directory_path() / "tempsense_sweet.json";
    write_curve_csv(res.curve, curve_path);
    write_sweet_spot_json(res, json_path);
    const auto curve_text = read_file(curve_path);
    CHECK(curve_text.rfind("t_inlet,mean_total_kw,mean_pue,economizer_share\n", 0) == 0);
    const auto json_text = read_file(json_path);
    CHECK(json_text.find("optimal_t_c") != std::string::npos);
}
