#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace tempsense {

// Server fan behaviour around a reference operating point. The convective
// coefficient is modelled as h ~ v^alpha, so the fan speed needed to hold
// the chip heat rate constant follows from the hot-surface temperature gap,
// and fan power follows the cube law.
struct FanModel {
    double reference_inlet_c = 24.0;
    double hot_surface_temp_c = 60.0;
    double velocity_exponent = 0.8;        // alpha in h ~ v^alpha
    double reference_fan_fraction = 0.043; // fan power / IT compute power at the reference inlet
    double airflow_m3min_per_kw = 4.75;
};

// Linear COP response to chilled-water temperature; the chilled-water
// temperature tracks the inlet setpoint minus a fixed approach.
struct ChillerModel {
    double reference_cop = 4.0;
    double reference_chw_temp_c = 16.0;
    double cop_gain_per_degc = 0.0315;
    double chw_approach_c = 8.0;
};

struct EconomizerModel {
    double approach_c = 5.0;          // free cooling when outdoor <= T_chw - approach
    double overhead_fraction = 0.03;  // pump/fan power per unit heat moved
};

struct PlantConfig {
    FanModel fan;
    ChillerModel chiller;
    EconomizerModel economizer;
    double fixed_overhead_fraction = 0.05;  // UPS, lighting etc., per unit IT power
};

enum class CoolingMode { chiller, economizer };

std::string to_string(CoolingMode mode);

struct PowerBreakdown {
    double compute_kw = 0.0;
    double fans_kw = 0.0;
    double cooling_kw = 0.0;
    double overhead_kw = 0.0;
    double total_kw = 0.0;  // compute + fans + cooling + overhead, exact
    double pue = 1.0;
    CoolingMode mode = CoolingMode::chiller;
};

// |q| / w.
double cop_from_energy(double q_kwh, double w_kwh);

// Newton's law of cooling: h * area * (t_hot - t_cold), in the units of h.
double convective_heat_rate(double h_w_per_m2c, double area_m2, double t_hot_c, double t_cold_c);

// Speed multiple that keeps the convective heat rate constant at the given
// inlet temperature: ((T_hot - T_ref) / (T_hot - t_inlet))^(1/alpha).
double fan_speed_ratio_for_setpoint(double t_inlet_c, const FanModel& fan);

// Cube law: reference_fan_power * speed_ratio^3.
double fan_power(double speed_ratio, double reference_fan_power_kw);

double airflow_m3_per_min(double it_compute_kw, double speed_ratio, const FanModel& fan);

struct ServerRoomPower {
    double compute_kw = 0.0;
    double fans_kw = 0.0;

    double total() const { return compute_kw + fans_kw; }
};

ServerRoomPower server_room_power(double t_inlet_c, double it_compute_kw, const FanModel& fan);

double chiller_cop_at(double t_inlet_c, const ChillerModel& chiller);

struct CoolingResult {
    double power_kw = 0.0;
    CoolingMode mode = CoolingMode::chiller;
};

CoolingResult cooling_power(double heat_load_kw, double t_inlet_c, double outdoor_c,
                            const PlantConfig& plant);

PowerBreakdown building_power(double t_inlet_c, double it_compute_kw, double outdoor_c,
                              const PlantConfig& plant);

// 1 + p_non_it / p_it.
double pue(double p_it_kw, double p_non_it_kw);

nlohmann::json plant_to_json(const PlantConfig& plant);
PlantConfig plant_from_json(const nlohmann::json& j);
PlantConfig load_plant_config(const std::filesystem::path& path);
void save_plant_config(const PlantConfig& plant, const std::filesystem::path& path);

// Documented setpoint presets: the upper end of the ASHRAE recommended range
// and inlet temperatures reported for large hyperscale operators.
namespace presets {
inline constexpr double kAshraeUpperInletC = 27.0;
inline constexpr double kGoogleInletC = 26.6;
inline constexpr double kMicrosoftInletC = 27.0;
inline constexpr double kMetaInletC = 29.4;
}  // namespace presets

}  // namespace tempsense
