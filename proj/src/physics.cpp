#include "tempsense/physics.hpp"

#include <cmath>
#include <stdexcept>

#include "tempsense/errors.hpp"
#include "tempsense/io_util.hpp"

namespace tempsense {

std::string to_string(CoolingMode mode) {
    return mode == CoolingMode::chiller ? "chiller" : "economizer";
}

double cop_from_energy(double q_kwh, double w_kwh) {
    if (w_kwh <= 0.0) {
        throw std::invalid_argument("cop_from_energy: work input must be positive");
    }
    return std::abs(q_kwh) / w_kwh;
}

double convective_heat_rate(double h_w_per_m2c, double area_m2, double t_hot_c, double t_cold_c) {
    if (area_m2 <= 0.0) {
        throw std::invalid_argument("convective_heat_rate: area must be positive");
    }
    return h_w_per_m2c * area_m2 * (t_hot_c - t_cold_c);
}

double fan_speed_ratio_for_setpoint(double t_inlet_c, const FanModel& fan) {
    if (t_inlet_c >= fan.hot_surface_temp_c) {
        throw InfeasibleCoolingError("inlet temperature " + format_double(t_inlet_c) +
                                     " degC at or above the hot-surface temperature " +
                                     format_double(fan.hot_surface_temp_c) + " degC");
    }
    const double gap_ref = fan.hot_surface_temp_c - fan.reference_inlet_c;
    const double gap = fan.hot_surface_temp_c - t_inlet_c;
    return std::pow(gap_ref / gap, 1.0 / fan.velocity_exponent);
}

double fan_power(double speed_ratio, double reference_fan_power_kw) {
    if (speed_ratio < 0.0) {
        throw std::invalid_argument("fan_power: speed ratio must be non-negative");
    }
    return reference_fan_power_kw * speed_ratio * speed_ratio * speed_ratio;
}

double airflow_m3_per_min(double it_compute_kw, double speed_ratio, const FanModel& fan) {
    return it_compute_kw * fan.airflow_m3min_per_kw * speed_ratio;  // airflow is linear in speed
}

ServerRoomPower server_room_power(double t_inlet_c, double it_compute_kw, const FanModel& fan) {
    if (it_compute_kw < 0.0) {
        throw std::invalid_argument("server_room_power: negative compute power");
    }
    const double ratio = fan_speed_ratio_for_setpoint(t_inlet_c, fan);
    ServerRoomPower p;
    p.compute_kw = it_compute_kw;
    p.fans_kw = fan_power(ratio, it_compute_kw * fan.reference_fan_fraction);
    return p;
}

double chiller_cop_at(double t_inlet_c, const ChillerModel& chiller) {
    const double t_chw = t_inlet_c - chiller.chw_approach_c;
    const double cop =
        chiller.reference_cop * (1.0 + chiller.cop_gain_per_degc * (t_chw - chiller.reference_chw_temp_c));
    return std::max(cop, 0.1);
}

CoolingResult cooling_power(double heat_load_kw, double t_inlet_c, double outdoor_c,
                            const PlantConfig& plant) {
    if (heat_load_kw < 0.0) {
        throw std::invalid_argument("cooling_power: negative heat load");
    }
    const double t_chw = t_inlet_c - plant.chiller.chw_approach_c;
    CoolingResult r;
    if (outdoor_c <= t_chw - plant.economizer.approach_c) {
        r.mode = CoolingMode::economizer;
        r.power_kw = plant.economizer.overhead_fraction * heat_load_kw;
    } else {
        r.mode = CoolingMode::chiller;
        r.power_kw = heat_load_kw / chiller_cop_at(t_inlet_c, plant.chiller) +
                     plant.economizer.overhead_fraction * heat_load_kw;
    }
    return r;
}

PowerBreakdown building_power(double t_inlet_c, double it_compute_kw, double outdoor_c,
                              const PlantConfig& plant) {
    const ServerRoomPower room = server_room_power(t_inlet_c, it_compute_kw, plant.fan);
    const double it_power = room.compute_kw + room.fans_kw;  // all of it becomes heat
    const CoolingResult cooling = cooling_power(it_power, t_inlet_c, outdoor_c, plant);

    PowerBreakdown b;
    b.compute_kw = room.compute_kw;
    b.fans_kw = room.fans_kw;
    b.cooling_kw = cooling.power_kw;
    b.overhead_kw = plant.fixed_overhead_fraction * it_power;
    b.total_kw = b.compute_kw + b.fans_kw + b.cooling_kw + b.overhead_kw;
    b.mode = cooling.mode;
    b.pue = it_power > 0.0 ? b.total_kw / it_power : 1.0;
    return b;
}

double pue(double p_it_kw, double p_non_it_kw) {
    if (p_it_kw <= 0.0) {
        throw std::invalid_argument("pue: IT power must be positive");
    }
    if (p_non_it_kw < 0.0) {
        throw std::invalid_argument("pue: negative non-IT power");
    }
    return 1.0 + p_non_it_kw / p_it_kw;
}

nlohmann::json plant_to_json(const PlantConfig& plant) {
    return nlohmann::json{
        {"fan",
         {{"reference_inlet_c", plant.fan.reference_inlet_c},
          {"hot_surface_temp_c", plant.fan.hot_surface_temp_c},
          {"velocity_exponent", plant.fan.velocity_exponent},
          {"reference_fan_fraction", plant.fan.reference_fan_fraction},
          {"airflow_m3min_per_kw", plant.fan.airflow_m3min_per_kw}}},
        {"chiller",
         {{"reference_cop", plant.chiller.reference_cop},
          {"reference_chw_temp_c", plant.chiller.reference_chw_temp_c},
          {"cop_gain_per_degc", plant.chiller.cop_gain_per_degc},
          {"chw_approach_c", plant.chiller.chw_approach_c}}},
        {"economizer",
         {{"approach_c", plant.economizer.approach_c},
          {"overhead_fraction", plant.economizer.overhead_fraction}}},
        {"fixed_overhead_fraction", plant.fixed_overhead_fraction}};
}

PlantConfig plant_from_json(const nlohmann::json& j) {
    PlantConfig p;
    if (j.contains("fan")) {
        const auto& f = j.at("fan");
        p.fan.reference_inlet_c = f.value("reference_inlet_c", p.fan.reference_inlet_c);
        p.fan.hot_surface_temp_c = f.value("hot_surface_temp_c", p.fan.hot_surface_temp_c);
        p.fan.velocity_exponent = f.value("velocity_exponent", p.fan.velocity_exponent);
        p.fan.reference_fan_fraction = f.value("reference_fan_fraction", p.fan.reference_fan_fraction);
        p.fan.airflow_m3min_per_kw = f.value("airflow_m3min_per_kw", p.fan.airflow_m3min_per_kw);
    }
    if (j.contains("chiller")) {
        const auto& c = j.at("chiller");
        p.chiller.reference_cop = c.value("reference_cop", p.chiller.reference_cop);
        p.chiller.reference_chw_temp_c = c.value("reference_chw_temp_c", p.chiller.reference_chw_temp_c);
        p.chiller.cop_gain_per_degc = c.value("cop_gain_per_degc", p.chiller.cop_gain_per_degc);
        p.chiller.chw_approach_c = c.value("chw_approach_c", p.chiller.chw_approach_c);
    }
    if (j.contains("economizer")) {
        const auto& e = j.at("economizer");
        p.economizer.approach_c = e.value("approach_c", p.economizer.approach_c);
        p.economizer.overhead_fraction = e.value("overhead_fraction", p.economizer.overhead_fraction);
    }
    p.fixed_overhead_fraction = j.value("fixed_overhead_fraction", p.fixed_overhead_fraction);

    if (p.fan.velocity_exponent <= 0.0 || p.fan.velocity_exponent > 1.0) {
        throw DataError("plant config: velocity_exponent must be in (0, 1]");
    }
    if (p.fan.reference_fan_fraction < 0.0 || p.fan.reference_fan_fraction >= 1.0) {
        throw DataError("plant config: reference_fan_fraction must be in [0, 1)");
    }
    if (p.fan.hot_surface_temp_c <= p.fan.reference_inlet_c) {
        throw DataError("plant config: hot_surface_temp_c must exceed reference_inlet_c");
    }
    if (p.chiller.reference_cop <= 0.0 || p.chiller.cop_gain_per_degc < 0.0) {
        throw DataError("plant config: chiller parameters out of range");
    }
    if (p.economizer.overhead_fraction < 0.0 || p.fixed_overhead_fraction < 0.0) {
        throw DataError("plant config: overhead fractions must be non-negative");
    }
    return p;
}

PlantConfig load_plant_config(const std::filesystem::path& path) {
    try {
        return plant_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("invalid plant config " + path.string() + ": " + e.what());
    }
}

void save_plant_config(const PlantConfig& plant, const std::filesystem::path& path) {
    atomic_write(path, plant_to_json(plant).dump(2) + "\n");
}

}  // namespace tempsense
