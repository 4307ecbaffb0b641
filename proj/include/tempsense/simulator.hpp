#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tempsense/physics.hpp"
#include "tempsense/telemetry.hpp"

namespace tempsense {

struct SetpointStep {
    TimePoint time;
    double inlet_c = 24.0;
};

struct RoomSpec {
    std::string room_id;
    double base_compute_kw = 100.0;
    std::vector<SetpointStep> schedule;  // sorted; first entry is the initial setpoint
};

// Multiplicative load structure: daily sinusoid saturated into business-hour
// plateaus, a weekend factor, linear capacity drift, and Gaussian noise.
struct LoadShape {
    double daily_amplitude = 0.15;   // fraction; weekday max/min = (1+a)/(1-a)
    double weekend_ratio = 0.75;     // Saturday/Sunday multiplier
    double noise_sigma = 0.0;        // fraction of the deterministic load
    double drift_per_month = 0.0;    // fraction per 30 days
};

// Sinusoidal year: seasonal term peaking mid July, diurnal term peaking at
// 15:00 UTC.
struct OutdoorModel {
    double mean_c = 7.5;
    double seasonal_amplitude_c = 4.5;
    double diurnal_amplitude_c = 1.5;
};

struct Scenario {
    std::vector<RoomSpec> rooms;
    LoadShape load;
    OutdoorModel outdoor;
    PlantConfig plant;
    TimePoint start;
    TimePoint end;
    Seconds grid_interval{60};
    std::uint64_t seed = 0;
    double sensor_noise_sigma_c = 0.05;
    Seconds transition_time_constant{15 * 60};
    double chiller_cycling_amplitude = 0.0;  // optional noise on cooling power
    Seconds chiller_cycling_timescale{4 * 3600};
};

double outdoor_temperature_at(const OutdoorModel& m, TimePoint t);

// Deterministic part of the load shape (daily * weekend * drift).
double load_shape_factor(const LoadShape& shape, TimePoint t, TimePoint span_start);

// Compute power series for one room on the scenario grid, including noise.
// Deterministic per (seed, room_id); independent of the other rooms.
std::vector<double> generate_load_profile(const Scenario& scenario, const std::string& room_id);

struct SimOutput {
    std::vector<TimePoint> grid;
    std::vector<RoomTelemetry> rooms;    // measured temperature, metered power (compute + fans)
    TelemetrySeries building_power;      // room power + infrastructure, summed over rooms
    std::vector<double> infrastructure_power;        // per timestep: cooling + overhead, all rooms
    std::vector<std::vector<CoolingMode>> mode_trace;  // [room][timestep]
};

// Drives the physics model over the scenario grid. Measured temperature is
// the setpoint through a first-order lag plus sensor noise; room meters see
// compute + fans; the building series adds cooling and fixed overheads.
SimOutput simulate(const Scenario& scenario);

enum class SensitivityLevel { room, building };

// Central finite difference (0.01 degC step) of the room or building total,
// normalized at t_inlet, in %/degC. Throws ModeBoundaryError if the stencil
// straddles the economizer switch.
double analytic_sensitivity(const PlantConfig& plant, double t_inlet_c, SensitivityLevel level,
                            double outdoor_c = 20.0);

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

// Writes per-room telemetry CSVs and manifests, the building power CSV and
// the mode trace, in the formats the analysis pipeline reads.
void write_sim_output(const SimOutput& out, const Scenario& scenario,
                      const std::filesystem::path& dir);

}  // namespace tempsense
