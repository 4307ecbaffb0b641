#include "tempsense/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tempsense/errors.hpp"
#include "tempsense/io_util.hpp"

namespace tempsense {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Box-Muller on top of splitmix64 output bits; self-contained so output
// bytes do not depend on the standard library's distribution internals.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : state_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) {
            u1 = uniform01();
        }
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTau * u2);
        have_spare_ = true;
        return r * std::cos(kTau * u2);
    }

private:
    double uniform01() {
        state_ = splitmix64(state_ ^ 0x2545f4914f6cdd1dULL);
        return static_cast<double>(state_ >> 11) * 0x1.0p-53;
    }

    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t stream_seed(const Scenario& sc, const std::string& room_id, std::uint64_t purpose) {
    return splitmix64(sc.seed ^ splitmix64(fnv1a(room_id)) ^ splitmix64(purpose));
}

const RoomSpec& find_room(const Scenario& sc, const std::string& room_id) {
    for (const RoomSpec& r : sc.rooms) {
        if (r.room_id == room_id) {
            return r;
        }
    }
    throw std::invalid_argument("scenario has no room '" + room_id + "'");
}

double setpoint_at(const RoomSpec& room, TimePoint t) {
    double v = room.schedule.front().inlet_c;
    for (const SetpointStep& s : room.schedule) {
        if (s.time <= t) {
            v = s.inlet_c;
        } else {
            break;
        }
    }
    return v;
}

void validate(const Scenario& sc) {
    if (sc.rooms.empty()) {
        throw std::invalid_argument("scenario has no rooms");
    }
    if (sc.grid_interval <= Seconds{0} || sc.end <= sc.start) {
        throw std::invalid_argument("scenario grid or span invalid");
    }
    if (sc.load.daily_amplitude < 0.0 || sc.load.noise_sigma < 0.0 || sc.load.weekend_ratio < 0.0) {
        throw std::invalid_argument("scenario load shape amplitudes must be non-negative");
    }
    if (sc.outdoor.seasonal_amplitude_c < 0.0 || sc.outdoor.diurnal_amplitude_c < 0.0) {
        throw std::invalid_argument("scenario outdoor amplitudes must be non-negative");
    }
    if (sc.transition_time_constant < Seconds{0}) {
        throw std::invalid_argument("scenario transition time constant must be non-negative");
    }
    if (sc.chiller_cycling_amplitude > 0.0 && sc.chiller_cycling_timescale <= Seconds{0}) {
        throw std::invalid_argument("scenario chiller cycling timescale must be positive");
    }
    for (const RoomSpec& r : sc.rooms) {
        if (r.schedule.empty()) {
            throw std::invalid_argument("room '" + r.room_id + "' has an empty setpoint schedule");
        }
        if (!std::is_sorted(r.schedule.begin(), r.schedule.end(),
                            [](const SetpointStep& a, const SetpointStep& b) { return a.time < b.time; })) {
            throw std::invalid_argument("room '" + r.room_id + "' schedule is not sorted");
        }
        for (const SetpointStep& s : r.schedule) {
            if (s.time < sc.start || s.time > sc.end) {
                throw std::invalid_argument("room '" + r.room_id + "' schedule time outside the span");
            }
        }
        if (r.base_compute_kw < 0.0) {
            throw std::invalid_argument("room '" + r.room_id + "' has negative base compute power");
        }
    }
}

std::vector<TimePoint> scenario_grid(const Scenario& sc) {
    std::vector<TimePoint> grid;
    for (TimePoint t = sc.start; t <= sc.end; t += sc.grid_interval) {
        grid.push_back(t);
    }
    return grid;
}

}  // namespace

double outdoor_temperature_at(const OutdoorModel& m, TimePoint t) {
    const double doy = static_cast<double>(day_of_year_utc(t));
    const double h = hour_of_day_utc(t);
    return m.mean_c + m.seasonal_amplitude_c * std::cos(kTau * (doy - 196.0) / 365.25) +
           m.diurnal_amplitude_c * std::cos(kTau * (h - 15.0) / 24.0);
}

double load_shape_factor(const LoadShape& shape, TimePoint t, TimePoint span_start) {
    const double h = hour_of_day_utc(t);
    // Saturated sinusoid: plateaus around midday and after midnight, so a
    // daily amplitude a gives a weekday max/min ratio of (1+a)/(1-a).
    const double s = std::clamp(1.5 * std::sin(kTau * (h - 9.0) / 24.0), -1.0, 1.0);
    double f = 1.0 + shape.daily_amplitude * s;
    if (is_weekend_utc(t)) {
        f *= shape.weekend_ratio;
    }
    const double months = static_cast<double>((t - span_start).count()) / (30.0 * 86400.0);
    f *= 1.0 + shape.drift_per_month * months;
    return f;
}

std::vector<double> generate_load_profile(const Scenario& scenario, const std::string& room_id) {
    validate(scenario);
    const RoomSpec& room = find_room(scenario, room_id);
    const auto grid = scenario_grid(scenario);
    GaussianStream noise(stream_seed(scenario, room_id, 0x10ad));

    std::vector<double> out;
    out.reserve(grid.size());
    for (TimePoint t : grid) {
        double v = room.base_compute_kw * load_shape_factor(scenario.load, t, scenario.start);
        if (scenario.load.noise_sigma > 0.0) {
            v *= 1.0 + scenario.load.noise_sigma * noise.next();
        }
        out.push_back(std::max(v, 0.0));
    }
    return out;
}

SimOutput simulate(const Scenario& scenario) {
    validate(scenario);
    SimOutput out;
    out.grid = scenario_grid(scenario);
    const std::size_t n = out.grid.size();
    const double dt = static_cast<double>(scenario.grid_interval.count());

    std::vector<double> room_power_sum(n, 0.0);
    out.infrastructure_power.assign(n, 0.0);
    out.mode_trace.resize(scenario.rooms.size());

    const double tau = static_cast<double>(scenario.transition_time_constant.count());
    const double lag_step = tau > 0.0 ? 1.0 - std::exp(-dt / tau) : 1.0;
    const double cyc_phi = std::exp(-dt / static_cast<double>(scenario.chiller_cycling_timescale.count()));

    for (std::size_t ri = 0; ri < scenario.rooms.size(); ++ri) {
        const RoomSpec& spec = scenario.rooms[ri];
        const auto load = generate_load_profile(scenario, spec.room_id);
        GaussianStream sensor_noise(stream_seed(scenario, spec.room_id, 0x5e50));
        GaussianStream cycling_noise(stream_seed(scenario, spec.room_id, 0xc1c1));

        RoomTelemetry room;
        room.room_id = spec.room_id;
        room.grid_interval = scenario.grid_interval;
        room.points.reserve(n);
        out.mode_trace[ri].reserve(n);

        double t_air = setpoint_at(spec, scenario.start);
        double cyc_state = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const TimePoint t = out.grid[k];
            const double sp = setpoint_at(spec, t);
            t_air = k == 0 ? sp : t_air + lag_step * (sp - t_air);

            PowerBreakdown bd =
                building_power(t_air, load[k], outdoor_temperature_at(scenario.outdoor, t), scenario.plant);
            if (scenario.chiller_cycling_amplitude > 0.0) {
                cyc_state = cyc_phi * cyc_state +
                            std::sqrt(1.0 - cyc_phi * cyc_phi) * cycling_noise.next();
                bd.cooling_kw *= std::max(0.0, 1.0 + scenario.chiller_cycling_amplitude * cyc_state);
                bd.total_kw = bd.compute_kw + bd.fans_kw + bd.cooling_kw + bd.overhead_kw;
            }

            const double measured =
                t_air + (scenario.sensor_noise_sigma_c > 0.0
                             ? scenario.sensor_noise_sigma_c * sensor_noise.next()
                             : 0.0);
            const double metered = bd.compute_kw + bd.fans_kw;
            room.points.push_back({t, measured, metered});
            room_power_sum[k] += metered;
            out.infrastructure_power[k] += bd.cooling_kw + bd.overhead_kw;
            out.mode_trace[ri].push_back(bd.mode);
        }
        out.rooms.push_back(std::move(room));
    }

    out.building_power.sensor_id = "building";
    out.building_power.kind = SensorKind::power;
    out.building_power.samples.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.building_power.samples.push_back({out.grid[k], room_power_sum[k] + out.infrastructure_power[k]});
    }
    return out;
}

double analytic_sensitivity(const PlantConfig& plant, double t_inlet_c, SensitivityLevel level,
                            double outdoor_c) {
    constexpr double kStep = 0.01;
    auto total = [&](double t) {
        if (level == SensitivityLevel::room) {
            return server_room_power(t, 1.0, plant.fan).total();
        }
        return building_power(t, 1.0, outdoor_c, plant).total_kw;
    };
    if (level == SensitivityLevel::building) {
        const CoolingMode lo = building_power(t_inlet_c - kStep, 1.0, outdoor_c, plant).mode;
        const CoolingMode hi = building_power(t_inlet_c + kStep, 1.0, outdoor_c, plant).mode;
        if (lo != hi) {
            throw ModeBoundaryError("analytic_sensitivity: derivative undefined across the "
                                    "economizer switch at " +
                                    format_double(t_inlet_c) + " degC");
        }
    }
    const double center = total(t_inlet_c);
    return 100.0 * (total(t_inlet_c + kStep) - total(t_inlet_c - kStep)) / (2.0 * kStep) / center;
}

nlohmann::json scenario_to_json(const Scenario& sc) {
    nlohmann::json rooms = nlohmann::json::array();
    for (const RoomSpec& r : sc.rooms) {
        nlohmann::json schedule = nlohmann::json::array();
        for (const SetpointStep& s : r.schedule) {
            schedule.push_back({{"time", format_utc(s.time)}, {"inlet_c", s.inlet_c}});
        }
        rooms.push_back({{"room_id", r.room_id},
                         {"base_compute_kw", r.base_compute_kw},
                         {"schedule", schedule}});
    }
    return nlohmann::json{
        {"rooms", rooms},
        {"load",
         {{"daily_amplitude", sc.load.daily_amplitude},
          {"weekend_ratio", sc.load.weekend_ratio},
          {"noise_sigma", sc.load.noise_sigma},
          {"drift_per_month", sc.load.drift_per_month}}},
        {"outdoor",
         {{"mean_c", sc.outdoor.mean_c},
          {"seasonal_amplitude_c", sc.outdoor.seasonal_amplitude_c},
          {"diurnal_amplitude_c", sc.outdoor.diurnal_amplitude_c}}},
        {"plant", plant_to_json(sc.plant)},
        {"start", format_utc(sc.start)},
        {"end", format_utc(sc.end)},
        {"grid_interval_seconds", sc.grid_interval.count()},
        {"seed", sc.seed},
        {"sensor_noise_sigma_c", sc.sensor_noise_sigma_c},
        {"transition_time_constant_seconds", sc.transition_time_constant.count()},
        {"chiller_cycling_amplitude", sc.chiller_cycling_amplitude},
        {"chiller_cycling_timescale_seconds", sc.chiller_cycling_timescale.count()}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario sc;
    auto time_field = [](const nlohmann::json& v, const char* name) {
        auto t = parse_iso8601(v.get<std::string>());
        if (!t) {
            throw DataError(std::string("scenario: bad timestamp in ") + name);
        }
        return *t;
    };
    try {
        for (const auto& r : j.at("rooms")) {
            RoomSpec spec;
            spec.room_id = r.at("room_id").get<std::string>();
            spec.base_compute_kw = r.at("base_compute_kw").get<double>();
            for (const auto& s : r.at("schedule")) {
                spec.schedule.push_back({time_field(s.at("time"), "schedule"), s.at("inlet_c").get<double>()});
            }
            sc.rooms.push_back(std::move(spec));
        }
        if (j.contains("load")) {
            const auto& l = j.at("load");
            sc.load.daily_amplitude = l.value("daily_amplitude", sc.load.daily_amplitude);
            sc.load.weekend_ratio = l.value("weekend_ratio", sc.load.weekend_ratio);
            sc.load.noise_sigma = l.value("noise_sigma", sc.load.noise_sigma);
            sc.load.drift_per_month = l.value("drift_per_month", sc.load.drift_per_month);
        }
        if (j.contains("outdoor")) {
            const auto& o = j.at("outdoor");
            sc.outdoor.mean_c = o.value("mean_c", sc.outdoor.mean_c);
            sc.outdoor.seasonal_amplitude_c = o.value("seasonal_amplitude_c", sc.outdoor.seasonal_amplitude_c);
            sc.outdoor.diurnal_amplitude_c = o.value("diurnal_amplitude_c", sc.outdoor.diurnal_amplitude_c);
        }
        if (j.contains("plant")) {
            sc.plant = plant_from_json(j.at("plant"));
        }
        sc.start = time_field(j.at("start"), "start");
        sc.end = time_field(j.at("end"), "end");
        sc.grid_interval = Seconds{j.value("grid_interval_seconds", std::int64_t{60})};
        sc.seed = j.value("seed", std::uint64_t{0});
        sc.sensor_noise_sigma_c = j.value("sensor_noise_sigma_c", sc.sensor_noise_sigma_c);
        sc.transition_time_constant =
            Seconds{j.value("transition_time_constant_seconds", sc.transition_time_constant.count())};
        sc.chiller_cycling_amplitude = j.value("chiller_cycling_amplitude", 0.0);
        sc.chiller_cycling_timescale =
            Seconds{j.value("chiller_cycling_timescale_seconds", sc.chiller_cycling_timescale.count())};
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("scenario JSON is missing fields: ") + e.what());
    }
    validate(sc);
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    try {
        return scenario_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("invalid scenario JSON " + path.string() + ": " + e.what());
    }
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    atomic_write(path, scenario_to_json(scenario).dump(2) + "\n");
}

void write_sim_output(const SimOutput& out, const Scenario& scenario,
                      const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    for (const RoomTelemetry& room : out.rooms) {
        TelemetrySeries temp;
        temp.sensor_id = room.room_id + "_temperature";
        temp.kind = SensorKind::temperature;
        TelemetrySeries power;
        power.sensor_id = room.room_id + "_power";
        power.kind = SensorKind::power;
        for (const RoomPoint& p : room.points) {
            temp.samples.push_back({p.time, p.temperature_c});
            power.samples.push_back({p.time, p.power_kw});
        }
        write_telemetry_csv(temp, dir / (room.room_id + "_temperature.csv"));
        write_telemetry_csv(power, dir / (room.room_id + "_power.csv"));

        RoomManifest manifest;
        manifest.room_id = room.room_id;
        manifest.temperature_files = {dir / (room.room_id + "_temperature.csv")};
        manifest.power_files = {dir / (room.room_id + "_power.csv")};
        manifest.grid_interval = scenario.grid_interval;
        save_room_manifest(manifest, dir / (room.room_id + ".json"));
    }

    write_telemetry_csv(out.building_power, dir / "building_power.csv");

    std::string modes = "timestamp";
    for (const RoomTelemetry& room : out.rooms) {
        modes += ',' + room.room_id;
    }
    modes += '\n';
    for (std::size_t k = 0; k < out.grid.size(); ++k) {
        modes += format_utc(out.grid[k]);
        for (std::size_t ri = 0; ri < out.rooms.size(); ++ri) {
            modes += ',';
            modes += to_string(out.mode_trace[ri][k]);
        }
        modes += '\n';
    }
    atomic_write(dir / "modes.csv", modes);
}

}  // namespace tempsense
