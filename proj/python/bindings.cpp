#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tempsense/changepoint.hpp"
#include "tempsense/cli.hpp"
#include "tempsense/errors.hpp"
#include "tempsense/io_util.hpp"
#include "tempsense/optimizer.hpp"
#include "tempsense/physics.hpp"
#include "tempsense/simulator.hpp"
#include "tempsense/stats.hpp"
#include "tempsense/telemetry.hpp"
#include "tempsense/time_utils.hpp"

namespace py = pybind11;
using namespace tempsense;

namespace {

std::int64_t to_epoch(TimePoint t) {
    return t.time_since_epoch().count();
}

TimePoint from_epoch(std::int64_t s) {
    return TimePoint{Seconds{s}};
}

// Timestamps cross the boundary as Unix epoch seconds, durations as seconds.
template <typename Class, typename Struct>
void def_time_property(Class& cls, const char* name, TimePoint Struct::*member) {
    cls.def_property(
        name, [member](const Struct& s) { return to_epoch(s.*member); },
        [member](Struct& s, std::int64_t v) { s.*member = from_epoch(v); });
}

template <typename Class, typename Struct>
void def_seconds_property(Class& cls, const char* name, Seconds Struct::*member) {
    cls.def_property(
        name, [member](const Struct& s) { return (s.*member).count(); },
        [member](Struct& s, std::int64_t v) { s.*member = Seconds{v}; });
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Inlet-temperature telemetry analysis and plant simulation";

    py::register_exception<DataError>(m, "DataError");

    m.def("parse_time", [](const std::string& s) {
        auto t = parse_iso8601(s);
        if (!t) {
            throw py::value_error("unparseable timestamp: " + s);
        }
        return to_epoch(*t);
    });
    m.def("format_time", [](std::int64_t t) { return format_utc(from_epoch(t)); });

    // ---- telemetry ----
    py::enum_<SensorKind>(m, "SensorKind")
        .value("temperature", SensorKind::temperature)
        .value("power", SensorKind::power);

    auto sample = py::class_<Sample>(m, "Sample").def(py::init<>()).def_readwrite("value", &Sample::value);
    def_time_property(sample, "time", &Sample::time);
    sample.def("__repr__", [](const Sample& s) {
        return "Sample(" + format_utc(s.time) + ", " + format_double(s.value) + ")";
    });

    py::class_<TelemetrySeries>(m, "TelemetrySeries")
        .def(py::init<>())
        .def_readwrite("sensor_id", &TelemetrySeries::sensor_id)
        .def_readwrite("kind", &TelemetrySeries::kind)
        .def_readwrite("samples", &TelemetrySeries::samples);

    py::class_<ParsedSeries>(m, "ParsedSeries")
        .def_readonly("series", &ParsedSeries::series)
        .def_readonly("skipped_rows", &ParsedSeries::skipped_rows);

    m.def("parse_telemetry_csv", &parse_telemetry_csv, py::arg("path"), py::arg("kind"));
    m.def("write_telemetry_csv", &write_telemetry_csv, py::arg("series"), py::arg("path"));

    py::class_<CleanResult>(m, "CleanResult")
        .def_readonly("series", &CleanResult::series)
        .def_readonly("replaced", &CleanResult::replaced);
    m.def("clean_outliers", &clean_outliers, py::arg("series"), py::arg("lo"), py::arg("hi"));

    m.def(
        "resample",
        [](const TelemetrySeries& s, std::int64_t interval, std::int64_t origin) {
            return resample(s, Seconds{interval}, from_epoch(origin));
        },
        py::arg("series"), py::arg("interval_seconds"), py::arg("origin_epoch"));
    m.def(
        "default_grid_origin",
        [](const TelemetrySeries& s, std::int64_t interval) {
            return to_epoch(default_grid_origin(s, Seconds{interval}));
        },
        py::arg("series"), py::arg("interval_seconds"));

    auto room_point = py::class_<RoomPoint>(m, "RoomPoint")
                          .def(py::init<>())
                          .def_readwrite("temperature_c", &RoomPoint::temperature_c)
                          .def_readwrite("power_kw", &RoomPoint::power_kw);
    def_time_property(room_point, "time", &RoomPoint::time);

    auto room = py::class_<RoomTelemetry>(m, "RoomTelemetry")
                    .def(py::init<>())
                    .def_readwrite("room_id", &RoomTelemetry::room_id)
                    .def_readwrite("points", &RoomTelemetry::points);
    def_seconds_property(room, "grid_interval_seconds", &RoomTelemetry::grid_interval);

    m.def(
        "aggregate_room",
        [](const std::filesystem::path& manifest) { return aggregate_room(load_room_manifest(manifest)); },
        py::arg("manifest_path"));

    // ---- changepoint ----
    auto change_event = py::class_<ChangeEvent>(m, "ChangeEvent")
                            .def(py::init<>())
                            .def_readwrite("room_id", &ChangeEvent::room_id)
                            .def_readwrite("temp_before_c", &ChangeEvent::temp_before_c)
                            .def_readwrite("temp_after_c", &ChangeEvent::temp_after_c)
                            .def_readwrite("magnitude_c", &ChangeEvent::magnitude_c);
    def_time_property(change_event, "event_time", &ChangeEvent::event_time);
    change_event.def("__repr__", [](const ChangeEvent& e) {
        return "ChangeEvent(" + e.room_id + ", " + format_utc(e.event_time) + ", " +
               format_double(e.magnitude_c) + ")";
    });

    py::class_<DetectorConfig>(m, "DetectorConfig")
        .def(py::init([](std::int64_t window_seconds, double threshold_c,
                         std::optional<std::int64_t> refractory_seconds) {
                 DetectorConfig cfg;
                 cfg.window = Seconds{window_seconds};
                 cfg.threshold_c = threshold_c;
                 if (refractory_seconds) {
                     cfg.refractory = Seconds{*refractory_seconds};
                 }
                 return cfg;
             }),
             py::arg("window_seconds") = 12 * 3600, py::arg("threshold_c") = 0.8,
             py::arg("refractory_seconds") = std::nullopt)
        .def_readwrite("threshold_c", &DetectorConfig::threshold_c);

    m.def("detect_changes", &detect_changes, py::arg("room"), py::arg("config") = DetectorConfig{});

    // ---- stats ----
    py::class_<Correlation>(m, "Correlation")
        .def_readonly("pearson_r", &Correlation::pearson_r)
        .def_readonly("pearson_p", &Correlation::pearson_p)
        .def_readonly("spearman_rho", &Correlation::spearman_rho)
        .def_readonly("spearman_p", &Correlation::spearman_p);
    m.def(
        "correlate",
        [](const std::vector<double>& x, const std::vector<double>& y) { return correlate(x, y); },
        py::arg("x"), py::arg("y"));
    m.def("student_t_two_sided_p", &student_t_two_sided_p, py::arg("t"), py::arg("dof"));

    py::class_<WelchResult>(m, "WelchResult")
        .def_readonly("t", &WelchResult::t)
        .def_readonly("dof", &WelchResult::dof)
        .def_readonly("p", &WelchResult::p);
    m.def(
        "welch_t_test",
        [](const std::vector<double>& a, const std::vector<double>& b) { return welch_t_test(a, b); },
        py::arg("a"), py::arg("b"));

    auto analysis = py::class_<AnalysisResult>(m, "AnalysisResult")
                        .def(py::init<>())
                        .def_readwrite("room_id", &AnalysisResult::room_id)
                        .def_readwrite("n_before", &AnalysisResult::n_before)
                        .def_readwrite("n_after", &AnalysisResult::n_after)
                        .def_readwrite("temp_before_c", &AnalysisResult::temp_before_c)
                        .def_readwrite("mean_power_before_kw", &AnalysisResult::mean_power_before_kw)
                        .def_readwrite("mean_power_after_kw", &AnalysisResult::mean_power_after_kw)
                        .def_readwrite("pearson_r", &AnalysisResult::pearson_r)
                        .def_readwrite("pearson_p", &AnalysisResult::pearson_p)
                        .def_readwrite("spearman_rho", &AnalysisResult::spearman_rho)
                        .def_readwrite("spearman_p", &AnalysisResult::spearman_p)
                        .def_readwrite("sensitivity_abs_kw_per_c",
                                       &AnalysisResult::sensitivity_abs_kw_per_c)
                        .def_readwrite("sensitivity_rel_pct_per_c",
                                       &AnalysisResult::sensitivity_rel_pct_per_c)
                        .def_readwrite("confounded", &AnalysisResult::confounded);
    def_time_property(analysis, "event_time", &AnalysisResult::event_time);
    def_seconds_property(analysis, "window_seconds", &AnalysisResult::window_length);

    m.def(
        "window_analysis",
        [](const RoomTelemetry& room, const ChangeEvent& event, std::int64_t window_seconds,
           std::optional<std::int64_t> guard_seconds) {
            const Seconds guard =
                guard_seconds ? Seconds{*guard_seconds} : default_guard(room.grid_interval);
            return window_analysis(room, event, Seconds{window_seconds}, guard);
        },
        py::arg("room"), py::arg("event"), py::arg("window_seconds"),
        py::arg("guard_seconds") = std::nullopt);

    auto matched = py::class_<MatchedComparison>(m, "MatchedComparison")
                       .def_readonly("n_before", &MatchedComparison::n_before)
                       .def_readonly("n_after", &MatchedComparison::n_after)
                       .def_readonly("mean_before_kw", &MatchedComparison::mean_before_kw)
                       .def_readonly("mean_after_kw", &MatchedComparison::mean_after_kw)
                       .def_readonly("relative_change_pct", &MatchedComparison::relative_change_pct)
                       .def_readonly("p_value", &MatchedComparison::p_value)
                       .def_readonly("significant", &MatchedComparison::significant);
    def_time_property(matched, "event_time", &MatchedComparison::event_time);
    def_time_property(matched, "before_start", &MatchedComparison::before_start);
    def_time_property(matched, "after_start", &MatchedComparison::after_start);

    m.def(
        "matched_window_analysis",
        [](const TelemetrySeries& power, const ChangeEvent& event, int days_before, int days_after,
           std::int64_t window_seconds, double alpha) {
            return matched_window_analysis(power, event, days_before, days_after,
                                           Seconds{window_seconds}, alpha);
        },
        py::arg("power"), py::arg("event"), py::arg("days_before"), py::arg("days_after"),
        py::arg("window_seconds"), py::arg("alpha") = 0.05);

    py::class_<SkippedAnalysis>(m, "SkippedAnalysis")
        .def_readonly("room_id", &SkippedAnalysis::room_id)
        .def_readonly("reason", &SkippedAnalysis::reason);

    py::class_<BatchResult>(m, "BatchResult")
        .def_readonly("results", &BatchResult::results)
        .def_readonly("skipped", &BatchResult::skipped)
        .def_readonly("events", &BatchResult::events);
    m.def(
        "batch_analysis",
        [](const std::vector<RoomTelemetry>& rooms, const DetectorConfig& cfg,
           const std::vector<std::int64_t>& window_seconds, std::optional<std::int64_t> guard) {
            std::vector<Seconds> windows;
            windows.reserve(window_seconds.size());
            for (auto w : window_seconds) {
                windows.push_back(Seconds{w});
            }
            return batch_analysis(rooms, cfg, windows,
                                  guard ? std::optional<Seconds>{Seconds{*guard}} : std::nullopt);
        },
        py::arg("rooms"), py::arg("config") = DetectorConfig{},
        py::arg("window_seconds") = std::vector<std::int64_t>{86400, 2 * 86400, 7 * 86400,
                                                              14 * 86400, 30 * 86400},
        py::arg("guard_seconds") = std::nullopt);

    auto group = py::class_<GroupStats>(m, "GroupStats")
                     .def_readonly("n", &GroupStats::n)
                     .def_readonly("mean", &GroupStats::mean)
                     .def_readonly("min", &GroupStats::min)
                     .def_readonly("q1", &GroupStats::q1)
                     .def_readonly("median", &GroupStats::median)
                     .def_readonly("q3", &GroupStats::q3)
                     .def_readonly("max", &GroupStats::max);
    def_seconds_property(group, "window_seconds", &GroupStats::window_length);

    auto tally = py::class_<DirectionTally>(m, "DirectionTally")
                     .def_readonly("positive", &DirectionTally::positive)
                     .def_readonly("negative", &DirectionTally::negative)
                     .def_readonly("positive_significant", &DirectionTally::positive_significant)
                     .def_readonly("negative_significant", &DirectionTally::negative_significant);
    def_seconds_property(tally, "window_seconds", &DirectionTally::window_length);

    py::class_<AnovaResult>(m, "AnovaResult")
        .def_readonly("f", &AnovaResult::f)
        .def_readonly("p", &AnovaResult::p)
        .def_readonly("df_between", &AnovaResult::df_between)
        .def_readonly("df_within", &AnovaResult::df_within);

    py::class_<RegressionResult>(m, "RegressionResult")
        .def_readonly("slope", &RegressionResult::slope)
        .def_readonly("intercept", &RegressionResult::intercept)
        .def_readonly("r_squared", &RegressionResult::r_squared);

    py::class_<BatchSummary>(m, "BatchSummary")
        .def_readonly("n_results", &BatchSummary::n_results)
        .def_readonly("mean_sensitivity", &BatchSummary::mean_sensitivity)
        .def_readonly("ci_half_width", &BatchSummary::ci_half_width)
        .def_readonly("per_window", &BatchSummary::per_window)
        .def_readonly("tallies", &BatchSummary::tallies)
        .def_readonly("anova", &BatchSummary::anova)
        .def_readonly("temp_regression", &BatchSummary::temp_regression);
    m.def(
        "summarize_batch",
        [](const std::vector<AnalysisResult>& results, double alpha) {
            return summarize_batch(results, alpha);
        },
        py::arg("results"), py::arg("alpha") = 0.05);

    // ---- physics ----
    py::enum_<CoolingMode>(m, "CoolingMode")
        .value("chiller", CoolingMode::chiller)
        .value("economizer", CoolingMode::economizer);

    py::class_<FanModel>(m, "FanModel")
        .def(py::init<>())
        .def_readwrite("reference_inlet_c", &FanModel::reference_inlet_c)
        .def_readwrite("hot_surface_temp_c", &FanModel::hot_surface_temp_c)
        .def_readwrite("velocity_exponent", &FanModel::velocity_exponent)
        .def_readwrite("reference_fan_fraction", &FanModel::reference_fan_fraction)
        .def_readwrite("airflow_m3min_per_kw", &FanModel::airflow_m3min_per_kw);

    py::class_<ChillerModel>(m, "ChillerModel")
        .def(py::init<>())
        .def_readwrite("reference_cop", &ChillerModel::reference_cop)
        .def_readwrite("reference_chw_temp_c", &ChillerModel::reference_chw_temp_c)
        .def_readwrite("cop_gain_per_degc", &ChillerModel::cop_gain_per_degc)
        .def_readwrite("chw_approach_c", &ChillerModel::chw_approach_c);

    py::class_<EconomizerModel>(m, "EconomizerModel")
        .def(py::init<>())
        .def_readwrite("approach_c", &EconomizerModel::approach_c)
        .def_readwrite("overhead_fraction", &EconomizerModel::overhead_fraction);

    py::class_<PlantConfig>(m, "PlantConfig")
        .def(py::init<>())
        .def_readwrite("fan", &PlantConfig::fan)
        .def_readwrite("chiller", &PlantConfig::chiller)
        .def_readwrite("economizer", &PlantConfig::economizer)
        .def_readwrite("fixed_overhead_fraction", &PlantConfig::fixed_overhead_fraction)
        .def("to_json", [](const PlantConfig& p) { return plant_to_json(p).dump(2); })
        .def_static("from_json", [](const std::string& text) {
            return plant_from_json(nlohmann::json::parse(text));
        });

    py::class_<PowerBreakdown>(m, "PowerBreakdown")
        .def_readonly("compute_kw", &PowerBreakdown::compute_kw)
        .def_readonly("fans_kw", &PowerBreakdown::fans_kw)
        .def_readonly("cooling_kw", &PowerBreakdown::cooling_kw)
        .def_readonly("overhead_kw", &PowerBreakdown::overhead_kw)
        .def_readonly("total_kw", &PowerBreakdown::total_kw)
        .def_readonly("pue", &PowerBreakdown::pue)
        .def_readonly("mode", &PowerBreakdown::mode);

    m.def("cop_from_energy", &cop_from_energy, py::arg("q_kwh"), py::arg("w_kwh"));
    m.def("convective_heat_rate", &convective_heat_rate, py::arg("h"), py::arg("area_m2"),
          py::arg("t_hot_c"), py::arg("t_cold_c"));
    m.def("fan_speed_ratio_for_setpoint", &fan_speed_ratio_for_setpoint, py::arg("t_inlet_c"),
          py::arg("fan") = FanModel{});
    m.def("fan_power", &fan_power, py::arg("speed_ratio"), py::arg("reference_fan_power_kw"));
    m.def(
        "server_room_power",
        [](double t_inlet_c, double it_compute_kw, const FanModel& fan) {
            const auto p = server_room_power(t_inlet_c, it_compute_kw, fan);
            return py::make_tuple(p.compute_kw, p.fans_kw);
        },
        py::arg("t_inlet_c"), py::arg("it_compute_kw"), py::arg("fan") = FanModel{});
    m.def("chiller_cop_at", &chiller_cop_at, py::arg("t_inlet_c"), py::arg("chiller") = ChillerModel{});
    m.def(
        "cooling_power",
        [](double heat_load_kw, double t_inlet_c, double outdoor_c, const PlantConfig& plant) {
            const auto r = cooling_power(heat_load_kw, t_inlet_c, outdoor_c, plant);
            return py::make_tuple(r.power_kw, r.mode);
        },
        py::arg("heat_load_kw"), py::arg("t_inlet_c"), py::arg("outdoor_c"),
        py::arg("plant") = PlantConfig{});
    m.def("building_power", &building_power, py::arg("t_inlet_c"), py::arg("it_compute_kw"),
          py::arg("outdoor_c"), py::arg("plant") = PlantConfig{});
    m.def("pue", &pue, py::arg("p_it_kw"), py::arg("p_non_it_kw"));

    m.attr("ASHRAE_UPPER_INLET_C") = presets::kAshraeUpperInletC;
    m.attr("GOOGLE_INLET_C") = presets::kGoogleInletC;
    m.attr("MICROSOFT_INLET_C") = presets::kMicrosoftInletC;
    m.attr("META_INLET_C") = presets::kMetaInletC;

    // ---- simulator ----
    py::enum_<SensitivityLevel>(m, "SensitivityLevel")
        .value("room", SensitivityLevel::room)
        .value("building", SensitivityLevel::building);

    py::class_<Scenario>(m, "Scenario")
        .def_static("from_json",
                    [](const std::string& text) { return scenario_from_json(nlohmann::json::parse(text)); })
        .def_static("load", &load_scenario, py::arg("path"))
        .def("to_json", [](const Scenario& sc) { return scenario_to_json(sc).dump(2); })
        .def_property(
            "seed", [](const Scenario& sc) { return sc.seed; },
            [](Scenario& sc, std::uint64_t v) { sc.seed = v; })
        .def_readwrite("plant", &Scenario::plant);

    py::class_<SimOutput>(m, "SimOutput")
        .def_readonly("rooms", &SimOutput::rooms)
        .def_readonly("building_power", &SimOutput::building_power)
        .def_readonly("infrastructure_power", &SimOutput::infrastructure_power);

    m.def("simulate", &simulate, py::arg("scenario"));
    m.def("write_sim_output", &write_sim_output, py::arg("output"), py::arg("scenario"),
          py::arg("directory"));
    m.def("analytic_sensitivity", &analytic_sensitivity, py::arg("plant"), py::arg("t_inlet_c"),
          py::arg("level"), py::arg("outdoor_c") = 20.0);

    // ---- optimizer ----
    py::class_<LoadProfile>(m, "LoadProfile")
        .def(py::init<>())
        .def_readwrite("load_kw", &LoadProfile::load_kw)
        .def_readwrite("outdoor_c", &LoadProfile::outdoor_c);
    m.def(
        "reference_year_profile",
        [](double base_compute_kw) {
            return reference_year_profile(base_compute_kw, LoadShape{}, OutdoorModel{});
        },
        py::arg("base_compute_kw") = 100.0);

    py::class_<CurvePoint>(m, "CurvePoint")
        .def_readonly("t_inlet_c", &CurvePoint::t_inlet_c)
        .def_readonly("mean_total_kw", &CurvePoint::mean_total_kw)
        .def_readonly("mean_pue", &CurvePoint::mean_pue)
        .def_readonly("economizer_share", &CurvePoint::economizer_share);

    py::class_<SweetSpotResult>(m, "SweetSpotResult")
        .def_readonly("optimal_t_c", &SweetSpotResult::optimal_t_c)
        .def_readonly("optimal_power_kw", &SweetSpotResult::optimal_power_kw)
        .def_readonly("t_min", &SweetSpotResult::t_min)
        .def_readonly("t_max", &SweetSpotResult::t_max)
        .def_readonly("tolerance_c", &SweetSpotResult::tolerance_c)
        .def_readonly("plateau", &SweetSpotResult::plateau)
        .def_readonly("truncated", &SweetSpotResult::truncated)
        .def_readonly("curve", &SweetSpotResult::curve);

    m.def("mean_total_power", &mean_total_power, py::arg("plant"), py::arg("profile"),
          py::arg("t_inlet_c"));
    m.def("sweep_temperature", &sweep_temperature, py::arg("plant"), py::arg("profile"),
          py::arg("t_min"), py::arg("t_max"), py::arg("step"));
    m.def("find_sweet_spot", &find_sweet_spot, py::arg("plant"), py::arg("profile"),
          py::arg("t_min"), py::arg("t_max"), py::arg("tolerance_c"));

    // ---- cli ----
    m.def(
        "cli_run", [](const std::vector<std::string>& args) { return cli::run(args); },
        py::arg("args"));

    m.attr("__version__") = "0.1.0";
}
