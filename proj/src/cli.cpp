#include "tempsense/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tempsense/changepoint.hpp"
#include "tempsense/errors.hpp"
#include "tempsense/io_util.hpp"
#include "tempsense/optimizer.hpp"
#include "tempsense/simulator.hpp"
#include "tempsense/stats.hpp"
#include "tempsense/telemetry.hpp"

namespace tempsense::cli {

namespace {

namespace fs = std::filesystem;

std::vector<fs::path> manifest_paths(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw DataError("not a directory: " + dir.string());
    }
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) {
        throw DataError("no room manifests (*.json) in " + dir.string());
    }
    return out;
}

std::vector<RoomTelemetry> load_rooms(const fs::path& dir) {
    std::vector<RoomTelemetry> rooms;
    for (const fs::path& p : manifest_paths(dir)) {
        rooms.push_back(aggregate_room(load_room_manifest(p)));
    }
    return rooms;
}

std::vector<Seconds> parse_window_hours(const std::string& list) {
    std::vector<Seconds> out;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto v = parse_double(tok);
        if (!v || *v <= 0.0) {
            throw std::invalid_argument("bad window length '" + tok + "' (hours expected)");
        }
        out.push_back(Seconds{static_cast<std::int64_t>(*v * 3600.0 + 0.5)});
    }
    if (out.empty()) {
        throw std::invalid_argument("empty window list");
    }
    return out;
}

DetectorConfig make_detector(double window_hours, double threshold, double refractory_hours) {
    DetectorConfig cfg;
    cfg.window = Seconds{static_cast<std::int64_t>(window_hours * 3600.0 + 0.5)};
    cfg.threshold_c = threshold;
    if (refractory_hours > 0.0) {
        cfg.refractory = Seconds{static_cast<std::int64_t>(refractory_hours * 3600.0 + 0.5)};
    }
    return cfg;
}

int run_detect(const fs::path& rooms_dir, const fs::path& out, const DetectorConfig& cfg) {
    std::vector<ChangeEvent> events;
    for (const RoomTelemetry& room : load_rooms(rooms_dir)) {
        auto room_events = detect_changes(room, cfg);
        events.insert(events.end(), room_events.begin(), room_events.end());
    }
    write_events_csv(events, out);
    std::cerr << "detect: " << events.size() << " events -> " << out.string() << "\n";
    return 0;
}

int run_analyze(const fs::path& rooms_dir, const fs::path& out_dir, const DetectorConfig& cfg,
                const std::vector<Seconds>& windows, std::optional<Seconds> guard, double alpha,
                bool plot_data) {
    const auto rooms = load_rooms(rooms_dir);
    const BatchResult batch = batch_analysis(rooms, cfg, windows, guard);

    fs::create_directories(out_dir);
    write_events_csv(batch.events, out_dir / "events.csv");
    write_results_csv(batch.results, out_dir / "results.csv");
    write_summary_json(summarize_batch(batch.results, alpha), out_dir / "summary.json");

    if (!batch.skipped.empty()) {
        std::string text = "room_id,event_time,window_hours,reason\n";
        for (const SkippedAnalysis& s : batch.skipped) {
            text += s.room_id + ',' + format_utc(s.event_time) + ',' +
                    format_double(static_cast<double>(s.window_length.count()) / 3600.0) + ',' +
                    '"' + s.reason + '"' + '\n';
        }
        atomic_write(out_dir / "skipped.csv", text);
        std::cerr << "analyze: " << batch.skipped.size() << " analyses skipped (see skipped.csv)\n";
    }

    if (plot_data) {
        for (const AnalysisResult& r : batch.results) {
            const auto room = std::find_if(rooms.begin(), rooms.end(), [&](const RoomTelemetry& rt) {
                return rt.room_id == r.room_id;
            });
            const Seconds g = guard.value_or(default_guard(room->grid_interval));
            const std::string name = "plot_" + r.room_id + "_" + format_compact_utc(r.event_time) +
                                     "_" + format_double(r.window_length.count() / 3600.0) + "h.csv";
            write_plot_data_csv(*room, r, g, out_dir / name);
        }
    }
    std::cerr << "analyze: " << batch.results.size() << " analyses -> " << out_dir.string() << "\n";
    return 0;
}

int run_simulate(const fs::path& scenario_path, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed) {
    Scenario scenario = load_scenario(scenario_path);
    if (seed) {
        scenario.seed = *seed;
    }
    const SimOutput out = simulate(scenario);
    write_sim_output(out, scenario, out_dir);
    std::cerr << "simulate: " << scenario.rooms.size() << " rooms, " << out.grid.size()
              << " timesteps -> " << out_dir.string() << "\n";
    return 0;
}

int run_optimize(const std::optional<fs::path>& plant_path, const std::optional<fs::path>& profile_path,
                 double base_load_kw, double t_min, double t_max, double step, double tol,
                 const fs::path& out_curve, const fs::path& out_json) {
    const PlantConfig plant = plant_path ? load_plant_config(*plant_path) : PlantConfig{};

    LoadProfile profile;
    if (profile_path) {
        std::istringstream in(read_file(*profile_path));
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.empty()) {
                continue;
            }
            if (first) {
                first = false;
                if (line.rfind("load_kw", 0) == 0) {
                    continue;
                }
            }
            const auto comma = line.find(',');
            auto load = comma == std::string::npos ? std::nullopt
                                                   : parse_double(std::string_view(line).substr(0, comma));
            auto outdoor = comma == std::string::npos
                               ? std::nullopt
                               : parse_double(std::string_view(line).substr(comma + 1));
            if (!load || !outdoor) {
                throw DataError("bad profile row: " + line);
            }
            profile.load_kw.push_back(*load);
            profile.outdoor_c.push_back(*outdoor);
        }
        if (profile.load_kw.empty()) {
            throw DataError("empty load profile " + profile_path->string());
        }
    } else {
        profile = reference_year_profile(base_load_kw, LoadShape{}, OutdoorModel{});
    }

    SweetSpotResult result = find_sweet_spot(plant, profile, t_min, t_max, tol);
    if (result.truncated) {
        std::cerr << "optimize: upper bound truncated to " << result.t_max
                  << " degC (feasibility)\n";
    }
    write_curve_csv(sweep_temperature(plant, profile, result.t_min, result.t_max, step), out_curve);
    write_sweet_spot_json(result, out_json);
    std::cerr << "optimize: minimum " << result.optimal_power_kw << " kW at " << result.optimal_t_c
              << " degC -> " << out_json.string() << "\n";
    return 0;
}

std::string tally_line(const DirectionTally& t) {
    std::ostringstream os;
    os << format_double(t.window_length.count() / 3600.0) << "h: " << t.positive << " positive, "
       << t.negative << " negative ("
       << (t.positive_significant + t.negative_significant) << " significant)";
    return os.str();
}

}  // namespace

std::string emit_report(const std::filesystem::path& results_csv) {
    const auto results = read_results_csv(results_csv);
    std::ostringstream os;
    if (results.empty()) {
        os << "no analyses\n";
        return os.str();
    }
    const BatchSummary s = summarize_batch(results);

    char buf[160];
    os << "Results: " << s.n_results << " analyses across " << s.per_window.size()
       << " window lengths\n";
    std::snprintf(buf, sizeof buf, "Mean sensitivity: %.2f %%/degC (95%% CI +/- %.2f)\n",
                  s.mean_sensitivity, s.ci_half_width);
    os << buf;
    if (s.anova) {
        std::snprintf(buf, sizeof buf, "ANOVA across window lengths: F = %.3f (df %zu, %zu), p = %.4f\n",
                      s.anova->f, s.anova->df_between, s.anova->df_within, s.anova->p);
        os << buf;
    }
    if (s.temp_regression) {
        std::snprintf(buf, sizeof buf,
                      "Sensitivity vs before-temperature: slope = %.4f %%/degC per degC, R^2 = %.4f\n",
                      s.temp_regression->slope, s.temp_regression->r_squared);
        os << buf;
    }
    os << "\nSensitivity by window length [%/degC]:\n";
    os << "  window        n      q1  median      q3    mean\n";
    for (const GroupStats& g : s.per_window) {
        std::snprintf(buf, sizeof buf, "  %6sh %6zu %7.3f %7.3f %7.3f %7.3f\n",
                      format_double(g.window_length.count() / 3600.0).c_str(), g.n, g.q1, g.median,
                      g.q3, g.mean);
        os << buf;
    }
    os << "\nCorrelation direction at alpha = 0.05:\n";
    for (const DirectionTally& t : s.tallies) {
        os << "  " << tally_line(t) << "\n";
    }
    return os.str();
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"Inlet-temperature telemetry analysis and plant simulation"};
    app.require_subcommand(1);

    // detect
    auto* detect = app.add_subcommand("detect", "Detect sustained setpoint changes");
    std::string detect_rooms;
    std::string detect_out = "events.csv";
    double window_hours = 12.0;
    double threshold = 0.8;
    double refractory_hours = 0.0;
    detect->add_option("--rooms", detect_rooms, "Directory with room manifest JSON files")
        ->required();
    detect->add_option("--out", detect_out, "Events CSV path (default events.csv)");
    detect->add_option("--window-hours", window_hours,
                       "Rolling window length in hours (default 12)");
    detect->add_option("--threshold", threshold,
                       "Detection threshold in degC (default 0.8)");
    detect->add_option("--refractory-hours", refractory_hours,
                       "Minimum event spacing in hours (default: window length)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Detect events and quantify power response");
    std::string analyze_rooms;
    std::string analyze_out = ".";
    std::string windows_list = "24,48,168,336,720";
    double guard_minutes = -1.0;
    double alpha = 0.05;
    bool no_plot_data = false;
    analyze->add_option("--rooms", analyze_rooms, "Directory with room manifest JSON files")
        ->required();
    analyze->add_option("--out-dir", analyze_out, "Output directory (default .)");
    analyze->add_option("--windows", windows_list,
                        "Comma-separated analysis window lengths in hours (default 24,48,168,336,720)");
    analyze->add_option("--window-hours", window_hours,
                        "Detector rolling window in hours (default 12)");
    analyze->add_option("--threshold", threshold, "Detection threshold in degC (default 0.8)");
    analyze->add_option("--refractory-hours", refractory_hours,
                        "Minimum event spacing in hours (default: window length)");
    analyze->add_option("--guard-minutes", guard_minutes,
                        "Guard gap around events in minutes (default: 0 for grids of 15 min or "
                        "coarser, 15 otherwise)");
    analyze->add_option("--alpha", alpha, "Significance level (default 0.05)");
    analyze->add_flag("--no-plot-data", no_plot_data, "Skip per-analysis plot CSV files");

    // simulate
    auto* simulate_cmd = app.add_subcommand("simulate", "Generate synthetic telemetry");
    std::string scenario_path;
    std::string sim_out = ".";
    std::uint64_t seed_flag = 0;
    simulate_cmd->add_option("--scenario", scenario_path, "Scenario JSON path")->required();
    simulate_cmd->add_option("--out-dir", sim_out, "Output directory (default .)");
    auto* seed_opt = simulate_cmd->add_option("--seed", seed_flag, "Override the scenario RNG seed");

    // optimize
    auto* optimize = app.add_subcommand("optimize", "Search the inlet temperature minimizing "
                                                    "profile-averaged building power");
    std::string plant_path;
    std::string profile_path;
    double base_load_kw = 100.0;
    double t_min = 18.0;
    double t_max = 32.0;
    double step = 0.25;
    double tol = 0.05;
    std::string out_curve = "curve.csv";
    std::string out_json = "sweet_spot.json";
    optimize->add_option("--plant", plant_path, "Plant config JSON (default: documented defaults)");
    optimize->add_option("--profile", profile_path,
                         "CSV load_kw,outdoor_c profile (default: reference year)");
    optimize->add_option("--base-load-kw", base_load_kw,
                         "Base compute power for the reference year (default 100)");
    optimize->add_option("--t-min", t_min, "Lower search bound in degC (default 18)");
    optimize->add_option("--t-max", t_max, "Upper search bound in degC (default 32)");
    optimize->add_option("--step", step, "Curve output step in degC (default 0.25)");
    optimize->add_option("--tol", tol, "Search tolerance in degC (default 0.05)");
    optimize->add_option("--out-curve", out_curve, "Curve CSV path (default curve.csv)");
    optimize->add_option("--out-json", out_json, "Result JSON path (default sweet_spot.json)");

    // report
    auto* report = app.add_subcommand("report", "Text summary of a results CSV");
    std::string results_path;
    report->add_option("--results", results_path, "Results CSV from analyze")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cout, std::cerr);
        return 1;
    }

    try {
        if (*detect) {
            return run_detect(detect_rooms, detect_out,
                              make_detector(window_hours, threshold, refractory_hours));
        }
        if (*analyze) {
            std::optional<Seconds> guard;
            if (guard_minutes >= 0.0) {
                guard = Seconds{static_cast<std::int64_t>(guard_minutes * 60.0 + 0.5)};
            }
            return run_analyze(analyze_rooms, analyze_out,
                               make_detector(window_hours, threshold, refractory_hours),
                               parse_window_hours(windows_list), guard, alpha, !no_plot_data);
        }
        if (*simulate_cmd) {
            return run_simulate(scenario_path, sim_out,
                                seed_opt->count() > 0 ? std::optional<std::uint64_t>{seed_flag}
                                                      : std::nullopt);
        }
        if (*optimize) {
            return run_optimize(plant_path.empty() ? std::nullopt : std::optional<fs::path>{plant_path},
                                profile_path.empty() ? std::nullopt : std::optional<fs::path>{profile_path},
                                base_load_kw, t_min, t_max, step, tol, out_curve, out_json);
        }
        if (*report) {
            std::cout << emit_report(results_path);
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args);
}

}  // namespace tempsense::cli
