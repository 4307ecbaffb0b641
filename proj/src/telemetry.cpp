#include "tempsense/telemetry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tempsense/errors.hpp"
#include "tempsense/io_util.hpp"

namespace tempsense {

namespace {

bool in_range(double v, double lo, double hi) {
    return v >= lo && v <= hi;  // NaN fails and counts as an outlier
}

bool looks_like_header(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '"')) {
        ++i;
    }
    static constexpr std::string_view kWord = "timestamp";
    if (line.size() - i < kWord.size()) {
        return false;
    }
    for (std::size_t k = 0; k < kWord.size(); ++k) {
        if (std::tolower(static_cast<unsigned char>(line[i + k])) != kWord[k]) {
            return false;
        }
    }
    return true;
}

void require_sorted(const TelemetrySeries& s, const char* op) {
    for (std::size_t i = 1; i < s.samples.size(); ++i) {
        if (!(s.samples[i - 1].time < s.samples[i].time)) {
            throw DataError(std::string(op) + ": series '" + s.sensor_id +
                            "' is not strictly increasing in time");
        }
    }
}

double median(std::vector<double> v) {
    if (v.empty()) {
        throw DataError("median of empty set");
    }
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2 == 1) {
        return v[n / 2];
    }
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    return -floor_div(-a, b);
}

}  // namespace

std::string to_string(SensorKind kind) {
    return kind == SensorKind::temperature ? "temperature" : "power";
}

ParsedSeries parse_telemetry_csv(const std::filesystem::path& path, SensorKind kind) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open telemetry file: " + path.string());
    }
    ParsedSeries out;
    out.series.sensor_id = path.stem().string();
    out.series.kind = kind;

    std::string line;
    bool first_line = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        bool is_first = first_line;
        first_line = false;
        if (line.empty()) {
            continue;
        }
        if (is_first && looks_like_header(line)) {
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            ++out.skipped_rows;
            continue;
        }
        auto time = parse_iso8601(std::string_view(line).substr(0, comma));
        auto value = parse_double(std::string_view(line).substr(comma + 1));
        if (!time || !value) {
            ++out.skipped_rows;
            continue;
        }
        out.series.samples.push_back({*time, *value});
    }
    if (out.series.samples.empty()) {
        throw DataError("no parseable rows in " + path.string());
    }

    // Stable sort keeps file order among equal timestamps, so "keep the
    // last value" is the last occurrence in the file.
    std::stable_sort(out.series.samples.begin(), out.series.samples.end(),
                     [](const Sample& a, const Sample& b) { return a.time < b.time; });
    std::vector<Sample> dedup;
    dedup.reserve(out.series.samples.size());
    for (const Sample& s : out.series.samples) {
        if (!dedup.empty() && dedup.back().time == s.time) {
            dedup.back().value = s.value;
        } else {
            dedup.push_back(s);
        }
    }
    out.series.samples = std::move(dedup);
    return out;
}

void write_telemetry_csv(const TelemetrySeries& series, const std::filesystem::path& path) {
    std::string text = "timestamp,value\n";
    for (const Sample& s : series.samples) {
        text += format_utc(s.time);
        text += ',';
        text += format_double(s.value);
        text += '\n';
    }
    atomic_write(path, text);
}

CleanResult clean_outliers(const TelemetrySeries& s, double lo, double hi) {
    if (!(lo < hi)) {
        throw std::invalid_argument("clean_outliers: lo must be < hi");
    }
    CleanResult out{s, 0};
    auto& samples = out.series.samples;
    const std::size_t n = samples.size();

    std::vector<std::size_t> good;
    good.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (in_range(samples[i].value, lo, hi)) {
            good.push_back(i);
        }
    }
    if (good.empty() && n > 0) {
        throw DataError("clean_outliers: all values of '" + s.sensor_id + "' out of range");
    }

    std::size_t gpos = 0;  // first good index >= i
    for (std::size_t i = 0; i < n; ++i) {
        if (in_range(samples[i].value, lo, hi)) {
            continue;
        }
        while (gpos < good.size() && good[gpos] < i) {
            ++gpos;
        }
        const bool has_next = gpos < good.size();
        const bool has_prev = gpos > 0;
        if (has_prev && has_next) {
            const Sample& a = samples[good[gpos - 1]];
            const Sample& b = samples[good[gpos]];
            double span = static_cast<double>((b.time - a.time).count());
            double frac = static_cast<double>((samples[i].time - a.time).count()) / span;
            samples[i].value = a.value + frac * (b.value - a.value);
        } else if (has_prev) {
            samples[i].value = samples[good[gpos - 1]].value;
        } else {
            samples[i].value = samples[good[gpos]].value;
        }
        ++out.replaced;
    }
    return out;
}

TelemetrySeries resample(const TelemetrySeries& s, Seconds interval, TimePoint origin) {
    if (interval <= Seconds{0}) {
        throw std::invalid_argument("resample: interval must be positive");
    }
    if (s.samples.empty()) {
        throw DataError("resample: empty series '" + s.sensor_id + "'");
    }
    require_sorted(s, "resample");

    const auto o = origin.time_since_epoch().count();
    const auto step = interval.count();
    const auto first = s.samples.front().time.time_since_epoch().count();
    const auto last = s.samples.back().time.time_since_epoch().count();
    const std::int64_t k0 = ceil_div(first - o, step);
    const std::int64_t k1 = ceil_div(last - o, step);

    TelemetrySeries out;
    out.sensor_id = s.sensor_id;
    out.kind = s.kind;
    out.samples.reserve(static_cast<std::size_t>(k1 - k0 + 1));
    std::size_t pos = 0;
    for (std::int64_t k = k0; k <= k1; ++k) {
        TimePoint t{Seconds{o + k * step}};
        while (pos + 1 < s.samples.size() && s.samples[pos + 1].time <= t) {
            ++pos;
        }
        out.samples.push_back({t, s.samples[pos].value});
    }
    return out;
}

TimePoint default_grid_origin(const TelemetrySeries& s, Seconds interval) {
    if (s.samples.empty()) {
        throw DataError("default_grid_origin: empty series");
    }
    return floor_to(s.samples.front().time, interval);
}

RoomManifest load_room_manifest(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("invalid manifest JSON " + path.string() + ": " + e.what());
    }
    RoomManifest m;
    try {
        m.room_id = j.at("room_id").get<std::string>();
        const auto base = path.parent_path();
        auto resolve = [&](const std::string& p) {
            std::filesystem::path fp{p};
            return fp.is_absolute() ? fp : base / fp;
        };
        for (const auto& f : j.at("temperature_files")) {
            m.temperature_files.push_back(resolve(f.get<std::string>()));
        }
        for (const auto& f : j.at("power_files")) {
            m.power_files.push_back(resolve(f.get<std::string>()));
        }
        m.grid_interval = Seconds{j.value("grid_interval_seconds", std::int64_t{3600})};
        if (j.contains("clean_bounds")) {
            const auto& cb = j.at("clean_bounds");
            if (cb.contains("temperature")) {
                m.clean_bounds.temperature_lo = cb.at("temperature").at(0).get<double>();
                m.clean_bounds.temperature_hi = cb.at("temperature").at(1).get<double>();
            }
            if (cb.contains("power")) {
                m.clean_bounds.power_lo = cb.at("power").at(0).get<double>();
                if (!cb.at("power").at(1).is_null()) {
                    m.clean_bounds.power_hi = cb.at("power").at(1).get<double>();
                }
            }
            m.clean_bounds.power_hi_median_factor =
                cb.value("power_hi_median_factor", m.clean_bounds.power_hi_median_factor);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("manifest " + path.string() + " is missing fields: " + e.what());
    }
    if (m.temperature_files.empty() || m.power_files.empty()) {
        throw DataError("manifest " + path.string() + " needs at least one file of each kind");
    }
    if (m.grid_interval <= Seconds{0}) {
        throw DataError("manifest " + path.string() + " has a non-positive grid interval");
    }
    return m;
}

void save_room_manifest(const RoomManifest& manifest, const std::filesystem::path& path) {
    nlohmann::json j;
    j["room_id"] = manifest.room_id;
    auto rel = [&](const std::filesystem::path& f) {
        auto r = f.lexically_relative(path.parent_path());
        return (r.empty() || r.native().starts_with("..")) ? f.string() : r.string();
    };
    for (const auto& f : manifest.temperature_files) {
        j["temperature_files"].push_back(rel(f));
    }
    for (const auto& f : manifest.power_files) {
        j["power_files"].push_back(rel(f));
    }
    j["grid_interval_seconds"] = manifest.grid_interval.count();
    j["clean_bounds"]["temperature"] = {manifest.clean_bounds.temperature_lo,
                                        manifest.clean_bounds.temperature_hi};
    if (manifest.clean_bounds.power_hi) {
        j["clean_bounds"]["power"] = {manifest.clean_bounds.power_lo, *manifest.clean_bounds.power_hi};
    } else {
        j["clean_bounds"]["power"] = {manifest.clean_bounds.power_lo, nullptr};
    }
    j["clean_bounds"]["power_hi_median_factor"] = manifest.clean_bounds.power_hi_median_factor;
    atomic_write(path, j.dump(2) + "\n");
}

RoomTelemetry aggregate_room(const RoomManifest& manifest) {
    if (manifest.temperature_files.empty() || manifest.power_files.empty()) {
        throw DataError("aggregate_room: need at least one sensor of each kind");
    }

    std::vector<TelemetrySeries> temps;
    std::vector<TelemetrySeries> powers;
    std::vector<double> pooled_power;
    for (const auto& f : manifest.temperature_files) {
        temps.push_back(parse_telemetry_csv(f, SensorKind::temperature).series);
    }
    for (const auto& f : manifest.power_files) {
        auto parsed = parse_telemetry_csv(f, SensorKind::power).series;
        for (const Sample& s : parsed.samples) {
            pooled_power.push_back(s.value);
        }
        powers.push_back(std::move(parsed));
    }

    const double power_hi = manifest.clean_bounds.power_hi
                                ? *manifest.clean_bounds.power_hi
                                : manifest.clean_bounds.power_hi_median_factor * median(pooled_power);

    // Canonical sensor order, so permuting the manifest lists cannot change
    // the floating-point result.
    auto by_id = [](const TelemetrySeries& a, const TelemetrySeries& b) {
        return a.sensor_id < b.sensor_id;
    };
    std::stable_sort(temps.begin(), temps.end(), by_id);
    std::stable_sort(powers.begin(), powers.end(), by_id);

    std::vector<TelemetrySeries> grids;
    grids.reserve(temps.size() + powers.size());
    for (auto& t : temps) {
        auto cleaned = clean_outliers(t, manifest.clean_bounds.temperature_lo,
                                      manifest.clean_bounds.temperature_hi);
        grids.push_back(resample(cleaned.series, manifest.grid_interval,
                                 default_grid_origin(cleaned.series, manifest.grid_interval)));
    }
    for (auto& p : powers) {
        auto cleaned = clean_outliers(p, manifest.clean_bounds.power_lo, power_hi);
        grids.push_back(resample(cleaned.series, manifest.grid_interval,
                                 default_grid_origin(cleaned.series, manifest.grid_interval)));
    }

    TimePoint start = grids.front().samples.front().time;
    TimePoint stop = grids.front().samples.back().time;
    for (const auto& g : grids) {
        start = std::max(start, g.samples.front().time);
        stop = std::min(stop, g.samples.back().time);
    }
    if (start > stop) {
        throw DataError("aggregate_room: sensors of room '" + manifest.room_id +
                        "' have no overlapping span");
    }

    RoomTelemetry room;
    room.room_id = manifest.room_id;
    room.grid_interval = manifest.grid_interval;
    const std::size_t n_temps = temps.size();
    const auto step = manifest.grid_interval;
    for (TimePoint t = start; t <= stop; t += step) {
        RoomPoint pt;
        pt.time = t;
        double temp_sum = 0.0;
        double power_sum = 0.0;
        for (std::size_t gi = 0; gi < grids.size(); ++gi) {
            const auto& g = grids[gi];
            auto idx = static_cast<std::size_t>((t - g.samples.front().time) / step);
            double v = g.samples[idx].value;
            if (gi < n_temps) {
                temp_sum += v;
            } else {
                power_sum += v;
            }
        }
        pt.temperature_c = temp_sum / static_cast<double>(n_temps);
        pt.power_kw = power_sum;
        room.points.push_back(pt);
    }
    return room;
}

}  // namespace tempsense
