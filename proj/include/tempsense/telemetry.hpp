#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tempsense/time_utils.hpp"

namespace tempsense {

enum class SensorKind { temperature, power };

std::string to_string(SensorKind kind);

struct Sample {
    TimePoint time;
    double value = 0.0;

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct TelemetrySeries {
    std::string sensor_id;
    SensorKind kind = SensorKind::temperature;
    std::vector<Sample> samples;  // strictly increasing timestamps

    friend bool operator==(const TelemetrySeries&, const TelemetrySeries&) = default;
};

struct ParsedSeries {
    TelemetrySeries series;
    std::size_t skipped_rows = 0;
};

// CSV with header `timestamp,value`. Rows with unparseable fields are
// skipped and counted; duplicate timestamps keep the last value; output
// is sorted ascending.
ParsedSeries parse_telemetry_csv(const std::filesystem::path& path, SensorKind kind);

void write_telemetry_csv(const TelemetrySeries& series, const std::filesystem::path& path);

struct CleanResult {
    TelemetrySeries series;
    std::size_t replaced = 0;
};

// Values outside [lo, hi] are replaced by time-linear interpolation between
// the nearest in-range neighbours; at the edges, by the nearest in-range
// value. Throws DataError if no value is in range.
CleanResult clean_outliers(const TelemetrySeries& s, double lo, double hi);

// Forward-fill resampling onto the grid {origin + k * interval}. Grid points
// before the first raw sample are omitted; the grid extends to the first
// point at or after the last raw sample.
TelemetrySeries resample(const TelemetrySeries& s, Seconds interval, TimePoint origin);

// First raw timestamp truncated down to the interval (epoch-anchored).
TimePoint default_grid_origin(const TelemetrySeries& s, Seconds interval);

struct RoomPoint {
    TimePoint time;
    double temperature_c = 0.0;
    double power_kw = 0.0;

    friend bool operator==(const RoomPoint&, const RoomPoint&) = default;
};

struct RoomTelemetry {
    std::string room_id;
    Seconds grid_interval{3600};
    std::vector<RoomPoint> points;  // contiguous grid, no holes

    friend bool operator==(const RoomTelemetry&, const RoomTelemetry&) = default;
};

struct CleanBounds {
    double temperature_lo = 0.0;
    double temperature_hi = 60.0;
    double power_lo = 0.0;
    std::optional<double> power_hi;      // absent: factor x pooled median
    double power_hi_median_factor = 10.0;
};

struct RoomManifest {
    std::string room_id;
    std::vector<std::filesystem::path> temperature_files;
    std::vector<std::filesystem::path> power_files;
    Seconds grid_interval{3600};
    CleanBounds clean_bounds;
};

// JSON document with fields room_id, temperature_files[], power_files[],
// grid_interval_seconds, clean_bounds. Relative paths resolve against the
// manifest's directory.
RoomManifest load_room_manifest(const std::filesystem::path& path);
void save_room_manifest(const RoomManifest& manifest, const std::filesystem::path& path);

// Parse, clean, resample and combine all sensors of a room: per grid point
// the mean of the temperature sensors and the sum of the power sensors,
// restricted to the span where every sensor has a value.
RoomTelemetry aggregate_room(const RoomManifest& manifest);

}  // namespace tempsense
