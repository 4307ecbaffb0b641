#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tempsense/telemetry.hpp"

namespace tempsense {

struct ChangeEvent {
    std::string room_id;
    TimePoint event_time;      // first grid point of the "after" regime
    double temp_before_c = 0.0;  // mean of the before window
    double temp_after_c = 0.0;   // mean of the after window
    double magnitude_c = 0.0;    // temp_after - temp_before

    friend bool operator==(const ChangeEvent&, const ChangeEvent&) = default;
};

struct DetectorConfig {
    Seconds window{12 * 3600};
    double threshold_c = 0.8;
    std::optional<Seconds> refractory;  // minimum event spacing; defaults to window

    Seconds effective_refractory() const { return refractory.value_or(window); }
};

// Two adjacent rolling windows of length cfg.window sweep the grid; where the
// absolute difference of their mean temperatures exceeds the threshold, one
// event is reported at the boundary with the locally maximal difference.
// Events closer than the refractory spacing are merged keeping the larger
// magnitude. Throws DataError if the series is shorter than two windows.
std::vector<ChangeEvent> detect_changes(const RoomTelemetry& room, const DetectorConfig& cfg);

struct ChangeSummary {
    std::size_t total = 0;
    std::map<std::string, std::size_t> per_room;
    std::map<std::string, std::size_t> per_month;          // "YYYY-MM"; zero months omitted
    std::map<double, std::size_t> magnitude_histogram;     // 0.5 degC bins, keyed by lower edge
};

ChangeSummary summarize_changes(std::span<const ChangeEvent> events);

// Columns: room_id,event_time,temp_before,temp_after,magnitude
void write_events_csv(std::span<const ChangeEvent> events, const std::filesystem::path& path);

}  // namespace tempsense
