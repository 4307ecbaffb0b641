#include "tempsense/changepoint.hpp"

#include <algorithm>
#include <cmath>

#include "tempsense/errors.hpp"
#include "tempsense/io_util.hpp"

namespace tempsense {

std::vector<ChangeEvent> detect_changes(const RoomTelemetry& room, const DetectorConfig& cfg) {
    if (cfg.window <= Seconds{0} || cfg.threshold_c <= 0.0) {
        throw std::invalid_argument("detect_changes: window and threshold must be positive");
    }
    if (room.grid_interval <= Seconds{0}) {
        throw std::invalid_argument("detect_changes: non-positive grid interval");
    }
    const std::size_t w = static_cast<std::size_t>(cfg.window / room.grid_interval);
    if (w == 0) {
        throw std::invalid_argument("detect_changes: window shorter than the grid interval");
    }
    const std::size_t n = room.points.size();
    if (n < 2 * w) {
        throw DataError("detect_changes: room '" + room.room_id +
                        "' spans less than two detection windows");
    }

    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + room.points[i].temperature_c;
    }
    auto mean_range = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
        return (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    };

    // One candidate per exceedance run, at the boundary with maximal |diff|.
    struct Candidate {
        std::size_t index;
        double before, after, diff;
    };
    std::vector<Candidate> candidates;
    bool in_run = false;
    Candidate best{};
    for (std::size_t i = w; i + w <= n; ++i) {
        const double before = mean_range(i - w, i);
        const double after = mean_range(i, i + w);
        const double diff = after - before;
        if (std::abs(diff) > cfg.threshold_c) {
            if (!in_run || std::abs(diff) > std::abs(best.diff)) {
                best = {i, before, after, diff};
            }
            in_run = true;
        } else if (in_run) {
            candidates.push_back(best);
            in_run = false;
        }
    }
    if (in_run) {
        candidates.push_back(best);
    }

    const Seconds refractory = cfg.effective_refractory();
    std::vector<Candidate> kept;
    for (const Candidate& c : candidates) {
        if (!kept.empty()) {
            const auto spacing = (c.index - kept.back().index) * room.grid_interval;
            if (spacing < refractory) {
                if (std::abs(c.diff) > std::abs(kept.back().diff)) {
                    kept.back() = c;
                }
                continue;
            }
        }
        kept.push_back(c);
    }

    std::vector<ChangeEvent> events;
    events.reserve(kept.size());
    for (const Candidate& c : kept) {
        events.push_back({room.room_id, room.points[c.index].time, c.before, c.after, c.diff});
    }
    return events;
}

ChangeSummary summarize_changes(std::span<const ChangeEvent> events) {
    ChangeSummary s;
    s.total = events.size();
    for (const ChangeEvent& e : events) {
        ++s.per_room[e.room_id];
        ++s.per_month[month_key_utc(e.event_time)];
        double edge = std::floor(e.magnitude_c / 0.5) * 0.5 + 0.0;  // +0.0 folds -0.0
        ++s.magnitude_histogram[edge];
    }
    return s;
}

void write_events_csv(std::span<const ChangeEvent> events, const std::filesystem::path& path) {
    std::vector<const ChangeEvent*> sorted;
    sorted.reserve(events.size());
    for (const ChangeEvent& e : events) {
        sorted.push_back(&e);
    }
    std::sort(sorted.begin(), sorted.end(), [](const ChangeEvent* a, const ChangeEvent* b) {
        return std::tie(a->room_id, a->event_time) < std::tie(b->room_id, b->event_time);
    });
    std::string text = "room_id,event_time,temp_before,temp_after,magnitude\n";
    for (const ChangeEvent* e : sorted) {
        text += e->room_id;
        text += ',';
        text += format_utc(e->event_time);
        text += ',';
        text += format_double(e->temp_before_c);
        text += ',';
        text += format_double(e->temp_after_c);
        text += ',';
        text += format_double(e->magnitude_c);
        text += '\n';
    }
    atomic_write(path, text);
}

}  // namespace tempsense
