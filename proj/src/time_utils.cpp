#include "tempsense/time_utils.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace tempsense {

namespace {

namespace chr = std::chrono;

bool parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) {
        return false;
    }
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc{} && p == s.data() + pos + len;
}

}  // namespace

std::optional<TimePoint> parse_iso8601(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }

    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!parse_fixed_int(text, 0, 4, year) || text.size() < 10 || text[4] != '-' || text[7] != '-' ||
        !parse_fixed_int(text, 5, 2, month) || !parse_fixed_int(text, 8, 2, day)) {
        return std::nullopt;
    }
    std::size_t pos = 10;
    if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ')) {
        return std::nullopt;
    }
    ++pos;
    if (!parse_fixed_int(text, pos, 2, hour)) {
        return std::nullopt;
    }
    pos += 2;
    if (pos >= text.size() || text[pos] != ':') {
        return std::nullopt;
    }
    ++pos;
    if (!parse_fixed_int(text, pos, 2, minute)) {
        return std::nullopt;
    }
    pos += 2;
    if (pos < text.size() && text[pos] == ':') {
        ++pos;
        if (!parse_fixed_int(text, pos, 2, second)) {
            return std::nullopt;
        }
        pos += 2;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0) {
            return std::nullopt;
        }
    }

    // Zone designator: none (treated as UTC), 'Z', or +/-HH[:][MM].
    int offset_seconds = 0;
    if (pos < text.size()) {
        char c = text[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            int sign = c == '+' ? 1 : -1;
            ++pos;
            int oh = 0, om = 0;
            if (!parse_fixed_int(text, pos, 2, oh)) {
                return std::nullopt;
            }
            pos += 2;
            if (pos < text.size()) {
                if (text[pos] == ':') {
                    ++pos;
                }
                if (!parse_fixed_int(text, pos, 2, om)) {
                    return std::nullopt;
                }
                pos += 2;
            }
            offset_seconds = sign * (oh * 3600 + om * 60);
        } else {
            return std::nullopt;
        }
    }
    if (pos != text.size()) {
        return std::nullopt;
    }

    chr::year_month_day ymd{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                            chr::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) {
        return std::nullopt;
    }
    if (second == 60) {  // fold leap seconds into the next minute
        second = 59;
    }
    TimePoint local{chr::sys_days{ymd} + chr::hours{hour} + chr::minutes{minute} + chr::seconds{second}};
    return local - Seconds{offset_seconds};
}

std::string format_utc(TimePoint t) {
    auto dp = chr::floor<chr::days>(t);
    chr::year_month_day ymd{dp};
    chr::hh_mm_ss hms{t - dp};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

std::string format_compact_utc(TimePoint t) {
    auto dp = chr::floor<chr::days>(t);
    chr::year_month_day ymd{dp};
    chr::hh_mm_ss hms{t - dp};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d%02u%02uT%02d%02d%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

TimePoint floor_to(TimePoint t, Seconds interval) {
    auto s = t.time_since_epoch().count();
    auto n = interval.count();
    auto r = s % n;
    if (r < 0) {
        r += n;
    }
    return TimePoint{Seconds{s - r}};
}

TimePoint ceil_to(TimePoint t, Seconds interval) {
    TimePoint f = floor_to(t, interval);
    return f == t ? f : f + interval;
}

double hour_of_day_utc(TimePoint t) {
    auto s = t.time_since_epoch().count();
    auto r = s % 86400;
    if (r < 0) {
        r += 86400;
    }
    return static_cast<double>(r) / 3600.0;
}

bool is_weekend_utc(TimePoint t) {
    chr::weekday wd{chr::floor<chr::days>(t)};
    return wd == chr::Saturday || wd == chr::Sunday;
}

int day_of_year_utc(TimePoint t) {
    auto dp = chr::floor<chr::days>(t);
    chr::year_month_day ymd{dp};
    auto jan1 = chr::sys_days{ymd.year() / chr::January / 1};
    return static_cast<int>((dp - jan1).count());
}

std::string month_key_utc(TimePoint t) {
    chr::year_month_day ymd{chr::floor<chr::days>(t)};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()));
    return buf;
}

}  // namespace tempsense
