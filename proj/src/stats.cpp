#include "tempsense/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tempsense/errors.hpp"
#include "tempsense/io_util.hpp"

namespace tempsense {

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) {
            break;
        }
    }
    return h;
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v, double m) {
    double ss = 0.0;
    for (double x : v) {
        ss += (x - m) * (x - m);
    }
    return ss / static_cast<double>(v.size() - 1);
}

struct CenteredSums {
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    double mean_x = 0.0, mean_y = 0.0;
};

CenteredSums centered_sums(std::span<const double> x, std::span<const double> y) {
    CenteredSums s;
    s.mean_x = mean_of(x);
    s.mean_y = mean_of(y);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - s.mean_x;
        const double dy = y[i] - s.mean_y;
        s.sxx += dx * dx;
        s.syy += dy * dy;
        s.sxy += dx * dy;
    }
    return s;
}

double pearson_from_sums(const CenteredSums& s) {
    const double r = s.sxy / std::sqrt(s.sxx * s.syy);
    return std::clamp(r, -1.0, 1.0);
}

// Type-7 (linear interpolation) quantile of a sorted vector.
double quantile_sorted(const std::vector<double>& v, double p) {
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) {
        return v.back();
    }
    const double frac = h - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

struct WindowPoints {
    std::vector<double> temperature;
    std::vector<double> power;
};

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("regularized_incomplete_beta: a, b must be positive");
    }
    if (x <= 0.0) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
    if (dof <= 0.0) {
        throw std::invalid_argument("student_t_two_sided_p: dof must be positive");
    }
    if (std::isnan(t)) {
        return 1.0;
    }
    if (std::isinf(t)) {
        return 0.0;
    }
    return regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

double f_distribution_sf(double f, double d1, double d2) {
    if (d1 <= 0.0 || d2 <= 0.0) {
        throw std::invalid_argument("f_distribution_sf: degrees of freedom must be positive");
    }
    if (std::isnan(f)) {
        return 1.0;
    }
    if (f <= 0.0) {
        return 1.0;
    }
    if (std::isinf(f)) {
        return 0.0;
    }
    return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double correlation_p_value(double r, std::size_t n) {
    if (n < 3) {
        throw std::invalid_argument("correlation_p_value: need n >= 3");
    }
    const double one_minus_r2 = 1.0 - r * r;
    if (one_minus_r2 <= 0.0) {
        return 0.0;
    }
    const double dof = static_cast<double>(n - 2);
    const double t = r * std::sqrt(dof / one_minus_r2);
    return student_t_two_sided_p(t, dof);
}

std::vector<double> average_ranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) {
            ++j;
        }
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    return ranks;
}

Correlation correlate(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("correlate: length mismatch");
    }
    if (x.size() < 3) {
        throw std::invalid_argument("correlate: need at least 3 points");
    }
    const CenteredSums s = centered_sums(x, y);
    if (s.sxx == 0.0 || s.syy == 0.0) {
        throw DataError("correlate: zero variance, correlation undefined");
    }
    Correlation c;
    c.pearson_r = pearson_from_sums(s);
    c.pearson_p = correlation_p_value(c.pearson_r, x.size());

    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const CenteredSums rs = centered_sums(rx, ry);
    c.spearman_rho = pearson_from_sums(rs);
    c.spearman_p = correlation_p_value(c.spearman_rho, x.size());
    return c;
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw std::invalid_argument("welch_t_test: need at least 2 samples per group");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    const double va = sample_variance(a, ma);
    const double vb = sample_variance(b, mb);
    const double se2 = va / na + vb / nb;

    WelchResult r;
    if (se2 == 0.0) {
        r.t = ma == mb ? 0.0 : std::numeric_limits<double>::infinity() * (ma > mb ? 1.0 : -1.0);
        r.dof = na + nb - 2.0;
        r.p = ma == mb ? 1.0 : 0.0;
        return r;
    }
    r.t = (ma - mb) / std::sqrt(se2);
    const double num = se2 * se2;
    const double den = (va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0);
    r.dof = num / den;
    r.p = student_t_two_sided_p(r.t, r.dof);
    return r;
}

Seconds default_guard(Seconds grid_interval) {
    return grid_interval >= Seconds{15 * 60} ? Seconds{0} : Seconds{15 * 60};
}

AnalysisResult window_analysis(const RoomTelemetry& room, const ChangeEvent& event,
                               Seconds window_length, Seconds guard) {
    if (window_length <= Seconds{0} || guard < Seconds{0}) {
        throw std::invalid_argument("window_analysis: bad window or guard");
    }
    if (room.points.empty()) {
        throw DataError("window_analysis: empty room series");
    }
    const TimePoint before_lo = event.event_time - guard - window_length;
    const TimePoint before_hi = event.event_time - guard;  // exclusive
    const TimePoint after_lo = event.event_time + guard;   // exclusive
    const TimePoint after_hi = event.event_time + guard + window_length;
    if (room.points.front().time > before_lo || room.points.back().time < after_hi) {
        throw DataError("window_analysis: room '" + room.room_id +
                        "' does not cover the analysis windows around " +
                        format_utc(event.event_time));
    }

    WindowPoints before;
    WindowPoints after;
    const TimePoint front = room.points.front().time;
    const auto step = room.grid_interval;
    for (std::size_t i = 0; i < room.points.size(); ++i) {
        const TimePoint t = front + step * static_cast<std::int64_t>(i);
        if (t >= before_lo && t < before_hi) {
            before.temperature.push_back(room.points[i].temperature_c);
            before.power.push_back(room.points[i].power_kw);
        } else if (t > after_lo && t <= after_hi) {
            after.temperature.push_back(room.points[i].temperature_c);
            after.power.push_back(room.points[i].power_kw);
        } else if (t > after_hi) {
            break;
        }
    }

    AnalysisResult res;
    res.room_id = room.room_id;
    res.event_time = event.event_time;
    res.window_length = window_length;
    res.n_before = before.temperature.size();
    res.n_after = after.temperature.size();
    if (res.n_before < 3 || res.n_after < 3) {
        throw DataError("window_analysis: fewer than 3 points in a window");
    }

    std::vector<double> temp = before.temperature;
    temp.insert(temp.end(), after.temperature.begin(), after.temperature.end());
    std::vector<double> power = before.power;
    power.insert(power.end(), after.power.begin(), after.power.end());

    const CenteredSums s = centered_sums(temp, power);
    if (s.sxx == 0.0) {
        throw DataError("window_analysis: zero temperature variance around " +
                        format_utc(event.event_time));
    }
    res.temp_before_c = mean_of(before.temperature);
    res.mean_power_before_kw = mean_of(before.power);
    res.mean_power_after_kw = mean_of(after.power);

    const Correlation corr = correlate(temp, power);
    res.pearson_r = corr.pearson_r;
    res.pearson_p = corr.pearson_p;
    res.spearman_rho = corr.spearman_rho;
    res.spearman_p = corr.spearman_p;

    res.sensitivity_abs_kw_per_c = s.sxy / s.sxx;
    if (res.mean_power_before_kw == 0.0) {
        throw DataError("window_analysis: zero before-window mean power");
    }
    res.sensitivity_rel_pct_per_c = 100.0 * res.sensitivity_abs_kw_per_c / res.mean_power_before_kw;
    return res;
}

namespace {

std::vector<double> samples_in(const TelemetrySeries& power, TimePoint lo, TimePoint hi) {
    std::vector<double> out;
    for (const Sample& s : power.samples) {
        if (s.time >= lo && s.time < hi) {
            out.push_back(s.value);
        }
        if (s.time >= hi) {
            break;
        }
    }
    return out;
}

}  // namespace

MatchedComparison matched_window_analysis(const TelemetrySeries& power, const ChangeEvent& event,
                                          int days_before, int days_after, Seconds window_length,
                                          double alpha) {
    if (days_before <= 0 || days_after <= 0) {
        throw std::invalid_argument("matched_window_analysis: day offsets must be positive");
    }
    if ((days_before + days_after) % 7 != 0) {
        throw std::invalid_argument(
            "matched_window_analysis: days_before + days_after must be a multiple of 7 so both "
            "windows share weekday and time of day");
    }
    if (window_length <= Seconds{0}) {
        throw std::invalid_argument("matched_window_analysis: bad window length");
    }

    MatchedComparison mc;
    mc.event_time = event.event_time;
    mc.window_length = window_length;
    mc.before_start = event.event_time - Seconds{std::int64_t{86400} * days_before};
    mc.after_start = event.event_time + Seconds{std::int64_t{86400} * days_after};

    if (power.samples.empty() || power.samples.front().time > mc.before_start ||
        power.samples.back().time < mc.after_start + window_length) {
        throw DataError("matched_window_analysis: series does not cover both windows");
    }
    const auto before = samples_in(power, mc.before_start, mc.before_start + window_length);
    const auto after = samples_in(power, mc.after_start, mc.after_start + window_length);
    if (before.size() < 3 || after.size() < 3) {
        throw DataError("matched_window_analysis: fewer than 3 samples in a window");
    }
    mc.n_before = before.size();
    mc.n_after = after.size();
    mc.mean_before_kw = mean_of(before);
    mc.mean_after_kw = mean_of(after);
    if (mc.mean_before_kw == 0.0) {
        throw DataError("matched_window_analysis: zero before-window mean");
    }
    mc.relative_change_pct = 100.0 * (mc.mean_after_kw - mc.mean_before_kw) / mc.mean_before_kw;
    const WelchResult w = welch_t_test(after, before);
    mc.p_value = w.p;
    mc.significant = w.p < alpha;
    return mc;
}

MatchedComparison matched_window_analysis(const RoomTelemetry& room, const ChangeEvent& event,
                                          int days_before, int days_after, Seconds window_length,
                                          double alpha) {
    TelemetrySeries power;
    power.sensor_id = room.room_id;
    power.kind = SensorKind::power;
    power.samples.reserve(room.points.size());
    for (const RoomPoint& p : room.points) {
        power.samples.push_back({p.time, p.power_kw});
    }
    return matched_window_analysis(power, event, days_before, days_after, window_length, alpha);
}

BatchResult batch_analysis(std::span<const RoomTelemetry> rooms, const DetectorConfig& cfg,
                           std::span<const Seconds> window_lengths, std::optional<Seconds> guard) {
    if (window_lengths.empty()) {
        throw std::invalid_argument("batch_analysis: no window lengths");
    }
    std::vector<const RoomTelemetry*> ordered;
    ordered.reserve(rooms.size());
    for (const RoomTelemetry& r : rooms) {
        ordered.push_back(&r);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const RoomTelemetry* a, const RoomTelemetry* b) { return a->room_id < b->room_id; });

    BatchResult batch;
    for (const RoomTelemetry* room : ordered) {
        std::vector<ChangeEvent> events;
        try {
            events = detect_changes(*room, cfg);
        } catch (const DataError& e) {
            batch.skipped.push_back({room->room_id, TimePoint{}, Seconds{0}, e.what()});
            continue;
        }
        const Seconds g = guard.value_or(default_guard(room->grid_interval));
        for (const ChangeEvent& ev : events) {
            batch.events.push_back(ev);
            for (const Seconds L : window_lengths) {
                try {
                    AnalysisResult res = window_analysis(*room, ev, L, g);
                    for (const ChangeEvent& other : events) {
                        if (other.event_time == ev.event_time) {
                            continue;
                        }
                        if (other.event_time >= ev.event_time - g - L &&
                            other.event_time <= ev.event_time + g + L) {
                            res.confounded = true;
                            break;
                        }
                    }
                    batch.results.push_back(std::move(res));
                } catch (const DataError& e) {
                    batch.skipped.push_back({room->room_id, ev.event_time, L, e.what()});
                }
            }
        }
    }
    return batch;
}

BatchSummary summarize_batch(std::span<const AnalysisResult> results, double alpha) {
    BatchSummary s;
    s.n_results = results.size();
    if (results.empty()) {
        return s;
    }

    std::vector<double> all;
    all.reserve(results.size());
    std::map<Seconds, std::vector<double>> groups;
    std::map<Seconds, DirectionTally> tallies;
    for (const AnalysisResult& r : results) {
        all.push_back(r.sensitivity_rel_pct_per_c);
        groups[r.window_length].push_back(r.sensitivity_rel_pct_per_c);
        DirectionTally& t = tallies[r.window_length];
        t.window_length = r.window_length;
        const bool sig = r.pearson_p < alpha;
        if (r.pearson_r >= 0.0) {
            ++t.positive;
            if (sig) {
                ++t.positive_significant;
            }
        } else {
            ++t.negative;
            if (sig) {
                ++t.negative_significant;
            }
        }
    }

    const double grand_mean = mean_of(all);
    s.mean_sensitivity = grand_mean;
    if (all.size() > 1) {
        const double sd = std::sqrt(sample_variance(all, grand_mean));
        s.ci_half_width = 1.96 * sd / std::sqrt(static_cast<double>(all.size()));
    }

    for (auto& [w, vals] : groups) {
        std::sort(vals.begin(), vals.end());
        GroupStats g;
        g.window_length = w;
        g.n = vals.size();
        g.mean = mean_of(vals);
        g.min = vals.front();
        g.q1 = quantile_sorted(vals, 0.25);
        g.median = quantile_sorted(vals, 0.5);
        g.q3 = quantile_sorted(vals, 0.75);
        g.max = vals.back();
        s.per_window.push_back(g);
    }
    for (auto& [w, t] : tallies) {
        s.tallies.push_back(t);
    }

    // Sums of squares at rounding-noise level count as zero, so groups of
    // bit-identical values report F = 0 rather than a ratio of noise terms.
    const double noise_floor =
        static_cast<double>(all.size()) *
        std::pow(16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(grand_mean)), 2);

    // One-way ANOVA across window-length groups.
    const std::size_t k = groups.size();
    const std::size_t n = all.size();
    if (k >= 2 && n > k) {
        double ssb = 0.0;
        double ssw = 0.0;
        for (const auto& [w, vals] : groups) {
            const double gm = mean_of(vals);
            ssb += static_cast<double>(vals.size()) * (gm - grand_mean) * (gm - grand_mean);
            for (double v : vals) {
                ssw += (v - gm) * (v - gm);
            }
        }
        if (ssb <= noise_floor) {
            ssb = 0.0;
        }
        if (ssw <= noise_floor) {
            ssw = 0.0;
        }
        AnovaResult a;
        a.df_between = k - 1;
        a.df_within = n - k;
        if (ssw == 0.0) {
            a.f = ssb == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            a.p = ssb == 0.0 ? 1.0 : 0.0;
        } else {
            a.f = (ssb / static_cast<double>(a.df_between)) / (ssw / static_cast<double>(a.df_within));
            a.p = f_distribution_sf(a.f, static_cast<double>(a.df_between),
                                    static_cast<double>(a.df_within));
        }
        s.anova = a;
    }

    // OLS regression of relative sensitivity on the before-window temperature.
    if (n >= 3) {
        std::vector<double> x;
        x.reserve(n);
        for (const AnalysisResult& r : results) {
            x.push_back(r.temp_before_c);
        }
        const CenteredSums cs = centered_sums(x, all);
        if (cs.sxx > 0.0) {
            RegressionResult reg;
            reg.slope = cs.sxy / cs.sxx;
            reg.intercept = cs.mean_y - reg.slope * cs.mean_x;
            if (cs.syy <= noise_floor) {
                reg.r_squared = 0.0;
            } else {
                double ss_res = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double pred = reg.intercept + reg.slope * x[i];
                    ss_res += (all[i] - pred) * (all[i] - pred);
                }
                reg.r_squared = std::clamp(1.0 - ss_res / cs.syy, 0.0, 1.0);
            }
            s.temp_regression = reg;
        }
    }
    return s;
}

namespace {

std::string window_hours_label(Seconds w) {
    const double h = static_cast<double>(w.count()) / 3600.0;
    return format_double(h);
}

}  // namespace

void write_results_csv(std::span<const AnalysisResult> results, const std::filesystem::path& path) {
    std::string text =
        "room_id,event_time,window_hours,n_before,n_after,temp_before,"
        "mean_power_before,mean_power_after,pearson_r,pearson_p,spearman_rho,spearman_p,"
        "sensitivity_abs,sensitivity_rel,confounded\n";
    for (const AnalysisResult& r : results) {
        text += r.room_id;
        text += ',';
        text += format_utc(r.event_time);
        text += ',';
        text += window_hours_label(r.window_length);
        text += ',';
        text += std::to_string(r.n_before);
        text += ',';
        text += std::to_string(r.n_after);
        text += ',';
        text += format_double(r.temp_before_c);
        text += ',';
        text += format_double(r.mean_power_before_kw);
        text += ',';
        text += format_double(r.mean_power_after_kw);
        text += ',';
        text += format_double(r.pearson_r);
        text += ',';
        text += format_double(r.pearson_p);
        text += ',';
        text += format_double(r.spearman_rho);
        text += ',';
        text += format_double(r.spearman_p);
        text += ',';
        text += format_double(r.sensitivity_abs_kw_per_c);
        text += ',';
        text += format_double(r.sensitivity_rel_pct_per_c);
        text += ',';
        text += r.confounded ? "true" : "false";
        text += '\n';
    }
    atomic_write(path, text);
}

std::vector<AnalysisResult> read_results_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open results file: " + path.string());
    }
    std::vector<AnalysisResult> out;
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (first) {
            first = false;
            if (line.rfind("room_id,", 0) == 0) {
                continue;
            }
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            fields.push_back(tok);
        }
        if (fields.size() < 15) {
            throw DataError("malformed results row " + std::to_string(line_no) + " in " +
                            path.string());
        }
        AnalysisResult r;
        r.room_id = fields[0];
        auto t = parse_iso8601(fields[1]);
        auto wh = parse_double(fields[2]);
        if (!t || !wh) {
            throw DataError("malformed results row " + std::to_string(line_no) + " in " +
                            path.string());
        }
        r.event_time = *t;
        r.window_length = Seconds{static_cast<std::int64_t>(*wh * 3600.0 + 0.5)};
        auto num = [&](std::size_t i) {
            auto v = parse_double(fields[i]);
            if (!v) {
                throw DataError("malformed results row " + std::to_string(line_no) + " in " +
                                path.string());
            }
            return *v;
        };
        r.n_before = static_cast<std::size_t>(num(3));
        r.n_after = static_cast<std::size_t>(num(4));
        r.temp_before_c = num(5);
        r.mean_power_before_kw = num(6);
        r.mean_power_after_kw = num(7);
        r.pearson_r = num(8);
        r.pearson_p = num(9);
        r.spearman_rho = num(10);
        r.spearman_p = num(11);
        r.sensitivity_abs_kw_per_c = num(12);
        r.sensitivity_rel_pct_per_c = num(13);
        r.confounded = fields[14] == "true";
        out.push_back(std::move(r));
    }
    return out;
}

void write_summary_json(const BatchSummary& summary, const std::filesystem::path& path) {
    nlohmann::json j;
    j["n_results"] = summary.n_results;
    j["mean_sensitivity_pct_per_c"] = summary.mean_sensitivity;
    j["ci95_half_width"] = summary.ci_half_width;
    j["per_window"] = nlohmann::json::array();
    for (const GroupStats& g : summary.per_window) {
        j["per_window"].push_back({{"window_hours", g.window_length.count() / 3600.0},
                                   {"n", g.n},
                                   {"mean", g.mean},
                                   {"min", g.min},
                                   {"q1", g.q1},
                                   {"median", g.median},
                                   {"q3", g.q3},
                                   {"max", g.max}});
    }
    j["tallies"] = nlohmann::json::array();
    for (const DirectionTally& t : summary.tallies) {
        j["tallies"].push_back({{"window_hours", t.window_length.count() / 3600.0},
                                {"positive", t.positive},
                                {"negative", t.negative},
                                {"positive_significant", t.positive_significant},
                                {"negative_significant", t.negative_significant}});
    }
    if (summary.anova) {
        j["anova"] = {{"f", summary.anova->f},
                      {"p", summary.anova->p},
                      {"df_between", summary.anova->df_between},
                      {"df_within", summary.anova->df_within}};
    } else {
        j["anova"] = nullptr;
    }
    if (summary.temp_regression) {
        j["temp_regression"] = {{"slope", summary.temp_regression->slope},
                                {"intercept", summary.temp_regression->intercept},
                                {"r_squared", summary.temp_regression->r_squared}};
    } else {
        j["temp_regression"] = nullptr;
    }
    atomic_write(path, j.dump(2) + "\n");
}

void write_plot_data_csv(const RoomTelemetry& room, const AnalysisResult& result, Seconds guard,
                         const std::filesystem::path& path) {
    const TimePoint before_lo = result.event_time - guard - result.window_length;
    const TimePoint before_hi = result.event_time - guard;
    const TimePoint after_lo = result.event_time + guard;
    const TimePoint after_hi = result.event_time + guard + result.window_length;

    std::string text = "timestamp,temperature,power,window_tag\n";
    const TimePoint front = room.points.front().time;
    const auto step = room.grid_interval;
    for (std::size_t i = 0; i < room.points.size(); ++i) {
        const TimePoint t = front + step * static_cast<std::int64_t>(i);
        const char* tag = nullptr;
        if (t >= before_lo && t < before_hi) {
            tag = "before";
        } else if (t > after_lo && t <= after_hi) {
            tag = "after";
        } else if (t > after_hi) {
            break;
        }
        if (tag == nullptr) {
            continue;
        }
        text += format_utc(t);
        text += ',';
        text += format_double(room.points[i].temperature_c);
        text += ',';
        text += format_double(room.points[i].power_kw);
        text += ',';
        text += tag;
        text += '\n';
    }
    atomic_write(path, text);
}

}  // namespace tempsense
