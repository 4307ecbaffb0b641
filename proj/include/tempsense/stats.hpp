#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tempsense/changepoint.hpp"
#include "tempsense/telemetry.hpp"

namespace tempsense {

// ---- distribution building blocks ----

double regularized_incomplete_beta(double a, double b, double x);

// Two-sided p-value of a Student-t statistic.
double student_t_two_sided_p(double t, double dof);

// P(F > f) for an F distribution with d1, d2 degrees of freedom.
double f_distribution_sf(double f, double d1, double d2);

// p-value of a correlation coefficient via t = r*sqrt((n-2)/(1-r^2)).
double correlation_p_value(double r, std::size_t n);

// Average ranks, 1-based; ties receive the mean of their rank range.
std::vector<double> average_ranks(std::span<const double> v);

struct Correlation {
    double pearson_r = 0.0;
    double pearson_p = 1.0;
    double spearman_rho = 0.0;
    double spearman_p = 1.0;
};

// Pearson product-moment and Spearman (Pearson on average ranks), both with
// two-sided t-based p-values. Throws DataError on zero variance, requires
// n >= 3.
Correlation correlate(std::span<const double> x, std::span<const double> y);

struct WelchResult {
    double t = 0.0;
    double dof = 0.0;
    double p = 1.0;
};

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

// ---- per-event window analysis ----

struct AnalysisResult {
    std::string room_id;
    TimePoint event_time;
    Seconds window_length{0};
    std::size_t n_before = 0;
    std::size_t n_after = 0;
    double temp_before_c = 0.0;  // mean temperature of the before window
    double mean_power_before_kw = 0.0;
    double mean_power_after_kw = 0.0;
    double pearson_r = 0.0;
    double pearson_p = 1.0;
    double spearman_rho = 0.0;
    double spearman_p = 1.0;
    double sensitivity_abs_kw_per_c = 0.0;
    double sensitivity_rel_pct_per_c = 0.0;
    bool confounded = false;  // a neighbouring event falls inside the windows
};

// before = [event - guard - L, event - guard), after = (event + guard,
// event + guard + L]. Correlations and the OLS slope (the absolute
// sensitivity) are computed on the pooled points of both windows; relative
// sensitivity normalizes by the before-window mean power.
AnalysisResult window_analysis(const RoomTelemetry& room, const ChangeEvent& event,
                               Seconds window_length, Seconds guard);

// 0 for grids of 15 min or coarser, 15 min for finer grids (the transition
// takes about a quarter hour to settle).
Seconds default_guard(Seconds grid_interval);

struct MatchedComparison {
    TimePoint event_time;
    TimePoint before_start;
    TimePoint after_start;
    Seconds window_length{0};
    std::size_t n_before = 0;
    std::size_t n_after = 0;
    double mean_before_kw = 0.0;
    double mean_after_kw = 0.0;
    double relative_change_pct = 0.0;
    double p_value = 1.0;
    bool significant = false;
};

// Windows of identical length starting days_before*24h before and
// days_after*24h after the event; days_before + days_after must be a
// multiple of 7 so both windows share weekday and time of day. Welch
// two-sample t-test on the power samples.
MatchedComparison matched_window_analysis(const TelemetrySeries& power, const ChangeEvent& event,
                                          int days_before, int days_after, Seconds window_length,
                                          double alpha = 0.05);
MatchedComparison matched_window_analysis(const RoomTelemetry& room, const ChangeEvent& event,
                                          int days_before, int days_after, Seconds window_length,
                                          double alpha = 0.05);

// ---- batch pipeline ----

struct SkippedAnalysis {
    std::string room_id;
    TimePoint event_time;
    Seconds window_length{0};
    std::string reason;
};

struct BatchResult {
    std::vector<AnalysisResult> results;
    std::vector<SkippedAnalysis> skipped;
    std::vector<ChangeEvent> events;
};

// detect_changes then window_analysis for every event x window length, rooms
// processed in room_id order. Per-analysis failures become skipped rows.
BatchResult batch_analysis(std::span<const RoomTelemetry> rooms, const DetectorConfig& cfg,
                           std::span<const Seconds> window_lengths,
                           std::optional<Seconds> guard = std::nullopt);

// ---- batch summary ----

struct GroupStats {
    Seconds window_length{0};
    std::size_t n = 0;
    double mean = 0.0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

struct DirectionTally {
    Seconds window_length{0};
    std::size_t positive = 0;
    std::size_t negative = 0;
    std::size_t positive_significant = 0;
    std::size_t negative_significant = 0;
};

struct AnovaResult {
    double f = 0.0;
    double p = 1.0;
    std::size_t df_between = 0;
    std::size_t df_within = 0;
};

struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

struct BatchSummary {
    std::size_t n_results = 0;
    double mean_sensitivity = 0.0;       // %/degC, across all results
    double ci_half_width = 0.0;          // 95% normal approximation
    std::vector<GroupStats> per_window;  // sorted by window length
    std::vector<DirectionTally> tallies;
    std::optional<AnovaResult> anova;                // across window-length groups
    std::optional<RegressionResult> temp_regression; // sensitivity on temp_before
};

BatchSummary summarize_batch(std::span<const AnalysisResult> results, double alpha = 0.05);

// ---- serialization ----

void write_results_csv(std::span<const AnalysisResult> results, const std::filesystem::path& path);
std::vector<AnalysisResult> read_results_csv(const std::filesystem::path& path);
void write_summary_json(const BatchSummary& summary, const std::filesystem::path& path);

// timestamp,temperature,power,window_tag rows for one analysis, for external
// plotting.
void write_plot_data_csv(const RoomTelemetry& room, const AnalysisResult& result, Seconds guard,
                         const std::filesystem::path& path);

}  // namespace tempsense
