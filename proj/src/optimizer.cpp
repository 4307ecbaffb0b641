#include "tempsense/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "tempsense/errors.hpp"
#include "tempsense/io_util.hpp"

namespace tempsense {

namespace {

void check_profile(const LoadProfile& profile) {
    if (profile.load_kw.empty() || profile.load_kw.size() != profile.outdoor_c.size()) {
        throw std::invalid_argument("load profile must be non-empty with aligned columns");
    }
}

CurvePoint evaluate(const PlantConfig& plant, const LoadProfile& profile, double t) {
    CurvePoint p;
    p.t_inlet_c = t;
    double total = 0.0;
    double pue_sum = 0.0;
    std::size_t econ = 0;
    const std::size_t n = profile.load_kw.size();
    for (std::size_t i = 0; i < n; ++i) {
        const PowerBreakdown b = building_power(t, profile.load_kw[i], profile.outdoor_c[i], plant);
        total += b.total_kw;
        pue_sum += b.pue;
        if (b.mode == CoolingMode::economizer) {
            ++econ;
        }
    }
    p.mean_total_kw = total / static_cast<double>(n);
    p.mean_pue = pue_sum / static_cast<double>(n);
    p.economizer_share = static_cast<double>(econ) / static_cast<double>(n);
    return p;
}

constexpr double kFeasibilityMargin = 1.0;  // degC below the hot-surface pole

// Golden-section search on [a, b]; returns the best evaluated point,
// including the bracket endpoints. Ties go to the lower temperature.
std::pair<double, double> golden_minimize(const PlantConfig& plant, const LoadProfile& profile,
                                          double a, double b, double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto f = [&](double t) { return mean_total_power(plant, profile, t); };

    double best_t = a;
    double best_v = f(a);
    auto consider = [&](double t, double v) {
        if (v < best_v || (v == best_v && t < best_t)) {
            best_v = v;
            best_t = t;
        }
    };
    consider(b, f(b));

    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    consider(c, fc);
    consider(d, fd);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
            consider(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
            consider(d, fd);
        }
    }
    return {best_t, best_v};
}

}  // namespace

LoadProfile reference_year_profile(double base_compute_kw, const LoadShape& shape,
                                   const OutdoorModel& outdoor) {
    if (base_compute_kw < 0.0) {
        throw std::invalid_argument("reference_year_profile: negative base load");
    }
    // 2024-01-01 is a Monday; a noise-free shape keeps the profile reproducible.
    const TimePoint start = *parse_iso8601("2024-01-01T00:00:00Z");
    LoadProfile p;
    p.load_kw.reserve(8760);
    p.outdoor_c.reserve(8760);
    LoadShape deterministic = shape;
    deterministic.noise_sigma = 0.0;
    for (int h = 0; h < 8760; ++h) {
        const TimePoint t = start + Seconds{3600} * h;
        p.load_kw.push_back(base_compute_kw * load_shape_factor(deterministic, t, start));
        p.outdoor_c.push_back(outdoor_temperature_at(outdoor, t));
    }
    return p;
}

double mean_total_power(const PlantConfig& plant, const LoadProfile& profile, double t_inlet_c) {
    check_profile(profile);
    double total = 0.0;
    for (std::size_t i = 0; i < profile.load_kw.size(); ++i) {
        total += building_power(t_inlet_c, profile.load_kw[i], profile.outdoor_c[i], plant).total_kw;
    }
    return total / static_cast<double>(profile.load_kw.size());
}

std::vector<CurvePoint> sweep_temperature(const PlantConfig& plant, const LoadProfile& profile,
                                          double t_min, double t_max, double step) {
    check_profile(profile);
    if (!(t_min < t_max) || !(step > 0.0)) {
        throw std::invalid_argument("sweep_temperature: need t_min < t_max and step > 0");
    }
    const double bound = plant.fan.hot_surface_temp_c - kFeasibilityMargin;
    t_max = std::min(t_max, bound);
    if (!(t_min < t_max)) {
        throw DataError("sweep_temperature: range is entirely infeasible");
    }

    std::vector<CurvePoint> curve;
    const auto n_steps = static_cast<std::size_t>(std::floor((t_max - t_min) / step + 1e-9));
    for (std::size_t k = 0; k <= n_steps; ++k) {
        curve.push_back(evaluate(plant, profile, t_min + static_cast<double>(k) * step));
    }
    if (curve.back().t_inlet_c < t_max - 1e-9) {
        curve.push_back(evaluate(plant, profile, t_max));
    }
    return curve;
}

SweetSpotResult find_sweet_spot(const PlantConfig& plant, const LoadProfile& profile, double t_min,
                                double t_max, double tolerance_c) {
    check_profile(profile);
    if (!(tolerance_c > 0.0)) {
        throw std::invalid_argument("find_sweet_spot: tolerance must be positive");
    }
    const double bound = plant.fan.hot_surface_temp_c - kFeasibilityMargin;
    SweetSpotResult res;
    res.t_min = t_min;
    res.t_max = std::min(t_max, bound);
    res.tolerance_c = tolerance_c;
    res.truncated = t_max > bound;
    if (!(t_min < res.t_max)) {
        throw DataError("find_sweet_spot: range is entirely infeasible");
    }

    const double span = res.t_max - t_min;
    const double coarse = std::max(std::min(0.25, span / 8.0), tolerance_c / 4.0);
    res.curve = sweep_temperature(plant, profile, t_min, res.t_max, coarse);
    const std::size_t m = res.curve.size();

    // Refine every coarse local minimum (including the endpoints).
    struct Minimum {
        double t, value;
    };
    std::vector<Minimum> minima;
    for (std::size_t i = 0; i < m; ++i) {
        const double v = res.curve[i].mean_total_kw;
        const bool left_ok = i == 0 || res.curve[i - 1].mean_total_kw >= v;
        const bool right_ok = i + 1 == m || res.curve[i + 1].mean_total_kw >= v;
        if (!left_ok || !right_ok) {
            continue;
        }
        const double a = i == 0 ? res.curve[0].t_inlet_c : res.curve[i - 1].t_inlet_c;
        const double b = i + 1 == m ? res.curve[m - 1].t_inlet_c : res.curve[i + 1].t_inlet_c;
        if (b - a <= tolerance_c) {
            minima.push_back({res.curve[i].t_inlet_c, v});
        } else {
            auto [t, value] = golden_minimize(plant, profile, a, b, tolerance_c);
            minima.push_back({t, value});
        }
    }

    std::sort(minima.begin(), minima.end(), [](const Minimum& a, const Minimum& b) {
        return std::tie(a.value, a.t) < std::tie(b.value, b.t);
    });
    const Minimum& best = minima.front();
    res.optimal_t_c = best.t;
    res.optimal_power_kw = best.value;
    for (std::size_t i = 1; i < minima.size(); ++i) {
        const double rel = std::abs(minima[i].value - best.value) /
                           std::max(1e-300, std::abs(best.value));
        if (rel <= 1e-9 && std::abs(minima[i].t - best.t) > tolerance_c) {
            res.plateau = true;
            res.optimal_t_c = std::min(res.optimal_t_c, minima[i].t);
        }
    }
    return res;
}

void write_curve_csv(const std::vector<CurvePoint>& curve, const std::filesystem::path& path) {
    std::string text = "t_inlet,mean_total_kw,mean_pue,economizer_share\n";
    for (const CurvePoint& p : curve) {
        text += format_double(p.t_inlet_c);
        text += ',';
        text += format_double(p.mean_total_kw);
        text += ',';
        text += format_double(p.mean_pue);
        text += ',';
        text += format_double(p.economizer_share);
        text += '\n';
    }
    atomic_write(path, text);
}

void write_sweet_spot_json(const SweetSpotResult& result, const std::filesystem::path& path) {
    nlohmann::json j;
    j["optimal_t_c"] = result.optimal_t_c;
    j["optimal_power_kw"] = result.optimal_power_kw;
    j["t_min"] = result.t_min;
    j["t_max"] = result.t_max;
    j["tolerance_c"] = result.tolerance_c;
    j["plateau"] = result.plateau;
    j["truncated"] = result.truncated;
    atomic_write(path, j.dump(2) + "\n");
}

}  // namespace tempsense
