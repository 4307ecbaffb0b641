#pragma once

#include <filesystem>
#include <vector>

#include "tempsense/physics.hpp"
#include "tempsense/simulator.hpp"

namespace tempsense {

// Aligned (load, outdoor) samples, typically one per hour.
struct LoadProfile {
    std::vector<double> load_kw;
    std::vector<double> outdoor_c;
};

// Deterministic hourly year (8760 samples, noise-free) starting on a Monday,
// built from the simulator's load and outdoor shapes.
LoadProfile reference_year_profile(double base_compute_kw, const LoadShape& shape,
                                   const OutdoorModel& outdoor);

// Profile-averaged building total at one inlet temperature (the optimization
// objective).
double mean_total_power(const PlantConfig& plant, const LoadProfile& profile, double t_inlet_c);

struct CurvePoint {
    double t_inlet_c = 0.0;
    double mean_total_kw = 0.0;
    double mean_pue = 1.0;
    double economizer_share = 0.0;  // fraction of profile samples in economizer mode
};

// Evaluates the profile average on a temperature grid. The upper bound is
// truncated below the fan model's hot-surface temperature if needed.
std::vector<CurvePoint> sweep_temperature(const PlantConfig& plant, const LoadProfile& profile,
                                          double t_min, double t_max, double step);

struct SweetSpotResult {
    double optimal_t_c = 0.0;
    double optimal_power_kw = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    double tolerance_c = 0.0;
    bool plateau = false;    // several minima of equal value; lowest temperature reported
    bool truncated = false;  // t_max was clipped to the feasibility bound
    std::vector<CurvePoint> curve;
};

// Coarse sweep over [t_min, t_max], then golden-section refinement of every
// bracketed local minimum; ties break to the lowest temperature.
SweetSpotResult find_sweet_spot(const PlantConfig& plant, const LoadProfile& profile, double t_min,
                                double t_max, double tolerance_c);

// t_inlet,mean_total_kw,mean_pue,economizer_share
void write_curve_csv(const std::vector<CurvePoint>& curve, const std::filesystem::path& path);
void write_sweet_spot_json(const SweetSpotResult& result, const std::filesystem::path& path);

}  // namespace tempsense
