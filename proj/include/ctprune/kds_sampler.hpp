#pragma once

#include "ctprune/slice_roi.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctprune {

enum class Strategy { kds, random, systematic };

std::string_view to_string(Strategy strategy) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

/// Weighted Gaussian KDE evaluated on an evenly spaced grid.
struct DensityModel {
    std::vector<double> grid;
    std::vector<double> density;
    std::vector<double> cdf;
    double bandwidth = 1.0;

    double lo() const { return grid.front(); }
    double hi() const { return grid.back(); }
    double step() const { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }

    /// Linear interpolation of the density; 0 outside the grid.
    double density_at(double x) const;
};

/// One sub-interval [lo, hi) of the sampling range and the index it
/// contributed. `stolen` marks intervals that held no free index and took
/// the nearest one instead.
struct Stratum {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t index = 0;
    bool stolen = false;
};

struct SampleSet {
    std::string scan_id;
    SelectionWindow window;
    std::vector<std::size_t> indices;
    std::vector<Stratum> strata;
    Strategy strategy = Strategy::kds;
    std::uint64_t seed = 0;
};

struct KdsConfig {
    std::size_t num_samples = 16;
    std::size_t grid_size = 100;

    void validate() const;
};

/// Scott's rule for weighted data: sigma_w * n_eff^(-1/5) with
/// n_eff = (sum w)^2 / sum w^2. Falls back to 1.0 when the weighted spread
/// is zero. Throws Error(NoData / AllZeroWeights).
double scott_bandwidth(std::span<const double> positions, std::span<const double> weights);

/// Gaussian KDE on grid_size points over [lo, hi], renormalised so the
/// trapezoidal integral is 1; cdf is the cumulative trapezoid scaled to end
/// at 1.
DensityModel estimate_density(std::span<const double> positions, std::span<const double> weights, double bandwidth,
                              std::size_t grid_size, double lo, double hi);

/// Grid over [min position, max position]; a zero-width range is widened
/// by half a unit on each side.
DensityModel estimate_density(std::span<const double> positions, std::span<const double> weights, double bandwidth,
                              std::size_t grid_size);

/// Position where the grid CDF reaches p, by linear interpolation.
/// Throws Error(InvalidProbability).
double percentile(const DensityModel& model, double p);

/// Density model of the window with per-slice areas as weights (uniform
/// when the window holds no area).
DensityModel window_density(const AreaProfile& profile, const SelectionWindow& window, std::size_t grid_size);

/// Cuts the window at the density's j/m percentiles and draws one index per
/// sub-interval with probability proportional to the density.
SampleSet kds_sample(const AreaProfile& profile, const SelectionWindow& window, const KdsConfig& cfg,
                     std::uint64_t seed);

/// Uniform sample without replacement.
SampleSet random_sample(const SelectionWindow& window, std::size_t m, std::uint64_t seed);

/// One uniform draw per equal-count sub-interval.
SampleSet systematic_sample(const SelectionWindow& window, std::size_t m, std::uint64_t seed);

/// Dispatch on `strategy`; sets scan_id from the profile.
SampleSet sample_slices(Strategy strategy, const AreaProfile& profile, const SelectionWindow& window,
                        const KdsConfig& cfg, std::uint64_t seed);

} // namespace ctprune
