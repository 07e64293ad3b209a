#include "ctprune/kds_sampler.hpp"

#include "ctprune/error.hpp"
#include "ctprune/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

namespace ctprune {

std::string_view to_string(Strategy strategy) noexcept
{
    switch (strategy) {
    case Strategy::kds: return "kds";
    case Strategy::random: return "random";
    case Strategy::systematic: return "systematic";
    }
    return "kds";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept
{
    if (name == "kds") return Strategy::kds;
    if (name == "random") return Strategy::random;
    if (name == "systematic") return Strategy::systematic;
    return std::nullopt;
}

void KdsConfig::validate() const
{
    if (num_samples < 1) {
        throw Error(ErrorCode::InvalidConfig, "kds.num_samples must be at least 1");
    }
    if (grid_size < 2) {
        throw Error(ErrorCode::InvalidConfig, "kds.grid_size must be at least 2");
    }
}

double DensityModel::density_at(double x) const
{
    if (grid.empty() || x < grid.front() || x > grid.back()) {
        return 0.0;
    }
    const double h = step();
    if (h <= 0.0) {
        return density.front();
    }
    const double u = (x - grid.front()) / h;
    const auto k = std::min(static_cast<std::size_t>(u), grid.size() - 2);
    const double t = std::clamp(u - static_cast<double>(k), 0.0, 1.0);
    return density[k] * (1.0 - t) + density[k + 1] * t;
}

namespace {

// w_i / sum(w). For integer-valued weights the result does not change when
// every weight is multiplied by the same integer.
std::vector<double> normalized_weights(std::span<const double> positions, std::span<const double> weights)
{
    if (positions.empty()) {
        throw Error(ErrorCode::NoData, "no positions");
    }
    if (positions.size() != weights.size()) {
        throw Error(ErrorCode::NoData, "positions and weights differ in length");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(ErrorCode::NoData, "weights must be finite and non-negative");
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw Error(ErrorCode::AllZeroWeights, "all weights are zero");
    }
    std::vector<double> p(weights.size());
    std::transform(weights.begin(), weights.end(), p.begin(), [total](double w) { return w / total; });
    return p;
}

void check_window(const SelectionWindow& window)
{
    if (window.s > window.e) {
        throw Error(ErrorCode::EmptyWindow, "window start exceeds window end");
    }
}

// Assigns each integer in [first, last] to the sub-interval delimited by
// `cuts` (cuts.front() and cuts.back() are the range ends), draws one index
// per non-empty interval with probability proportional to `weight`, then
// lets every empty interval take the free index nearest to its midpoint.
void draw_strata(SampleSet& out, std::span<const double> cuts, std::size_t first, std::size_t last,
                 const std::function<double(std::size_t)>& weight, Rng& rng)
{
    const std::size_t strata = cuts.size() - 1;
    std::vector<std::vector<std::size_t>> members(strata);
    for (std::size_t i = first; i <= last; ++i) {
        const auto x = static_cast<double>(i);
        const auto interior_begin = cuts.begin() + 1;
        const auto interior_end = cuts.end() - 1;
        const auto j = static_cast<std::size_t>(std::upper_bound(interior_begin, interior_end, x) - interior_begin);
        members[j].push_back(i);
    }

    std::vector<bool> claimed(last - first + 1, false);
    out.strata.assign(strata, Stratum{});
    std::vector<std::size_t> empty;
    for (std::size_t j = 0; j < strata; ++j) {
        out.strata[j].lo = cuts[j];
        out.strata[j].hi = cuts[j + 1];
        const auto& cand = members[j];
        if (cand.empty()) {
            empty.push_back(j);
            continue;
        }
        std::vector<double> w(cand.size());
        double total = 0.0;
        for (std::size_t c = 0; c < cand.size(); ++c) {
            w[c] = std::max(0.0, weight(cand[c]));
            total += w[c];
        }
        std::size_t pick = cand.size() - 1;
        if (total > 0.0) {
            const double u = rng.uniform01() * total;
            double acc = 0.0;
            for (std::size_t c = 0; c < cand.size(); ++c) {
                acc += w[c];
                if (u < acc) {
                    pick = c;
                    break;
                }
            }
        } else {
            pick = static_cast<std::size_t>(rng.uniform_below(cand.size()));
        }
        out.strata[j].index = cand[pick];
        claimed[cand[pick] - first] = true;
    }

    for (std::size_t j : empty) {
        const double mid = (cuts[j] + cuts[j + 1]) / 2.0;
        std::size_t best = last + 1;
        double best_dist = 0.0;
        for (std::size_t i = first; i <= last; ++i) {
            if (claimed[i - first]) {
                continue;
            }
            const double d = std::abs(static_cast<double>(i) - mid);
            if (best > last || d < best_dist) {
                best = i;
                best_dist = d;
            }
        }
        // Callers never ask for more strata than indices, so a free index exists.
        out.strata[j].index = best;
        out.strata[j].stolen = true;
        claimed[best - first] = true;
    }

    out.indices.clear();
    for (const auto& st : out.strata) {
        out.indices.push_back(st.index);
    }
    std::sort(out.indices.begin(), out.indices.end());
}

SampleSet take_all(const SelectionWindow& window, Strategy strategy, std::uint64_t seed)
{
    SampleSet out;
    out.window = window;
    out.strategy = strategy;
    out.seed = seed;
    for (std::size_t i = window.s; i <= window.e; ++i) {
        out.indices.push_back(i);
        out.strata.push_back(Stratum{static_cast<double>(i), static_cast<double>(i + 1), i, false});
    }
    return out;
}

} // namespace

double scott_bandwidth(std::span<const double> positions, std::span<const double> weights)
{
    const std::vector<double> p = normalized_weights(positions, weights);
    double mean = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        mean += p[i] * positions[i];
        sum_sq += p[i] * p[i];
    }
    double var = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = positions[i] - mean;
        var += p[i] * d * d;
    }
    const double sigma = std::sqrt(var);
    if (!(sigma > 1e-12 * std::max(1.0, std::abs(mean)))) {
        return 1.0;
    }
    const double n_eff = 1.0 / sum_sq;
    return sigma * std::pow(n_eff, -0.2);
}

DensityModel estimate_density(std::span<const double> positions, std::span<const double> weights, double bandwidth,
                              std::size_t grid_size, double lo, double hi)
{
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw Error(ErrorCode::InvalidConfig, "bandwidth must be positive");
    }
    if (grid_size < 2) {
        throw Error(ErrorCode::InvalidConfig, "grid_size must be at least 2");
    }
    if (!(lo < hi)) {
        throw Error(ErrorCode::InvalidConfig, "density grid needs lo < hi");
    }
    const std::vector<double> p = normalized_weights(positions, weights);

    DensityModel model;
    model.bandwidth = bandwidth;
    model.grid.resize(grid_size);
    model.density.assign(grid_size, 0.0);
    model.cdf.assign(grid_size, 0.0);

    const double span = hi - lo;
    const double last = static_cast<double>(grid_size - 1);
    for (std::size_t g = 0; g < grid_size; ++g) {
        model.grid[g] = lo + span * static_cast<double>(g) / last;
    }
    model.grid.back() = hi;

    const double inv_two_h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    const double norm = 1.0 / (bandwidth * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t g = 0; g < grid_size; ++g) {
        double f = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] == 0.0) {
                continue;
            }
            const double d = model.grid[g] - positions[i];
            f += p[i] * std::exp(-d * d * inv_two_h2);
        }
        model.density[g] = f * norm;
    }

    double integral = 0.0;
    for (std::size_t g = 1; g < grid_size; ++g) {
        integral += 0.5 * (model.density[g - 1] + model.density[g]) * (model.grid[g] - model.grid[g - 1]);
    }
    if (!(integral > 0.0)) {
        throw Error(ErrorCode::NoData, "density vanishes on the grid");
    }
    for (double& f : model.density) {
        f /= integral;
    }

    for (std::size_t g = 1; g < grid_size; ++g) {
        model.cdf[g] =
            model.cdf[g - 1] + 0.5 * (model.density[g - 1] + model.density[g]) * (model.grid[g] - model.grid[g - 1]);
    }
    const double end = model.cdf.back();
    for (double& c : model.cdf) {
        c /= end;
    }
    model.cdf.back() = 1.0;
    return model;
}

DensityModel estimate_density(std::span<const double> positions, std::span<const double> weights, double bandwidth,
                              std::size_t grid_size)
{
    if (positions.empty()) {
        throw Error(ErrorCode::NoData, "no positions");
    }
    const auto [min_it, max_it] = std::minmax_element(positions.begin(), positions.end());
    double lo = *min_it;
    double hi = *max_it;
    if (!(lo < hi)) {
        lo -= 0.5;
        hi += 0.5;
    }
    return estimate_density(positions, weights, bandwidth, grid_size, lo, hi);
}

double percentile(const DensityModel& model, double p)
{
    if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::InvalidProbability, "probability must be in [0, 1]");
    }
    if (model.grid.empty()) {
        throw Error(ErrorCode::NoData, "empty density model");
    }
    if (p == 0.0) {
        return model.grid.front();
    }
    if (p == 1.0) {
        return model.grid.back();
    }
    const auto it = std::lower_bound(model.cdf.begin(), model.cdf.end(), p);
    const auto k = static_cast<std::size_t>(it - model.cdf.begin());
    if (k == 0) {
        return model.grid.front();
    }
    if (k >= model.cdf.size()) {
        return model.grid.back();
    }
    const double c0 = model.cdf[k - 1];
    const double c1 = model.cdf[k];
    const double t = c1 > c0 ? (p - c0) / (c1 - c0) : 0.0;
    return model.grid[k - 1] + t * (model.grid[k] - model.grid[k - 1]);
}

DensityModel window_density(const AreaProfile& profile, const SelectionWindow& window, std::size_t grid_size)
{
    check_window(window);
    if (window.e >= profile.areas.size()) {
        throw Error(ErrorCode::EmptyWindow, "window exceeds the profile");
    }
    const std::size_t count = window.length();
    std::vector<double> positions(count);
    std::vector<double> weights(count);
    bool any = false;
    for (std::size_t c = 0; c < count; ++c) {
        positions[c] = static_cast<double>(window.s + c);
        weights[c] = static_cast<double>(profile.areas[window.s + c]);
        any = any || weights[c] > 0.0;
    }
    if (!any) {
        std::fill(weights.begin(), weights.end(), 1.0);
    }
    const double h = scott_bandwidth(positions, weights);
    if (count == 1) {
        return estimate_density(positions, weights, h, grid_size);
    }
    return estimate_density(positions, weights, h, grid_size, positions.front(), positions.back());
}

SampleSet kds_sample(const AreaProfile& profile, const SelectionWindow& window, const KdsConfig& cfg,
                     std::uint64_t seed)
{
    cfg.validate();
    check_window(window);
    if (window.e >= profile.areas.size()) {
        throw Error(ErrorCode::EmptyWindow, "window exceeds the profile");
    }
    const std::size_t count = window.length();
    const std::size_t m = std::min(cfg.num_samples, count);
    if (m == count) {
        SampleSet all = take_all(window, Strategy::kds, seed);
        all.scan_id = profile.scan_id;
        return all;
    }

    const DensityModel model = window_density(profile, window, cfg.grid_size);
    std::vector<double> cuts(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        cuts[j] = percentile(model, static_cast<double>(j) / static_cast<double>(m));
    }

    SampleSet out;
    out.scan_id = profile.scan_id;
    out.window = window;
    out.strategy = Strategy::kds;
    out.seed = seed;
    Rng rng(seed);
    draw_strata(out, cuts, window.s, window.e, [&model](std::size_t i) { return model.density_at(static_cast<double>(i)); },
                rng);
    return out;
}

SampleSet random_sample(const SelectionWindow& window, std::size_t m, std::uint64_t seed)
{
    check_window(window);
    if (m < 1) {
        throw Error(ErrorCode::InvalidConfig, "sample count must be at least 1");
    }
    const std::size_t count = window.length();
    const std::size_t take = std::min(m, count);

    SampleSet out;
    out.window = window;
    out.strategy = Strategy::random;
    out.seed = seed;
    std::vector<std::size_t> pool(count);
    std::iota(pool.begin(), pool.end(), window.s);
    Rng rng(seed);
    for (std::size_t k = 0; k < take; ++k) {
        const auto r = k + static_cast<std::size_t>(rng.uniform_below(count - k));
        std::swap(pool[k], pool[r]);
    }
    out.indices.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
    std::sort(out.indices.begin(), out.indices.end());
    return out;
}

SampleSet systematic_sample(const SelectionWindow& window, std::size_t m, std::uint64_t seed)
{
    check_window(window);
    if (m < 1) {
        throw Error(ErrorCode::InvalidConfig, "sample count must be at least 1");
    }
    const std::size_t count = window.length();
    const std::size_t strata = std::min(m, count);

    SampleSet out;
    out.window = window;
    out.strategy = Strategy::systematic;
    out.seed = seed;
    std::vector<double> cuts(strata + 1);
    for (std::size_t j = 0; j <= strata; ++j) {
        cuts[j] = static_cast<double>(window.s + j * count / strata);
    }
    Rng rng(seed);
    draw_strata(out, cuts, window.s, window.e, [](std::size_t) { return 1.0; }, rng);
    return out;
}

SampleSet sample_slices(Strategy strategy, const AreaProfile& profile, const SelectionWindow& window,
                        const KdsConfig& cfg, std::uint64_t seed)
{
    SampleSet out;
    switch (strategy) {
    case Strategy::kds: out = kds_sample(profile, window, cfg, seed); break;
    case Strategy::random: out = random_sample(window, cfg.num_samples, seed); break;
    case Strategy::systematic: out = systematic_sample(window, cfg.num_samples, seed); break;
    }
    out.scan_id = profile.scan_id;
    return out;
}

} // namespace ctprune
