#include "ctprune/slice_roi.hpp"

#include "ctprune/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctprune {

std::uint64_t AreaProfile::total() const
{
    return std::accumulate(areas.begin(), areas.end(), std::uint64_t{0});
}

void SliceConfig::validate() const
{
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "slice.window_fraction must be in (0, 1]");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "slice.alpha must be in (0, 1]");
    }
}

std::size_t SliceConfig::window_length(std::size_t num_slices) const
{
    // The epsilon keeps 0.3 * 10 from rounding up to 4.
    const double raw = std::ceil(window_fraction * static_cast<double>(num_slices) - 1e-9);
    const auto length = static_cast<std::size_t>(std::max(raw, 1.0));
    return std::min(length, std::max<std::size_t>(num_slices, 1));
}

SegmentationMask fill_holes(const SegmentationMask& mask)
{
    const std::size_t w = mask.width;
    const std::size_t h = mask.height;
    if (w == 0 || h == 0) {
        return mask;
    }
    // 0 = unvisited background, 1 = foreground, 2 = background reached from the border.
    std::vector<std::uint8_t> state(mask.bits);
    std::vector<std::size_t> stack;
    auto seed = [&](std::size_t i, std::size_t j) {
        const std::size_t p = i * w + j;
        if (state[p] == 0) {
            state[p] = 2;
            stack.push_back(p);
        }
    };
    for (std::size_t j = 0; j < w; ++j) {
        seed(0, j);
        seed(h - 1, j);
    }
    for (std::size_t i = 0; i < h; ++i) {
        seed(i, 0);
        seed(i, w - 1);
    }
    while (!stack.empty()) {
        const std::size_t p = stack.back();
        stack.pop_back();
        const std::size_t i = p / w;
        const std::size_t j = p % w;
        if (i > 0) seed(i - 1, j);
        if (i + 1 < h) seed(i + 1, j);
        if (j > 0) seed(i, j - 1);
        if (j + 1 < w) seed(i, j + 1);
    }

    SegmentationMask filled(w, h);
    for (std::size_t p = 0; p < state.size(); ++p) {
        filled.bits[p] = state[p] == 2 ? 0 : 1;
    }
    return filled;
}

std::uint64_t lung_area(const SegmentationMask& mask)
{
    if (mask.bits.empty()) {
        return 0;
    }
    const SegmentationMask filled = fill_holes(mask);
    std::uint64_t area = 0;
    for (std::size_t p = 0; p < mask.bits.size(); ++p) {
        area += (filled.bits[p] == 1 && mask.bits[p] == 0) ? 1 : 0;
    }
    return area;
}

AreaProfile area_profile(const std::string& scan_id, const std::vector<SegmentationMask>& masks, const CropBox& box)
{
    AreaProfile profile{scan_id, {}};
    profile.areas.reserve(masks.size());
    for (const auto& m : masks) {
        // A blank slice has no cavity, so its cropped area is 0 as well.
        profile.areas.push_back(lung_area(crop_mask(m, box)));
    }
    return profile;
}

AreaProfile area_profile(const ScanVolume& volume, const SpatialConfig& cfg)
{
    std::vector<SegmentationMask> masks;
    masks.reserve(volume.slices.size());
    for (const auto& s : volume.slices) {
        masks.push_back(segment_slice(s, cfg));
    }
    CropBox box;
    try {
        box = union_crop_box(masks);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::AllSlicesEmpty) {
            throw Error(ErrorCode::AllSlicesEmpty, "scan '" + volume.scan_id + "' has no foreground in any slice");
        }
        throw;
    }
    return area_profile(volume.scan_id, masks, box);
}

SelectionWindow select_window(const AreaProfile& profile, const SliceConfig& cfg)
{
    const std::size_t n = profile.areas.size();
    if (n == 0) {
        throw Error(ErrorCode::EmptyProfile, "area profile of '" + profile.scan_id + "' is empty");
    }
    const std::size_t length = cfg.window_length(n);

    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < length; ++i) {
        sum += profile.areas[i];
    }
    std::uint64_t best = sum;
    std::size_t best_start = 0;
    for (std::size_t start = 1; start + length <= n; ++start) {
        sum += profile.areas[start + length - 1];
        sum -= profile.areas[start - 1];
        if (sum > best) {
            best = sum;
            best_start = start;
        }
    }

    SelectionWindow window;
    window.s = best_start;
    window.e = best_start + length - 1;
    window.area_sum = best;
    const std::uint64_t total = profile.total();
    window.area_fraction = total > 0 ? static_cast<double>(best) / static_cast<double>(total) : 0.0;
    window.alpha_satisfied = total > 0 && window.area_fraction >= cfg.alpha;
    return window;
}

} // namespace ctprune
