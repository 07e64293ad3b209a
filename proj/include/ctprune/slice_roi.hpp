#pragma once

#include "ctprune/image.hpp"
#include "ctprune/scan_io.hpp"
#include "ctprune/spatial_roi.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ctprune {

/// Lung area per slice, in slice order.
struct AreaProfile {
    std::string scan_id;
    std::vector<std::uint64_t> areas;

    std::uint64_t total() const;
};

/// Contiguous slice range [s, e], inclusive, as positions in the profile.
struct SelectionWindow {
    std::size_t s = 0;
    std::size_t e = 0;
    std::uint64_t area_sum = 0;
    double area_fraction = 0.0;
    bool alpha_satisfied = false;

    std::size_t length() const { return e - s + 1; }

    friend bool operator==(const SelectionWindow&, const SelectionWindow&) = default;
};

struct SliceConfig {
    /// Fraction of the scan's slices kept by the window.
    double window_fraction = 0.5;
    /// Required share of the total lung area inside the window.
    double alpha = 0.7;

    void validate() const;

    /// Slice count of the window for a scan of `num_slices`:
    /// ceil(window_fraction * num_slices), at least 1 and at most num_slices.
    std::size_t window_length(std::size_t num_slices) const;

    /// Upper bound on e - s (the n_c of the window constraint).
    std::size_t max_span(std::size_t num_slices) const { return window_length(num_slices) - 1; }
};

/// Sets every background pixel that cannot reach the image border through
/// 4-connected background to 1.
SegmentationMask fill_holes(const SegmentationMask& mask);

/// Pixels that are 1 in fill_holes(mask) and 0 in mask.
std::uint64_t lung_area(const SegmentationMask& mask);

/// filter -> threshold -> crop to the scan box -> fill -> lung_area for every
/// slice. Blank slices get area 0. Throws Error(AllSlicesEmpty).
AreaProfile area_profile(const ScanVolume& volume, const SpatialConfig& cfg);

/// Same, from masks already segmented with the scan's config.
AreaProfile area_profile(const std::string& scan_id, const std::vector<SegmentationMask>& masks, const CropBox& box);

/// Max-area contiguous window of window_length() slices (a longer window
/// never loses area because areas are non-negative). Ties go to the
/// smallest s. Throws Error(EmptyProfile).
SelectionWindow select_window(const AreaProfile& profile, const SliceConfig& cfg);

} // namespace ctprune
