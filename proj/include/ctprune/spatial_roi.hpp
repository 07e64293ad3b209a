#pragma once

#include "ctprune/image.hpp"
#include "ctprune/scan_io.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace ctprune {

struct SpatialConfig {
    /// Filter window is (2k+1) x (2k+1).
    std::size_t kernel_half_width = 2;
    /// Segmentation threshold as a fraction of max_intensity.
    double threshold = 0.1;
    std::size_t output_height = 256;
    std::size_t output_width = 256;

    void validate() const;
};

/// Uniform-weight mean over the (2k+1)^2 neighbourhood. Out-of-bounds
/// neighbours are dropped and the divisor shrinks with them.
FilteredImage low_pass_filter(const SliceImage& slice, std::size_t k);

/// bit = 1 iff value >= t * max_intensity.
SegmentationMask threshold_mask(const FilteredImage& filtered, double t);

/// Minimal box around the foreground. Throws Error(EmptyMask).
CropBox crop_box(const SegmentationMask& mask);

/// Filter then threshold with the given config.
SegmentationMask segment_slice(const SliceImage& slice, const SpatialConfig& cfg);

/// Union of the per-slice boxes; blank slices are skipped.
/// Throws Error(AllSlicesEmpty).
CropBox scan_crop_box(const ScanVolume& volume, const SpatialConfig& cfg);

/// Same reduction over precomputed masks.
CropBox union_crop_box(const std::vector<SegmentationMask>& masks);

SegmentationMask crop_mask(const SegmentationMask& mask, const CropBox& box);

/// Crops to `box`, then resamples to height x width bilinearly with
/// pixel-centre alignment; values are rounded half-up.
/// Throws Error(BoxOutOfBounds).
SliceImage apply_crop_and_resize(const SliceImage& slice, const CropBox& box, std::size_t height, std::size_t width);

} // namespace ctprune
