#pragma once

#include "ctprune/image.hpp"
#include "ctprune/scan_io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ctprune {

/// Parameters of a synthetic scan: a dark frame of `body_margin` pixels
/// around a bright circular body holding two dark circular lungs whose
/// combined area follows a Gaussian over the slice index.
struct SyntheticScanSpec {
    std::string scan_id = "synthetic";
    std::size_t num_slices = 32;
    std::size_t image_size = 128;
    std::size_t body_margin = 16;
    /// Peak combined lung area in pixels.
    double lung_area_peak = 1200.0;
    /// Gaussian width of the lung-area curve, in slices.
    double lung_area_curve = 6.0;
    /// Position of the curve peak as a fraction of the slice range.
    double lung_center = 0.5;
    std::uint16_t noise_amplitude = 0;
    std::uint64_t seed = 0;
    int bit_depth = 8;
    /// Body intensity as a fraction of max_intensity. 0.2 pairs with the
    /// default 0.1 segmentation threshold so the body edge sits at half
    /// of the filter window.
    double body_level = 0.2;
};

struct SyntheticGroundTruth {
    CropBox crop_box;
    std::vector<std::uint64_t> lung_areas;
};

struct SyntheticScan {
    ScanVolume volume;
    SyntheticGroundTruth truth;
};

/// Throws Error(InvalidSpec) when the spec cannot be rendered.
void validate_synthetic_spec(const SyntheticScanSpec& spec);

/// Deterministic for a fixed spec. Body and lung radii are chosen so that
/// the rendered shapes survive a box filter of half-width up to
/// kStableKernel followed by the 50% threshold unchanged, which makes the
/// ground truth reproducible exactly by the spatial and slice steps at
/// noise_amplitude 0.
SyntheticScan generate_synthetic_scan(const SyntheticScanSpec& spec);

inline constexpr std::size_t kStableKernel = 2;

} // namespace ctprune
