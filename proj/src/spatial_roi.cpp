#include "ctprune/spatial_roi.hpp"

#include "ctprune/error.hpp"

#include <algorithm>
#include <cmath>

namespace ctprune {

void SpatialConfig::validate() const
{
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "spatial.threshold must be in (0, 1)");
    }
    if (output_height == 0 || output_width == 0) {
        throw Error(ErrorCode::InvalidConfig, "spatial output size must be at least 1x1");
    }
}

FilteredImage low_pass_filter(const SliceImage& slice, std::size_t k)
{
    const std::size_t w = slice.width;
    const std::size_t h = slice.height;
    FilteredImage out{w, h, slice.max_intensity, std::vector<double>(w * h, 0.0)};
    if (w == 0 || h == 0) {
        return out;
    }

    // Summed-area table; sums of 16-bit pixels fit comfortably in 64 bits.
    std::vector<std::uint64_t> sat((w + 1) * (h + 1), 0);
    for (std::size_t i = 0; i < h; ++i) {
        std::uint64_t row = 0;
        for (std::size_t j = 0; j < w; ++j) {
            row += slice.at(i, j);
            sat[(i + 1) * (w + 1) + j + 1] = sat[i * (w + 1) + j + 1] + row;
        }
    }
    for (std::size_t i = 0; i < h; ++i) {
        const std::size_t i0 = i >= k ? i - k : 0;
        const std::size_t i1 = std::min(h - 1, i + k) + 1;
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t j0 = j >= k ? j - k : 0;
            const std::size_t j1 = std::min(w - 1, j + k) + 1;
            const std::uint64_t sum =
                sat[i1 * (w + 1) + j1] + sat[i0 * (w + 1) + j0] - sat[i0 * (w + 1) + j1] - sat[i1 * (w + 1) + j0];
            const std::uint64_t count = (i1 - i0) * (j1 - j0);
            out.values[i * w + j] = static_cast<double>(sum) / static_cast<double>(count);
        }
    }
    return out;
}

SegmentationMask threshold_mask(const FilteredImage& filtered, double t)
{
    const double level = t * static_cast<double>(filtered.max_intensity);
    SegmentationMask mask(filtered.width, filtered.height);
    for (std::size_t p = 0; p < filtered.values.size(); ++p) {
        mask.bits[p] = filtered.values[p] >= level ? 1 : 0;
    }
    return mask;
}

CropBox crop_box(const SegmentationMask& mask)
{
    bool any = false;
    CropBox box{mask.height, 0, mask.width, 0};
    for (std::size_t i = 0; i < mask.height; ++i) {
        for (std::size_t j = 0; j < mask.width; ++j) {
            if (mask.at(i, j)) {
                any = true;
                box.x_min = std::min(box.x_min, i);
                box.x_max = std::max(box.x_max, i);
                box.y_min = std::min(box.y_min, j);
                box.y_max = std::max(box.y_max, j);
            }
        }
    }
    if (!any) {
        throw Error(ErrorCode::EmptyMask, "mask has no foreground pixel");
    }
    return box;
}

SegmentationMask segment_slice(const SliceImage& slice, const SpatialConfig& cfg)
{
    return threshold_mask(low_pass_filter(slice, cfg.kernel_half_width), cfg.threshold);
}

CropBox union_crop_box(const std::vector<SegmentationMask>& masks)
{
    std::optional<CropBox> box;
    for (const auto& m : masks) {
        try {
            const CropBox b = crop_box(m);
            box = box ? box->merged(b) : b;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyMask) {
                throw;
            }
        }
    }
    if (!box) {
        throw Error(ErrorCode::AllSlicesEmpty, "no slice has a foreground pixel");
    }
    return *box;
}

CropBox scan_crop_box(const ScanVolume& volume, const SpatialConfig& cfg)
{
    std::vector<SegmentationMask> masks;
    masks.reserve(volume.slices.size());
    for (const auto& s : volume.slices) {
        masks.push_back(segment_slice(s, cfg));
    }
    try {
        return union_crop_box(masks);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::AllSlicesEmpty) {
            throw Error(ErrorCode::AllSlicesEmpty, "scan '" + volume.scan_id + "' has no foreground in any slice");
        }
        throw;
    }
}

SegmentationMask crop_mask(const SegmentationMask& mask, const CropBox& box)
{
    if (!box.fits(mask.width, mask.height)) {
        throw Error(ErrorCode::BoxOutOfBounds, "crop box exceeds mask bounds");
    }
    SegmentationMask out(box.cols(), box.rows());
    for (std::size_t i = 0; i < out.height; ++i) {
        const auto* src = mask.bits.data() + (box.x_min + i) * mask.width + box.y_min;
        std::copy(src, src + out.width, out.bits.begin() + static_cast<std::ptrdiff_t>(i * out.width));
    }
    return out;
}

SliceImage apply_crop_and_resize(const SliceImage& slice, const CropBox& box, std::size_t height, std::size_t width)
{
    if (!box.fits(slice.width, slice.height)) {
        throw Error(ErrorCode::BoxOutOfBounds, "crop box exceeds slice bounds");
    }
    if (height == 0 || width == 0) {
        throw Error(ErrorCode::InvalidConfig, "output size must be at least 1x1");
    }
    const std::size_t rows = box.rows();
    const std::size_t cols = box.cols();
    const double sy = static_cast<double>(rows) / static_cast<double>(height);
    const double sx = static_cast<double>(cols) / static_cast<double>(width);

    auto src = [&](std::size_t r, std::size_t c) -> double { return slice.at(box.x_min + r, box.y_min + c); };

    SliceImage out(width, height, slice.max_intensity);
    for (std::size_t i = 0; i < height; ++i) {
        const double fy = std::clamp((static_cast<double>(i) + 0.5) * sy - 0.5, 0.0, static_cast<double>(rows - 1));
        const auto r0 = static_cast<std::size_t>(std::floor(fy));
        const std::size_t r1 = std::min(r0 + 1, rows - 1);
        const double wy = fy - static_cast<double>(r0);
        for (std::size_t j = 0; j < width; ++j) {
            const double fx = std::clamp((static_cast<double>(j) + 0.5) * sx - 0.5, 0.0, static_cast<double>(cols - 1));
            const auto c0 = static_cast<std::size_t>(std::floor(fx));
            const std::size_t c1 = std::min(c0 + 1, cols - 1);
            const double wx = fx - static_cast<double>(c0);
            const double top = src(r0, c0) * (1.0 - wx) + src(r0, c1) * wx;
            const double bottom = src(r1, c0) * (1.0 - wx) + src(r1, c1) * wx;
            const double v = top * (1.0 - wy) + bottom * wy;
            const double rounded = std::floor(v + 0.5);
            out.at(i, j) = static_cast<std::uint16_t>(std::clamp(rounded, 0.0, static_cast<double>(slice.max_intensity)));
        }
    }
    return out;
}

} // namespace ctprune
