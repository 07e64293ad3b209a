#include "ctprune/synthetic.hpp"

#include "ctprune/error.hpp"
#include "ctprune/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctprune {

namespace {

struct Disk {
    double ci;
    double cj;
    double radius;

    bool contains(std::size_t i, std::size_t j) const
    {
        const double di = static_cast<double>(i) - ci;
        const double dj = static_cast<double>(j) - cj;
        return di * di + dj * dj <= radius * radius;
    }
};

// Shape of one slice at noise 0: 1 = body tissue, 0 = air or lung.
SegmentationMask render(std::size_t n, const Disk& body, const std::vector<Disk>& holes)
{
    SegmentationMask m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!body.contains(i, j)) {
                continue;
            }
            const bool in_hole = std::any_of(holes.begin(), holes.end(), [&](const Disk& d) { return d.contains(i, j); });
            m.at(i, j) = in_hole ? 0 : 1;
        }
    }
    return m;
}

// True when every pixel keeps its value under "mean of the clipped
// (2k+1)^2 window is at least half". Plain integer counting, independent
// of the floating-point filter in spatial_roi.
bool stable_under_majority(const SegmentationMask& m, std::size_t k)
{
    const std::size_t w = m.width;
    const std::size_t h = m.height;
    std::vector<std::uint32_t> sat((w + 1) * (h + 1), 0);
    for (std::size_t i = 0; i < h; ++i) {
        std::uint32_t row = 0;
        for (std::size_t j = 0; j < w; ++j) {
            row += m.at(i, j);
            sat[(i + 1) * (w + 1) + j + 1] = sat[i * (w + 1) + j + 1] + row;
        }
    }
    for (std::size_t i = 0; i < h; ++i) {
        const std::size_t i0 = i >= k ? i - k : 0;
        const std::size_t i1 = std::min(h - 1, i + k) + 1;
        for (std::size_t j = 0; j < w; ++j) {
            const std::size_t j0 = j >= k ? j - k : 0;
            const std::size_t j1 = std::min(w - 1, j + k) + 1;
            const std::uint32_t count =
                sat[i1 * (w + 1) + j1] + sat[i0 * (w + 1) + j0] - sat[i0 * (w + 1) + j1] - sat[i1 * (w + 1) + j0];
            const auto total = static_cast<std::uint32_t>((i1 - i0) * (j1 - j0));
            const std::uint8_t expect = 2 * count >= total ? 1 : 0;
            if (expect != m.at(i, j)) {
                return false;
            }
        }
    }
    return true;
}

bool stable(const SegmentationMask& m)
{
    for (std::size_t k = 1; k <= kStableKernel; ++k) {
        if (!stable_under_majority(m, k)) {
            return false;
        }
    }
    return true;
}

struct LungSize {
    double radius;
    std::uint64_t pixels; // per lung
};

std::uint64_t disk_pixels(const Disk& d, std::size_t n)
{
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            count += d.contains(i, j) ? 1 : 0;
        }
    }
    return count;
}

} // namespace

void validate_synthetic_spec(const SyntheticScanSpec& spec)
{
    auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidSpec, why); };
    if (spec.num_slices == 0) {
        fail("num_slices must be at least 1");
    }
    if (spec.image_size < 16) {
        fail("image_size must be at least 16");
    }
    if (spec.body_margin * 2 >= spec.image_size) {
        fail("body_margin * 2 must be smaller than image_size");
    }
    if (spec.body_margin < 2 * kStableKernel) {
        fail("body_margin must be at least " + std::to_string(2 * kStableKernel));
    }
    if (spec.image_size - 2 * spec.body_margin < 8) {
        fail("body region is too small");
    }
    if (spec.bit_depth != 8 && spec.bit_depth != 16) {
        fail("bit_depth must be 8 or 16");
    }
    if (!(spec.body_level > 0.0 && spec.body_level <= 1.0)) {
        fail("body_level must be in (0, 1]");
    }
    if (!(spec.lung_area_peak >= 0.0) || !std::isfinite(spec.lung_area_peak)) {
        fail("lung_area_peak must be non-negative");
    }
    if (!(spec.lung_area_curve > 0.0) || !std::isfinite(spec.lung_area_curve)) {
        fail("lung_area_curve must be positive");
    }
    if (!(spec.lung_center >= 0.0 && spec.lung_center <= 1.0)) {
        fail("lung_center must be in [0, 1]");
    }
    const std::uint32_t max_value = spec.bit_depth == 8 ? 255u : 65535u;
    if (spec.noise_amplitude > max_value) {
        fail("noise_amplitude exceeds the intensity range");
    }
}

SyntheticScan generate_synthetic_scan(const SyntheticScanSpec& spec)
{
    validate_synthetic_spec(spec);

    const std::size_t n = spec.image_size;
    const auto max_value = static_cast<std::uint16_t>(spec.bit_depth == 8 ? 255 : 65535);
    const auto body_value = static_cast<std::uint16_t>(std::lround(spec.body_level * max_value));
    const double center = (static_cast<double>(n) - 1.0) / 2.0;
    const double half_span = center - static_cast<double>(spec.body_margin);

    // Radii in [half_span + 0.5, half_span + 1) touch rows/columns margin
    // and n-1-margin exactly; take the first one that is filter-stable.
    Disk body{center, center, 0.0};
    bool found = false;
    for (int step = 0; step < 10 && !found; ++step) {
        body.radius = half_span + 0.5 + 0.05 * step;
        found = stable(render(n, body, {}));
    }
    if (!found) {
        throw Error(ErrorCode::InvalidSpec, "no filter-stable body radius for image_size " + std::to_string(n) +
                                                " and body_margin " + std::to_string(spec.body_margin));
    }

    // Lungs sit left and right of the centre on integer pixel centres, kept
    // far enough from the body edge and from each other that no filter
    // window sees two boundaries.
    const double lung_row = std::floor(center);
    const double offset = half_span / 2.0;
    const double left_col = std::floor(center - offset + 0.5);
    const double right_col = std::floor(center + offset + 0.5);
    const double gap = 4.0 * kStableKernel;
    const double center_dist = std::hypot(lung_row - center, std::max(center - left_col, right_col - center));
    const double max_radius = std::min(body.radius - center_dist - gap, (right_col - left_col - gap) / 2.0);

    std::vector<LungSize> sizes;
    for (double radius = 2.0; radius <= max_radius; radius += 0.25) {
        const Disk left{lung_row, left_col, radius};
        const Disk right{lung_row, right_col, radius};
        const std::uint64_t pixels = disk_pixels(left, n);
        if (!sizes.empty() && sizes.back().pixels == pixels) {
            continue;
        }
        if (stable(render(n, body, {left, right}))) {
            sizes.push_back({radius, pixels});
        }
    }
    if (spec.lung_area_peak > 0.0 && (sizes.empty() || spec.lung_area_peak / 2.0 > static_cast<double>(sizes.back().pixels))) {
        const double limit = sizes.empty() ? 0.0 : 2.0 * static_cast<double>(sizes.back().pixels);
        throw Error(ErrorCode::InvalidSpec, "lung_area_peak " + std::to_string(spec.lung_area_peak) +
                                                " does not fit inside the body (limit " + std::to_string(limit) + ")");
    }

    SyntheticScan out;
    out.volume.scan_id = spec.scan_id;
    out.truth.lung_areas.reserve(spec.num_slices);

    Rng rng(spec.seed);
    const double mu = spec.lung_center * (static_cast<double>(spec.num_slices) - 1.0);
    const double sigma = spec.lung_area_curve;
    for (std::size_t s = 0; s < spec.num_slices; ++s) {
        const double x = static_cast<double>(s) - mu;
        const double target = spec.lung_area_peak * std::exp(-x * x / (2.0 * sigma * sigma)) / 2.0;

        std::vector<Disk> holes;
        std::uint64_t area = 0;
        if (!sizes.empty() && target >= static_cast<double>(sizes.front().pixels) / 2.0) {
            const auto best = std::min_element(sizes.begin(), sizes.end(), [target](const LungSize& a, const LungSize& b) {
                return std::abs(static_cast<double>(a.pixels) - target) < std::abs(static_cast<double>(b.pixels) - target);
            });
            holes = {Disk{lung_row, left_col, best->radius}, Disk{lung_row, right_col, best->radius}};
            area = 2 * best->pixels;
        }

        const SegmentationMask shape = render(n, body, holes);
        SliceImage slice(n, n, max_value);
        for (std::size_t p = 0; p < shape.bits.size(); ++p) {
            std::int64_t v = shape.bits[p] ? body_value : 0;
            if (spec.noise_amplitude > 0) {
                v += rng.uniform_int(-static_cast<std::int64_t>(spec.noise_amplitude), spec.noise_amplitude);
            }
            slice.pixels[p] = static_cast<std::uint16_t>(std::clamp<std::int64_t>(v, 0, max_value));
        }
        out.volume.slices.push_back(std::move(slice));
        out.volume.slice_indices.push_back(static_cast<std::int64_t>(s) + 1);
        out.truth.lung_areas.push_back(area);
    }

    const SegmentationMask body_only = render(n, body, {});
    CropBox box{n, 0, n, 0};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (body_only.at(i, j)) {
                box = box.merged(CropBox{i, i, j, j});
            }
        }
    }
    out.truth.crop_box = box;
    return out;
}

} // namespace ctprune
