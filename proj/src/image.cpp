#include "ctprune/image.hpp"

#include <algorithm>

namespace ctprune {

bool SliceImage::valid() const
{
    if (pixels.size() != width * height) {
        return false;
    }
    return std::all_of(pixels.begin(), pixels.end(), [this](std::uint16_t v) { return v <= max_intensity; });
}

std::size_t SegmentationMask::count() const
{
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

CropBox CropBox::merged(const CropBox& other) const
{
    return CropBox{std::min(x_min, other.x_min), std::max(x_max, other.x_max), std::min(y_min, other.y_min),
                   std::max(y_max, other.y_max)};
}

} // namespace ctprune
