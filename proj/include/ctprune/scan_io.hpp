#pragma once

#include "ctprune/image.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctprune {

/// Ordered slice stack of one CT scan. Immutable once built.
struct ScanVolume {
    std::string scan_id;
    std::vector<SliceImage> slices;
    std::vector<std::int64_t> slice_indices;

    std::size_t num_slices() const { return slices.size(); }
    std::size_t width() const { return slices.empty() ? 0 : slices.front().width; }
    std::size_t height() const { return slices.empty() ? 0 : slices.front().height; }
    std::uint16_t max_intensity() const { return slices.empty() ? 0 : slices.front().max_intensity; }
};

/// Throws Error(MixedDimensions / UnparsableIndex) when the volume
/// invariants do not hold.
void validate_volume(const ScanVolume& volume);

bool is_slice_file(const std::filesystem::path& path);

/// Trailing decimal integer of a filename stem ("s010" -> 10).
std::optional<std::int64_t> parse_slice_index(std::string_view stem);

SliceImage load_slice(const std::filesystem::path& path);
void save_slice(const std::filesystem::path& path, const SliceImage& slice);

/// Loads every .png/.pgm/.tif/.tiff file of a directory, ordered by the
/// numeric suffix of the stem. Other files are ignored.
ScanVolume load_scan(const std::filesystem::path& directory);

} // namespace ctprune
