#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ctprune {

/// Grayscale raster, row-major. Pixel (i, j) is row i, column j.
struct SliceImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint16_t max_intensity = 255;
    std::vector<std::uint16_t> pixels;

    SliceImage() = default;
    SliceImage(std::size_t w, std::size_t h, std::uint16_t max_value, std::uint16_t fill = 0)
        : width(w), height(h), max_intensity(max_value), pixels(w * h, fill)
    {
    }

    std::uint16_t at(std::size_t i, std::size_t j) const { return pixels[i * width + j]; }
    std::uint16_t& at(std::size_t i, std::size_t j) { return pixels[i * width + j]; }

    /// Checks the size and range invariants.
    bool valid() const;

    friend bool operator==(const SliceImage&, const SliceImage&) = default;
};

/// Low-pass filter output. Kept in floating point so the threshold sees
/// the exact neighbourhood mean.
struct FilteredImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::uint16_t max_intensity = 255;
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const { return values[i * width + j]; }
};

struct SegmentationMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> bits;

    SegmentationMask() = default;
    SegmentationMask(std::size_t w, std::size_t h, std::uint8_t fill = 0)
        : width(w), height(h), bits(w * h, fill)
    {
    }

    std::uint8_t at(std::size_t i, std::size_t j) const { return bits[i * width + j]; }
    std::uint8_t& at(std::size_t i, std::size_t j) { return bits[i * width + j]; }

    std::size_t count() const;

    friend bool operator==(const SegmentationMask&, const SegmentationMask&) = default;
};

/// Inclusive bounds. x indexes rows, y indexes columns.
struct CropBox {
    std::size_t x_min = 0;
    std::size_t x_max = 0;
    std::size_t y_min = 0;
    std::size_t y_max = 0;

    std::size_t rows() const { return x_max - x_min + 1; }
    std::size_t cols() const { return y_max - y_min + 1; }
    std::size_t area() const { return rows() * cols(); }

    bool fits(std::size_t width, std::size_t height) const
    {
        return x_min <= x_max && y_min <= y_max && x_max < height && y_max < width;
    }

    /// Componentwise min of mins, max of maxes.
    CropBox merged(const CropBox& other) const;

    friend bool operator==(const CropBox&, const CropBox&) = default;
};

} // namespace ctprune
