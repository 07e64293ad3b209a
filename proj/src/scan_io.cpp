#include "ctprune/scan_io.hpp"

#include "ctprune/error.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <limits>

namespace fs = std::filesystem;

namespace ctprune {

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

void validate_volume(const ScanVolume& volume)
{
    if (volume.slices.empty()) {
        throw Error(ErrorCode::EmptyScan, "scan '" + volume.scan_id + "' has no slices");
    }
    if (volume.slice_indices.size() != volume.slices.size()) {
        throw Error(ErrorCode::UnparsableIndex, "slice index count does not match slice count");
    }
    const auto& first = volume.slices.front();
    for (std::size_t n = 0; n < volume.slices.size(); ++n) {
        const auto& s = volume.slices[n];
        if (s.width != first.width || s.height != first.height || s.max_intensity != first.max_intensity) {
            throw Error(ErrorCode::MixedDimensions, "slice " + std::to_string(volume.slice_indices[n]) + " is " +
                                                        std::to_string(s.width) + "x" + std::to_string(s.height) +
                                                        ", expected " + std::to_string(first.width) + "x" +
                                                        std::to_string(first.height));
        }
        if (!s.valid()) {
            throw Error(ErrorCode::DecodeError, "slice " + std::to_string(volume.slice_indices[n]) + " is malformed");
        }
        if (n > 0 && volume.slice_indices[n] <= volume.slice_indices[n - 1]) {
            throw Error(ErrorCode::UnparsableIndex, "slice indices are not strictly increasing");
        }
    }
}

bool is_slice_file(const fs::path& path)
{
    const auto ext = lower(path.extension().string());
    return ext == ".png" || ext == ".pgm" || ext == ".tif" || ext == ".tiff";
}

std::optional<std::int64_t> parse_slice_index(std::string_view stem)
{
    std::size_t begin = stem.size();
    while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) {
        --begin;
    }
    if (begin == stem.size()) {
        return std::nullopt;
    }
    std::int64_t value = 0;
    const auto* first = stem.data() + begin;
    const auto* last = stem.data() + stem.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        return std::nullopt;
    }
    return value;
}

SliceImage load_slice(const fs::path& path)
{
    cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (raw.empty()) {
        throw Error(ErrorCode::DecodeError, "cannot decode " + path.string());
    }
    cv::Mat gray;
    switch (raw.channels()) {
    case 1: gray = raw; break;
    case 3: cv::cvtColor(raw, gray, cv::COLOR_BGR2GRAY); break;
    case 4: cv::cvtColor(raw, gray, cv::COLOR_BGRA2GRAY); break;
    default: throw Error(ErrorCode::DecodeError, "unsupported channel count in " + path.string());
    }

    SliceImage out;
    out.width = static_cast<std::size_t>(gray.cols);
    out.height = static_cast<std::size_t>(gray.rows);
    out.pixels.resize(out.width * out.height);
    if (gray.depth() == CV_8U) {
        out.max_intensity = 255;
        for (int r = 0; r < gray.rows; ++r) {
            const auto* row = gray.ptr<std::uint8_t>(r);
            std::copy(row, row + gray.cols, out.pixels.begin() + static_cast<std::ptrdiff_t>(r) * gray.cols);
        }
    } else if (gray.depth() == CV_16U) {
        out.max_intensity = 65535;
        for (int r = 0; r < gray.rows; ++r) {
            const auto* row = gray.ptr<std::uint16_t>(r);
            std::copy(row, row + gray.cols, out.pixels.begin() + static_cast<std::ptrdiff_t>(r) * gray.cols);
        }
    } else {
        throw Error(ErrorCode::DecodeError, "only 8-bit and 16-bit grayscale is supported: " + path.string());
    }
    return out;
}

void save_slice(const fs::path& path, const SliceImage& slice)
{
    const int rows = static_cast<int>(slice.height);
    const int cols = static_cast<int>(slice.width);
    cv::Mat mat;
    if (slice.max_intensity <= 255) {
        mat.create(rows, cols, CV_8UC1);
        for (int r = 0; r < rows; ++r) {
            auto* row = mat.ptr<std::uint8_t>(r);
            for (int c = 0; c < cols; ++c) {
                row[c] = static_cast<std::uint8_t>(slice.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)));
            }
        }
    } else {
        mat.create(rows, cols, CV_16UC1);
        for (int r = 0; r < rows; ++r) {
            std::memcpy(mat.ptr<std::uint16_t>(r), slice.pixels.data() + static_cast<std::size_t>(r) * slice.width,
                        slice.width * sizeof(std::uint16_t));
        }
    }
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), mat);
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
}

ScanVolume load_scan(const fs::path& directory)
{
    std::error_code ec;
    if (!fs::is_directory(directory, ec)) {
        throw Error(ErrorCode::IoError, directory.string() + " is not a directory");
    }

    struct Entry {
        std::int64_t index;
        fs::path path;
    };
    std::vector<Entry> entries;
    for (const auto& item : fs::directory_iterator(directory)) {
        if (!item.is_regular_file() || !is_slice_file(item.path())) {
            continue;
        }
        auto index = parse_slice_index(item.path().stem().string());
        if (!index) {
            throw Error(ErrorCode::UnparsableIndex, "no trailing slice number in " + item.path().filename().string());
        }
        entries.push_back({*index, item.path()});
    }

    ScanVolume volume;
    volume.scan_id = directory.filename().string();
    if (volume.scan_id.empty()) {
        volume.scan_id = directory.parent_path().filename().string();
    }
    if (entries.empty()) {
        throw Error(ErrorCode::EmptyScan, "no slice images in " + directory.string());
    }

    // Directory iteration order is unspecified; the filename tie-break keeps
    // the duplicate-index error message stable.
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.index != b.index ? a.index < b.index : a.path.filename() < b.path.filename();
    });
    for (std::size_t n = 1; n < entries.size(); ++n) {
        if (entries[n].index == entries[n - 1].index) {
            throw Error(ErrorCode::UnparsableIndex, "duplicate slice number " + std::to_string(entries[n].index) + " (" +
                                                        entries[n - 1].path.filename().string() + ", " +
                                                        entries[n].path.filename().string() + ")");
        }
    }

    volume.slices.reserve(entries.size());
    volume.slice_indices.reserve(entries.size());
    for (const auto& e : entries) {
        volume.slices.push_back(load_slice(e.path));
        volume.slice_indices.push_back(e.index);
    }
    validate_volume(volume);
    return volume;
}

} // namespace ctprune
