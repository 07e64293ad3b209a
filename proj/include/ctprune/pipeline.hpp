#pragma once

#include "ctprune/config.hpp"
#include "ctprune/kds_sampler.hpp"
#include "ctprune/scan_io.hpp"
#include "ctprune/slice_roi.hpp"
#include "ctprune/synthetic.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ctprune {

struct ScanManifest {
    std::string scan_id;
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t num_slices = 0;
    CropBox crop_box;
    SelectionWindow window;
    std::vector<std::size_t> sampled_indices;
    /// Source slice numbers (filename suffixes) of sampled_indices.
    std::vector<std::int64_t> sampled_slice_numbers;
    Strategy strategy = Strategy::kds;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> areas;
};

nlohmann::ordered_json to_json(const ScanManifest& m);
ScanManifest manifest_from_json(const nlohmann::json& j);

/// Means of the before/after quantities over a group of scans; each delta
/// is 1 - mean(after) / mean(before).
struct RedundancyGroup {
    std::string name;
    std::size_t scans = 0;
    double spatial_area_before = 0.0;
    double spatial_area_after = 0.0;
    double spatial_delta = 0.0;
    double slice_len_before = 0.0;
    double slice_len_after = 0.0;
    double slice_delta = 0.0;
    double product_before = 0.0;
    double product_after = 0.0;
    double total_delta = 0.0;
};

struct RedundancyReport {
    std::vector<RedundancyGroup> groups;

    const RedundancyGroup* find(const std::string& name) const;
};

/// Group "total" holds every manifest; each distinct label in `labels`
/// adds a group of the scans carrying it. Manifests are taken in the given
/// order, so callers sort them first for reproducible sums.
RedundancyReport build_report(const std::vector<ScanManifest>& manifests,
                              const std::map<std::string, std::string>& labels = {});

nlohmann::ordered_json to_json(const RedundancyReport& report);

/// Table layout with areas in thousands of pixels and products in millions.
std::string format_report_table(const RedundancyReport& report);

/// CSV `scan_id,label`, optional header.
std::map<std::string, std::string> read_labels(const std::filesystem::path& path);

/// load -> crop box -> area profile -> window -> sample, for one scan.
ScanManifest process_scan(const ScanVolume& volume, const PipelineConfig& cfg);

/// Cropped and resized copies of the sampled slices, written as
/// `<dir>/<scan_id>_<slice number>.png`.
void export_sampled_slices(const ScanVolume& volume, const ScanManifest& manifest, const SpatialConfig& cfg,
                           const std::filesystem::path& dir);

struct ScanFailure {
    std::string scan_id;
    std::string error;
};

struct RunResult {
    std::vector<ScanManifest> manifests; // sorted by scan_id
    std::vector<ScanFailure> failures;   // sorted by scan_id
    RedundancyReport report;
};

struct RunOptions {
    std::filesystem::path corpus_dir;
    /// When set, manifests, report and (optionally) images are written here.
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::filesystem::path> labels_path;
};

/// Processes every subdirectory of the corpus as one scan on
/// cfg.parallelism workers. Per-scan errors are collected, not thrown.
/// Throws Error(NoScans / IoError).
RunResult run_pipeline(const RunOptions& options, const PipelineConfig& cfg);

/// Writes manifests/<id>.json, manifests.jsonl, report.json, report.txt,
/// run_summary.json and config.txt under `out_dir`.
void write_run_outputs(const std::filesystem::path& out_dir, const RunResult& result, const PipelineConfig& cfg);

struct CorpusScanTruth {
    std::string scan_id;
    std::string label;
    SyntheticGroundTruth truth;
};

/// Writes `<out>/<scan_id>/slice_<n>.png` for every scan plus
/// ground_truth.jsonl and labels.csv. Scan k gets seed
/// derive_seed(base.seed, scan_id) and label covid/non-covid by parity.
std::vector<CorpusScanTruth> generate_corpus(const SyntheticCorpusSpec& spec, const std::filesystem::path& out_dir);

} // namespace ctprune
