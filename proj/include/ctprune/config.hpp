#pragma once

#include "ctprune/kds_sampler.hpp"
#include "ctprune/slice_roi.hpp"
#include "ctprune/spatial_roi.hpp"
#include "ctprune/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>

namespace ctprune {

/// Flat `key = value` document. Blank lines and lines starting with '#'
/// are skipped. Throws Error(ParseError) with the line number.
std::map<std::string, std::string> parse_key_values(std::istream& in);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

/// Splits "key=value" as given to --set.
std::pair<std::string, std::string> split_assignment(const std::string& text);

struct PipelineConfig {
    SpatialConfig spatial;
    SliceConfig slice;
    KdsConfig kds;
    Strategy strategy = Strategy::kds;
    std::uint64_t seed = 0;
    bool export_images = false;
    std::size_t parallelism = 1;

    void validate() const;
};

/// Recognised keys:
///   spatial.kernel_half_width  spatial.threshold
///   spatial.output_height      spatial.output_width
///   slice.window_fraction      slice.alpha
///   kds.num_samples            kds.grid_size        kds.bandwidth_rule (scott)
///   strategy (kds|random|systematic)  seed  export_images  parallelism
/// Throws Error(InvalidConfig) on unknown keys or malformed values.
void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Effective configuration in the same key/value format.
std::string to_key_values(const PipelineConfig& cfg);

/// Corpus of synthetic scans; every scan shares `base` geometry while the
/// lung curve centre moves by up to +/- lung_center_jitter.
struct SyntheticCorpusSpec {
    SyntheticScanSpec base;
    std::size_t num_scans = 8;
    double lung_center_jitter = 0.1;
};

/// Keys: num_scans lung_center_jitter num_slices image_size body_margin
/// lung_area_peak lung_area_curve lung_center noise_amplitude seed
/// bit_depth body_level.
void apply_setting(SyntheticCorpusSpec& spec, const std::string& key, const std::string& value);
SyntheticCorpusSpec load_corpus_spec(const std::filesystem::path& path);

} // namespace ctprune
