#include "ctprune/config.hpp"

#include "ctprune/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ctprune {

namespace {

std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value)
{
    throw Error(ErrorCode::InvalidConfig, "invalid value '" + value + "' for " + key);
}

std::uint64_t to_uint(const std::string& key, const std::string& value)
{
    std::uint64_t out = 0;
    const auto* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), last, out);
    if (ec != std::errc{} || ptr != last || value.empty()) {
        bad_value(key, value);
    }
    return out;
}

double to_double(const std::string& key, const std::string& value)
{
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        bad_value(key, value);
    }
    if (used != value.size() || !std::isfinite(out)) {
        bad_value(key, value);
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    bad_value(key, value);
}

std::string format_double(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in)
{
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty key");
        }
        out[key] = value;
    }
    return out;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return parse_key_values(in);
}

std::pair<std::string, std::string> split_assignment(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::InvalidConfig, "expected key=value, got '" + text + "'");
    }
    return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

void PipelineConfig::validate() const
{
    spatial.validate();
    slice.validate();
    kds.validate();
    if (parallelism < 1) {
        throw Error(ErrorCode::InvalidConfig, "parallelism must be at least 1");
    }
}

void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value)
{
    if (key == "spatial.kernel_half_width") {
        cfg.spatial.kernel_half_width = to_uint(key, value);
    } else if (key == "spatial.threshold") {
        cfg.spatial.threshold = to_double(key, value);
    } else if (key == "spatial.output_height") {
        cfg.spatial.output_height = to_uint(key, value);
    } else if (key == "spatial.output_width") {
        cfg.spatial.output_width = to_uint(key, value);
    } else if (key == "slice.window_fraction") {
        cfg.slice.window_fraction = to_double(key, value);
    } else if (key == "slice.alpha") {
        cfg.slice.alpha = to_double(key, value);
    } else if (key == "kds.num_samples") {
        cfg.kds.num_samples = to_uint(key, value);
    } else if (key == "kds.grid_size") {
        cfg.kds.grid_size = to_uint(key, value);
    } else if (key == "kds.bandwidth_rule") {
        if (value != "scott") {
            bad_value(key, value);
        }
    } else if (key == "strategy") {
        auto s = parse_strategy(value);
        if (!s) {
            bad_value(key, value);
        }
        cfg.strategy = *s;
    } else if (key == "seed") {
        cfg.seed = to_uint(key, value);
    } else if (key == "export_images") {
        cfg.export_images = to_bool(key, value);
    } else if (key == "parallelism") {
        cfg.parallelism = to_uint(key, value);
    } else {
        throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    }
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path)
{
    PipelineConfig cfg;
    for (const auto& [key, value] : read_key_values(path)) {
        apply_setting(cfg, key, value);
    }
    return cfg;
}

std::string to_key_values(const PipelineConfig& cfg)
{
    std::ostringstream os;
    os << "spatial.kernel_half_width = " << cfg.spatial.kernel_half_width << '\n'
       << "spatial.threshold = " << format_double(cfg.spatial.threshold) << '\n'
       << "spatial.output_height = " << cfg.spatial.output_height << '\n'
       << "spatial.output_width = " << cfg.spatial.output_width << '\n'
       << "slice.window_fraction = " << format_double(cfg.slice.window_fraction) << '\n'
       << "slice.alpha = " << format_double(cfg.slice.alpha) << '\n'
       << "kds.num_samples = " << cfg.kds.num_samples << '\n'
       << "kds.grid_size = " << cfg.kds.grid_size << '\n'
       << "kds.bandwidth_rule = scott\n"
       << "strategy = " << to_string(cfg.strategy) << '\n'
       << "seed = " << cfg.seed << '\n'
       << "export_images = " << (cfg.export_images ? "true" : "false") << '\n';
    // parallelism is left out on purpose: outputs must not depend on it.
    return os.str();
}

void apply_setting(SyntheticCorpusSpec& spec, const std::string& key, const std::string& value)
{
    auto& b = spec.base;
    if (key == "num_scans") {
        spec.num_scans = to_uint(key, value);
    } else if (key == "lung_center_jitter") {
        spec.lung_center_jitter = to_double(key, value);
    } else if (key == "num_slices") {
        b.num_slices = to_uint(key, value);
    } else if (key == "image_size") {
        b.image_size = to_uint(key, value);
    } else if (key == "body_margin") {
        b.body_margin = to_uint(key, value);
    } else if (key == "lung_area_peak") {
        b.lung_area_peak = to_double(key, value);
    } else if (key == "lung_area_curve") {
        b.lung_area_curve = to_double(key, value);
    } else if (key == "lung_center") {
        b.lung_center = to_double(key, value);
    } else if (key == "noise_amplitude") {
        const auto v = to_uint(key, value);
        if (v > 65535) {
            bad_value(key, value);
        }
        b.noise_amplitude = static_cast<std::uint16_t>(v);
    } else if (key == "seed") {
        b.seed = to_uint(key, value);
    } else if (key == "bit_depth") {
        b.bit_depth = static_cast<int>(to_uint(key, value));
    } else if (key == "body_level") {
        b.body_level = to_double(key, value);
    } else {
        throw Error(ErrorCode::InvalidConfig, "unknown corpus spec key '" + key + "'");
    }
}

SyntheticCorpusSpec load_corpus_spec(const std::filesystem::path& path)
{
    SyntheticCorpusSpec spec;
    for (const auto& [key, value] : read_key_values(path)) {
        apply_setting(spec, key, value);
    }
    return spec;
}

} // namespace ctprune
