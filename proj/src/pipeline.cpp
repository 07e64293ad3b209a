#include "ctprune/pipeline.hpp"

#include "ctprune/error.hpp"
#include "ctprune/rng.hpp"
#include "ctprune/spatial_roi.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace ctprune {

namespace {

std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw Error(ErrorCode::IoError, "write failed for " + path.string());
    }
}

void make_dirs(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    }
}

nlohmann::ordered_json box_json(const CropBox& b)
{
    nlohmann::ordered_json j;
    j["x_min"] = b.x_min;
    j["x_max"] = b.x_max;
    j["y_min"] = b.y_min;
    j["y_max"] = b.y_max;
    return j;
}

CropBox box_from_json(const nlohmann::json& j)
{
    return CropBox{j.at("x_min").get<std::size_t>(), j.at("x_max").get<std::size_t>(), j.at("y_min").get<std::size_t>(),
                   j.at("y_max").get<std::size_t>()};
}

RedundancyGroup summarize(const std::string& name, const std::vector<const ScanManifest*>& scans)
{
    RedundancyGroup g;
    g.name = name;
    g.scans = scans.size();
    if (scans.empty()) {
        return g;
    }
    for (const ScanManifest* m : scans) {
        const double area_before = static_cast<double>(m->width * m->height);
        const double area_after = static_cast<double>(m->crop_box.area());
        const double len_before = static_cast<double>(m->num_slices);
        const double len_after = static_cast<double>(m->window.length());
        g.spatial_area_before += area_before;
        g.spatial_area_after += area_after;
        g.slice_len_before += len_before;
        g.slice_len_after += len_after;
        g.product_before += area_before * len_before;
        g.product_after += area_after * len_after;
    }
    const auto n = static_cast<double>(scans.size());
    g.spatial_area_before /= n;
    g.spatial_area_after /= n;
    g.slice_len_before /= n;
    g.slice_len_after /= n;
    g.product_before /= n;
    g.product_after /= n;
    g.spatial_delta = 1.0 - g.spatial_area_after / g.spatial_area_before;
    g.slice_delta = 1.0 - g.slice_len_after / g.slice_len_before;
    g.total_delta = 1.0 - g.product_after / g.product_before;
    return g;
}

} // namespace

nlohmann::ordered_json to_json(const ScanManifest& m)
{
    nlohmann::ordered_json j;
    j["scan_id"] = m.scan_id;
    j["original_dims"] = {{"width", m.width}, {"height", m.height}, {"num_slices", m.num_slices}};
    j["crop_box"] = box_json(m.crop_box);
    nlohmann::ordered_json w;
    w["s"] = m.window.s;
    w["e"] = m.window.e;
    w["area_sum"] = m.window.area_sum;
    w["area_fraction"] = m.window.area_fraction;
    w["alpha_satisfied"] = m.window.alpha_satisfied;
    j["window"] = w;
    j["sampled_indices"] = m.sampled_indices;
    j["sampled_slice_numbers"] = m.sampled_slice_numbers;
    j["strategy"] = std::string(to_string(m.strategy));
    j["seed"] = m.seed;
    j["areas"] = m.areas;
    return j;
}

ScanManifest manifest_from_json(const nlohmann::json& j)
{
    ScanManifest m;
    m.scan_id = j.at("scan_id").get<std::string>();
    const auto& dims = j.at("original_dims");
    m.width = dims.at("width").get<std::size_t>();
    m.height = dims.at("height").get<std::size_t>();
    m.num_slices = dims.at("num_slices").get<std::size_t>();
    m.crop_box = box_from_json(j.at("crop_box"));
    const auto& w = j.at("window");
    m.window.s = w.at("s").get<std::size_t>();
    m.window.e = w.at("e").get<std::size_t>();
    m.window.area_sum = w.at("area_sum").get<std::uint64_t>();
    m.window.area_fraction = w.at("area_fraction").get<double>();
    m.window.alpha_satisfied = w.at("alpha_satisfied").get<bool>();
    m.sampled_indices = j.at("sampled_indices").get<std::vector<std::size_t>>();
    m.sampled_slice_numbers = j.at("sampled_slice_numbers").get<std::vector<std::int64_t>>();
    const auto strategy = parse_strategy(j.at("strategy").get<std::string>());
    if (!strategy) {
        throw Error(ErrorCode::ParseError, "unknown strategy in manifest");
    }
    m.strategy = *strategy;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.areas = j.at("areas").get<std::vector<std::uint64_t>>();
    return m;
}

const RedundancyGroup* RedundancyReport::find(const std::string& name) const
{
    const auto it = std::find_if(groups.begin(), groups.end(), [&](const RedundancyGroup& g) { return g.name == name; });
    return it == groups.end() ? nullptr : &*it;
}

RedundancyReport build_report(const std::vector<ScanManifest>& manifests, const std::map<std::string, std::string>& labels)
{
    RedundancyReport report;
    std::map<std::string, std::vector<const ScanManifest*>> by_label;
    std::vector<const ScanManifest*> all;
    for (const auto& m : manifests) {
        all.push_back(&m);
        const auto it = labels.find(m.scan_id);
        if (it != labels.end()) {
            by_label[it->second].push_back(&m);
        }
    }
    for (const auto& [label, scans] : by_label) {
        report.groups.push_back(summarize(label, scans));
    }
    report.groups.push_back(summarize("total", all));
    return report;
}

nlohmann::ordered_json to_json(const RedundancyReport& report)
{
    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    for (const auto& g : report.groups) {
        nlohmann::ordered_json j;
        j["group"] = g.name;
        j["scans"] = g.scans;
        j["spatial_area_before"] = g.spatial_area_before;
        j["spatial_area_after"] = g.spatial_area_after;
        j["spatial_delta"] = g.spatial_delta;
        j["slice_len_before"] = g.slice_len_before;
        j["slice_len_after"] = g.slice_len_after;
        j["slice_delta"] = g.slice_delta;
        j["product_before"] = g.product_before;
        j["product_after"] = g.product_after;
        j["total_delta"] = g.total_delta;
        groups.push_back(j);
    }
    nlohmann::ordered_json out;
    out["averaging"] = "mean-then-ratio";
    out["groups"] = groups;
    return out;
}

std::string format_report_table(const RedundancyReport& report)
{
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-16s| %-26s| %-26s| %-20s| %s\n", "", "Spatial Area (K)", "Slice Length",
                  "Spatial x Slice (M)", "Total");
    out += buf;
    std::snprintf(buf, sizeof buf, "%-16s| %-8s %-8s %-8s| %-8s %-8s %-8s| %-9s %-10s| %s\n", "group", "Before", "After",
                  "Delta", "Before", "After", "Delta", "Before", "After", "Delta");
    out += buf;
    for (const auto& g : report.groups) {
        std::snprintf(buf, sizeof buf, "%-16s| %-8.2f %-8.2f %-8.4f| %-8.2f %-8.2f %-8.4f| %-9.2f %-10.2f| %.4f\n",
                      g.name.c_str(), g.spatial_area_before / 1e3, g.spatial_area_after / 1e3, g.spatial_delta,
                      g.slice_len_before, g.slice_len_after, g.slice_delta, g.product_before / 1e6,
                      g.product_after / 1e6, g.total_delta);
        out += buf;
    }
    return out;
}

std::map<std::string, std::string> read_labels(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::map<std::string, std::string> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw Error(ErrorCode::ParseError, path.string() + " line " + std::to_string(line_no) + ": expected scan_id,label");
        }
        std::string id = trim(line.substr(0, comma));
        std::string label = trim(line.substr(comma + 1));
        if (id == "scan_id" && label == "label") {
            continue;
        }
        if (id.empty() || label.empty()) {
            throw Error(ErrorCode::ParseError, path.string() + " line " + std::to_string(line_no) + ": empty field");
        }
        labels[id] = label;
    }
    return labels;
}

ScanManifest process_scan(const ScanVolume& volume, const PipelineConfig& cfg)
{
    validate_volume(volume);

    std::vector<SegmentationMask> masks;
    masks.reserve(volume.num_slices());
    for (const auto& s : volume.slices) {
        masks.push_back(segment_slice(s, cfg.spatial));
    }
    CropBox box;
    try {
        box = union_crop_box(masks);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::AllSlicesEmpty) {
            throw Error(ErrorCode::AllSlicesEmpty, "scan '" + volume.scan_id + "' has no foreground in any slice");
        }
        throw;
    }
    const AreaProfile profile = area_profile(volume.scan_id, masks, box);
    const SelectionWindow window = select_window(profile, cfg.slice);
    const SampleSet samples =
        sample_slices(cfg.strategy, profile, window, cfg.kds, derive_seed(cfg.seed, volume.scan_id));

    ScanManifest m;
    m.scan_id = volume.scan_id;
    m.width = volume.width();
    m.height = volume.height();
    m.num_slices = volume.num_slices();
    m.crop_box = box;
    m.window = window;
    m.sampled_indices = samples.indices;
    for (std::size_t i : samples.indices) {
        m.sampled_slice_numbers.push_back(volume.slice_indices[i]);
    }
    m.strategy = cfg.strategy;
    m.seed = cfg.seed;
    m.areas = profile.areas;
    return m;
}

void export_sampled_slices(const ScanVolume& volume, const ScanManifest& manifest, const SpatialConfig& cfg,
                           const fs::path& dir)
{
    make_dirs(dir);
    for (std::size_t n = 0; n < manifest.sampled_indices.size(); ++n) {
        const std::size_t i = manifest.sampled_indices[n];
        const SliceImage out =
            apply_crop_and_resize(volume.slices.at(i), manifest.crop_box, cfg.output_height, cfg.output_width);
        save_slice(dir / (manifest.scan_id + "_" + std::to_string(volume.slice_indices[i]) + ".png"), out);
    }
}

RunResult run_pipeline(const RunOptions& options, const PipelineConfig& cfg)
{
    cfg.validate();
    std::error_code ec;
    if (!fs::is_directory(options.corpus_dir, ec)) {
        throw Error(ErrorCode::IoError, options.corpus_dir.string() + " is not a directory");
    }
    std::vector<fs::path> scan_dirs;
    for (const auto& item : fs::directory_iterator(options.corpus_dir)) {
        if (item.is_directory()) {
            scan_dirs.push_back(item.path());
        }
    }
    if (scan_dirs.empty()) {
        throw Error(ErrorCode::NoScans, "no scan directories in " + options.corpus_dir.string());
    }
    std::sort(scan_dirs.begin(), scan_dirs.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

    std::map<std::string, std::string> labels;
    if (options.labels_path) {
        labels = read_labels(*options.labels_path);
    }

    std::vector<std::optional<ScanManifest>> manifests(scan_dirs.size());
    std::vector<std::optional<std::string>> errors(scan_dirs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next.fetch_add(1); k < scan_dirs.size(); k = next.fetch_add(1)) {
            try {
                const ScanVolume volume = load_scan(scan_dirs[k]);
                ScanManifest m = process_scan(volume, cfg);
                if (cfg.export_images && options.out_dir) {
                    export_sampled_slices(volume, m, cfg.spatial, *options.out_dir / "images" / m.scan_id);
                }
                manifests[k] = std::move(m);
            } catch (const std::exception& e) {
                errors[k] = e.what();
            }
        }
    };
    const std::size_t workers = std::min(cfg.parallelism, scan_dirs.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        worker();
    }

    RunResult result;
    for (std::size_t k = 0; k < scan_dirs.size(); ++k) {
        if (manifests[k]) {
            result.manifests.push_back(std::move(*manifests[k]));
        } else {
            result.failures.push_back({scan_dirs[k].filename().string(), errors[k].value_or("unknown error")});
        }
    }
    result.report = build_report(result.manifests, labels);
    if (options.out_dir) {
        write_run_outputs(*options.out_dir, result, cfg);
    }
    return result;
}

void write_run_outputs(const fs::path& out_dir, const RunResult& result, const PipelineConfig& cfg)
{
    make_dirs(out_dir / "manifests");
    std::string index;
    for (const auto& m : result.manifests) {
        const auto j = to_json(m);
        write_text(out_dir / "manifests" / (m.scan_id + ".json"), j.dump(2) + "\n");
        index += j.dump() + "\n";
    }
    write_text(out_dir / "manifests.jsonl", index);
    write_text(out_dir / "report.json", to_json(result.report).dump(2) + "\n");
    write_text(out_dir / "report.txt", format_report_table(result.report));

    nlohmann::ordered_json summary;
    summary["scans_total"] = result.manifests.size() + result.failures.size();
    summary["scans_ok"] = result.manifests.size();
    summary["scans_failed"] = result.failures.size();
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (const auto& f : result.failures) {
        failures.push_back({{"scan_id", f.scan_id}, {"error", f.error}});
    }
    summary["failures"] = failures;
    write_text(out_dir / "run_summary.json", summary.dump(2) + "\n");
    write_text(out_dir / "config.txt", to_key_values(cfg));
}

std::vector<CorpusScanTruth> generate_corpus(const SyntheticCorpusSpec& spec, const fs::path& out_dir)
{
    if (spec.num_scans == 0) {
        throw Error(ErrorCode::InvalidSpec, "num_scans must be at least 1");
    }
    if (!(spec.lung_center_jitter >= 0.0 && spec.lung_center_jitter <= 0.5)) {
        throw Error(ErrorCode::InvalidSpec, "lung_center_jitter must be in [0, 0.5]");
    }
    validate_synthetic_spec(spec.base);
    make_dirs(out_dir);

    std::vector<CorpusScanTruth> truths;
    std::string gt_lines;
    std::string labels = "scan_id,label\n";
    for (std::size_t k = 0; k < spec.num_scans; ++k) {
        char id[32];
        std::snprintf(id, sizeof id, "scan_%04zu", k);
        SyntheticScanSpec s = spec.base;
        s.scan_id = id;
        s.seed = derive_seed(spec.base.seed, s.scan_id);
        Rng rng(s.seed);
        const double shift = (2.0 * rng.uniform01() - 1.0) * spec.lung_center_jitter;
        s.lung_center = std::clamp(spec.base.lung_center + shift, 0.0, 1.0);

        const SyntheticScan scan = generate_synthetic_scan(s);
        const fs::path dir = out_dir / s.scan_id;
        make_dirs(dir);
        for (std::size_t n = 0; n < scan.volume.num_slices(); ++n) {
            char name[32];
            std::snprintf(name, sizeof name, "slice_%04lld.png", static_cast<long long>(scan.volume.slice_indices[n]));
            save_slice(dir / name, scan.volume.slices[n]);
        }

        const std::string label = k % 2 == 0 ? "covid" : "non-covid";
        nlohmann::ordered_json j;
        j["scan_id"] = s.scan_id;
        j["label"] = label;
        j["crop_box"] = box_json(scan.truth.crop_box);
        j["lung_areas"] = scan.truth.lung_areas;
        gt_lines += j.dump() + "\n";
        labels += s.scan_id + "," + label + "\n";
        truths.push_back({s.scan_id, label, scan.truth});
    }
    write_text(out_dir / "ground_truth.jsonl", gt_lines);
    write_text(out_dir / "labels.csv", labels);
    return truths;
}

} // namespace ctprune
