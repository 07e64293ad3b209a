// ctprune: spatial/slice redundancy reduction and slice sampling for CT scan
// corpora.
//
//   ctprune reduce --corpus <dir> --out <dir> [--config <file>] [--set k=v]...
//   ctprune gen-corpus --out <dir> [--spec <file>] [--set k=v]...
//   ctprune score <predictions.csv>
//
// Exit codes: 0 success, 1 some scans failed, 2 usage error or empty corpus.

#include "ctprune/config.hpp"
#include "ctprune/error.hpp"
#include "ctprune/metrics.hpp"
#include "ctprune/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;

struct ReduceArgs {
    std::string corpus;
    std::string out;
    std::string config;
    std::string labels;
    std::vector<std::string> sets;
    std::string strategy;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::size_t jobs = 0;
    bool export_images = false;
};

int run_reduce(const ReduceArgs& args, const CLI::App& cmd)
{
    ctprune::PipelineConfig cfg;
    if (!args.config.empty()) {
        cfg = ctprune::load_pipeline_config(args.config);
    }
    if (cmd.count("--strategy")) ctprune::apply_setting(cfg, "strategy", args.strategy);
    if (cmd.count("--samples")) cfg.kds.num_samples = args.samples;
    if (cmd.count("--seed")) cfg.seed = args.seed;
    if (cmd.count("--jobs")) cfg.parallelism = args.jobs;
    if (args.export_images) cfg.export_images = true;
    for (const auto& s : args.sets) {
        const auto [key, value] = ctprune::split_assignment(s);
        ctprune::apply_setting(cfg, key, value);
    }
    cfg.validate();

    ctprune::RunOptions options;
    options.corpus_dir = args.corpus;
    options.out_dir = std::filesystem::path(args.out);
    if (!args.labels.empty()) {
        options.labels_path = std::filesystem::path(args.labels);
    }

    const auto result = ctprune::run_pipeline(options, cfg);
    std::cout << ctprune::format_report_table(result.report);
    for (const auto& f : result.failures) {
        std::cerr << "failed: " << f.scan_id << ": " << f.error << '\n';
    }
    std::cerr << result.manifests.size() << " scans processed, " << result.failures.size() << " failed\n";
    return result.failures.empty() ? kExitOk : kExitPartial;
}

int run_gen_corpus(const std::string& spec_path, const std::string& out, const std::vector<std::string>& sets)
{
    ctprune::SyntheticCorpusSpec spec;
    if (!spec_path.empty()) {
        spec = ctprune::load_corpus_spec(spec_path);
    }
    for (const auto& s : sets) {
        const auto [key, value] = ctprune::split_assignment(s);
        ctprune::apply_setting(spec, key, value);
    }
    const auto truths = ctprune::generate_corpus(spec, out);
    std::cerr << "wrote " << truths.size() << " scans to " << out << '\n';
    return kExitOk;
}

int run_score(const std::string& path)
{
    const auto rows = ctprune::read_predictions(std::filesystem::path(path));
    std::vector<std::string> labels;
    std::vector<std::string> predictions;
    for (const auto& r : rows) {
        labels.push_back(r.label);
        predictions.push_back(r.prediction);
    }
    const auto counts = ctprune::count_predictions(labels, predictions);
    std::cout << ctprune::format_scores(counts);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"CT scan redundancy reduction and density-aware slice sampling"};
    app.require_subcommand(1);

    ReduceArgs reduce;
    auto* reduce_cmd = app.add_subcommand("reduce", "Crop, select and sample every scan of a corpus");
    reduce_cmd->add_option("--corpus", reduce.corpus, "Corpus directory, one subdirectory per scan")->required();
    reduce_cmd->add_option("--out", reduce.out, "Output directory")->required();
    reduce_cmd->add_option("--config", reduce.config, "key = value config file");
    reduce_cmd->add_option("--labels", reduce.labels, "CSV scan_id,label for per-label report groups");
    reduce_cmd->add_option("--set", reduce.sets, "Override a config key (key=value), applied last");
    reduce_cmd->add_option("--strategy", reduce.strategy, "kds | random | systematic")
        ->check(CLI::IsMember({"kds", "random", "systematic"}));
    reduce_cmd->add_option("--samples", reduce.samples, "Slices sampled per scan")->check(CLI::PositiveNumber);
    reduce_cmd->add_option("--seed", reduce.seed, "Global seed");
    reduce_cmd->add_option("--jobs", reduce.jobs, "Worker threads")->check(CLI::PositiveNumber);
    reduce_cmd->add_flag("--export-images", reduce.export_images, "Write cropped, resized sampled slices");

    std::string spec_path;
    std::string gen_out;
    std::vector<std::string> gen_sets;
    auto* gen_cmd = app.add_subcommand("gen-corpus", "Write a synthetic corpus with ground truth");
    gen_cmd->add_option("--spec", spec_path, "key = value corpus spec file");
    gen_cmd->add_option("--out", gen_out, "Output directory")->required();
    gen_cmd->add_option("--set", gen_sets, "Override a spec key (key=value)");

    std::string predictions;
    auto* score_cmd = app.add_subcommand("score", "Per-class and macro F1 of a predictions CSV");
    score_cmd->add_option("predictions", predictions, "CSV scan_id,label,prediction")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*reduce_cmd) {
            return run_reduce(reduce, *reduce_cmd);
        }
        if (*gen_cmd) {
            return run_gen_corpus(spec_path, gen_out, gen_sets);
        }
        return run_score(predictions);
    } catch (const ctprune::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
