#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace ctprune {

inline const std::vector<std::string> kDefaultClasses{"covid", "non-covid"};

struct ClassCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
    double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
};

/// One-vs-rest counts for every class, in class order.
struct ConfusionCounts {
    std::vector<std::string> classes;
    std::vector<ClassCounts> counts;

    const ClassCounts& of(const std::string& cls) const;
};

ConfusionCounts count_predictions(std::span<const std::string> labels, std::span<const std::string> predictions,
                                  const std::vector<std::string>& classes = kDefaultClasses);

/// Harmonic mean of precision and recall; 0 when any denominator is 0.
double f1_score(const ClassCounts& counts);
double f1_score(const ConfusionCounts& counts, const std::string& cls);

/// Unweighted mean over classes. Throws Error(NoClasses).
double macro_f1(const ConfusionCounts& counts);
double macro_f1(std::span<const double> per_class_f1);

struct PredictionRow {
    std::string scan_id;
    std::string label;
    std::string prediction;
};

/// CSV `scan_id,label,prediction`, optional header line, '#' comments.
/// Throws Error(ParseError) naming the offending line.
std::vector<PredictionRow> read_predictions(std::istream& in,
                                            const std::vector<std::string>& classes = kDefaultClasses);
std::vector<PredictionRow> read_predictions(const std::filesystem::path& path,
                                            const std::vector<std::string>& classes = kDefaultClasses);

/// Per-class precision/recall/F1 and macro F1, 4 decimals.
std::string format_scores(const ConfusionCounts& counts);

} // namespace ctprune
