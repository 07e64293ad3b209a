#include "ctprune/metrics.hpp"

#include "ctprune/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ctprune {

namespace {

std::size_t class_index(const std::vector<std::string>& classes, const std::string& cls)
{
    const auto it = std::find(classes.begin(), classes.end(), cls);
    return static_cast<std::size_t>(it - classes.begin());
}

std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

} // namespace

const ClassCounts& ConfusionCounts::of(const std::string& cls) const
{
    const std::size_t k = class_index(classes, cls);
    if (k >= counts.size()) {
        throw Error(ErrorCode::NoClasses, "unknown class '" + cls + "'");
    }
    return counts[k];
}

ConfusionCounts count_predictions(std::span<const std::string> labels, std::span<const std::string> predictions,
                                  const std::vector<std::string>& classes)
{
    if (labels.size() != predictions.size()) {
        throw Error(ErrorCode::ParseError, "label and prediction counts differ");
    }
    ConfusionCounts out{classes, std::vector<ClassCounts>(classes.size())};
    for (std::size_t n = 0; n < labels.size(); ++n) {
        const std::size_t truth = class_index(classes, labels[n]);
        const std::size_t guess = class_index(classes, predictions[n]);
        if (truth >= classes.size() || guess >= classes.size()) {
            throw Error(ErrorCode::ParseError, "unknown class in row " + std::to_string(n + 1));
        }
        if (truth == guess) {
            ++out.counts[truth].tp;
        } else {
            ++out.counts[truth].fn;
            ++out.counts[guess].fp;
        }
    }
    return out;
}

double f1_score(const ClassCounts& c)
{
    if (c.tp + c.fp == 0 || c.tp + c.fn == 0) {
        return 0.0;
    }
    const double p = c.precision();
    const double r = c.recall();
    if (p + r == 0.0) {
        return 0.0;
    }
    return 2.0 * p * r / (p + r);
}

double f1_score(const ConfusionCounts& counts, const std::string& cls)
{
    return f1_score(counts.of(cls));
}

double macro_f1(std::span<const double> per_class_f1)
{
    if (per_class_f1.empty()) {
        throw Error(ErrorCode::NoClasses, "macro F1 needs at least one class");
    }
    return std::accumulate(per_class_f1.begin(), per_class_f1.end(), 0.0) / static_cast<double>(per_class_f1.size());
}

double macro_f1(const ConfusionCounts& counts)
{
    std::vector<double> f1(counts.counts.size());
    std::transform(counts.counts.begin(), counts.counts.end(), f1.begin(),
                   [](const ClassCounts& c) { return f1_score(c); });
    return macro_f1(f1);
}

std::vector<PredictionRow> read_predictions(std::istream& in, const std::vector<std::string>& classes)
{
    std::vector<PredictionRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(trim(field));
        }
        if (!line.empty() && line.back() == ',') {
            fields.emplace_back();
        }
        if (rows.empty() && fields.size() == 3 && fields[0] == "scan_id" && fields[1] == "label" &&
            fields[2] == "prediction") {
            continue;
        }
        if (fields.size() != 3) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 3 fields, got " +
                                                   std::to_string(fields.size()));
        }
        for (std::size_t f = 1; f < 3; ++f) {
            if (class_index(classes, fields[f]) >= classes.size()) {
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unknown class '" + fields[f] + "'");
            }
        }
        if (fields[0].empty()) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty scan_id");
        }
        rows.push_back({fields[0], fields[1], fields[2]});
    }
    return rows;
}

std::vector<PredictionRow> read_predictions(const std::filesystem::path& path, const std::vector<std::string>& classes)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return read_predictions(in, classes);
}

std::string format_scores(const ConfusionCounts& counts)
{
    std::string out = "class        precision  recall     f1\n";
    char buf[128];
    for (std::size_t k = 0; k < counts.classes.size(); ++k) {
        const auto& c = counts.counts[k];
        std::snprintf(buf, sizeof buf, "%-12s %-10.4f %-10.4f %.4f\n", counts.classes[k].c_str(), c.precision(),
                      c.recall(), f1_score(c));
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "macro-f1     %.4f\n", macro_f1(counts));
    out += buf;
    return out;
}

} // namespace ctprune
