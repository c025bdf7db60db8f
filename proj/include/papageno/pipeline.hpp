#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "papageno/corpus.hpp"
#include "papageno/eval.hpp"
#include "papageno/predictions.hpp"
#include "papageno/training.hpp"

namespace papageno::pipeline {

namespace fs = std::filesystem;

struct IngestReport {
    corpus::FilterStats stats;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

// Filters a JSON-lines tweet file. Kept lines are written back unchanged, so
// extra fields (labels, provenance) survive.
IngestReport ingest(const fs::path& input, const fs::path& output, const corpus::FilterConfig& config,
                    const corpus::FilterOptions& options = {});

nlohmann::json to_json(const IngestReport& r);

// Writes train.jsonl, validation.jsonl and test.jsonl into `out_dir`.
corpus::SplitSet split(const fs::path& labeled, const fs::path& out_dir, std::uint64_t seed,
                       Level level = Level::fine, const corpus::SplitRatios& ratios = {});

struct Corpus {
    std::vector<std::string> ids;
    std::vector<preprocess::TokenSequence> docs;
    std::vector<std::string> labels;  // mapped to the requested level
};

Corpus prepare(const corpus::LabeledSet& set, Level level, const preprocess::PreprocessConfig& config);

models::TextClassifier train_svm(const fs::path& train, Level level, const models::SvmConfig& config,
                                 const preprocess::PreprocessConfig& preprocessing, std::uint64_t seed);
models::TextClassifier train_majority(const fs::path& train, Level level,
                                      const preprocess::PreprocessConfig& preprocessing);

PredictionSet predict(const models::TextClassifier& model, const corpus::TweetSet& tweets,
                      const std::string& model_name);

// Scores a classifier on a labeled file (truth mapped to the model level).
eval::MetricsReport evaluate(const models::TextClassifier& model, const fs::path& labeled,
                             const std::string& model_name, const std::string& split_name);

// Truth expanded from per-class counts, every prediction `label`.
eval::MetricsReport evaluate_constant(const std::vector<std::pair<std::string, std::size_t>>& counts,
                                      const std::string& label, Level level);

struct Distribution {
    Level level = Level::task1;
    std::vector<std::pair<std::string, std::size_t>> counts;  // level order
};

// {"level": "task1", "counts": {"class": n, ...}}
Distribution load_distribution(const fs::path& path);

// Recall per class from a metrics JSON report.
std::map<std::string, double> recalls_from_report(const fs::path& metrics);

void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

}  // namespace papageno::pipeline
