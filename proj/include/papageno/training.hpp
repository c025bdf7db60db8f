#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "papageno/eval.hpp"
#include "papageno/features.hpp"
#include "papageno/ovo.hpp"
#include "papageno/preprocess.hpp"
#include "papageno/taxonomy.hpp"

namespace papageno::models {

using preprocess::TokenSequence;

struct SvmConfig {
    double c = 1.0;
    ClassWeight class_weight = ClassWeight::balanced;
    features::FeatureConfig features{2, 10000};

    std::string describe() const;
};

// A deployable classifier: preprocessing, TF-IDF vocabulary and either the
// one-vs-one SVM or the majority baseline.
class TextClassifier {
public:
    static constexpr int kFormatVersion = 1;

    static TextClassifier train_svm(std::span<const TokenSequence> docs, std::span<const std::string> labels,
                                    const std::vector<std::string>& classes, const SvmConfig& config,
                                    preprocess::PreprocessConfig preprocessing, Level level,
                                    const SolverOptions& solver = {});
    static TextClassifier train_majority(std::span<const std::string> labels,
                                         const std::vector<std::string>& classes,
                                         preprocess::PreprocessConfig preprocessing, Level level);

    bool is_majority() const { return std::holds_alternative<MajorityModel>(model_); }
    Level level() const { return level_; }
    const std::vector<std::string>& classes() const { return classes_; }
    const preprocess::PreprocessConfig& preprocessing() const { return preprocessing_; }
    const features::TfIdfModel& tfidf() const { return tfidf_; }
    const OvOModel& ovo() const { return std::get<OvOModel>(model_); }
    const std::optional<SvmConfig>& svm_config() const { return config_; }

    std::string predict_tokens(const TokenSequence& doc) const;
    std::string predict(std::string_view text) const;
    // Parallel over documents.
    std::vector<std::string> predict_batch(std::span<const std::string> texts) const;

    nlohmann::json to_json() const;
    static TextClassifier from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static TextClassifier load(const std::filesystem::path& path);

private:
    Level level_ = Level::task1;
    std::vector<std::string> classes_;
    preprocess::PreprocessConfig preprocessing_;
    features::TfIdfModel tfidf_;
    std::optional<SvmConfig> config_;
    std::variant<MajorityModel, OvOModel> model_;
};

struct GridSpec {
    std::vector<int> ngram_max{1, 2};
    std::vector<std::optional<std::size_t>> top_n{10000, 25000, 50000, std::nullopt};
    std::vector<double> c{0.01, 0.05, 0.1, 0.2, 0.46, 0.5, 0.82, 1.0};
    std::vector<ClassWeight> class_weight{ClassWeight::balanced, ClassWeight::none};

    // Lattice order: ngram_max, top_n, C, class_weight (last varies fastest).
    std::vector<SvmConfig> expand() const;
};

struct GridEntry {
    std::size_t order = 0;  // position in the expanded lattice
    SvmConfig config;
    std::optional<eval::MacroMetrics> validation;
    std::string error;
};

struct GridSearchResult {
    std::vector<GridEntry> ranked;  // by validation macro-F1 desc, failures last, then lattice order
    SvmConfig best;
    std::string kernel = "linear";  // the RBF branch is not searched
};

// Trains every config on `train`, scores macro-F1 on `validation`. A failing
// config is recorded and the search continues. `workers` > 1 evaluates
// configs concurrently; ranking is independent of completion order.
GridSearchResult grid_search(std::span<const TokenSequence> train_docs, std::span<const std::string> train_labels,
                             std::span<const TokenSequence> val_docs, std::span<const std::string> val_labels,
                             const std::vector<std::string>& classes, std::span<const SvmConfig> configs,
                             const SolverOptions& solver = {}, int workers = 1);

void write_grid_csv(std::ostream& out, const GridSearchResult& result);

// Fold id per item: classes shuffled independently (seeded) and dealt
// round-robin, continuing the rotation across classes.
std::vector<std::size_t> stratified_folds(std::span<const std::string> labels, std::size_t k, std::uint64_t seed,
                                          const std::vector<std::string>& class_order);

struct CvResult {
    std::vector<eval::MetricsReport> folds;
    eval::MetricsReport mean;
};

CvResult cross_validate(std::span<const TokenSequence> docs, std::span<const std::string> labels,
                        const std::vector<std::string>& classes, const SvmConfig& config, std::size_t k,
                        std::uint64_t seed, const SolverOptions& solver = {});

nlohmann::json preprocess_to_json(const preprocess::PreprocessConfig& c);
preprocess::PreprocessConfig preprocess_from_json(const nlohmann::json& j);

}  // namespace papageno::models
