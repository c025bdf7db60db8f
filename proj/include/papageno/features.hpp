#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "papageno/preprocess.hpp"
#include "papageno/sparse.hpp"

namespace papageno::features {

using preprocess::TokenSequence;

struct FeatureConfig {
    int ngram_max = 1;                  // 1 or 2
    std::optional<std::size_t> top_n;   // cap by total term frequency; none = keep all

    friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

// Vocabulary and document frequencies of a training corpus. Weights follow
//   w(t, d) = tf(t, d) * ln((N + 1) / (df(t) + 1))
// with raw counts for tf and no length normalization.
class TfIdfModel {
public:
    TfIdfModel() = default;
    TfIdfModel(FeatureConfig config, std::vector<std::string> terms,
               std::vector<std::uint32_t> df, std::size_t n_docs);

    const FeatureConfig& config() const { return config_; }
    std::size_t n_docs() const { return n_docs_; }
    std::size_t size() const { return terms_.size(); }
    const std::vector<std::string>& terms() const { return terms_; }
    const std::vector<std::uint32_t>& df() const { return df_; }
    std::optional<std::uint32_t> column(const std::string& term) const;
    double idf(std::uint32_t column) const { return idf_[column]; }

    SparseVector transform(const TokenSequence& doc) const;

    nlohmann::json to_json() const;
    static TfIdfModel from_json(const nlohmann::json& j);

    friend bool operator==(const TfIdfModel& a, const TfIdfModel& b) {
        return a.config_ == b.config_ && a.terms_ == b.terms_ && a.df_ == b.df_ &&
               a.n_docs_ == b.n_docs_;
    }

private:
    void index();

    FeatureConfig config_;
    std::vector<std::string> terms_;      // column -> n-gram, lexicographic
    std::vector<std::uint32_t> df_;
    std::size_t n_docs_ = 0;
    std::vector<double> idf_;
    std::unordered_map<std::string, std::uint32_t> column_;
};

// N-grams of order 1..ngram_max; bigrams are "a b" over adjacent tokens.
std::vector<std::string> ngrams(const TokenSequence& doc, int ngram_max);

TfIdfModel build_vocab(std::span<const TokenSequence> corpus, const FeatureConfig& config);

inline SparseVector tfidf_vector(const TokenSequence& doc, const TfIdfModel& model) {
    return model.transform(doc);
}

// OpenMP over documents; output order matches input.
std::vector<SparseVector> transform_all(const TfIdfModel& model, std::span<const TokenSequence> docs);
// Serial reference for transform_all.
std::vector<SparseVector> transform_all_serial(const TfIdfModel& model,
                                               std::span<const TokenSequence> docs);

}  // namespace papageno::features
