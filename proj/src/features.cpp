#include "papageno/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "papageno/error.hpp"

namespace papageno::features {

using nlohmann::json;

TfIdfModel::TfIdfModel(FeatureConfig config, std::vector<std::string> terms,
                       std::vector<std::uint32_t> df, std::size_t n_docs)
    : config_(config), terms_(std::move(terms)), df_(std::move(df)), n_docs_(n_docs) {
    if (terms_.size() != df_.size()) throw Error("TfIdfModel: terms/df size mismatch");
    index();
}

void TfIdfModel::index() {
    column_.clear();
    column_.reserve(terms_.size());
    idf_.resize(terms_.size());
    const double n1 = static_cast<double>(n_docs_) + 1.0;
    for (std::uint32_t c = 0; c < terms_.size(); ++c) {
        if (df_[c] < 1 || df_[c] > n_docs_) throw Error("TfIdfModel: df out of [1, N] for " + terms_[c]);
        column_.emplace(terms_[c], c);
        idf_[c] = std::log(n1 / (static_cast<double>(df_[c]) + 1.0));
    }
}

std::optional<std::uint32_t> TfIdfModel::column(const std::string& term) const {
    if (auto it = column_.find(term); it != column_.end()) return it->second;
    return std::nullopt;
}

SparseVector TfIdfModel::transform(const TokenSequence& doc) const {
    std::map<std::uint32_t, std::uint32_t> tf;
    for (const auto& g : ngrams(doc, config_.ngram_max)) {
        if (auto c = column(g)) ++tf[*c];
    }
    SparseVector v;
    v.index.reserve(tf.size());
    v.value.reserve(tf.size());
    for (auto [c, count] : tf) {
        const double w = static_cast<double>(count) * idf_[c];
        if (w == 0.0) continue;
        v.index.push_back(c);
        v.value.push_back(w);
    }
    return v;
}

json TfIdfModel::to_json() const {
    json j;
    j["ngram_max"] = config_.ngram_max;
    j["top_n"] = config_.top_n ? json(*config_.top_n) : json(nullptr);
    j["n_docs"] = n_docs_;
    j["terms"] = terms_;
    j["df"] = df_;
    return j;
}

TfIdfModel TfIdfModel::from_json(const json& j) {
    FeatureConfig cfg;
    cfg.ngram_max = j.at("ngram_max").get<int>();
    if (!j.at("top_n").is_null()) cfg.top_n = j.at("top_n").get<std::size_t>();
    return TfIdfModel(cfg, j.at("terms").get<std::vector<std::string>>(),
                      j.at("df").get<std::vector<std::uint32_t>>(), j.at("n_docs").get<std::size_t>());
}

std::vector<std::string> ngrams(const TokenSequence& doc, int ngram_max) {
    std::vector<std::string> out;
    out.reserve(doc.size() * static_cast<std::size_t>(ngram_max));
    for (const auto& t : doc) out.push_back(t);
    if (ngram_max >= 2) {
        for (std::size_t i = 0; i + 1 < doc.size(); ++i) out.push_back(doc[i] + ' ' + doc[i + 1]);
    }
    return out;
}

TfIdfModel build_vocab(std::span<const TokenSequence> corpus, const FeatureConfig& config) {
    if (corpus.empty()) throw Error("build_vocab: empty corpus");
    if (config.ngram_max != 1 && config.ngram_max != 2) {
        throw ValidationError("ngram_max", "must be 1 or 2");
    }
    if (config.top_n && *config.top_n == 0) throw ValidationError("top_n", "must be positive");

    struct Counts {
        std::uint64_t tf = 0;
        std::uint32_t df = 0;
    };
    std::unordered_map<std::string, Counts> counts;
    for (const auto& doc : corpus) {
        std::unordered_set<std::string> in_doc;
        for (auto& g : ngrams(doc, config.ngram_max)) {
            auto& c = counts[g];
            ++c.tf;
            if (in_doc.insert(g).second) ++c.df;
        }
    }

    std::vector<std::pair<std::string, Counts>> entries(counts.begin(), counts.end());
    if (config.top_n && *config.top_n < entries.size()) {
        const auto keep = static_cast<std::ptrdiff_t>(*config.top_n);
        std::partial_sort(entries.begin(), entries.begin() + keep, entries.end(),
                          [](const auto& a, const auto& b) {
                              if (a.second.tf != b.second.tf) return a.second.tf > b.second.tf;
                              return a.first < b.first;
                          });
        entries.resize(*config.top_n);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<std::string> terms;
    std::vector<std::uint32_t> df;
    terms.reserve(entries.size());
    df.reserve(entries.size());
    for (auto& [term, c] : entries) {
        terms.push_back(term);
        df.push_back(c.df);
    }
    return TfIdfModel(config, std::move(terms), std::move(df), corpus.size());
}

std::vector<SparseVector> transform_all(const TfIdfModel& model, std::span<const TokenSequence> docs) {
    std::vector<SparseVector> out(docs.size());
    const auto n = static_cast<std::int64_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = model.transform(docs[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::vector<SparseVector> transform_all_serial(const TfIdfModel& model,
                                               std::span<const TokenSequence> docs) {
    std::vector<SparseVector> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(model.transform(d));
    return out;
}

}  // namespace papageno::features
