#include "papageno/training.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "papageno/csv.hpp"
#include "papageno/error.hpp"
#include "papageno/random.hpp"

namespace papageno::models {

using nlohmann::json;

std::string SvmConfig::describe() const {
    std::ostringstream os;
    os << "ngrams=" << features.ngram_max << " top_n="
       << (features.top_n ? std::to_string(*features.top_n) : std::string("all")) << " C=" << c
       << " class_weight=" << to_string(class_weight);
    return os.str();
}

json preprocess_to_json(const preprocess::PreprocessConfig& c) {
    json j{{"remove_digits", c.remove_digits},
           {"strip_digit_chars", c.strip_digit_chars},
           {"remove_punctuation", c.remove_punctuation},
           {"remove_stopwords", c.remove_stopwords},
           {"max_tokens", c.max_tokens}};
    if (c.lemma_table) {
        // sorted so that saved models are byte-stable
        std::map<std::string, std::string> sorted(c.lemma_table->begin(), c.lemma_table->end());
        j["lemma_table"] = sorted;
    } else {
        j["lemma_table"] = nullptr;
    }
    return j;
}

preprocess::PreprocessConfig preprocess_from_json(const json& j) {
    preprocess::PreprocessConfig c;
    c.remove_digits = j.at("remove_digits").get<bool>();
    c.strip_digit_chars = j.value("strip_digit_chars", false);
    c.remove_punctuation = j.at("remove_punctuation").get<bool>();
    c.remove_stopwords = j.at("remove_stopwords").get<bool>();
    c.max_tokens = j.at("max_tokens").get<std::size_t>();
    if (!j.at("lemma_table").is_null()) {
        c.lemma_table = j.at("lemma_table").get<std::unordered_map<std::string, std::string>>();
    }
    return c;
}

TextClassifier TextClassifier::train_svm(std::span<const TokenSequence> docs, std::span<const std::string> labels,
                                         const std::vector<std::string>& classes, const SvmConfig& config,
                                         preprocess::PreprocessConfig preprocessing, Level level,
                                         const SolverOptions& solver) {
    if (docs.size() != labels.size()) throw Error("train_svm: docs/labels size mismatch");
    TextClassifier tc;
    tc.level_ = level;
    tc.preprocessing_ = std::move(preprocessing);
    tc.config_ = config;
    tc.tfidf_ = features::build_vocab(docs, config.features);
    const auto x = features::transform_all(tc.tfidf_, docs);
    OvOTrainOptions opt{config.c, config.class_weight, solver};
    auto ovo = train_ovo(x, labels, tc.tfidf_.size(), classes, opt);
    tc.classes_ = ovo.classes();
    tc.model_ = std::move(ovo);
    return tc;
}

TextClassifier TextClassifier::train_majority(std::span<const std::string> labels,
                                              const std::vector<std::string>& classes,
                                              preprocess::PreprocessConfig preprocessing, Level level) {
    TextClassifier tc;
    tc.level_ = level;
    tc.preprocessing_ = std::move(preprocessing);
    tc.classes_ = classes;
    tc.model_ = models::train_majority(labels, classes);
    return tc;
}

std::string TextClassifier::predict_tokens(const TokenSequence& doc) const {
    if (const auto* m = std::get_if<MajorityModel>(&model_)) return m->label();
    return std::get<OvOModel>(model_).predict(tfidf_.transform(doc));
}

std::string TextClassifier::predict(std::string_view text) const {
    if (const auto* m = std::get_if<MajorityModel>(&model_)) return m->label();
    return predict_tokens(preprocess::pipeline(text, preprocessing_));
}

std::vector<std::string> TextClassifier::predict_batch(std::span<const std::string> texts) const {
    std::vector<std::string> out(texts.size());
    const auto n = static_cast<std::int64_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = predict(texts[static_cast<std::size_t>(i)]);
    }
    return out;
}

json TextClassifier::to_json() const {
    json j;
    j["format"] = "papageno-classifier";
    j["version"] = kFormatVersion;
    j["level"] = std::string(to_string(level_));
    j["classes"] = classes_;
    j["preprocessing"] = preprocess_to_json(preprocessing_);
    if (const auto* m = std::get_if<MajorityModel>(&model_)) {
        j["kind"] = "majority";
        j["majority_label"] = m->label();
        return j;
    }
    j["kind"] = "svm";
    j["svm"] = {{"C", config_->c},
                {"class_weight", std::string(to_string(config_->class_weight))},
                {"kernel", "linear"},
                {"decision_function", "ovo"}};
    j["tfidf"] = tfidf_.to_json();
    j["ovo"] = std::get<OvOModel>(model_).to_json();
    return j;
}

TextClassifier TextClassifier::from_json(const json& j) {
    if (j.value("format", std::string()) != "papageno-classifier") throw Error("not a papageno classifier file");
    if (j.at("version").get<int>() != kFormatVersion) {
        throw Error("unsupported classifier version " + std::to_string(j.at("version").get<int>()));
    }
    TextClassifier tc;
    auto level = parse_level(j.at("level").get<std::string>());
    if (!level) throw Error("bad level in classifier file");
    tc.level_ = *level;
    tc.classes_ = j.at("classes").get<std::vector<std::string>>();
    tc.preprocessing_ = preprocess_from_json(j.at("preprocessing"));
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "majority") {
        tc.model_ = MajorityModel(j.at("majority_label").get<std::string>());
        return tc;
    }
    if (kind != "svm") throw Error("unknown classifier kind '" + kind + "'");
    tc.tfidf_ = features::TfIdfModel::from_json(j.at("tfidf"));
    SvmConfig cfg;
    cfg.c = j.at("svm").at("C").get<double>();
    cfg.class_weight = parse_class_weight(j.at("svm").at("class_weight").get<std::string>());
    cfg.features = tc.tfidf_.config();
    tc.config_ = cfg;
    tc.model_ = OvOModel::from_json(j.at("ovo"));
    return tc;
}

void TextClassifier::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_json().dump() << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

TextClassifier TextClassifier::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return from_json(json::parse(in));
}

std::vector<SvmConfig> GridSpec::expand() const {
    std::vector<SvmConfig> out;
    for (int ng : ngram_max) {
        for (const auto& top : top_n) {
            for (double cv : c) {
                for (auto cw : class_weight) {
                    SvmConfig cfg;
                    cfg.c = cv;
                    cfg.class_weight = cw;
                    cfg.features = {ng, top};
                    out.push_back(cfg);
                }
            }
        }
    }
    return out;
}

GridSearchResult grid_search(std::span<const TokenSequence> train_docs, std::span<const std::string> train_labels,
                             std::span<const TokenSequence> val_docs, std::span<const std::string> val_labels,
                             const std::vector<std::string>& classes, std::span<const SvmConfig> configs,
                             const SolverOptions& solver, int workers) {
    if (configs.empty()) throw Error("grid_search: empty grid");
    if (train_docs.size() != train_labels.size() || val_docs.size() != val_labels.size()) {
        throw Error("grid_search: docs/labels size mismatch");
    }

    struct Prepared {
        features::TfIdfModel model;
        std::vector<SparseVector> train;
        std::vector<SparseVector> val;
        std::string error;
    };
    // one vocabulary per distinct feature config
    std::vector<features::FeatureConfig> feature_configs;
    std::vector<std::size_t> feature_of(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        auto it = std::find(feature_configs.begin(), feature_configs.end(), configs[i].features);
        if (it == feature_configs.end()) {
            feature_configs.push_back(configs[i].features);
            it = feature_configs.end() - 1;
        }
        feature_of[i] = static_cast<std::size_t>(it - feature_configs.begin());
    }
    std::vector<Prepared> prepared(feature_configs.size());
    for (std::size_t f = 0; f < feature_configs.size(); ++f) {
        try {
            prepared[f].model = features::build_vocab(train_docs, feature_configs[f]);
            prepared[f].train = features::transform_all(prepared[f].model, train_docs);
            prepared[f].val = features::transform_all(prepared[f].model, val_docs);
        } catch (const std::exception& e) {
            prepared[f].error = e.what();
        }
    }

    std::vector<GridEntry> entries(configs.size());
    const auto count = static_cast<std::int64_t>(configs.size());
    const int threads = std::max(1, workers);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1)
    for (std::int64_t q = 0; q < count; ++q) {
        const auto i = static_cast<std::size_t>(q);
        auto& e = entries[i];
        e.order = i;
        e.config = configs[i];
        const auto& prep = prepared[feature_of[i]];
        if (!prep.error.empty()) {
            e.error = prep.error;
            continue;
        }
        try {
            OvOTrainOptions opt{configs[i].c, configs[i].class_weight, solver};
            const auto model = train_ovo_serial(prep.train, train_labels, prep.model.size(), classes, opt);
            const auto predicted = predict_all_serial(model, prep.val);
            e.validation = eval::evaluate(val_labels, predicted, classes).macro;
        } catch (const std::exception& ex) {
            e.error = ex.what();
        }
    }

    std::stable_sort(entries.begin(), entries.end(), [](const GridEntry& a, const GridEntry& b) {
        if (a.validation.has_value() != b.validation.has_value()) return a.validation.has_value();
        if (!a.validation) return false;
        return a.validation->f1 > b.validation->f1;
    });
    GridSearchResult result;
    result.ranked = std::move(entries);
    if (!result.ranked.front().validation) {
        throw Error("grid_search: every config failed; first error: " + result.ranked.front().error);
    }
    result.best = result.ranked.front().config;
    return result;
}

void write_grid_csv(std::ostream& out, const GridSearchResult& result) {
    csv::write_row(out, {"rank", "ngram_max", "top_n", "C", "class_weight", "kernel", "val_precision",
                         "val_recall", "val_f1", "val_accuracy", "error"});
    std::size_t rank = 0;
    for (const auto& e : result.ranked) {
        ++rank;
        auto num = [](double v) {
            std::ostringstream os;
            os.precision(17);
            os << v;
            return os.str();
        };
        std::vector<std::string> row{std::to_string(rank),
                                     std::to_string(e.config.features.ngram_max),
                                     e.config.features.top_n ? std::to_string(*e.config.features.top_n) : "all",
                                     num(e.config.c),
                                     std::string(to_string(e.config.class_weight)),
                                     result.kernel};
        if (e.validation) {
            row.push_back(num(e.validation->precision));
            row.push_back(num(e.validation->recall));
            row.push_back(num(e.validation->f1));
            row.push_back(num(e.validation->accuracy));
            row.emplace_back();
        } else {
            row.insert(row.end(), {"", "", "", "", e.error});
        }
        csv::write_row(out, row);
    }
}

std::vector<std::size_t> stratified_folds(std::span<const std::string> labels, std::size_t k, std::uint64_t seed,
                                          const std::vector<std::string>& class_order) {
    if (k < 2) throw ValidationError("k", "need at least 2 folds");
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    if (by_class.size() < 2) throw Error("cross_validate: need at least 2 classes, found " +
                                         std::to_string(by_class.size()));
    std::vector<std::string> order;
    for (const auto& c : class_order) {
        if (by_class.contains(c)) order.push_back(c);
    }
    for (const auto& [c, _] : by_class) {
        if (std::find(order.begin(), order.end(), c) == order.end()) order.push_back(c);
    }
    std::vector<std::size_t> fold(labels.size());
    std::size_t rotation = 0;
    for (std::size_t ci = 0; ci < order.size(); ++ci) {
        auto& members = by_class[order[ci]];
        if (members.size() < k) {
            throw Error("cross_validate: class '" + order[ci] + "' has " + std::to_string(members.size()) +
                        " examples, fewer than k=" + std::to_string(k));
        }
        Rng rng(derive_seed(seed, ci));
        rng.shuffle(std::span<std::size_t>(members));
        for (std::size_t m : members) fold[m] = rotation++ % k;
    }
    return fold;
}

CvResult cross_validate(std::span<const TokenSequence> docs, std::span<const std::string> labels,
                        const std::vector<std::string>& classes, const SvmConfig& config, std::size_t k,
                        std::uint64_t seed, const SolverOptions& solver) {
    if (docs.size() != labels.size()) throw Error("cross_validate: docs/labels size mismatch");
    const auto fold = stratified_folds(labels, k, seed, classes);
    CvResult result;
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<TokenSequence> tr_docs;
        std::vector<std::string> tr_labels;
        std::vector<TokenSequence> te_docs;
        std::vector<std::string> te_labels;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            if (fold[i] == f) {
                te_docs.push_back(docs[i]);
                te_labels.push_back(labels[i]);
            } else {
                tr_docs.push_back(docs[i]);
                tr_labels.push_back(labels[i]);
            }
        }
        const auto tfidf = features::build_vocab(tr_docs, config.features);
        const auto xtr = features::transform_all(tfidf, tr_docs);
        const auto xte = features::transform_all(tfidf, te_docs);
        OvOTrainOptions opt{config.c, config.class_weight, solver};
        const auto model = train_ovo(xtr, tr_labels, tfidf.size(), classes, opt);
        const auto predicted = predict_all(model, xte);
        eval::ReportMeta meta{"tfidf_svm", "", "fold " + std::to_string(f + 1), seed, f + 1};
        result.folds.push_back(eval::evaluate(te_labels, predicted, classes, meta));
    }
    result.mean = eval::mean_report(result.folds);
    result.mean.meta.split = "cv-mean";
    return result;
}

}  // namespace papageno::models
