#include "papageno/pipeline.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "papageno/error.hpp"

namespace papageno::pipeline {

using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

IngestReport ingest(const fs::path& input, const fs::path& output, const corpus::FilterConfig& config,
                    const corpus::FilterOptions& options) {
    config.validate();
    const auto text = slurp(input);
    std::istringstream tweets_in(text);
    auto loaded = corpus::read_tweets(tweets_in);

    // first raw line per id, as read_tweets keeps the first occurrence
    std::unordered_map<std::string, std::string> raw;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id")) continue;
        const auto& idv = j["id"];
        const std::string id = idv.is_string() ? idv.get<std::string>() : idv.dump();
        raw.emplace(id, line);
    }

    const auto result = corpus::filter(loaded.tweets, config, options);
    auto out = open_out(output);
    for (const auto& t : result.tweets) out << raw.at(t.id) << '\n';
    if (!out) throw IoError("write failed for " + output.string());
    return {result.stats, loaded.skipped, loaded.warnings};
}

json to_json(const IngestReport& r) {
    const auto& s = r.stats;
    return {{"input", s.input},
            {"after_keywords", s.after_keywords},
            {"after_exclusions", s.after_exclusions},
            {"after_retweets", s.after_retweets},
            {"after_dedupe", s.after_dedupe},
            {"after_dates", s.after_dates},
            {"skipped_lines", r.skipped},
            {"warnings", r.warnings}};
}

corpus::SplitSet split(const fs::path& labeled, const fs::path& out_dir, std::uint64_t seed, Level level,
                       const corpus::SplitRatios& ratios) {
    const auto set = corpus::load_labeled(labeled);
    auto parts = corpus::stratified_split(set, ratios, seed, level);
    fs::create_directories(out_dir);
    const std::pair<const char*, const corpus::LabeledSet*> files[] = {
        {"train.jsonl", &parts.train}, {"validation.jsonl", &parts.validation}, {"test.jsonl", &parts.test}};
    for (const auto& [name, part] : files) {
        auto out = open_out(out_dir / name);
        corpus::write_labeled(out, *part);
    }
    return parts;
}

Corpus prepare(const corpus::LabeledSet& set, Level level, const preprocess::PreprocessConfig& config) {
    Corpus c;
    c.labels = set.labels(level);
    c.ids.reserve(set.size());
    c.docs.resize(set.size());
    for (const auto& e : set.entries) c.ids.push_back(e.tweet.id);
    const auto n = static_cast<std::int64_t>(set.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        c.docs[k] = preprocess::pipeline(set.entries[k].tweet.text, config);
    }
    return c;
}

models::TextClassifier train_svm(const fs::path& train, Level level, const models::SvmConfig& config,
                                 const preprocess::PreprocessConfig& preprocessing, std::uint64_t seed) {
    const auto set = corpus::load_labeled(train);
    const auto c = prepare(set, level, preprocessing);
    models::SolverOptions solver;
    solver.seed = seed;
    return models::TextClassifier::train_svm(c.docs, c.labels, level_classes(level), config, preprocessing, level,
                                             solver);
}

models::TextClassifier train_majority(const fs::path& train, Level level,
                                      const preprocess::PreprocessConfig& preprocessing) {
    const auto set = corpus::load_labeled(train);
    return models::TextClassifier::train_majority(set.labels(level), level_classes(level), preprocessing, level);
}

PredictionSet predict(const models::TextClassifier& model, const corpus::TweetSet& tweets,
                      const std::string& model_name) {
    std::vector<std::string> texts;
    texts.reserve(tweets.size());
    for (const auto& t : tweets) texts.push_back(t.text);
    const auto labels = model.predict_batch(texts);
    PredictionSet out;
    out.model = model_name;
    out.level = model.level();
    for (std::size_t i = 0; i < tweets.size(); ++i) out.add(tweets[i].id, labels[i]);
    return out;
}

eval::MetricsReport evaluate(const models::TextClassifier& model, const fs::path& labeled,
                             const std::string& model_name, const std::string& split_name) {
    const auto set = corpus::load_labeled(labeled);
    const auto truth = set.labels(model.level());
    std::vector<std::string> texts;
    for (const auto& e : set.entries) texts.push_back(e.tweet.text);
    const auto predicted = model.predict_batch(texts);
    eval::ReportMeta meta{model_name, std::string(to_string(model.level())), split_name, std::nullopt, std::nullopt};
    return eval::evaluate(truth, predicted, level_classes(model.level()), meta);
}

eval::MetricsReport evaluate_constant(const std::vector<std::pair<std::string, std::size_t>>& counts,
                                      const std::string& label, Level level) {
    std::vector<std::string> truth;
    for (const auto& [c, n] : counts) truth.insert(truth.end(), n, c);
    std::vector<std::string> predicted(truth.size(), label);
    eval::ReportMeta meta{"majority", std::string(to_string(level)), "test", std::nullopt, std::nullopt};
    return eval::evaluate(truth, predicted, level_classes(level), meta);
}

Distribution load_distribution(const fs::path& path) {
    const auto j = read_json(path);
    Distribution d;
    const auto lv = parse_level(j.at("level").get<std::string>());
    if (!lv) throw ValidationError("level", "unknown level in " + path.string());
    d.level = *lv;
    const auto& counts = j.at("counts");
    for (const auto& c : level_classes(d.level)) {
        d.counts.emplace_back(c, counts.contains(c) ? counts[c].get<std::size_t>() : 0);
    }
    for (const auto& [name, _] : counts.items()) {
        if (!is_label_at(name, d.level)) throw ValidationError(name, "not a class at this level");
    }
    return d;
}

std::map<std::string, double> recalls_from_report(const fs::path& metrics) {
    const auto report = eval::report_from_json(read_json(metrics));
    std::map<std::string, double> out;
    for (const auto& c : report.per_class) out[c.label] = c.recall;
    return out;
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    return json::parse(in);
}

}  // namespace papageno::pipeline
