#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "papageno/error.hpp"
#include "papageno/pipeline.hpp"
#include "papageno/signal.hpp"
#include "synthetic.hpp"

using namespace papageno;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("ingest keeps the original lines") {
    TempDir dir("papageno_ingest_test");
    {
        std::ofstream out(dir.path / "raw.jsonl");
        out << R"({"id":"1","text":"a suicide prevention day","created_at":"2020-01-01T00:00:00Z","label":"prevention"})"
            << "\n";
        out << R"({"id":"2","text":"nothing to see","created_at":"2020-01-01T00:00:00Z"})" << "\n";
        out << R"({"id":"3","text":"RT @x a suicide prevention day","created_at":"2020-01-01T00:00:00Z"})" << "\n";
        out << "not json\n";
    }
    corpus::FilterConfig cfg{{"suicide"}, {}};
    const auto report = pipeline::ingest(dir.path / "raw.jsonl", dir.path / "out.jsonl", cfg);
    CHECK(report.skipped == 1);
    CHECK(report.stats.input == 3);
    CHECK(report.stats.after_dedupe == 1);
    std::ifstream in(dir.path / "out.jsonl");
    std::string line;
    std::getline(in, line);
    CHECK(line.find("\"label\":\"prevention\"") != std::string::npos);
    CHECK_FALSE(std::getline(in, line));
    CHECK(pipeline::to_json(report)["input"] == 3);
}

TEST_CASE("split, train and evaluate are reproducible") {
    TempDir dir("papageno_pipeline_test");
    synthetic::Options o;
    o.documents = 600;
    {
        std::ofstream out(dir.path / "labeled.jsonl");
        corpus::write_labeled(out, synthetic::make_corpus(o));
    }
    auto run = [&](const std::string& sub) {
        const auto out = dir.path / sub;
        const auto parts = pipeline::split(dir.path / "labeled.jsonl", out, 42);
        CHECK(parts.train.size() + parts.validation.size() + parts.test.size() == 600);
        const auto model = pipeline::train_svm(out / "train.jsonl", Level::task1, {}, {}, 42);
        model.save(out / "model.json");
        const auto report = pipeline::evaluate(models::TextClassifier::load(out / "model.json"), out / "test.jsonl",
                                               "svm", "test");
        return eval::to_json(report).dump();
    };
    const auto first = run("a");
    CHECK(first == run("b"));
    CHECK(nlohmann::json::parse(first)["macro"]["f1"].get<double>() > 0.8);

    const auto majority = pipeline::train_majority(dir.path / "a" / "train.jsonl", Level::task2, {});
    const auto m = pipeline::evaluate(majority, dir.path / "a" / "test.jsonl", "majority", "test");
    CHECK(m.per_class.size() == 2);

    pipeline::write_json(dir.path / "m.json", eval::to_json(m));
    const auto recalls = pipeline::recalls_from_report(dir.path / "m.json");
    CHECK(recalls.at("about_suicide") == 1.0);
    CHECK(recalls.at("off_topic") == 0.0);
}

TEST_CASE("constant predictor from a class distribution") {
    const auto d = pipeline::load_distribution(fs::path(PAPAGENO_SOURCE_DIR) / "data/fixtures/task1_test_distribution.json");
    CHECK(d.level == Level::task1);
    REQUIRE(d.counts.size() == 6);
    const auto r = pipeline::evaluate_constant(d.counts, "irrelevant", d.level);
    CHECK(std::round(r.macro.accuracy * 100) / 100 == doctest::Approx(0.44));
    CHECK(std::round(r.macro.precision * 100) / 100 == doctest::Approx(0.07));
    CHECK(std::round(r.macro.recall * 100) / 100 == doctest::Approx(0.17));
    CHECK(std::round(r.macro.f1 * 100) / 100 == doctest::Approx(0.10));
    CHECK_THROWS(pipeline::evaluate_constant(d.counts, "bogus", d.level));
    CHECK_THROWS(pipeline::read_json("/nonexistent/file.json"));
}

TEST_CASE("labeled category counts fixture") {
    const auto d = pipeline::load_distribution(fs::path(PAPAGENO_SOURCE_DIR) / "data/fixtures/labeled_category_counts.json");
    CHECK(d.level == Level::fine);
    std::vector<std::string> labels;
    std::size_t total = 0;
    for (const auto& [label, n] : d.counts) {
        labels.insert(labels.end(), n, label);
        total += n;
    }
    CHECK(total == 3202);
    std::map<std::string, double> shares;
    for (const auto& [c, s] : signal::category_frequencies(labels, Level::fine)) shares[c] = s;
    CHECK(std::round(shares["suicidal_ideation_attempts"] * 100) / 100 == doctest::Approx(8.87));
    CHECK(std::round(shares["off_topic"] * 100) / 100 == doctest::Approx(25.36));
    const auto task1 = signal::category_frequencies(labels, Level::task1);
    CHECK(task1.back().first == "irrelevant");
    CHECK(std::round(task1.back().second * 3202 / 100) == 1428);
}
