// Prints one PASS/FAIL line per acceptance criterion; exit status 1 on any failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "papageno/error.hpp"
#include "papageno/pipeline.hpp"
#include "papageno/random.hpp"
#include "papageno/scheme.hpp"
#include "papageno/signal.hpp"
#include "papageno/stats.hpp"
#include "papageno/svm.hpp"
#include "synthetic.hpp"

using namespace papageno;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

const fs::path kSource = PAPAGENO_SOURCE_DIR;

Outcome majority_closed_forms() {
    Outcome o;
    struct Case {
        const char* fixture;
        std::string label;
        std::array<double, 4> expect;
    };
    const std::vector<Case> cases{
        {"data/fixtures/task1_test_distribution.json", "irrelevant", {0.44, 0.07, 0.17, 0.10}},
        {"data/fixtures/task2_test_distribution.json", "about_suicide", {0.75, 0.37, 0.50, 0.43}},
    };
    for (const auto& c : cases) {
        const auto d = pipeline::load_distribution(kSource / c.fixture);
        const auto r = pipeline::evaluate_constant(d.counts, c.label, d.level);
        const std::array<double, 4> got{round2(r.macro.accuracy), round2(r.macro.precision), round2(r.macro.recall),
                                        round2(r.macro.f1)};
        for (std::size_t i = 0; i < 4; ++i) {
            o.require(std::abs(got[i] - c.expect[i]) < 1e-9, std::string(to_string(d.level)) + " metric " +
                                                                  std::to_string(i) + " = " + fmt(got[i], 2));
        }
    }
    if (o.ok) o.detail = "task1 0.44/0.07/0.17/0.10, task2 0.75/0.37/0.50/0.43";
    return o;
}

Outcome prevalence_residual() {
    Outcome o;
    const auto j = pipeline::read_json(kSource / "data/fixtures/task1_adjusted_shares.json");
    std::vector<std::pair<std::string, double>> shares;
    std::map<std::string, double> recalls;
    for (const auto& [k, v] : j.at("adjusted_shares").items()) {
        shares.emplace_back(k, v.get<double>());
        recalls[k] = 1.0;
    }
    const auto e = signal::recall_adjust(shares, recalls);
    const double expect = j.at("residual_irrelevant").get<double>();
    o.require(std::abs(e.residual - expect) <= 0.01, "residual " + fmt(e.residual));
    if (o.ok) o.detail = "residual " + fmt(e.residual, 2);
    return o;
}

Outcome synthetic_benchmark() {
    Outcome o;
    const auto set = synthetic::make_corpus();
    const auto parts = corpus::stratified_split(set, {0.64, 0.16, 0.20}, 42, Level::task1);
    corpus::LabeledSet train = parts.train;
    train.entries.insert(train.entries.end(), parts.validation.entries.begin(), parts.validation.entries.end());
    const auto tr = pipeline::prepare(train, Level::task1, {});
    const auto te = pipeline::prepare(parts.test, Level::task1, {});
    const auto& classes = level_classes(Level::task1);
    const auto svm = models::TextClassifier::train_svm(tr.docs, tr.labels, classes, {}, {}, Level::task1);
    const auto maj = models::TextClassifier::train_majority(tr.labels, classes, {}, Level::task1);
    std::vector<std::string> ps;
    std::vector<std::string> pm;
    for (const auto& d : te.docs) {
        ps.push_back(svm.predict_tokens(d));
        pm.push_back(maj.predict_tokens(d));
    }
    const auto rs = eval::evaluate(te.labels, ps, classes);
    const auto rm = eval::evaluate(te.labels, pm, classes);
    o.require(rs.macro.f1 >= 0.90, "macro F1 " + fmt(rs.macro.f1));
    for (std::size_t i = 0; i < classes.size(); ++i) {
        o.require(rs.per_class[i].f1 > rm.per_class[i].f1, classes[i] + " does not beat the majority baseline");
    }
    if (o.ok) o.detail = "macro F1 " + fmt(rs.macro.f1) + " on " + std::to_string(te.docs.size()) + " held-out";
    return o;
}

SparseVector dense_to_sparse(const std::vector<double>& row) {
    SparseVector v;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] != 0.0) {
            v.index.push_back(static_cast<std::uint32_t>(i));
            v.value.push_back(row[i]);
        }
    }
    return v;
}

Outcome solver() {
    Outcome o;
    models::SolverOptions opt;
    opt.fit_bias = false;
    opt.tolerance = 1e-10;
    const std::vector<SparseVector> x2{dense_to_sparse({1.0}), dense_to_sparse({-1.0})};
    const std::vector<int> y2{1, -1};
    const auto two = models::train_binary_svm(x2, y2, 1, 1.0, 1.0, 1.0, opt);
    o.require(std::abs(two.model.weights[0] - 1.0) <= 1e-3, "two-point weight " + fmt(two.model.weights[0], 6));

    Rng rng(2024);
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t d = 1 + rep % 3;
        const std::size_t n = 8 + rng.below(6);
        std::vector<std::vector<double>> dense;
        std::vector<SparseVector> x;
        std::vector<int> y;
        for (std::size_t i = 0; i < n; ++i) {
            const int label = i % 2 ? 1 : -1;
            std::vector<double> row(d);
            for (auto& v : row) v = (rng.uniform() * 2 - 1) + 0.6 * label;
            dense.push_back(row);
            x.push_back(dense_to_sparse(row));
            y.push_back(label);
        }
        const double c = 0.3 + rng.uniform();
        models::SolverOptions so;
        so.seed = std::uint64_t(rep);
        so.tolerance = 1e-8;
        so.record_history = true;
        const auto r = models::train_binary_svm(x, y, d, c, 1.0, 1.0, so);
        const std::vector<double> cap(n, c);
        const double best = oracle::svm_grid_minimum(dense, y, cap, true);
        const double got = oracle::svm_primal(dense, y, cap, r.model.weights, r.model.bias, true);
        worst = std::max(worst, got / best - 1.0);
        o.require(got <= best * 1.01 + 1e-9, "problem " + std::to_string(rep) + " primal gap");
        const auto& h = r.stats.dual_history;
        for (std::size_t e = 1; e < h.size(); ++e) {
            if (h[e] < h[e - 1] - 1e-12 * std::max(1.0, std::abs(h[e]))) {
                o.require(false, "dual decreased in problem " + std::to_string(rep));
                break;
            }
        }
    }
    if (o.ok) o.detail = "w=" + fmt(two.model.weights[0], 6) + ", worst primal gap " + fmt(worst * 100, 3) + "%";
    return o;
}

Outcome coverage() {
    Outcome o;
    const double upper = stats::clopper_pearson(0, 10).high;
    const double closed = 1.0 - std::pow(0.025, 1.0 / 10.0);
    o.require(std::abs(upper - 0.3085) <= 1e-4 && std::abs(upper - closed) < 1e-9, "upper " + fmt(upper, 6));
    Rng rng(5);
    std::string cover;
    for (double p : {0.1, 0.3, 0.5}) {
        std::size_t hit = 0;
        const int trials = 10000;
        for (int t = 0; t < trials; ++t) {
            std::uint64_t x = 0;
            for (int i = 0; i < 50; ++i) x += rng.uniform() < p;
            const auto ci = stats::clopper_pearson(x, 50);
            hit += ci.low <= p && p <= ci.high;
        }
        const double rate = double(hit) / trials;
        o.require(rate >= 0.94, "coverage at p=" + fmt(p, 1) + " is " + fmt(rate));
        cover += (cover.empty() ? "" : ", ") + fmt(rate, 3);
    }
    if (o.ok) o.detail = "upper(0/10) " + fmt(upper) + ", coverage " + cover;
    return o;
}

Outcome kappa() {
    Outcome o;
    std::vector<std::string> a;
    std::vector<std::string> b;
    const std::vector<std::vector<double>> table{{20, 5}, {10, 15}};
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            for (int k = 0; k < int(table[i][j]); ++k) {
                a.push_back(i ? "y" : "x");
                b.push_back(j ? "y" : "x");
            }
        }
    }
    const auto k = eval::cohens_kappa(a, b);
    o.require(std::abs(k.kappa - 0.4) <= 1e-9, "table kappa " + fmt(k.kappa, 12));
    o.require(std::abs(k.kappa - oracle::kappa_from_table(table).kappa) <= 1e-12, "oracle mismatch");

    Rng rng(77);
    std::vector<std::string> ra;
    std::vector<std::string> rb;
    const std::vector<std::string> labels{"p", "q", "r"};
    for (int i = 0; i < 10000; ++i) {
        ra.push_back(labels[rng.below(3)]);
        rb.push_back(labels[rng.below(3)]);
    }
    const auto indep = eval::cohens_kappa(ra, rb);
    o.require(std::abs(indep.kappa) < 0.03, "independent raters kappa " + fmt(indep.kappa));
    if (o.ok) o.detail = "kappa " + fmt(k.kappa, 3) + ", independent " + fmt(indep.kappa);
    return o;
}

Outcome rule_engine() {
    using namespace annotate;
    Outcome o;
    const auto all = all_valid_annotations();
    std::set<Category> reached;
    for (const auto& d : all) {
        try {
            const auto c = derive_category(d);
            o.require(static_cast<std::size_t>(c) < kCategoryCount, "category out of range");
            reached.insert(c);
        } catch (const Error& e) {
            o.require(false, e.what());
        }
    }
    const DimensionAnnotation bereaved{MessageType::case_report, Perspective::problem_suffering,
                                       Person::not_applicable, true, true, true};
    const DimensionAnnotation cases{MessageType::call_for_action, Perspective::solution_coping,
                                    Person::not_applicable, true, false, true};
    const DimensionAnnotation coping{MessageType::personal_experience, Perspective::both, Person::first};
    o.require(derive_category(bereaved) == Category::bereaved_negative, "bereaved over case");
    o.require(derive_category(cases) == Category::suicide_cases, "case over prevention");
    o.require(derive_category(coping) == Category::coping, "coping over suffering");
    if (o.ok) {
        o.detail = std::to_string(all.size()) + " valid points, " + std::to_string(reached.size()) +
                   " categories reached, 3 worked cases";
    }
    return o;
}

Outcome taxonomy() {
    Outcome o;
    std::size_t collapsed = 0;
    std::size_t off = 0;
    for (auto c : all_categories()) {
        const auto& t1 = map_category(c, Level::task1);
        const std::string fine(to_string(c));
        if (t1 == "irrelevant") {
            ++collapsed;
        } else {
            o.require(t1 == fine, fine + " renamed at task1");
        }
        const auto& t2 = map_category(c, Level::task2);
        if (t2 == "off_topic") {
            ++off;
            o.require(c == Category::off_topic, fine + " mapped to off_topic");
        } else {
            o.require(t2 == "about_suicide", fine + " task2 label " + t2);
        }
    }
    o.require(collapsed == 7, std::to_string(collapsed) + " collapse into irrelevant");
    o.require(off == 1, "task2 off_topic count " + std::to_string(off));
    if (o.ok) o.detail = "7 fine categories collapse, off_topic isolated";
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome determinism() {
    Outcome o;
    const auto root = fs::temp_directory_path() / ("papageno_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    synthetic::Options opt;
    opt.documents = 1200;
    auto set = synthetic::make_corpus(opt);
    for (auto& e : set.entries) e.tweet.text = "suicide " + e.tweet.text;
    {
        std::ofstream out(root / "raw.jsonl");
        corpus::write_labeled(out, set);
    }
    const corpus::FilterConfig filter{{"suicide"}, {}};
    auto run = [&](const std::string& name) {
        const auto dir = root / name;
        fs::create_directories(dir);
        pipeline::ingest(root / "raw.jsonl", dir / "ingested.jsonl", filter);
        pipeline::split(dir / "ingested.jsonl", dir / "splits", 42);
        const auto model = pipeline::train_svm(dir / "splits/train.jsonl", Level::task1, {}, {}, 42);
        model.save(dir / "model.json");
        const auto report = pipeline::evaluate(models::TextClassifier::load(dir / "model.json"),
                                               dir / "splits/test.jsonl", "svm", "test");
        pipeline::write_json(dir / "metrics.json", eval::to_json(report));
        return slurp(dir / "metrics.json");
    };
    const auto first = run("a");
    const auto second = run("b");
    o.require(!first.empty() && first == second, "metric JSON differs between runs");
    if (o.ok) o.detail = std::to_string(first.size()) + " identical bytes";
    fs::remove_all(root);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
        {"majority-baseline closed forms", majority_closed_forms},
        {"prevalence table residual", prevalence_residual},
        {"synthetic corpus SVM benchmark", synthetic_benchmark},
        {"solver correctness", solver},
        {"clopper-pearson interval", coverage},
        {"cohen kappa", kappa},
        {"rule engine totality", rule_engine},
        {"taxonomy mappings", taxonomy},
        {"pipeline determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, fn] : checks) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.ok;
        std::cout << (o.ok ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << fmt(secs, 2) << "s]\n";
    }
    return failed ? 1 : 0;
}
