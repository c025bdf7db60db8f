#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "papageno/error.hpp"
#include "papageno/eval.hpp"
#include "papageno/random.hpp"

using namespace papageno;
using namespace papageno::eval;

namespace {

std::pair<std::vector<std::string>, std::vector<std::string>> from_table(
    const std::vector<std::vector<int>>& t, const std::vector<std::string>& classes) {
    std::vector<std::string> a, b;
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t j = 0; j < t.size(); ++j) {
            for (int k = 0; k < t[i][j]; ++k) {
                a.push_back(classes[i]);
                b.push_back(classes[j]);
            }
        }
    }
    return {a, b};
}

MetricsReport constant(const std::vector<std::pair<std::string, int>>& counts, const std::string& label) {
    std::vector<std::string> truth, classes;
    for (const auto& [c, n] : counts) {
        classes.push_back(c);
        truth.insert(truth.end(), std::size_t(n), c);
    }
    std::vector<std::string> pred(truth.size(), label);
    return evaluate(truth, pred, classes);
}

}  // namespace

TEST_CASE("confusion counts") {
    const std::vector<std::string> cls{"A", "B"};
    const std::vector<std::string> t{"A", "A", "B"}, p{"A", "B", "B"};
    const auto cm = confusion(t, p, cls);
    CHECK(cm.counts == std::vector<std::vector<std::uint64_t>>{{1, 1}, {0, 1}});
    CHECK(confusion(t, t, cls).trace() == 3);
    const std::vector<std::string> flipped{"B", "B", "A"};
    CHECK(confusion(t, flipped, cls).trace() == 0);
    CHECK_THROWS(confusion(t, std::vector<std::string>{"A"}, cls));
    CHECK_THROWS(confusion(t, std::vector<std::string>{"A", "C", "B"}, cls));
}

TEST_CASE("class metrics") {
    auto [a, b] = from_table({{20, 5}, {10, 15}}, {"x", "y"});
    const auto cm = confusion(a, b, {"x", "y"});
    const auto m = class_metrics(cm, 0);
    CHECK(m.precision == doctest::Approx(20.0 / 30));
    CHECK(m.recall == doctest::Approx(0.8));
    CHECK(m.f1 == doctest::Approx(2 * (2.0 / 3) * 0.8 / (2.0 / 3 + 0.8)));
    REQUIRE(m.precision_ci);
    CHECK(m.precision_ci->low <= m.precision);
    CHECK(m.precision_ci->high >= m.precision);

    const auto cm3 = confusion(std::vector<std::string>{"x", "y"}, std::vector<std::string>{"x", "y"}, {"x", "y", "z"});
    const auto z = class_metrics(cm3, 2);
    CHECK(z.precision == 0.0);
    CHECK(z.recall == 0.0);
    CHECK(z.f1 == 0.0);
    CHECK_FALSE(z.precision_ci);
    const auto x = class_metrics(cm3, 0);
    CHECK(x.precision == 1.0);
    CHECK(x.recall == 1.0);
    CHECK(x.f1 == 1.0);
}

TEST_CASE("majority closed forms match the paper tables") {
    const auto t1 = constant({{"suicidal_ideation_attempts", 57}, {"coping", 42}, {"awareness", 63},
                              {"prevention", 91}, {"suicide_cases", 103}, {"irrelevant", 285}},
                             "irrelevant");
    CHECK(round_half_up(t1.macro.accuracy) == 0.44);
    CHECK(round_half_up(t1.macro.precision) == 0.07);
    CHECK(round_half_up(t1.macro.recall) == 0.17);
    CHECK(round_half_up(t1.macro.f1) == 0.10);
    const double m = 285.0 / 641;
    CHECK(t1.macro.precision == doctest::Approx(m / 6));
    CHECK(t1.macro.f1 == doctest::Approx(2 * m / (1 + m) / 6));

    const auto t2 = constant({{"about_suicide", 478}, {"off_topic", 163}}, "about_suicide");
    CHECK(round_half_up(t2.macro.accuracy) == 0.75);
    CHECK(round_half_up(t2.macro.precision) == 0.37);
    CHECK(round_half_up(t2.macro.recall) == 0.50);
    CHECK(round_half_up(t2.macro.f1) == 0.43);
}

TEST_CASE("report invariants") {
    Rng rng(5);
    const std::vector<std::string> cls{"a", "b", "c", "d"};
    std::vector<std::string> t, p;
    for (int i = 0; i < 400; ++i) {
        t.push_back(cls[rng.below(4)]);
        p.push_back(rng.uniform() < 0.6 ? t.back() : cls[rng.below(4)]);
    }
    const auto r = evaluate(t, p, cls);
    std::uint64_t support = 0;
    double weighted_recall = 0.0;
    double mp = 0, mr = 0, mf = 0;
    for (std::size_t i = 0; i < cls.size(); ++i) {
        const auto& c = r.per_class[i];
        support += c.support;
        weighted_recall += c.recall * double(c.support);
        mp += c.precision / 4;
        mr += c.recall / 4;
        mf += c.f1 / 4;
        CHECK(r.confusion->row_total(i) == c.support);
    }
    CHECK(support == 400);
    CHECK(r.macro.accuracy == doctest::Approx(weighted_recall / 400));
    CHECK(r.macro.precision == doctest::Approx(mp));
    CHECK(r.macro.recall == doctest::Approx(mr));
    CHECK(r.macro.f1 == doctest::Approx(mf));

    std::vector<std::string> reordered{"d", "b", "a", "c"};
    const auto r2 = evaluate(t, p, reordered);
    CHECK(r2.macro.f1 == doctest::Approx(r.macro.f1));
    CHECK(r2.macro.precision == doctest::Approx(r.macro.precision));
}

TEST_CASE("kappa hand case") {
    auto [a, b] = from_table({{20, 5}, {10, 15}}, {"x", "y"});
    const auto k = cohens_kappa(a, b);
    CHECK(k.po == doctest::Approx(0.7));
    CHECK(k.pe == doctest::Approx(0.5));
    CHECK(std::abs(k.kappa - 0.4) < 1e-9);
    CHECK(k.n == 50);
    const double se = std::sqrt(0.7 * 0.3 / (50 * 0.25));
    CHECK(k.se == doctest::Approx(se));
    CHECK(k.ci.low == doctest::Approx(0.4 - 1.96 * se));
}

TEST_CASE("kappa agrees with the table oracle and is relabeling invariant") {
    Rng rng(77);
    const std::vector<std::string> cls{"p", "q", "r"};
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<std::vector<int>> t(3, std::vector<int>(3));
        std::vector<std::vector<double>> td(3, std::vector<double>(3));
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                t[i][j] = int(rng.below(20)) + (i == j ? 10 : 0);
                td[i][j] = t[i][j];
            }
        }
        auto [a, b] = from_table(t, cls);
        const auto k = cohens_kappa(a, b);
        const auto o = oracle::kappa_from_table(td);
        CHECK(k.kappa == doctest::Approx(o.kappa).epsilon(1e-12));
        CHECK(k.pe == doctest::Approx(o.pe).epsilon(1e-12));
        auto rename = [](std::vector<std::string> v) {
            for (auto& s : v) s = s == "p" ? "r" : s == "r" ? "p" : "zz";
            return v;
        };
        CHECK(cohens_kappa(rename(a), rename(b)).kappa == doctest::Approx(k.kappa).epsilon(1e-12));
    }
}

TEST_CASE("kappa edge cases") {
    const std::vector<std::string> same{"a", "b", "a", "b"};
    CHECK(cohens_kappa(same, same).kappa == doctest::Approx(1.0));
    const std::vector<std::string> one{"a", "a", "a"};
    CHECK(cohens_kappa(one, one).kappa == 1.0);
    CHECK_THROWS(cohens_kappa(same, std::vector<std::string>{"a"}));
}

TEST_CASE("kappa of independent raters is near zero") {
    Rng rng(1);
    std::vector<std::string> a, b;
    for (int i = 0; i < 10000; ++i) {
        a.push_back(std::string(1, char('a' + rng.below(3))));
        b.push_back(std::string(1, char('a' + rng.below(3))));
    }
    const auto k = cohens_kappa(a, b);
    CHECK(std::abs(k.kappa) < 0.03);
    CHECK(k.ci.low <= 0.0);
    CHECK(k.ci.high >= 0.0);
    const auto boot = kappa_bootstrap_ci(std::span(a).first(2000), std::span(b).first(2000), 200, 3);
    CHECK(boot.low < boot.high);
    CHECK(boot == kappa_bootstrap_ci(std::span(a).first(2000), std::span(b).first(2000), 200, 3));
}

TEST_CASE("benchmark reports per run and mean") {
    const std::vector<std::string> cls{"a", "b"};
    EvalSplit split{"test", {"1", "2", "3", "4"}, {"a", "a", "b", "b"}};
    ModelRuns runs{"m", {}};
    for (int r = 0; r < 5; ++r) {
        PredictionSet p;
        p.model = "m";
        p.add("1", "a");
        p.add("2", r % 2 ? "b" : "a");
        p.add("3", "b");
        p.add("4", "b");
        runs.runs.push_back(p);
    }
    ModelRuns maj{"majority", {}};
    PredictionSet mp;
    for (auto id : {"1", "2", "3", "4"}) mp.add(id, "a");
    maj.runs.push_back(mp);
    const std::vector<ModelRuns> models{maj, runs};
    const std::vector<EvalSplit> splits{split};
    const auto reports = benchmark(models, splits, cls, "task2");
    CHECK(reports.size() == 1 + 5 + 1);
    const auto& mean = reports.back();
    CHECK(mean.runs == 5);
    double acc = 0;
    for (int r = 1; r <= 5; ++r) acc += reports[std::size_t(r)].macro.accuracy / 5;
    CHECK(mean.macro.accuracy == doctest::Approx(acc));
    CHECK(reports[0].macro.f1 < mean.macro.f1);

    ModelRuns missing{"broken", {}};
    PredictionSet bp;
    bp.add("1", "a");
    missing.runs.push_back(bp);
    const std::vector<ModelRuns> bad{missing};
    try {
        benchmark(bad, splits, cls, "task2");
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("report json round trip and formatting") {
    auto [a, b] = from_table({{20, 5}, {10, 15}}, {"x", "y"});
    auto r = evaluate(a, b, {"x", "y"}, {"svm", "task2", "test", 42, std::nullopt});
    const auto back = report_from_json(nlohmann::json::parse(to_json(r).dump()));
    CHECK(to_json(back) == to_json(r));
    const auto table = format_table(std::span(&r, 1));
    CHECK(table.find("0.70") != std::string::npos);
    std::ostringstream csv;
    write_confusion_normalized_csv(csv, *r.confusion);
    CHECK(csv.str().find("80.00") != std::string::npos);
    CHECK(round_half_up(0.125) == 0.13);
    CHECK(round_half_up(0.445) == 0.45);
    CHECK(round_half_up(0.4446) == 0.44);
}
