#include <numeric>
#include <sstream>

#include "doctest.h"
#include "papageno/error.hpp"
#include "papageno/random.hpp"
#include "papageno/signal.hpp"

using namespace papageno;
using namespace papageno::signal;

namespace {

DailySeries series_of(const std::vector<double>& values) {
    DailySeries s;
    s.categories = {"x", "rest"};
    auto day = parse_date("2020-01-01");
    for (double v : values) {
        DailyRow r;
        r.date = day;
        r.total = 100;
        r.shares = {v, 100 - v};
        r.counts = {std::size_t(v), std::size_t(100 - v)};
        s.rows.push_back(r);
        day += std::chrono::days(1);
    }
    return s;
}

corpus::Tweet dated(const std::string& id, const std::string& when) {
    return {id, "t", parse_iso8601(when), false};
}

}  // namespace

TEST_CASE("daily shares") {
    corpus::TweetSet tweets{dated("1", "2020-02-01T01:00:00Z"), dated("2", "2020-02-01T23:00:00Z"),
                            dated("3", "2020-02-01T12:00:00Z"), dated("4", "2020-02-01T13:00:00Z"),
                            dated("5", "2020-02-03T00:30:00+02:00")};
    PredictionSet p;
    p.add("1", "coping");
    p.add("2", "prevention");
    p.add("3", "prevention");
    p.add("4", "prevention");
    p.add("5", "coping");
    const auto s = daily_shares(p, tweets, level_classes(Level::task1));
    REQUIRE(s.rows.size() == 2);
    CHECK(format_date(s.rows[1].date) == "2020-02-02");
    CHECK(s.rows[0].shares[s.index_of("coping")] == 25.0);
    CHECK(s.rows[0].shares[s.index_of("prevention")] == 75.0);
    CHECK(s.rows[1].shares[s.index_of("coping")] == 100.0);
    for (const auto& r : s.rows) {
        CHECK(std::accumulate(r.shares.begin(), r.shares.end(), 0.0) == doctest::Approx(100.0).epsilon(1e-12));
        CHECK(std::accumulate(r.counts.begin(), r.counts.end(), std::size_t{0}) == r.total);
    }
    std::ostringstream csv;
    write_daily_csv(csv, s);
    CHECK(csv.str().rfind("date,total,suicidal_ideation_attempts", 0) == 0);

    corpus::TweetSet undated{{"1", "t", std::nullopt, false}};
    PredictionSet q;
    q.add("1", "coping");
    CHECK_THROWS(daily_shares(q, undated, level_classes(Level::task1)));
}

TEST_CASE("recall adjustment") {
    auto e = recall_adjust({{"a", 10.0}}, {{"a", 0.5}});
    CHECK(e.relevant[0].adjusted == 20.0);
    CHECK(e.residual == 80.0);
    e = recall_adjust({{"suicidal", 5.13}, {"coping", 1.26}, {"awareness", 22.06}, {"prevention", 15.51},
                       {"cases", 16.16}},
                      {{"suicidal", 1}, {"coping", 1}, {"awareness", 1}, {"prevention", 1}, {"cases", 1}});
    CHECK(std::abs(e.residual - 39.88) < 0.01);
    CHECK(recall_adjust({{"a", 30}, {"b", 20}}, {{"a", 1}, {"b", 1}}).residual == 50.0);
    e = recall_adjust({{"a", 60}}, {{"a", 0.5}});
    CHECK(e.residual == 0.0);
    CHECK(e.residual_clamped);
    CHECK_FALSE(e.warnings.empty());
    CHECK_THROWS(recall_adjust({{"a", 10}}, {{"a", 0.0}}));
    CHECK_THROWS(recall_adjust({{"a", 10}}, {}));
}

TEST_CASE("peak detection") {
    auto peaks = detect_peaks(series_of({1, 5, 1, 4, 1}), "x", 2, 1);
    REQUIRE(peaks.size() == 2);
    CHECK(format_date(peaks[0].date) == "2020-01-02");
    CHECK(format_date(peaks[1].date) == "2020-01-04");
    peaks = detect_peaks(series_of({1, 2, 3, 4, 5}), "x", 5, 1);
    REQUIRE(peaks.size() == 1);
    CHECK(format_date(peaks[0].date) == "2020-01-05");
    CHECK(detect_peaks(series_of({3, 3, 3}), "x", 1, 1).empty());
    // separation suppresses the weaker nearby peak
    peaks = detect_peaks(series_of({1, 9, 1, 8, 1, 1, 1, 1, 1, 7, 1}), "x", 5, 7);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[1].share == 7);
    CHECK_THROWS(detect_peaks(series_of({}), "x", 1, 1));
    CHECK_THROWS(detect_peaks(series_of({1, 2}), "x", 0, 1));
}

TEST_CASE("peak properties on random series") {
    Rng rng(99);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> v(60);
        for (auto& x : v) x = double(rng.below(50));
        const auto s = series_of(v);
        const int sep = 1 + int(rng.below(10));
        const auto peaks = detect_peaks(s, "x", 6, sep);
        for (std::size_t i = 0; i < peaks.size(); ++i) {
            if (i) CHECK(peaks[i].share <= peaks[i - 1].share);
            for (std::size_t j = 0; j < i; ++j) CHECK(std::abs((peaks[i].date - peaks[j].date).count()) >= sep);
            const auto idx = std::size_t((peaks[i].date - s.rows[0].date).count());
            if (idx > 0) CHECK(v[idx] > v[idx - 1]);
            if (idx + 1 < v.size()) CHECK(v[idx] > v[idx + 1]);
        }
    }
}

TEST_CASE("category frequencies") {
    std::vector<std::string> labels(284, "suicidal_ideation_attempts");
    labels.insert(labels.end(), 812, "off_topic");
    labels.insert(labels.end(), 3202 - labels.size(), "prevention");
    const auto fine = category_frequencies(labels, Level::fine);
    std::map<std::string, double> m(fine.begin(), fine.end());
    CHECK(round(m["suicidal_ideation_attempts"] * 100) / 100 == doctest::Approx(8.87));
    CHECK(round(m["off_topic"] * 100) / 100 == doctest::Approx(25.36));
    for (auto level : {Level::fine, Level::task1, Level::task2}) {
        const auto f = category_frequencies(labels, level);
        double sum = 0;
        for (const auto& [c, s] : f) sum += s;
        CHECK(sum == doctest::Approx(100.0).epsilon(1e-12));
    }
    const std::vector<std::string> uniform{"coping", "awareness", "prevention", "suicide_cases"};
    for (const auto& [c, s] : category_frequencies(uniform, Level::task1)) {
        if (c != "suicidal_ideation_attempts" && c != "irrelevant") CHECK(s == 25.0);
    }
    CHECK_THROWS(category_frequencies(std::vector<std::string>{}, Level::fine));
}

TEST_CASE("peak csv and chart") {
    const auto s = series_of({1, 5, 1, 4, 1});
    std::map<std::string, std::vector<Peak>> peaks{{"x", detect_peaks(s, "x", 2, 1)}};
    std::ostringstream csv;
    write_peaks_csv(csv, peaks, {"x"});
    CHECK(csv.str() == "category,date,share,rank\nx,2020-01-02,5.0000,1\nx,2020-01-04,4.0000,2\n");
    std::ostringstream svg;
    write_svg_chart(svg, s, "t");
    CHECK(svg.str().find("<polyline") != std::string::npos);
}
