#include <filesystem>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "papageno/error.hpp"
#include "papageno/labeling.hpp"

using namespace papageno;
using namespace papageno::annotate;

namespace {

corpus::TweetSet make_pool(std::size_t n) {
    corpus::TweetSet pool;
    for (std::size_t i = 0; i < n; ++i) {
        std::string text = "tweet " + std::to_string(i);
        if (i % 5 == 0) text += " call the Hotline now";
        if (i % 7 == 0) text += " he Died yesterday";
        pool.push_back({"t" + std::to_string(i), text, std::nullopt, false});
    }
    return pool;
}

const CategoryKeywords kKeywords{{"prevention", {"hotline"}}, {"suicide_cases", {"died*"}}};

DimensionAnnotation personal(Perspective p) {
    return {MessageType::personal_experience, p, Person::first};
}
DimensionAnnotation call(Perspective p) { return {MessageType::call_for_action, p}; }

RoundRequest random_request(std::size_t total, std::vector<std::string> coders = {"ana", "ben"}) {
    RoundRequest r;
    r.strategy = Provenance::random;
    r.seed = 11;
    r.total = total;
    r.coders = std::move(coders);
    return r;
}

std::string tick_clock() {
    static int n = 0;
    return "2021-01-01T00:00:" + std::string(n < 10 ? "0" : "") + std::to_string(n++ % 60) + "Z";
}

}  // namespace

TEST_CASE("random rounds are reproducible and disjoint") {
    const auto pool = make_pool(50);
    const auto a = sample_round(random_request(10), pool, {}, kKeywords, nullptr);
    const auto b = sample_round(random_request(10), pool, {}, kKeywords, nullptr);
    CHECK(a.tweets == b.tweets);
    CHECK(a.tweets.size() == 10);

    LabelStore store;
    const auto r1 = store.create_round(random_request(30), pool, kKeywords);
    const auto r2 = store.create_round(random_request(30), pool, kKeywords);
    CHECK(r1.id == "r1");
    CHECK(r2.id == "r2");
    CHECK(r2.tweets.size() == 20);
    REQUIRE(r2.warnings.size() == 1);
    CHECK(r2.warnings[0] == "random: only 20 of 30 tweets available");
    for (const auto& t : r2.tweets) CHECK_FALSE(r1.has_tweet(t.id));
}

TEST_CASE("keyword and model seeded rounds") {
    const auto pool = make_pool(100);
    RoundRequest kw;
    kw.strategy = Provenance::keyword_seeded;
    kw.seed = 3;
    kw.targets = {{"prevention", 5}, {"suicide_cases", 40}};
    kw.coders = {"ana"};
    const auto r = sample_round(kw, pool, {}, kKeywords, nullptr);
    std::size_t hotline = 0;
    for (const auto& t : r.tweets) {
        const bool h = t.text.find("Hotline") != std::string::npos;
        const bool d = t.text.find("Died") != std::string::npos;
        CHECK((h || d));
        hotline += h && !d;
    }
    CHECK(r.tweets.size() < 45);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].rfind("suicide_cases: only", 0) == 0);

    kw.targets = {{"coping", 1}};
    CHECK_THROWS_AS(sample_round(kw, pool, {}, kKeywords, nullptr), ValidationError);

    PredictionSet preds;
    preds.level = Level::task2;
    for (std::size_t i = 0; i < pool.size(); ++i) preds.add(pool[i].id, i % 4 == 0 ? "about_suicide" : "off_topic");
    RoundRequest ms;
    ms.strategy = Provenance::model_seeded;
    ms.targets = {{"about_suicide", 10}};
    ms.coders = {"ana"};
    const auto m = sample_round(ms, pool, {}, kKeywords, &preds);
    CHECK(m.tweets.size() == 10);
    for (const auto& t : m.tweets) CHECK(preds.at(t.id) == "about_suicide");
    CHECK_THROWS_AS(sample_round(ms, pool, {}, kKeywords, nullptr), ValidationError);
    ms.targets = {{"coping", 1}};
    CHECK_THROWS_AS(sample_round(ms, pool, {}, kKeywords, &preds), ValidationError);
}

TEST_CASE("tasks, resubmission and history") {
    LabelStore store;
    store.set_clock(tick_clock);
    const auto r = store.create_round(random_request(3), make_pool(10), kKeywords);
    auto task = store.next_task("r1", "ana");
    REQUIRE(task);
    CHECK(task->tweet.id == r.tweets[0].id);
    CHECK(task->done == 0);
    CHECK(task->total == 3);

    store.submit_label("r1", "ana", r.tweets[0].id, personal(Perspective::problem_suffering));
    const auto rec = store.submit_label("r1", "ana", r.tweets[0].id, personal(Perspective::both));
    CHECK(rec.category == Category::coping);
    CHECK(rec.sequence == 1);
    CHECK(store.history().size() == 2);
    const auto cur = store.current("r1");
    REQUIRE(cur.size() == 1);
    CHECK(cur[0].category == Category::coping);
    CHECK(store.progress("r1", "ana") == 1);
    CHECK(store.next_task("r1", "ana")->tweet.id == r.tweets[1].id);

    store.submit_label("r1", "ana", r.tweets[1].id, call(Perspective::both));
    store.submit_label("r1", "ana", r.tweets[2].id, call(Perspective::both));
    CHECK_FALSE(store.next_task("r1", "ana"));

    CHECK_THROWS_AS(store.next_task("r1", "zoe"), ValidationError);
    CHECK_THROWS_AS(store.submit_label("r1", "ana", "nope", call(Perspective::both)), ValidationError);
    CHECK_THROWS_AS(store.submit_label("r1", "ana", r.tweets[0].id, call(Perspective::neither)), ValidationError);
    CHECK_THROWS(store.round("r9"));
}

TEST_CASE("disagreements at every level and kappa") {
    LabelStore store;
    const auto r = store.create_round(random_request(6), make_pool(6), kKeywords);
    const auto& t = r.tweets;
    CHECK(store.disagreements("r1", Level::fine).warnings.size() == 1);
    // ana and ben agree on 0,1; differ within about_suicide on 2; differ across task2 on 3
    const std::vector<std::pair<DimensionAnnotation, DimensionAnnotation>> pairs{
        {personal(Perspective::both), personal(Perspective::both)},
        {call(Perspective::both), call(Perspective::both)},
        {call(Perspective::both), call(Perspective::problem_suffering)},
        {call(Perspective::both), {MessageType::irrelevant, Perspective::neither, Person::not_applicable, false}},
        {{MessageType::news_experience, Perspective::both}, {MessageType::news_experience, Perspective::problem_suffering}},
        {personal(Perspective::problem_suffering), personal(Perspective::problem_suffering)},
    };
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        store.submit_label("r1", "ana", t[i].id, pairs[i].first);
        store.submit_label("r1", "ben", t[i].id, pairs[i].second);
    }
    CHECK(store.disagreements("r1", Level::fine).items.size() == 3);
    CHECK(store.disagreements("r1", Level::task1).items.size() == 2);
    const auto coarse = store.disagreements("r1", Level::task2);
    REQUIRE(coarse.items.size() == 1);
    CHECK(coarse.items[0].tweet_id == t[3].id);
    CHECK(coarse.items[0].labels.at("ben") == "off_topic");
    CHECK(coarse.warnings.empty());

    const auto k = store.live_kappa("r1", Level::fine);
    CHECK(k.n == 6);
    CHECK(k.po == doctest::Approx(0.5));
    const auto kx = store.live_kappa("r1", Level::task1, std::string("irrelevant"));
    CHECK(kx.n == 4);
    CHECK_THROWS_AS(store.live_kappa("r1", Level::task1, std::string("nonsense")), ValidationError);
    CHECK_THROWS_WITH(store.live_kappa("r1", Level::fine, std::nullopt, std::pair<std::string, std::string>{"ana", "zoe"}),
                      doctest::Contains("insufficient overlap"));
}

TEST_CASE("disjoint coverage is reported") {
    LabelStore store;
    const auto r = store.create_round(random_request(4), make_pool(4), kKeywords);
    store.submit_label("r1", "ana", r.tweets[0].id, call(Perspective::both));
    store.submit_label("r1", "ben", r.tweets[1].id, call(Perspective::both));
    const auto rep = store.disagreements("r1", Level::fine);
    REQUIRE(rep.warnings.size() == 1);
    CHECK(rep.warnings[0].find("disjoint") != std::string::npos);
}

TEST_CASE("export resolution") {
    LabelStore store;
    const auto r = store.create_round(random_request(3, {"ana", "ben", "cy"}), make_pool(3), kKeywords);
    const auto& t = r.tweets;
    store.submit_label("r1", "ana", t[0].id, call(Perspective::both));
    store.submit_label("r1", "ben", t[0].id, call(Perspective::both));
    store.submit_label("r1", "ana", t[1].id, call(Perspective::both));
    store.submit_label("r1", "ben", t[1].id, call(Perspective::problem_suffering));
    store.submit_label("r1", "ana", t[2].id, call(Perspective::both));
    store.submit_label("r1", "ben", t[2].id, call(Perspective::problem_suffering));

    auto latest = store.export_labeled({"r1"}, Resolution::latest);
    REQUIRE(latest.size() == 3);
    CHECK(latest.entries[1].label == Category::awareness);

    CHECK_THROWS_WITH(store.export_labeled({"r1"}, Resolution::adjudicated),
                      doctest::Contains((t[1].id + ", " + t[2].id).c_str()));
    store.submit_label("r1", "cy", t[1].id, call(Perspective::both));
    store.submit_override("r1", "lead", t[2].id, Category::suicide_other);
    const auto adj = store.export_labeled({"r1"}, Resolution::adjudicated, "cy");
    REQUIRE(adj.size() == 3);
    CHECK(adj.entries[1].label == Category::prevention);
    CHECK(adj.entries[2].label == Category::suicide_other);
    CHECK(adj.entries[0].provenance == Provenance::random);

    std::ostringstream csv;
    store.export_csv(csv);
    std::string header;
    std::istringstream in(csv.str());
    std::getline(in, header);
    CHECK(header == "id,coder,category,round,timestamp,message_type,perspective,person,serious,focus_on_bereaved,"
                    "mentions_case,override");
    const auto text = csv.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 9);
}

TEST_CASE("journal replay restores state") {
    const auto path = std::filesystem::temp_directory_path() / "papageno_journal_test.jsonl";
    std::filesystem::remove(path);
    {
        LabelStore store(path);
        const auto r = store.create_round(random_request(4), make_pool(8), kKeywords);
        store.submit_label("r1", "ana", r.tweets[0].id, personal(Perspective::both));
        store.submit_override("r1", "lead", r.tweets[1].id, Category::prevention);
    }
    LabelStore again(path);
    REQUIRE(again.rounds().size() == 1);
    CHECK(again.history().size() == 2);
    CHECK(again.history()[1].override_label);
    CHECK(again.progress("r1", "ana") == 1);
    const auto r2 = again.create_round(random_request(4), make_pool(8), kKeywords);
    CHECK(r2.id == "r2");
    for (const auto& t : r2.tweets) CHECK_FALSE(again.round("r1").has_tweet(t.id));
    std::filesystem::remove(path);
}

TEST_CASE("label records round trip through json") {
    LabelRecord r;
    r.round = "r1";
    r.tweet_id = "x";
    r.coder = "ana";
    r.dimensions = personal(Perspective::both);
    r.category = Category::coping;
    r.timestamp = "2021-01-01T00:00:00Z";
    r.sequence = 4;
    const auto back = label_from_json(to_json(r));
    CHECK(back.dimensions == r.dimensions);
    CHECK(back.category == r.category);
    CHECK(back.sequence == 4);
}

TEST_CASE("concurrent submissions") {
    LabelStore store;
    const auto r = store.create_round(random_request(200, {"a", "b", "c", "d"}), make_pool(200), kKeywords);
    std::vector<std::thread> threads;
    for (const std::string coder : {"a", "b", "c", "d"}) {
        threads.emplace_back([&, coder] {
            while (auto task = store.next_task("r1", coder)) {
                store.submit_label("r1", coder, task->tweet.id, call(Perspective::both));
                store.disagreements("r1", Level::task1);
            }
        });
    }
    for (auto& t : threads) t.join();
    const auto h = store.history();
    CHECK(h.size() == 800);
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i].sequence == i);
    CHECK(store.disagreements("r1", Level::fine).items.empty());
}
