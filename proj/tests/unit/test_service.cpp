#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "papageno/service.hpp"

using namespace papageno;
using namespace papageno::annotate;
using nlohmann::json;

namespace {

struct Running {
    LabelStore store;
    AnnotationService service;
    std::thread thread;
    int port = 0;

    explicit Running(ServiceContext ctx) : service(store, std::move(ctx)) {
        port = service.bind_any_port("127.0.0.1");
        thread = std::thread([this] { service.listen_after_bind(); });
        service.server().wait_until_ready();
    }
    ~Running() {
        service.stop();
        thread.join();
    }
    httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

ServiceContext context() {
    ServiceContext ctx;
    for (int i = 0; i < 20; ++i) ctx.pool.push_back({"t" + std::to_string(i), "text " + std::to_string(i)});
    ctx.keywords = {{"prevention", {"text 1"}}};
    PredictionSet p;
    p.level = Level::task2;
    for (const auto& t : ctx.pool) p.add(t.id, "about_suicide");
    ctx.predictions["svm"] = p;
    return ctx;
}

json post(httplib::Client& c, const std::string& path, const json& body, int expect) {
    auto res = c.Post(path, body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == expect);
    return json::parse(res->body);
}

json get(httplib::Client& c, const std::string& path, int expect = 200) {
    auto res = c.Get(path);
    REQUIRE(res);
    CHECK(res->status == expect);
    return json::parse(res->body);
}

const json kCall{{"message_type", "call_for_action"}, {"perspective", "both"}};
const json kAware{{"message_type", "call_for_action"}, {"perspective", "problem_suffering"}};

}  // namespace

TEST_CASE("taxonomy and derive endpoints") {
    Running srv(context());
    auto c = srv.client();
    CHECK(get(c, "/api/v1/taxonomy")["categories"].size() == 12);
    const auto d = post(c, "/api/v1/derive", kCall, 200);
    CHECK(d["category"] == "prevention");
    CHECK(d["task2"] == "about_suicide");
    const auto bad = post(c, "/api/v1/derive", {{"message_type", "news_experience"}, {"perspective", "neither"}}, 400);
    CHECK(bad["field"] == "perspective");
    auto res = c.Post("/api/v1/derive", "{not json", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
}

TEST_CASE("annotation workflow over http") {
    Running srv(context());
    auto c = srv.client();
    const auto round = post(c, "/api/v1/rounds",
                            {{"strategy", "random"}, {"seed", 5}, {"total", 4}, {"coders", {"ana", "ben"}}}, 201);
    CHECK(round["id"] == "r1");
    CHECK(get(c, "/api/v1/rounds")["rounds"].size() == 1);
    get(c, "/api/v1/rounds/r7", 404);

    std::vector<std::string> ids;
    for (int i = 0; i < 4; ++i) {
        const auto next = get(c, "/api/v1/rounds/r1/next?coder=ana");
        CHECK(next["done"] == i);
        const auto id = next["tweet"]["id"].get<std::string>();
        ids.push_back(id);
        const auto rec = post(c, "/api/v1/rounds/r1/labels",
                              {{"coder", "ana"}, {"tweet_id", id}, {"dimensions", kCall}}, 201);
        CHECK(rec["category"] == "prevention");
        post(c, "/api/v1/rounds/r1/labels",
             {{"coder", "ben"}, {"tweet_id", id}, {"dimensions", i == 0 ? kAware : kCall}}, 201);
    }
    CHECK(get(c, "/api/v1/rounds/r1/next?coder=ana")["tweet"].is_null());
    httplib::Headers h{{"X-Coder", "ben"}};
    auto res = c.Get("/api/v1/rounds/r1/next", h);
    REQUIRE(res);
    CHECK(json::parse(res->body)["tweet"].is_null());

    const auto dis = get(c, "/api/v1/rounds/r1/disagreements?level=fine");
    REQUIRE(dis["disagreements"].size() == 1);
    CHECK(dis["disagreements"][0]["labels"]["ben"] == "awareness");
    CHECK(get(c, "/api/v1/rounds/r1/disagreements?level=task2")["disagreements"].empty());
    get(c, "/api/v1/rounds/r1/disagreements?level=99", 400);

    const auto k = get(c, "/api/v1/rounds/r1/kappa?level=fine");
    CHECK(k["n"] == 4);
    get(c, "/api/v1/rounds/r1/kappa?level=fine&coder_a=ana&coder_b=zed", 422);

    get(c, "/api/v1/rounds/r1/export?resolution=adjudicated", 422);
    post(c, "/api/v1/rounds/r1/labels", {{"coder", "lead"}, {"tweet_id", ids[0]}, {"override_category", "awareness"}},
         201);
    const auto ex = get(c, "/api/v1/rounds/r1/export?resolution=adjudicated");
    REQUIRE(ex["labels"].size() == 4);
    for (const auto& e : ex["labels"]) CHECK(e["label"] == (e["id"] == ids[0] ? "awareness" : "prevention"));

    auto csv = c.Get("/api/v1/labels.csv");
    REQUIRE(csv);
    CHECK(csv->get_header_value("Content-Type") == "text/csv");
    CHECK(std::count(csv->body.begin(), csv->body.end(), '\n') == 10);

    post(c, "/api/v1/rounds/r1/labels", {{"coder", "zoe"}, {"tweet_id", ids[1]}, {"dimensions", kCall}}, 400);
    post(c, "/api/v1/rounds/r1/labels", {{"coder", "ana"}, {"dimensions", kCall}}, 400);
    post(c, "/api/v1/rounds/r9/labels", {{"coder", "ana"}, {"tweet_id", ids[1]}, {"dimensions", kCall}}, 404);
}

TEST_CASE("seeded rounds over http") {
    Running srv(context());
    auto c = srv.client();
    const auto m = post(c, "/api/v1/rounds",
                        {{"strategy", "model_seeded"},
                         {"predictions", "svm"},
                         {"targets", {{"about_suicide", 3}}},
                         {"coders", {"ana"}}},
                        201);
    CHECK(m["size"] == 3);
    CHECK(get(c, "/api/v1/rounds/r1")["id"] == "r1");
    post(c, "/api/v1/rounds",
         {{"strategy", "model_seeded"}, {"predictions", "nope"}, {"targets", {{"about_suicide", 3}}}, {"coders", {"a"}}},
         400);
    const auto k = post(c, "/api/v1/rounds",
                        {{"strategy", "keyword_seeded"}, {"targets", {{"prevention", 50}}}, {"coders", {"ana"}}}, 201);
    CHECK(k["warnings"].size() == 1);
    post(c, "/api/v1/rounds", {{"strategy", "guesswork"}, {"coders", {"a"}}}, 400);
}
