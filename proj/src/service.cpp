#include "papageno/service.hpp"

#include <sstream>

#include "httplib.h"
#include "papageno/error.hpp"

namespace papageno::annotate {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message, const std::string& field = {}) {
    json body{{"error", message}};
    if (!field.empty()) body["field"] = field;
    send_json(res, body, status);
}

// Maps library errors onto status codes.
template <typename F>
httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const json::exception& e) {
            send_error(res, 400, std::string("malformed JSON: ") + e.what());
        } catch (const ValidationError& e) {
            send_error(res, e.field() == "round" ? 404 : 400, e.what(), e.field());
        } catch (const Error& e) {
            send_error(res, 422, e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    };
}

Level level_param(const httplib::Request& req) {
    if (!req.has_param("level")) return Level::task1;
    auto l = parse_level(req.get_param_value("level"));
    if (!l) throw ValidationError("level", "unknown level '" + req.get_param_value("level") + "'");
    return *l;
}

std::string coder_of(const httplib::Request& req, const json* body) {
    if (body && body->contains("coder")) return body->at("coder").get<std::string>();
    if (req.has_param("coder")) return req.get_param_value("coder");
    if (req.has_header("X-Coder")) return req.get_header_value("X-Coder");
    throw ValidationError("coder", "coder name is required");
}

json parse_body(const httplib::Request& req) {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw ValidationError("body", "expected a JSON object");
    return j;
}

}  // namespace

AnnotationService::AnnotationService(LabelStore& store, ServiceContext context)
    : store_(store), context_(std::move(context)), server_(std::make_unique<httplib::Server>()) {
    mount();
}

AnnotationService::~AnnotationService() = default;

httplib::Server& AnnotationService::server() { return *server_; }

bool AnnotationService::listen(const std::string& host, int port) { return server_->listen(host, port); }

int AnnotationService::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool AnnotationService::listen_after_bind() { return server_->listen_after_bind(); }

void AnnotationService::stop() { server_->stop(); }

void AnnotationService::mount() {
    auto& s = *server_;
    const std::string base = "/api/v1";
    const std::string round_path = base + R"(/rounds/([A-Za-z0-9_-]+))";

    s.Get(base + "/taxonomy", guarded([](const httplib::Request&, httplib::Response& res) {
              send_json(res, taxonomy_json());
          }));

    s.Post(base + "/derive", guarded([](const httplib::Request& req, httplib::Response& res) {
               const auto body = parse_body(req);
               const auto dims = dimensions_from_json(body.contains("dimensions") ? body["dimensions"] : body);
               const auto d = derive(dims);
               send_json(res, {{"category", std::string(to_string(d.category))},
                               {"task1", map_category(d.category, Level::task1)},
                               {"task2", map_category(d.category, Level::task2)},
                               {"adjudication_suggested", d.adjudication_suggested},
                               {"note", d.note}});
           }));

    s.Get(base + "/rounds", guarded([this](const httplib::Request&, httplib::Response& res) {
              json out = json::array();
              for (const auto& r : store_.rounds()) out.push_back(to_json(r));
              send_json(res, {{"rounds", out}});
          }));

    s.Post(base + "/rounds", guarded([this](const httplib::Request& req, httplib::Response& res) {
               const auto body = parse_body(req);
               RoundRequest rq;
               const auto strategy = body.at("strategy").get<std::string>();
               auto p = corpus::parse_provenance(strategy);
               if (!p) throw ValidationError("strategy", "unknown strategy '" + strategy + "'");
               rq.strategy = *p;
               rq.seed = body.value("seed", std::uint64_t{0});
               if (body.contains("targets")) rq.targets = body["targets"].get<std::map<std::string, std::size_t>>();
               rq.total = body.value("total", std::size_t{0});
               rq.coders = body.at("coders").get<std::vector<std::string>>();
               const PredictionSet* preds = nullptr;
               if (rq.strategy == Provenance::model_seeded) {
                   rq.predictions_ref = body.value("predictions", std::string());
                   auto it = context_.predictions.find(rq.predictions_ref);
                   if (it == context_.predictions.end()) {
                       throw ValidationError("predictions", "unknown prediction set '" + rq.predictions_ref + "'");
                   }
                   preds = &it->second;
               }
               const auto round = store_.create_round(rq, context_.pool, context_.keywords, preds);
               send_json(res, to_json(round), 201);
           }));

    s.Get(round_path, guarded([this](const httplib::Request& req, httplib::Response& res) {
              send_json(res, to_json(store_.round(req.matches[1])));
          }));

    s.Get(round_path + "/next", guarded([this](const httplib::Request& req, httplib::Response& res) {
              const std::string round = req.matches[1];
              const auto coder = coder_of(req, nullptr);
              const auto task = store_.next_task(round, coder);
              if (!task) {
                  const auto total = store_.round(round).tweets.size();
                  send_json(res, {{"tweet", nullptr}, {"done", total}, {"total", total}});
                  return;
              }
              send_json(res, {{"tweet", {{"id", task->tweet.id}, {"text", task->tweet.text}}},
                              {"done", task->done},
                              {"total", task->total}});
          }));

    s.Post(round_path + "/labels", guarded([this](const httplib::Request& req, httplib::Response& res) {
               const std::string round = req.matches[1];
               const auto body = parse_body(req);
               const auto coder = coder_of(req, &body);
               if (!body.contains("tweet_id") || !body["tweet_id"].is_string()) {
                   throw ValidationError("tweet_id", "missing tweet_id");
               }
               const auto tweet = body["tweet_id"].get<std::string>();
               LabelRecord rec;
               if (body.contains("override_category")) {
                   const auto name = body["override_category"].get<std::string>();
                   auto c = parse_category(name);
                   if (!c) throw ValidationError("override_category", "unknown category '" + name + "'");
                   rec = store_.submit_override(round, coder, tweet, *c);
               } else {
                   if (!body.contains("dimensions")) throw ValidationError("dimensions", "missing dimensions");
                   rec = store_.submit_label(round, coder, tweet, dimensions_from_json(body["dimensions"]));
               }
               send_json(res, to_json(rec), 201);
           }));

    s.Get(round_path + "/disagreements", guarded([this](const httplib::Request& req, httplib::Response& res) {
              const auto level = level_param(req);
              const auto report = store_.disagreements(req.matches[1], level);
              json items = json::array();
              for (const auto& d : report.items) items.push_back({{"tweet_id", d.tweet_id}, {"labels", d.labels}});
              send_json(res, {{"level", std::string(to_string(level))},
                              {"disagreements", items},
                              {"warnings", report.warnings}});
          }));

    s.Get(round_path + "/kappa", guarded([this](const httplib::Request& req, httplib::Response& res) {
              const auto level = level_param(req);
              std::optional<std::string> exclude;
              if (req.has_param("exclude") && !req.get_param_value("exclude").empty()) {
                  exclude = req.get_param_value("exclude");
              }
              std::optional<std::pair<std::string, std::string>> coders;
              if (req.has_param("coder_a") && req.has_param("coder_b")) {
                  coders = {req.get_param_value("coder_a"), req.get_param_value("coder_b")};
              }
              const auto k = store_.live_kappa(req.matches[1], level, exclude, coders);
              auto body = eval::to_json(k);
              body["level"] = std::string(to_string(level));
              body["exclude"] = exclude ? json(*exclude) : json(nullptr);
              send_json(res, body);
          }));

    s.Get(round_path + "/export", guarded([this](const httplib::Request& req, httplib::Response& res) {
              auto resolution = Resolution::latest;
              if (req.has_param("resolution")) {
                  const auto r = req.get_param_value("resolution");
                  if (r == "adjudicated") {
                      resolution = Resolution::adjudicated;
                  } else if (r != "latest") {
                      throw ValidationError("resolution", "expected latest or adjudicated");
                  }
              }
              const auto set = store_.export_labeled({req.matches[1]}, resolution,
                                                     req.has_param("adjudicator") ? req.get_param_value("adjudicator")
                                                                                  : std::string());
              json items = json::array();
              for (const auto& e : set.entries) {
                  items.push_back({{"id", e.tweet.id},
                                   {"label", std::string(to_string(e.label))},
                                   {"provenance", std::string(corpus::to_string(e.provenance))}});
              }
              send_json(res, {{"labels", items}});
          }));

    s.Get(base + "/labels.csv", guarded([this](const httplib::Request&, httplib::Response& res) {
              std::ostringstream os;
              store_.export_csv(os);
              res.set_content(os.str(), "text/csv");
          }));
}

}  // namespace papageno::annotate
