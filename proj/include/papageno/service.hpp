#pragma once

#include <map>
#include <memory>
#include <string>

#include "papageno/labeling.hpp"

namespace httplib {
class Server;
}

namespace papageno::annotate {

struct ServiceContext {
    corpus::TweetSet pool;
    CategoryKeywords keywords;
    std::map<std::string, PredictionSet> predictions;  // by reference name
};

// JSON API under /api/v1:
//   GET  /taxonomy                      categories, definitions, examples
//   POST /derive                        dimensions -> category preview
//   GET  /rounds, POST /rounds, GET /rounds/{id}
//   GET  /rounds/{id}/next?coder=
//   POST /rounds/{id}/labels            {coder, tweet_id, dimensions} or {coder, tweet_id, override_category}
//   GET  /rounds/{id}/disagreements?level=
//   GET  /rounds/{id}/kappa?level=&exclude=&coder_a=&coder_b=
//   GET  /rounds/{id}/export?resolution=&adjudicator=
//   GET  /labels.csv
// The coder may also be given in an X-Coder header.
class AnnotationService {
public:
    AnnotationService(LabelStore& store, ServiceContext context);
    ~AnnotationService();
    AnnotationService(const AnnotationService&) = delete;
    AnnotationService& operator=(const AnnotationService&) = delete;

    httplib::Server& server();

    // Blocks until stop().
    bool listen(const std::string& host, int port);
    // Binds an ephemeral port and returns it; call listen_after_bind() next.
    int bind_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();

private:
    void mount();

    LabelStore& store_;
    ServiceContext context_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace papageno::annotate
