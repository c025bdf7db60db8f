#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "papageno/corpus.hpp"
#include "papageno/eval.hpp"
#include "papageno/predictions.hpp"
#include "papageno/scheme.hpp"

namespace papageno::annotate {

using corpus::Provenance;

using CategoryKeywords = std::map<std::string, std::vector<std::string>>;

// Per-category keyword lists as a JSON object of string arrays.
CategoryKeywords load_category_keywords(const std::filesystem::path& path);

struct RoundRequest {
    Provenance strategy = Provenance::random;
    std::uint64_t seed = 0;
    // Per-category targets (keyword and model seeded); `total` for random.
    std::map<std::string, std::size_t> targets;
    std::size_t total = 0;
    std::vector<std::string> coders;
    std::string predictions_ref;  // model-seeded rounds: which prediction set
};

struct Round {
    std::string id;
    Provenance strategy = Provenance::random;
    std::uint64_t seed = 0;
    std::map<std::string, std::size_t> targets;
    std::size_t total = 0;
    std::vector<std::string> coders;
    std::string predictions_ref;
    std::vector<corpus::Tweet> tweets;  // task order
    std::vector<std::string> warnings;
    std::string status = "open";

    bool has_coder(const std::string& coder) const;
    bool has_tweet(const std::string& id) const;
};

// Draws the round's tweets from `pool`, skipping ids in `exclude`. A short
// pool yields a partial round with a warning.
Round sample_round(const RoundRequest& request, const corpus::TweetSet& pool,
                   const std::set<std::string>& exclude, const CategoryKeywords& keywords,
                   const PredictionSet* predictions);

nlohmann::json to_json(const Round& round, bool include_tweets = false);

struct LabelRecord {
    std::string round;
    std::string tweet_id;
    std::string coder;
    std::optional<DimensionAnnotation> dimensions;  // absent on adjudicator overrides
    Category category = Category::off_topic;
    bool override_label = false;
    bool adjudication_suggested = false;
    std::string timestamp;
    std::uint64_t sequence = 0;  // position in the store
};

nlohmann::json to_json(const LabelRecord& r);
LabelRecord label_from_json(const nlohmann::json& j);

struct Disagreement {
    std::string tweet_id;
    std::map<std::string, std::string> labels;  // coder -> label at the requested level
};

struct DisagreementReport {
    std::vector<Disagreement> items;
    std::vector<std::string> warnings;
};

enum class Resolution { latest, adjudicated };

// Rounds and label records, append-only. With a path, every change is
// appended to a JSON-lines journal and replayed on open. Safe for
// concurrent use.
class LabelStore {
public:
    using Clock = std::function<std::string()>;

    LabelStore();
    explicit LabelStore(std::filesystem::path journal);

    void set_clock(Clock clock);

    Round create_round(const RoundRequest& request, const corpus::TweetSet& pool, const CategoryKeywords& keywords,
                       const PredictionSet* predictions = nullptr);
    std::vector<Round> rounds() const;
    Round round(const std::string& id) const;

    struct Task {
        corpus::Tweet tweet;
        std::size_t done = 0;
        std::size_t total = 0;
    };
    // Next tweet in round order that `coder` has not labeled; none when done.
    std::optional<Task> next_task(const std::string& round, const std::string& coder) const;
    std::size_t progress(const std::string& round, const std::string& coder) const;

    LabelRecord submit_label(const std::string& round, const std::string& coder, const std::string& tweet_id,
                             const DimensionAnnotation& dims);
    // Direct category from an adjudicator; recorded as an override.
    LabelRecord submit_override(const std::string& round, const std::string& adjudicator,
                                const std::string& tweet_id, Category category);

    std::vector<LabelRecord> history() const;
    // Latest record per (tweet, coder) in the round; overrides excluded.
    std::vector<LabelRecord> current(const std::string& round) const;

    DisagreementReport disagreements(const std::string& round, Level level) const;

    // Kappa between two coders (default: the round's first two) over tweets
    // both labeled. With `exclude`, items where either coder chose that
    // class are dropped.
    eval::KappaResult live_kappa(const std::string& round, Level level,
                                 const std::optional<std::string>& exclude = std::nullopt,
                                 const std::optional<std::pair<std::string, std::string>>& coders =
                                     std::nullopt) const;

    // One label per tweet over the given rounds. `latest`: agreed label, or
    // the most recent record on disagreement. `adjudicated`: disagreements
    // need an override (or a record by `adjudicator`); otherwise throws
    // listing the ids.
    corpus::LabeledSet export_labeled(const std::vector<std::string>& rounds, Resolution resolution,
                                      const std::string& adjudicator = {}) const;

    // Header id,coder,category,round,timestamp then the dimension columns.
    void export_csv(std::ostream& out) const;

private:
    const Round& find_round(const std::string& id) const;
    void append_journal(const nlohmann::json& entry);
    void replay();
    LabelRecord append_record(LabelRecord r);
    DisagreementReport disagreements_locked(const std::string& round, Level level) const;

    mutable std::shared_mutex mutex_;
    std::optional<std::filesystem::path> journal_;
    Clock clock_;
    std::vector<Round> rounds_;
    std::vector<LabelRecord> records_;
};

}  // namespace papageno::annotate
