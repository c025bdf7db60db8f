#include "papageno/labeling.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <ostream>
#include <unordered_map>

#include "papageno/csv.hpp"
#include "papageno/error.hpp"
#include "papageno/random.hpp"
#include "papageno/timeutil.hpp"
#include "papageno/utf8.hpp"

namespace papageno::annotate {

using nlohmann::json;

namespace {

std::string now_iso() {
    return format_iso8601(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

bool matches_any(const std::string& folded_text, const std::vector<std::string>& keywords) {
    for (auto kw : keywords) {
        if (!kw.empty() && kw.back() == '*') kw.pop_back();
        if (!kw.empty() && folded_text.find(kw) != std::string::npos) return true;
    }
    return false;
}

json tweet_json(const corpus::Tweet& t) {
    json j{{"id", t.id}, {"text", t.text}};
    if (t.timestamp) j["created_at"] = format_iso8601(*t.timestamp);
    return j;
}

corpus::Tweet tweet_from_json(const json& j) {
    corpus::Tweet t;
    t.id = j.at("id").get<std::string>();
    t.text = j.at("text").get<std::string>();
    if (j.contains("created_at")) t.timestamp = parse_iso8601(j.at("created_at").get<std::string>());
    return t;
}

Round round_from_json(const json& j) {
    Round r;
    r.id = j.at("id").get<std::string>();
    auto s = corpus::parse_provenance(j.at("strategy").get<std::string>());
    if (!s) throw Error("bad strategy in journal");
    r.strategy = *s;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.targets = j.at("targets").get<std::map<std::string, std::size_t>>();
    r.total = j.at("total").get<std::size_t>();
    r.coders = j.at("coders").get<std::vector<std::string>>();
    r.predictions_ref = j.value("predictions", std::string());
    for (const auto& t : j.at("tweets")) r.tweets.push_back(tweet_from_json(t));
    r.warnings = j.value("warnings", std::vector<std::string>{});
    r.status = j.value("status", std::string("open"));
    return r;
}

}  // namespace

CategoryKeywords load_category_keywords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    const auto j = json::parse(in);
    CategoryKeywords out;
    for (const auto& [name, list] : j.items()) {
        if (!parse_category(name)) throw ValidationError(name, "not a category");
        for (const auto& kw : list) out[name].push_back(utf8::fold(kw.get<std::string>()));
    }
    return out;
}

bool Round::has_coder(const std::string& coder) const {
    return std::find(coders.begin(), coders.end(), coder) != coders.end();
}

bool Round::has_tweet(const std::string& id) const {
    return std::any_of(tweets.begin(), tweets.end(), [&](const corpus::Tweet& t) { return t.id == id; });
}

Round sample_round(const RoundRequest& request, const corpus::TweetSet& pool, const std::set<std::string>& exclude,
                   const CategoryKeywords& keywords, const PredictionSet* predictions) {
    if (pool.empty()) throw ValidationError("pool", "tweet pool is empty");
    if (request.coders.empty()) throw ValidationError("coders", "at least one coder is required");
    for (const auto& [k, n] : request.targets) {
        if (n == 0) throw ValidationError("targets", "target for '" + k + "' must be positive");
    }
    Round round;
    round.strategy = request.strategy;
    round.seed = request.seed;
    round.targets = request.targets;
    round.total = request.total;
    round.coders = request.coders;
    round.predictions_ref = request.predictions_ref;

    std::vector<const corpus::Tweet*> available;
    for (const auto& t : pool) {
        if (!exclude.contains(t.id)) available.push_back(&t);
    }
    std::set<std::string> chosen;
    std::vector<const corpus::Tweet*> picked;

    auto take = [&](const std::string& what, std::vector<const corpus::Tweet*> candidates, std::size_t target,
                    std::uint64_t stream) {
        Rng rng(derive_seed(request.seed, stream));
        rng.shuffle(std::span<const corpus::Tweet*>(candidates));
        std::size_t got = 0;
        for (const auto* t : candidates) {
            if (got == target) break;
            if (chosen.insert(t->id).second) {
                picked.push_back(t);
                ++got;
            }
        }
        if (got < target) {
            round.warnings.push_back(what + ": only " + std::to_string(got) + " of " + std::to_string(target) +
                                     " tweets available");
        }
    };

    switch (request.strategy) {
        case Provenance::random: {
            if (request.total == 0) throw ValidationError("total", "random rounds need a positive total");
            take("random", available, request.total, 0);
            break;
        }
        case Provenance::keyword_seeded: {
            if (request.targets.empty()) throw ValidationError("targets", "keyword-seeded rounds need targets");
            std::vector<std::string> folded;
            folded.reserve(available.size());
            for (const auto* t : available) folded.push_back(utf8::fold(t->text));
            std::uint64_t stream = 0;
            for (const auto& category : level_classes(Level::fine)) {
                ++stream;
                auto target = request.targets.find(category);
                if (target == request.targets.end()) continue;
                auto kw = keywords.find(category);
                if (kw == keywords.end() || kw->second.empty()) {
                    throw ValidationError("targets", "no keywords for category '" + category + "'");
                }
                std::vector<const corpus::Tweet*> candidates;
                for (std::size_t i = 0; i < available.size(); ++i) {
                    if (matches_any(folded[i], kw->second)) candidates.push_back(available[i]);
                }
                take(category, std::move(candidates), target->second, stream);
            }
            for (const auto& [k, _] : request.targets) {
                if (!parse_category(k)) throw ValidationError("targets", "unknown category '" + k + "'");
            }
            break;
        }
        case Provenance::model_seeded: {
            if (!predictions) throw ValidationError("predictions", "model-seeded rounds need a prediction set");
            if (request.targets.empty()) throw ValidationError("targets", "model-seeded rounds need targets");
            std::uint64_t stream = 0;
            for (const auto& label : level_classes(predictions->level)) {
                ++stream;
                auto target = request.targets.find(label);
                if (target == request.targets.end()) continue;
                std::vector<const corpus::Tweet*> candidates;
                for (const auto* t : available) {
                    if (predictions->contains(t->id) && predictions->at(t->id) == label) candidates.push_back(t);
                }
                take(label, std::move(candidates), target->second, stream);
            }
            for (const auto& [k, _] : request.targets) {
                if (!is_label_at(k, predictions->level)) {
                    throw ValidationError("targets", "unknown label '" + k + "'");
                }
            }
            break;
        }
    }
    // interleave so that task order does not reveal the sampling stratum
    Rng rng(derive_seed(request.seed, 0xFFFF));
    rng.shuffle(std::span<const corpus::Tweet*>(picked));
    for (const auto* t : picked) round.tweets.push_back(*t);
    if (round.tweets.empty()) round.warnings.push_back("round is empty");
    return round;
}

json to_json(const Round& r, bool include_tweets) {
    json j{{"id", r.id},
           {"strategy", std::string(corpus::to_string(r.strategy))},
           {"seed", r.seed},
           {"targets", r.targets},
           {"total", r.total},
           {"coders", r.coders},
           {"size", r.tweets.size()},
           {"warnings", r.warnings},
           {"status", r.status}};
    if (!r.predictions_ref.empty()) j["predictions"] = r.predictions_ref;
    if (include_tweets) {
        j["tweets"] = json::array();
        for (const auto& t : r.tweets) j["tweets"].push_back(tweet_json(t));
    }
    return j;
}

json to_json(const LabelRecord& r) {
    json j{{"round", r.round},
           {"tweet_id", r.tweet_id},
           {"coder", r.coder},
           {"category", std::string(to_string(r.category))},
           {"override", r.override_label},
           {"adjudication_suggested", r.adjudication_suggested},
           {"timestamp", r.timestamp},
           {"sequence", r.sequence}};
    j["dimensions"] = r.dimensions ? to_json(*r.dimensions) : json(nullptr);
    return j;
}

LabelRecord label_from_json(const json& j) {
    LabelRecord r;
    r.round = j.at("round").get<std::string>();
    r.tweet_id = j.at("tweet_id").get<std::string>();
    r.coder = j.at("coder").get<std::string>();
    auto c = parse_category(j.at("category").get<std::string>());
    if (!c) throw Error("bad category in journal");
    r.category = *c;
    r.override_label = j.value("override", false);
    r.adjudication_suggested = j.value("adjudication_suggested", false);
    r.timestamp = j.value("timestamp", std::string());
    r.sequence = j.value("sequence", std::uint64_t{0});
    if (j.contains("dimensions") && !j["dimensions"].is_null()) {
        r.dimensions = dimensions_from_json(j["dimensions"]);
    }
    return r;
}

LabelStore::LabelStore() : clock_(now_iso) {}

LabelStore::LabelStore(std::filesystem::path journal) : journal_(std::move(journal)), clock_(now_iso) {
    replay();
}

void LabelStore::set_clock(Clock clock) {
    std::unique_lock lock(mutex_);
    clock_ = std::move(clock);
}

void LabelStore::replay() {
    if (!std::filesystem::exists(*journal_)) return;
    std::ifstream in(*journal_);
    if (!in) throw IoError("cannot read " + journal_->string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = json::parse(line);
            const auto type = j.at("type").get<std::string>();
            if (type == "round") {
                rounds_.push_back(round_from_json(j.at("round")));
            } else if (type == "label") {
                records_.push_back(label_from_json(j.at("label")));
            }
        } catch (const std::exception& e) {
            throw IoError(journal_->string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void LabelStore::append_journal(const json& entry) {
    if (!journal_) return;
    std::ofstream out(*journal_, std::ios::app | std::ios::binary);
    if (!out) throw IoError("cannot append to " + journal_->string());
    out << entry.dump() << '\n';
    out.flush();
    if (!out) throw IoError("write failed for " + journal_->string());
}

const Round& LabelStore::find_round(const std::string& id) const {
    for (const auto& r : rounds_) {
        if (r.id == id) return r;
    }
    throw ValidationError("round", "unknown round '" + id + "'");
}

Round LabelStore::create_round(const RoundRequest& request, const corpus::TweetSet& pool,
                               const CategoryKeywords& keywords, const PredictionSet* predictions) {
    std::unique_lock lock(mutex_);
    std::set<std::string> used;
    for (const auto& r : rounds_) {
        for (const auto& t : r.tweets) used.insert(t.id);
    }
    Round round = sample_round(request, pool, used, keywords, predictions);
    round.id = "r" + std::to_string(rounds_.size() + 1);
    append_journal({{"type", "round"}, {"round", to_json(round, true)}});
    rounds_.push_back(round);
    return round;
}

std::vector<Round> LabelStore::rounds() const {
    std::shared_lock lock(mutex_);
    return rounds_;
}

Round LabelStore::round(const std::string& id) const {
    std::shared_lock lock(mutex_);
    return find_round(id);
}

std::size_t LabelStore::progress(const std::string& round, const std::string& coder) const {
    std::shared_lock lock(mutex_);
    std::set<std::string> done;
    for (const auto& r : records_) {
        if (r.round == round && r.coder == coder && !r.override_label) done.insert(r.tweet_id);
    }
    return done.size();
}

std::optional<LabelStore::Task> LabelStore::next_task(const std::string& round, const std::string& coder) const {
    std::shared_lock lock(mutex_);
    const auto& r = find_round(round);
    if (!r.has_coder(coder)) throw ValidationError("coder", "'" + coder + "' is not assigned to round " + round);
    std::set<std::string> done;
    for (const auto& rec : records_) {
        if (rec.round == round && rec.coder == coder && !rec.override_label) done.insert(rec.tweet_id);
    }
    for (const auto& t : r.tweets) {
        if (!done.contains(t.id)) return Task{t, done.size(), r.tweets.size()};
    }
    return std::nullopt;
}

LabelRecord LabelStore::append_record(LabelRecord r) {
    r.sequence = records_.size();
    r.timestamp = clock_();
    append_journal({{"type", "label"}, {"label", to_json(r)}});
    records_.push_back(r);
    return r;
}

LabelRecord LabelStore::submit_label(const std::string& round, const std::string& coder,
                                     const std::string& tweet_id, const DimensionAnnotation& dims) {
    const auto d = derive(dims);
    std::unique_lock lock(mutex_);
    const auto& r = find_round(round);
    if (!r.has_coder(coder)) throw ValidationError("coder", "'" + coder + "' is not assigned to round " + round);
    if (!r.has_tweet(tweet_id)) throw ValidationError("tweet_id", "tweet " + tweet_id + " is not in round " + round);
    LabelRecord rec;
    rec.round = round;
    rec.tweet_id = tweet_id;
    rec.coder = coder;
    rec.dimensions = dims;
    rec.category = d.category;
    rec.adjudication_suggested = d.adjudication_suggested;
    return append_record(std::move(rec));
}

LabelRecord LabelStore::submit_override(const std::string& round, const std::string& adjudicator,
                                        const std::string& tweet_id, Category category) {
    if (adjudicator.empty()) throw ValidationError("coder", "adjudicator name is required");
    std::unique_lock lock(mutex_);
    const auto& r = find_round(round);
    if (!r.has_tweet(tweet_id)) throw ValidationError("tweet_id", "tweet " + tweet_id + " is not in round " + round);
    LabelRecord rec;
    rec.round = round;
    rec.tweet_id = tweet_id;
    rec.coder = adjudicator;
    rec.category = category;
    rec.override_label = true;
    return append_record(std::move(rec));
}

std::vector<LabelRecord> LabelStore::history() const {
    std::shared_lock lock(mutex_);
    return records_;
}

std::vector<LabelRecord> LabelStore::current(const std::string& round) const {
    std::shared_lock lock(mutex_);
    find_round(round);
    std::map<std::pair<std::string, std::string>, const LabelRecord*> latest;
    for (const auto& r : records_) {
        if (r.round == round && !r.override_label) latest[{r.tweet_id, r.coder}] = &r;
    }
    std::vector<LabelRecord> out;
    for (const auto& [_, r] : latest) out.push_back(*r);
    std::sort(out.begin(), out.end(),
              [](const LabelRecord& a, const LabelRecord& b) { return a.sequence < b.sequence; });
    return out;
}

DisagreementReport LabelStore::disagreements(const std::string& round, Level level) const {
    std::shared_lock lock(mutex_);
    return disagreements_locked(round, level);
}

DisagreementReport LabelStore::disagreements_locked(const std::string& round, Level level) const {
    const auto& r = find_round(round);
    std::map<std::string, std::map<std::string, Category>> by_tweet;
    std::set<std::string> coders;
    for (const auto& rec : records_) {
        if (rec.round != round || rec.override_label) continue;
        by_tweet[rec.tweet_id][rec.coder] = rec.category;
        coders.insert(rec.coder);
    }
    DisagreementReport report;
    std::size_t shared = 0;
    for (const auto& t : r.tweets) {
        auto it = by_tweet.find(t.id);
        if (it == by_tweet.end() || it->second.size() < 2) continue;
        ++shared;
        Disagreement d{t.id, {}};
        std::set<std::string> distinct;
        for (const auto& [coder, cat] : it->second) {
            d.labels[coder] = map_category(cat, level);
            distinct.insert(d.labels[coder]);
        }
        if (distinct.size() > 1) report.items.push_back(std::move(d));
    }
    if (coders.size() < 2) {
        report.warnings.push_back("fewer than two coders have labeled this round");
    } else if (shared == 0) {
        report.warnings.push_back("coder coverage is disjoint; no tweet has two labels");
    }
    return report;
}

eval::KappaResult LabelStore::live_kappa(const std::string& round, Level level,
                                         const std::optional<std::string>& exclude,
                                         const std::optional<std::pair<std::string, std::string>>& coders) const {
    std::shared_lock lock(mutex_);
    const auto& r = find_round(round);
    std::string a;
    std::string b;
    if (coders) {
        std::tie(a, b) = *coders;
    } else {
        if (r.coders.size() < 2) throw Error("kappa needs two coders; round " + round + " has " +
                                             std::to_string(r.coders.size()));
        a = r.coders[0];
        b = r.coders[1];
    }
    if (a == b) throw ValidationError("coders", "kappa needs two distinct coders");
    if (exclude && !is_label_at(*exclude, level)) {
        throw ValidationError("exclude", "'" + *exclude + "' is not a class at level " + std::string(to_string(level)));
    }
    std::map<std::string, Category> la;
    std::map<std::string, Category> lb;
    for (const auto& rec : records_) {
        if (rec.round != round || rec.override_label) continue;
        if (rec.coder == a) la[rec.tweet_id] = rec.category;
        if (rec.coder == b) lb[rec.tweet_id] = rec.category;
    }
    std::vector<std::string> xa;
    std::vector<std::string> xb;
    for (const auto& t : r.tweets) {
        auto ia = la.find(t.id);
        auto ib = lb.find(t.id);
        if (ia == la.end() || ib == lb.end()) continue;
        const auto& ma = map_category(ia->second, level);
        const auto& mb = map_category(ib->second, level);
        if (exclude && (ma == *exclude || mb == *exclude)) continue;
        xa.push_back(ma);
        xb.push_back(mb);
    }
    if (xa.size() < 2) {
        throw Error("insufficient overlap: " + std::to_string(xa.size()) + " tweets labeled by both " + a + " and " +
                    b);
    }
    return eval::cohens_kappa(xa, xb);
}

corpus::LabeledSet LabelStore::export_labeled(const std::vector<std::string>& rounds, Resolution resolution,
                                              const std::string& adjudicator) const {
    std::shared_lock lock(mutex_);
    corpus::LabeledSet out;
    std::set<std::string> seen;
    std::vector<std::string> unresolved;
    for (const auto& rid : rounds) {
        const auto& r = find_round(rid);
        std::unordered_map<std::string, std::map<std::string, const LabelRecord*>> by_tweet;
        std::unordered_map<std::string, const LabelRecord*> overrides;
        for (const auto& rec : records_) {
            if (rec.round != rid) continue;
            if (rec.override_label) {
                overrides[rec.tweet_id] = &rec;
            } else {
                by_tweet[rec.tweet_id][rec.coder] = &rec;
            }
        }
        for (const auto& t : r.tweets) {
            if (seen.contains(t.id)) continue;
            auto it = by_tweet.find(t.id);
            auto ov = overrides.find(t.id);
            if (it == by_tweet.end() && ov == overrides.end()) continue;
            std::optional<Category> label;
            const LabelRecord* newest = nullptr;
            std::set<Category> distinct;
            if (it != by_tweet.end()) {
                for (const auto& [coder, rec] : it->second) {
                    distinct.insert(rec->category);
                    if (!newest || rec->sequence > newest->sequence) newest = rec;
                }
            }
            if (ov != overrides.end()) {
                label = ov->second->category;
            } else if (distinct.size() == 1) {
                label = *distinct.begin();
            } else if (resolution == Resolution::latest) {
                label = newest->category;
            } else if (!adjudicator.empty() && it->second.contains(adjudicator)) {
                label = it->second.at(adjudicator)->category;
            }
            if (!label) {
                unresolved.push_back(t.id);
                continue;
            }
            seen.insert(t.id);
            out.entries.push_back({t, *label, r.strategy});
        }
    }
    if (!unresolved.empty()) {
        std::string ids;
        for (const auto& id : unresolved) ids += (ids.empty() ? "" : ", ") + id;
        throw Error("unresolved disagreements without adjudication: " + ids);
    }
    return out;
}

void LabelStore::export_csv(std::ostream& out) const {
    std::shared_lock lock(mutex_);
    csv::write_row(out, {"id", "coder", "category", "round", "timestamp", "message_type", "perspective", "person",
                         "serious", "focus_on_bereaved", "mentions_case", "override"});
    auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
    for (const auto& r : records_) {
        std::vector<std::string> row{r.tweet_id, r.coder, std::string(to_string(r.category)), r.round, r.timestamp};
        if (r.dimensions) {
            const auto& d = *r.dimensions;
            row.insert(row.end(), {std::string(to_string(d.message_type)), std::string(to_string(d.perspective)),
                                   std::string(to_string(d.person)), flag(d.serious), flag(d.focus_on_bereaved),
                                   flag(d.mentions_case)});
        } else {
            row.insert(row.end(), {"", "", "", "", "", ""});
        }
        row.push_back(flag(r.override_label));
        csv::write_row(out, row);
    }
}

}  // namespace papageno::annotate
