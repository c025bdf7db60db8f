#include "papageno/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include "json.hpp"
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "papageno/error.hpp"
#include "papageno/preprocess.hpp"
#include "papageno/random.hpp"
#include "papageno/utf8.hpp"

namespace papageno::corpus {

using nlohmann::json;

namespace {

Tweet tweet_from_json(const json& j) {
    Tweet t;
    t.id = j.at("id").get<std::string>();
    t.text = j.at("text").get<std::string>();
    if (t.id.empty()) throw Error("empty id");
    if (t.text.empty()) throw Error("empty text");
    if (auto it = j.find("created_at"); it != j.end() && !it->is_null()) {
        t.timestamp = parse_iso8601(it->get<std::string>());
    }
    if (auto it = j.find("retweet"); it != j.end() && !it->is_null()) {
        t.is_retweet_flagged = it->get<bool>();
    }
    return t;
}

json tweet_to_json(const Tweet& t) {
    json j;
    j["id"] = t.id;
    j["text"] = t.text;
    if (t.timestamp) j["created_at"] = format_iso8601(*t.timestamp);
    if (t.is_retweet_flagged) j["retweet"] = true;
    return j;
}

bool is_wildcard(std::string_view term) { return !term.empty() && term.back() == '*'; }

}  // namespace

LoadResult read_tweets(std::istream& in) {
    LoadResult result;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            Tweet t = tweet_from_json(json::parse(line));
            if (!seen.insert(t.id).second) {
                result.warnings.push_back("line " + std::to_string(lineno) + ": duplicate id " + t.id);
                ++result.skipped;
                continue;
            }
            result.tweets.push_back(std::move(t));
        } catch (const std::exception& e) {
            result.warnings.push_back("line " + std::to_string(lineno) + ": " + e.what());
            ++result.skipped;
        }
    }
    return result;
}

LoadResult load_tweets(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    return read_tweets(in);
}

void write_tweets(std::ostream& out, const TweetSet& tweets) {
    for (const auto& t : tweets) out << tweet_to_json(t).dump() << '\n';
}

void FilterConfig::validate() const {
    for (const auto& k : keywords) {
        if (k.empty()) throw ValidationError("keywords", "empty keyword");
        if (k.find('*') != std::string::npos) {
            throw ValidationError("keywords", "wildcards are not supported in keywords: " + k);
        }
    }
    for (const auto& e : exclusions) {
        if (e.empty() || e == "*") throw ValidationError("exclusions", "empty exclusion term");
        const auto star = e.find('*');
        if (star != std::string::npos && star + 1 != e.size()) {
            throw ValidationError("exclusions", "'*' only allowed as last character: " + e);
        }
    }
}

std::vector<std::string> load_term_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read term list " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string term = utf8::fold(line);
        if (term.empty() || term.front() == '#') continue;
        out.push_back(std::move(term));
    }
    return out;
}

FilterConfig load_filter_config(const std::filesystem::path& keywords,
                                const std::filesystem::path& exclusions) {
    FilterConfig cfg{load_term_list(keywords), load_term_list(exclusions)};
    cfg.validate();
    return cfg;
}

bool matches_keywords(std::string_view text, const FilterConfig& config) {
    const std::string folded = utf8::fold(text);
    return std::any_of(config.keywords.begin(), config.keywords.end(), [&](const std::string& k) {
        return folded.find(utf8::fold(k)) != std::string::npos;
    });
}

bool is_excluded(std::string_view text, const FilterConfig& config) {
    const std::string folded = utf8::fold(text);
    std::optional<preprocess::TokenSequence> tokens;
    for (const auto& e : config.exclusions) {
        if (is_wildcard(e)) {
            if (!tokens) tokens = preprocess::tokenize(folded);
            const std::string prefix = utf8::fold(std::string_view(e).substr(0, e.size() - 1));
            if (std::any_of(tokens->begin(), tokens->end(),
                            [&](const std::string& t) { return t.starts_with(prefix); })) {
                return true;
            }
        } else if (folded.find(utf8::fold(e)) != std::string::npos) {
            return true;
        }
    }
    return false;
}

bool is_retweet(const Tweet& tweet) {
    if (tweet.is_retweet_flagged) return true;
    std::istringstream words(tweet.text);
    std::string prev;
    std::string word;
    while (words >> word) {
        if ((prev == "RT" || prev == "MT") && word.front() == '@') return true;
        prev = word;
    }
    return false;
}

TweetSet dedupe(const TweetSet& set) {
    TweetSet out;
    std::unordered_set<std::string> seen;
    for (const auto& t : set) {
        if (seen.insert(preprocess::normalize(t.text)).second) out.push_back(t);
    }
    return out;
}

FilterResult filter(const TweetSet& input, const FilterConfig& config, const FilterOptions& options) {
    FilterResult r;
    r.stats.input = input.size();
    TweetSet stage;
    for (const auto& t : input) {
        if (matches_keywords(t.text, config)) stage.push_back(t);
    }
    r.stats.after_keywords = stage.size();
    std::erase_if(stage, [&](const Tweet& t) { return is_excluded(t.text, config); });
    r.stats.after_exclusions = stage.size();
    if (!options.keep_retweets) std::erase_if(stage, [](const Tweet& t) { return is_retweet(t); });
    r.stats.after_retweets = stage.size();
    stage = dedupe(stage);
    r.stats.after_dedupe = stage.size();
    if (options.date_from || options.date_to) {
        std::erase_if(stage, [&](const Tweet& t) {
            if (!t.timestamp) return true;
            const auto day = std::chrono::floor<std::chrono::days>(*t.timestamp);
            return (options.date_from && day < *options.date_from) ||
                   (options.date_to && day > *options.date_to);
        });
    }
    r.stats.after_dates = stage.size();
    r.tweets = std::move(stage);
    return r;
}

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::keyword_seeded: return "keyword_seeded";
        case Provenance::model_seeded: return "model_seeded";
        case Provenance::random: return "random";
    }
    return "random";
}

std::optional<Provenance> parse_provenance(std::string_view s) {
    if (s == "keyword_seeded") return Provenance::keyword_seeded;
    if (s == "model_seeded") return Provenance::model_seeded;
    if (s == "random") return Provenance::random;
    return std::nullopt;
}

void LabeledSet::validate() const {
    std::unordered_set<std::string> ids;
    for (const auto& e : entries) {
        if (!ids.insert(e.tweet.id).second) throw ValidationError("id", "duplicate tweet id " + e.tweet.id);
    }
}

std::vector<std::string> LabeledSet::labels(Level level) const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(map_category(e.label, level));
    return out;
}

LabeledSet read_labeled(std::istream& in) {
    LabeledSet set;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            LabeledEntry e;
            e.tweet = tweet_from_json(j);
            const auto label = j.at("label").get<std::string>();
            auto cat = parse_category(label);
            if (!cat) throw Error("unknown label '" + label + "'");
            e.label = *cat;
            if (auto it = j.find("provenance"); it != j.end()) {
                auto p = parse_provenance(it->get<std::string>());
                if (!p) throw Error("unknown provenance");
                e.provenance = *p;
            }
            set.entries.push_back(std::move(e));
        } catch (const std::exception& ex) {
            throw ValidationError("labels", "line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    set.validate();
    return set;
}

LabeledSet load_labeled(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    return read_labeled(in);
}

void write_labeled(std::ostream& out, const LabeledSet& set) {
    for (const auto& e : set.entries) {
        json j = tweet_to_json(e.tweet);
        j["label"] = std::string(to_string(e.label));
        j["provenance"] = std::string(to_string(e.provenance));
        out << j.dump() << '\n';
    }
}

std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios) {
    const std::array<double, 3> r{ratios.train, ratios.validation, ratios.test};
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> rem{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double exact = r[i] * static_cast<double>(n);
        // tolerate representation error, e.g. 0.6*5 = 2.9999999999999996
        double whole = std::floor(exact + 1e-9);
        counts[i] = static_cast<std::size_t>(whole);
        rem[i] = std::max(0.0, exact - whole);
        assigned += counts[i];
    }
    while (assigned < n) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < 3; ++i) {
            if (rem[i] > rem[best] + 1e-9) best = i;
        }
        ++counts[best];
        rem[best] = -1.0;
        ++assigned;
    }
    return counts;
}

SplitSet stratified_split(const LabeledSet& set, const SplitRatios& ratios, std::uint64_t seed,
                          Level level) {
    if (!(ratios.train > 0 && ratios.validation > 0 && ratios.test > 0) ||
        std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
        throw ValidationError("ratios", "must be positive and sum to 1");
    }
    set.validate();

    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
        by_class[map_category(set.entries[i].label, level)].push_back(i);
    }
    // 0 = train, 1 = validation, 2 = test
    std::vector<int> part(set.entries.size(), -1);
    const auto& order = level_classes(level);
    for (std::size_t ci = 0; ci < order.size(); ++ci) {
        auto it = by_class.find(order[ci]);
        if (it == by_class.end()) continue;
        auto& members = it->second;
        if (members.size() < 3) {
            throw ValidationError("labels", "class '" + order[ci] + "' has " +
                                                std::to_string(members.size()) +
                                                " members; stratified split needs at least 3");
        }
        Rng rng(derive_seed(seed, ci));
        rng.shuffle(std::span<std::size_t>(members));
        const auto counts = apportion(members.size(), ratios);
        std::size_t k = 0;
        for (int p = 0; p < 3; ++p) {
            for (std::size_t c = 0; c < counts[static_cast<std::size_t>(p)]; ++c) part[members[k++]] = p;
        }
    }

    SplitSet out;
    out.ratios = ratios;
    out.seed = seed;
    for (std::size_t i = 0; i < set.entries.size(); ++i) {
        auto& dst = part[i] == 0 ? out.train : part[i] == 1 ? out.validation : out.test;
        dst.entries.push_back(set.entries[i]);
    }
    return out;
}

}  // namespace papageno::corpus
