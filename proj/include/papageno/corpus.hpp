#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "papageno/taxonomy.hpp"
#include "papageno/timeutil.hpp"

namespace papageno::corpus {

struct Tweet {
    std::string id;
    std::string text;
    std::optional<Timestamp> timestamp;
    bool is_retweet_flagged = false;

    friend bool operator==(const Tweet&, const Tweet&) = default;
};

using TweetSet = std::vector<Tweet>;

struct LoadResult {
    TweetSet tweets;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

// JSON lines with `id`, `text`, optional `created_at` (ISO-8601) and
// `retweet` (bool). Malformed lines and repeated ids are skipped with a
// warning; an unreadable file throws IoError.
LoadResult load_tweets(const std::filesystem::path& path);
LoadResult read_tweets(std::istream& in);
void write_tweets(std::ostream& out, const TweetSet& tweets);

struct FilterConfig {
    std::vector<std::string> keywords;
    // A trailing '*' marks a token-prefix pattern; anything else is a literal.
    std::vector<std::string> exclusions;

    // Throws ValidationError on empty terms or a misplaced '*'.
    void validate() const;
};

// One term per line, '#' comments and blank lines ignored, lowercased.
std::vector<std::string> load_term_list(const std::filesystem::path& path);
FilterConfig load_filter_config(const std::filesystem::path& keywords,
                                const std::filesystem::path& exclusions);

bool matches_keywords(std::string_view text, const FilterConfig& config);
bool is_excluded(std::string_view text, const FilterConfig& config);
bool is_retweet(const Tweet& tweet);

// First occurrence wins per normalized text; order preserved.
TweetSet dedupe(const TweetSet& set);

struct FilterStats {
    std::size_t input = 0;
    std::size_t after_keywords = 0;
    std::size_t after_exclusions = 0;
    std::size_t after_retweets = 0;
    std::size_t after_dedupe = 0;
    std::size_t after_dates = 0;
};

struct FilterOptions {
    bool keep_retweets = false;
    std::optional<std::chrono::sys_days> date_from;  // inclusive
    std::optional<std::chrono::sys_days> date_to;    // inclusive
};

struct FilterResult {
    TweetSet tweets;
    FilterStats stats;
};

// keywords -> exclusions -> retweets (unless kept) -> dedupe -> optional dates
FilterResult filter(const TweetSet& input, const FilterConfig& config,
                    const FilterOptions& options = {});

enum class Provenance { keyword_seeded, model_seeded, random };

std::string_view to_string(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view s);

struct LabeledEntry {
    Tweet tweet;
    Category label;
    Provenance provenance = Provenance::random;

    friend bool operator==(const LabeledEntry&, const LabeledEntry&) = default;
};

struct LabeledSet {
    std::vector<LabeledEntry> entries;

    // Throws ValidationError on duplicate ids.
    void validate() const;
    std::size_t size() const { return entries.size(); }
    std::vector<std::string> labels(Level level) const;
};

// JSON lines: tweet fields plus `label` (fine category) and optional `provenance`.
LabeledSet load_labeled(const std::filesystem::path& path);
LabeledSet read_labeled(std::istream& in);
void write_labeled(std::ostream& out, const LabeledSet& set);

struct SplitRatios {
    double train = 0.64;
    double validation = 0.16;
    double test = 0.20;
};

struct SplitSet {
    LabeledSet train;
    LabeledSet validation;
    LabeledSet test;
    SplitRatios ratios;
    std::uint64_t seed = 0;
};

// Largest-remainder apportionment of n items; remainder ties go to the
// earlier part (train, then validation).
std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios);

// Per-class shuffle + apportion. Parts keep input order. Throws if a class
// (at `level`) has fewer than 3 members.
SplitSet stratified_split(const LabeledSet& set, const SplitRatios& ratios, std::uint64_t seed,
                          Level level = Level::fine);

}  // namespace papageno::corpus
