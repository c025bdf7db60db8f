#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace papageno::preprocess {

using TokenSequence = std::vector<std::string>;
using LemmaTable = std::unordered_map<std::string, std::string>;

inline constexpr std::string_view kUrlMarker = "http";
inline constexpr std::string_view kMentionMarker = "@user";

struct PreprocessConfig {
    bool remove_digits = false;
    // Alternative reading of "remove digits": strip digit characters from
    // every token instead of dropping all-digit tokens.
    bool strip_digit_chars = false;
    bool remove_punctuation = false;
    bool remove_stopwords = false;
    std::optional<LemmaTable> lemma_table;
    std::size_t max_tokens = 80;
};

// URL -> "http", mention -> "@user", then lowercase. Emoji untouched.
std::string normalize(std::string_view text);

// Whitespace split; punctuation characters and emoji become their own
// tokens; apostrophes and hyphens between word characters stay inside the
// word; "@" followed by word characters is one token.
TokenSequence tokenize(std::string_view text);

TokenSequence apply_strategy(const TokenSequence& seq, const PreprocessConfig& config);

TokenSequence truncate(const TokenSequence& seq, std::size_t max_tokens);

// normalize -> tokenize -> apply_strategy -> truncate
TokenSequence pipeline(std::string_view text, const PreprocessConfig& config);

bool is_all_digits(std::string_view token);
bool is_punctuation_token(std::string_view token);

// The bundled 179-word English stopword list.
const std::unordered_set<std::string>& default_stopwords();

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);
// "token<TAB>lemma" per line.
LemmaTable load_lemma_table(const std::filesystem::path& path);

struct LengthStats {
    double mean = 0.0;
    std::map<double, std::size_t> percentiles;
};

// Nearest-rank percentiles of token counts. Throws on an empty corpus.
LengthStats length_percentiles(std::span<const TokenSequence> corpus,
                               std::span<const double> fractions);

}  // namespace papageno::preprocess
