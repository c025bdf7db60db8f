#include "papageno/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "papageno/error.hpp"
#include "papageno/utf8.hpp"

namespace papageno::preprocess {

namespace {

using utf8::is_space;

bool ascii_iequals_at(const std::u32string& s, std::size_t pos, std::u32string_view lit) {
    if (pos + lit.size() > s.size()) return false;
    for (std::size_t k = 0; k < lit.size(); ++k) {
        if (utf8::to_lower(s[pos + k]) != lit[k]) return false;
    }
    return true;
}

std::size_t url_prefix_len(const std::u32string& s, std::size_t pos) {
    for (std::u32string_view p : {std::u32string_view(U"https://"), std::u32string_view(U"http://"),
                                  std::u32string_view(U"www.")}) {
        if (ascii_iequals_at(s, pos, p)) return p.size();
    }
    return 0;
}

std::u32string replace_urls(const std::u32string& s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (std::size_t n = url_prefix_len(s, i); n > 0) {
            i += n;
            while (i < s.size() && !is_space(s[i])) ++i;
            out += U"http";
            continue;
        }
        out.push_back(s[i++]);
    }
    return out;
}

std::u32string replace_mentions(const std::u32string& s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == U'@' && i + 1 < s.size() && utf8::is_word(s[i + 1])) {
            i += 1;
            while (i < s.size() && utf8::is_word(s[i])) ++i;
            out += U"@user";
            continue;
        }
        out.push_back(s[i++]);
    }
    return out;
}

bool is_joiner(char32_t cp) {
    return cp == U'\'' || cp == U'-' || cp == 0x2019;  // ', -, right single quote
}

}  // namespace

std::string normalize(std::string_view text) {
    std::u32string s = replace_mentions(replace_urls(utf8::decode(text)));
    for (auto& cp : s) cp = utf8::to_lower(cp);
    return utf8::encode(s);
}

TokenSequence tokenize(std::string_view text) {
    const std::u32string s = utf8::decode(text);
    TokenSequence out;
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        const char32_t cp = s[i];
        if (is_space(cp)) {
            ++i;
            continue;
        }
        if (utf8::is_pictographic(cp) || utf8::is_emoji_component(cp)) {
            std::size_t j = i + 1;
            while (j < n) {
                if (utf8::is_emoji_component(s[j]) && s[j] != 0x200D) {
                    ++j;
                } else if (s[j] == 0x200D && j + 1 < n && utf8::is_pictographic(s[j + 1])) {
                    j += 2;
                } else {
                    break;
                }
            }
            out.push_back(utf8::encode(s.substr(i, j - i)));
            i = j;
            continue;
        }
        if (cp == U'@' && i + 1 < n && utf8::is_word(s[i + 1])) {
            std::size_t j = i + 1;
            while (j < n && utf8::is_word(s[j])) ++j;
            out.push_back(utf8::encode(s.substr(i, j - i)));
            i = j;
            continue;
        }
        if (utf8::is_word(cp)) {
            std::size_t j = i + 1;
            while (j < n) {
                if (utf8::is_word(s[j])) {
                    ++j;
                } else if (is_joiner(s[j]) && j + 1 < n && utf8::is_word(s[j + 1])) {
                    j += 2;
                } else {
                    break;
                }
            }
            out.push_back(utf8::encode(s.substr(i, j - i)));
            i = j;
            continue;
        }
        // punctuation: one character per token
        out.push_back(utf8::encode(s.substr(i, 1)));
        ++i;
    }
    return out;
}

bool is_all_digits(std::string_view token) {
    return !token.empty() &&
           std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_punctuation_token(std::string_view token) {
    const auto cps = utf8::decode(token);
    return !cps.empty() && std::all_of(cps.begin(), cps.end(), utf8::is_punctuation);
}

TokenSequence apply_strategy(const TokenSequence& seq, const PreprocessConfig& config) {
    TokenSequence out;
    out.reserve(seq.size());
    const auto& stop = default_stopwords();
    for (const auto& tok : seq) {
        std::string t = tok;
        if (config.remove_digits && is_all_digits(t)) continue;
        if (config.strip_digit_chars) {
            std::erase_if(t, [](char c) { return c >= '0' && c <= '9'; });
            if (t.empty()) continue;
        }
        if (config.remove_punctuation && is_punctuation_token(t)) continue;
        if (config.remove_stopwords && stop.contains(t)) continue;
        if (config.lemma_table) {
            if (auto it = config.lemma_table->find(t); it != config.lemma_table->end()) {
                t = it->second;
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

TokenSequence truncate(const TokenSequence& seq, std::size_t max_tokens) {
    if (max_tokens == 0) throw ValidationError("max_tokens", "must be >= 1");
    const auto keep = std::min(seq.size(), max_tokens);
    return TokenSequence(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(keep));
}

TokenSequence pipeline(std::string_view text, const PreprocessConfig& config) {
    return truncate(apply_strategy(tokenize(normalize(text)), config), config.max_tokens);
}

const std::unordered_set<std::string>& default_stopwords() {
    static const std::unordered_set<std::string> words{
        "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're",
        "you've", "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him",
        "his", "himself", "she", "she's", "her", "hers", "herself", "it", "it's", "its",
        "itself", "they", "them", "their", "theirs", "themselves", "what", "which", "who",
        "whom", "this", "that", "that'll", "these", "those", "am", "is", "are", "was", "were",
        "be", "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing",
        "a", "an", "the", "and", "but", "if", "or", "because", "as", "until", "while", "of",
        "at", "by", "for", "with", "about", "against", "between", "into", "through", "during",
        "before", "after", "above", "below", "to", "from", "up", "down", "in", "out", "on",
        "off", "over", "under", "again", "further", "then", "once", "here", "there", "when",
        "where", "why", "how", "all", "any", "both", "each", "few", "more", "most", "other",
        "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than", "too", "very",
        "s", "t", "can", "will", "just", "don", "don't", "should", "should've", "now", "d",
        "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't",
        "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven",
        "haven't", "isn", "isn't", "ma", "mightn", "mightn't", "mustn", "mustn't", "needn",
        "needn't", "shan", "shan't", "shouldn", "shouldn't", "wasn", "wasn't", "weren",
        "weren't", "won", "won't", "wouldn", "wouldn't"};
    return words;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read stopword list " + path.string());
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        out.insert(utf8::to_lower(line));
    }
    return out;
}

LemmaTable load_lemma_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read lemma table " + path.string());
    LemmaTable out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
            throw ValidationError("lemma_table", "line " + std::to_string(lineno) +
                                                     " is not 'token<TAB>lemma'");
        }
        out[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return out;
}

LengthStats length_percentiles(std::span<const TokenSequence> corpus,
                               std::span<const double> fractions) {
    if (corpus.empty()) throw Error("length_percentiles: empty corpus");
    std::vector<std::size_t> lengths;
    lengths.reserve(corpus.size());
    for (const auto& seq : corpus) lengths.push_back(seq.size());
    std::sort(lengths.begin(), lengths.end());

    LengthStats stats;
    stats.mean = static_cast<double>(std::accumulate(lengths.begin(), lengths.end(), std::size_t{0})) /
                 static_cast<double>(lengths.size());
    const auto n = static_cast<double>(lengths.size());
    for (double p : fractions) {
        if (!(p > 0.0 && p <= 1.0)) throw ValidationError("percentile", "must be in (0, 1]");
        // nearest rank; the small slack keeps e.g. 0.95*20 from rounding up to 20
        auto rank = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
        rank = std::clamp<std::size_t>(rank, 1, lengths.size());
        stats.percentiles[p] = lengths[rank - 1];
    }
    return stats;
}

}  // namespace papageno::preprocess
