#include "papageno/taxonomy.hpp"

#include <algorithm>

#include "papageno/error.hpp"

namespace papageno {

namespace {

constexpr std::array<std::string_view, kCategoryCount> kNames{
    "suicidal_ideation_attempts", "coping",        "news_suicidal", "news_coping",
    "bereaved_negative",          "bereaved_coping", "suicide_cases", "lives_saved",
    "awareness",                  "prevention",    "suicide_other", "off_topic",
};

const std::string kIrrelevant = "irrelevant";
const std::string kAboutSuicide = "about_suicide";
const std::string kOffTopic = "off_topic";

bool task1_keeps(Category c) {
    switch (c) {
        case Category::suicidal_ideation_attempts:
        case Category::coping:
        case Category::suicide_cases:
        case Category::awareness:
        case Category::prevention:
            return true;
        default:
            return false;
    }
}

}  // namespace

std::string_view to_string(Category c) { return kNames[static_cast<std::size_t>(c)]; }

std::optional<Category> parse_category(std::string_view name) {
    auto it = std::find(kNames.begin(), kNames.end(), name);
    if (it == kNames.end()) return std::nullopt;
    return static_cast<Category>(it - kNames.begin());
}

const std::array<Category, kCategoryCount>& all_categories() {
    static const std::array<Category, kCategoryCount> all = [] {
        std::array<Category, kCategoryCount> a{};
        for (std::size_t i = 0; i < kCategoryCount; ++i) a[i] = static_cast<Category>(i);
        return a;
    }();
    return all;
}

std::string_view to_string(Level level) {
    switch (level) {
        case Level::fine: return "fine";
        case Level::task1: return "task1";
        case Level::task2: return "task2";
    }
    return "fine";
}

std::optional<Level> parse_level(std::string_view s) {
    if (s == "12" || s == "fine") return Level::fine;
    if (s == "6" || s == "1" || s == "task1") return Level::task1;
    if (s == "2" || s == "task2") return Level::task2;
    return std::nullopt;
}

const std::vector<std::string>& level_classes(Level level) {
    static const std::vector<std::string> fine = [] {
        std::vector<std::string> v;
        for (auto n : kNames) v.emplace_back(n);
        return v;
    }();
    static const std::vector<std::string> task1{
        "suicidal_ideation_attempts", "coping", "awareness", "prevention", "suicide_cases",
        kIrrelevant};
    static const std::vector<std::string> task2{kAboutSuicide, kOffTopic};
    switch (level) {
        case Level::fine: return fine;
        case Level::task1: return task1;
        case Level::task2: return task2;
    }
    return fine;
}

const std::string& map_category(Category c, Level level) {
    const auto& fine = level_classes(Level::fine);
    switch (level) {
        case Level::fine:
            return fine[static_cast<std::size_t>(c)];
        case Level::task1:
            return task1_keeps(c) ? fine[static_cast<std::size_t>(c)] : kIrrelevant;
        case Level::task2:
            return c == Category::off_topic ? kOffTopic : kAboutSuicide;
    }
    return fine[static_cast<std::size_t>(c)];
}

std::string map_label(std::string_view label, Level level) {
    if (auto c = parse_category(label)) return map_category(*c, level);
    if (level == Level::fine) throw Error("label '" + std::string(label) + "' is not a fine category");
    if (label == kIrrelevant) {
        // irrelevant pools suicide_other and off_topic, so it has no task2 image
        if (level == Level::task1) return kIrrelevant;
        throw Error("label 'irrelevant' cannot be mapped to task2");
    }
    if (level == Level::task2 && (label == kAboutSuicide || label == kOffTopic)) {
        return std::string(label);
    }
    throw Error("unknown label '" + std::string(label) + "' for level " +
                std::string(to_string(level)));
}

bool is_label_at(std::string_view label, Level level) {
    const auto& cls = level_classes(level);
    return std::find(cls.begin(), cls.end(), label) != cls.end();
}

}  // namespace papageno
