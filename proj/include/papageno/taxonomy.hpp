#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace papageno {

// The twelve annotation categories, in scheme order.
enum class Category {
    suicidal_ideation_attempts,
    coping,
    news_suicidal,
    news_coping,
    bereaved_negative,
    bereaved_coping,
    suicide_cases,
    lives_saved,
    awareness,
    prevention,
    suicide_other,
    off_topic,
};

inline constexpr std::size_t kCategoryCount = 12;

enum class Level { fine, task1, task2 };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view name);
const std::array<Category, kCategoryCount>& all_categories();

std::string_view to_string(Level level);
// Accepts "12"/"fine", "6"/"task1"/"1", "2"/"task2".
std::optional<Level> parse_level(std::string_view s);

// Class labels at a taxonomy level, in canonical order. For task1 this is the
// six-class order used in the reporting tables (irrelevant last).
const std::vector<std::string>& level_classes(Level level);

// Maps a fine category onto the label used at `level`.
const std::string& map_category(Category c, Level level);

// Re-maps an already-mapped label (any level at or below `level`) to `level`.
// Fine names map through map_category; task1 names collapse to task2 names;
// a label already at `level` is returned unchanged. Throws on unknown labels.
std::string map_label(std::string_view label, Level level);

bool is_label_at(std::string_view label, Level level);

}  // namespace papageno
