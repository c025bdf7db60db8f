#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "papageno/taxonomy.hpp"

namespace papageno::annotate {

enum class MessageType {
    personal_experience,
    news_experience,
    bereaved_experience,
    case_report,
    call_for_action,
    irrelevant,
};

// `both` is for messages that carry suffering and coping at once.
enum class Perspective { problem_suffering, solution_coping, both, neither };

// `mixed` is for messages that switch between first and third person.
enum class Person { first, third, mixed, not_applicable };

std::string_view to_string(MessageType v);
std::string_view to_string(Perspective v);
std::string_view to_string(Person v);
std::optional<MessageType> parse_message_type(std::string_view s);
std::optional<Perspective> parse_perspective(std::string_view s);
std::optional<Person> parse_person(std::string_view s);

struct DimensionAnnotation {
    MessageType message_type = MessageType::irrelevant;
    Perspective perspective = Perspective::neither;
    Person person = Person::not_applicable;
    bool serious = true;
    bool focus_on_bereaved = false;
    bool mentions_case = false;

    friend bool operator==(const DimensionAnnotation&, const DimensionAnnotation&) = default;
};

// Throws ValidationError naming the offending field.
void validate(const DimensionAnnotation& dims);

struct Derivation {
    Category category = Category::off_topic;
    // Set for situations the priority rules do not settle.
    bool adjudication_suggested = false;
    std::string note;
};

// Validates, then applies the priority rules:
//   not serious -> off_topic; irrelevant -> suicide_other
//   bereaved type or bereaved focus -> bereaved_coping / bereaved_negative
//   a specific case mentioned -> suicide_cases
//   otherwise the message type x perspective cell, with coping winning
//   over suffering and mixed person coded as first person.
Derivation derive(const DimensionAnnotation& dims);
inline Category derive_category(const DimensionAnnotation& dims) { return derive(dims).category; }

// Every valid point of the dimension lattice.
std::vector<DimensionAnnotation> all_valid_annotations();

nlohmann::json to_json(const DimensionAnnotation& dims);
// Throws ValidationError naming the field on missing or unknown values.
DimensionAnnotation dimensions_from_json(const nlohmann::json& j);

// Category names with level mappings, definitions and example texts, plus
// the dimension vocabularies, for clients that render coding guidance.
nlohmann::json taxonomy_json();

}  // namespace papageno::annotate
