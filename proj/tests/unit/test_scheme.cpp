#include <set>

#include "doctest.h"
#include "papageno/error.hpp"
#include "papageno/scheme.hpp"

using namespace papageno;
using namespace papageno::annotate;

namespace {

DimensionAnnotation dims(MessageType m, Perspective p, Person q = Person::not_applicable, bool bereaved = false,
                         bool cases = false) {
    return {m, p, q, true, bereaved, cases};
}

std::string field_of(const DimensionAnnotation& d) {
    try {
        validate(d);
    } catch (const ValidationError& e) {
        return e.field();
    }
    return {};
}

}  // namespace

TEST_CASE("every valid annotation derives a category") {
    const auto all = all_valid_annotations();
    CHECK(all.size() > 100);
    std::set<Category> reached;
    for (const auto& d : all) {
        const auto r = derive(d);
        reached.insert(r.category);
        CHECK(r.adjudication_suggested == !r.note.empty());
    }
    CHECK(reached.size() == kCategoryCount);
}

TEST_CASE("priority rules") {
    CHECK(derive_category(dims(MessageType::case_report, Perspective::problem_suffering, Person::not_applicable,
                               true, true)) == Category::bereaved_negative);
    CHECK(derive_category(dims(MessageType::call_for_action, Perspective::solution_coping, Person::not_applicable,
                               false, true)) == Category::suicide_cases);
    CHECK(derive_category(dims(MessageType::personal_experience, Perspective::both, Person::first)) ==
          Category::coping);
    CHECK(derive_category(dims(MessageType::personal_experience, Perspective::problem_suffering, Person::mixed)) ==
          Category::suicidal_ideation_attempts);
    CHECK(derive_category(dims(MessageType::bereaved_experience, Perspective::solution_coping, Person::third)) ==
          Category::bereaved_coping);
    CHECK(derive_category(dims(MessageType::case_report, Perspective::solution_coping)) == Category::lives_saved);
    CHECK(derive_category(dims(MessageType::irrelevant, Perspective::neither)) == Category::suicide_other);
    DimensionAnnotation joke{MessageType::irrelevant, Perspective::neither, Person::not_applicable, false};
    CHECK(derive_category(joke) == Category::off_topic);

    const auto flagged = derive(dims(MessageType::news_experience, Perspective::problem_suffering,
                                     Person::not_applicable, true));
    CHECK(flagged.category == Category::bereaved_negative);
    CHECK(flagged.adjudication_suggested);
}

TEST_CASE("examples of each fine category") {
    // a person recounting an attempt
    CHECK(derive_category(dims(MessageType::personal_experience, Perspective::problem_suffering, Person::first)) ==
          Category::suicidal_ideation_attempts);
    // a report on rising rates
    CHECK(derive_category(dims(MessageType::news_experience, Perspective::problem_suffering)) ==
          Category::news_suicidal);
    // a report on a study of what helps
    CHECK(derive_category(dims(MessageType::news_experience, Perspective::solution_coping)) ==
          Category::news_coping);
    // an appeal with a hotline number
    CHECK(derive_category(dims(MessageType::call_for_action, Perspective::solution_coping)) ==
          Category::prevention);
    // a statistic shared to raise attention
    CHECK(derive_category(dims(MessageType::call_for_action, Perspective::problem_suffering)) ==
          Category::awareness);
    CHECK(derive_category(dims(MessageType::case_report, Perspective::problem_suffering)) ==
          Category::suicide_cases);
}

TEST_CASE("validation names the field") {
    CHECK(field_of(dims(MessageType::news_experience, Perspective::neither)) == "perspective");
    DimensionAnnotation d{MessageType::news_experience, Perspective::both, Person::not_applicable, false};
    CHECK(field_of(d) == "serious");
    CHECK(field_of(dims(MessageType::personal_experience, Perspective::both)) == "person");
    CHECK(field_of(dims(MessageType::bereaved_experience, Perspective::both)) == "person");
    CHECK(field_of(dims(MessageType::call_for_action, Perspective::both)).empty());
    CHECK_THROWS_AS(derive(dims(MessageType::news_experience, Perspective::neither)), ValidationError);
}

TEST_CASE("dimension json") {
    for (const auto& d : all_valid_annotations()) CHECK(dimensions_from_json(to_json(d)) == d);
    auto j = to_json(dims(MessageType::news_experience, Perspective::both));
    j["perspective"] = "sideways";
    try {
        dimensions_from_json(j);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "perspective");
    }
    j.erase("perspective");
    CHECK_THROWS_AS(dimensions_from_json(j), ValidationError);
    nlohmann::json minimal{{"message_type", "case_report"}, {"perspective", "both"}};
    CHECK(dimensions_from_json(minimal).person == Person::not_applicable);
}

TEST_CASE("taxonomy document") {
    const auto t = taxonomy_json();
    REQUIRE(t["categories"].size() == kCategoryCount);
    for (const auto& c : t["categories"]) {
        CHECK_FALSE(c["definition"].get<std::string>().empty());
        CHECK(c["examples"].size() >= 1);
    }
    CHECK(t["levels"]["task1"].size() == 6);
    CHECK(t["dimensions"]["message_type"].size() == 6);
}
