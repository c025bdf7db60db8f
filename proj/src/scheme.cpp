#include "papageno/scheme.hpp"

#include <array>

#include "papageno/error.hpp"

namespace papageno::annotate {

namespace {

template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view s, const std::array<std::string_view, N>& names) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<E>(i);
    }
    return std::nullopt;
}

constexpr std::array<std::string_view, 6> kMessageTypes{
    "personal_experience", "news_experience", "bereaved_experience", "case_report", "call_for_action", "irrelevant"};
constexpr std::array<std::string_view, 4> kPerspectives{"problem_suffering", "solution_coping", "both", "neither"};
constexpr std::array<std::string_view, 4> kPersons{"first", "third", "mixed", "not_applicable"};

struct Guidance {
    Category category;
    const char* definition;
    std::vector<const char*> examples;
};

const std::vector<Guidance>& guidance() {
    static const std::vector<Guidance> g{
        {Category::suicidal_ideation_attempts,
         "The writer talks about their own suicidal thoughts, plans or past attempts, or their own "
         "struggle with despair, without a recovery angle.",
         {"cant see a reason to keep going anymore, thinking about ending it tonight",
          "third time in hospital after trying to kill myself and nothing feels different"}},
        {Category::coping,
         "The writer shares a personal story of getting through suicidal thoughts or an attempt: what "
         "helped, how life improved, reasons to stay alive.",
         {"two years ago i nearly took my life. therapy and my dog got me here. still standing",
          "when the suicidal thoughts come back i call my sister and go for a walk. it passes"}},
        {Category::news_suicidal,
         "A news-style item about a group or population's suicidal ideation or attempts, told as a "
         "problem (rates, risk, distress), not about one specific death.",
         {"survey finds one in five students had suicidal thoughts during lockdown",
          "report: attempts among teens rose sharply over the last decade"}},
        {Category::news_coping,
         "A news-style item about people who overcame suicidal crises, or about what helps people "
         "recover, told from a hopeful angle.",
         {"study: people who survived an attempt say peer contact was the turning point",
          "feature on veterans who found a way back after suicidal crises"}},
        {Category::bereaved_negative,
         "Someone who lost a person to suicide describes grief, anger, guilt or other pain of that "
         "loss, or the message centers on the bereaved in a negative light.",
         {"my brother died by suicide last spring and i still cant sleep",
          "nobody tells you how lonely it is after your dad kills himself"}},
        {Category::bereaved_coping,
         "Someone bereaved by suicide describes how they are getting through the loss, or the "
         "message centers on the bereaved finding support.",
         {"five years since mum's suicide. the support group gave me my life back",
          "losing my best friend to suicide taught me to talk about it. i'm ok now"}},
        {Category::suicide_cases,
         "Reports or discussion of a specific person's suicide or suicide attempt, including "
         "celebrity deaths and local news of a death.",
         {"singer found dead at home, police say it was suicide",
          "heartbreaking news about the student who killed himself on campus"}},
        {Category::lives_saved,
         "A specific suicide was prevented: someone was talked down, rescued or helped in time.",
         {"officer talks man down from bridge railing after an hour",
          "stranger on the train noticed the signs and stayed with her until help arrived"}},
        {Category::awareness,
         "Calls to pay attention to suicide as an issue, share messages, or join awareness events, "
         "without concrete help offers.",
         {"suicide is a leading cause of death for young people. please retweet and talk about it",
          "today we wear yellow for #suicideawareness"}},
        {Category::prevention,
         "Concrete prevention content: hotlines, where to get help, warning signs, offers to listen, "
         "or prevention programs and research.",
         {"if you are struggling, the crisis line is open 24/7. you are not alone",
          "know the warning signs: withdrawal, giving things away, talking about being a burden"}},
        {Category::suicide_other,
         "Serious messages about suicide that fit no category above: opinions, debates, history, "
         "fiction plots, or suicide rates mentioned in passing.",
         {"the euthanasia debate is not the same thing as suicide and we should stop mixing them",
          "the novel handles the character's suicide with care"}},
        {Category::off_topic,
         "The word is used jokingly, as a metaphor, or as a name, with no real reference to suicide.",
         {"this exam schedule is pure suicide lol", "that band's new album is called suicide season"}},
    };
    return g;
}

}  // namespace

std::string_view to_string(MessageType v) { return kMessageTypes[static_cast<std::size_t>(v)]; }
std::string_view to_string(Perspective v) { return kPerspectives[static_cast<std::size_t>(v)]; }
std::string_view to_string(Person v) { return kPersons[static_cast<std::size_t>(v)]; }
std::optional<MessageType> parse_message_type(std::string_view s) { return parse_enum<MessageType>(s, kMessageTypes); }
std::optional<Perspective> parse_perspective(std::string_view s) { return parse_enum<Perspective>(s, kPerspectives); }
std::optional<Person> parse_person(std::string_view s) { return parse_enum<Person>(s, kPersons); }

void validate(const DimensionAnnotation& d) {
    const bool irrelevant = d.message_type == MessageType::irrelevant;
    if (d.perspective == Perspective::neither && !irrelevant) {
        throw ValidationError("perspective", "'neither' is only allowed when message_type is irrelevant");
    }
    if (!d.serious && !(irrelevant && d.perspective == Perspective::neither)) {
        throw ValidationError("serious",
                              "not-serious messages must have message_type irrelevant and perspective neither");
    }
    const bool needs_person = d.message_type == MessageType::personal_experience ||
                              d.message_type == MessageType::bereaved_experience;
    if (needs_person && d.person == Person::not_applicable) {
        throw ValidationError("person", std::string(to_string(d.message_type)) + " needs first, third or mixed");
    }
}

Derivation derive(const DimensionAnnotation& d) {
    validate(d);
    Derivation out;
    if (d.message_type == MessageType::irrelevant) {
        out.category = d.serious ? Category::suicide_other : Category::off_topic;
        if (d.focus_on_bereaved || d.mentions_case) {
            out.adjudication_suggested = true;
            out.note = "irrelevant message type with case or bereaved flags";
        }
        return out;
    }
    const bool coping =
        d.perspective == Perspective::solution_coping || d.perspective == Perspective::both;

    if (d.message_type == MessageType::bereaved_experience || d.focus_on_bereaved) {
        out.category = coping ? Category::bereaved_coping : Category::bereaved_negative;
        if (d.message_type == MessageType::news_experience) {
            out.adjudication_suggested = true;
            out.note = "news item centred on a bereaved account";
        }
        return out;
    }
    if (d.mentions_case) {
        out.category = Category::suicide_cases;
        return out;
    }
    switch (d.message_type) {
        case MessageType::personal_experience:
            out.category = coping ? Category::coping : Category::suicidal_ideation_attempts;
            break;
        case MessageType::news_experience:
            out.category = coping ? Category::news_coping : Category::news_suicidal;
            break;
        case MessageType::case_report:
            out.category = coping ? Category::lives_saved : Category::suicide_cases;
            break;
        case MessageType::call_for_action:
            out.category = coping ? Category::prevention : Category::awareness;
            break;
        default:
            throw Error("unhandled message type");
    }
    return out;
}

std::vector<DimensionAnnotation> all_valid_annotations() {
    std::vector<DimensionAnnotation> out;
    for (std::size_t m = 0; m < kMessageTypes.size(); ++m) {
        for (std::size_t p = 0; p < kPerspectives.size(); ++p) {
            for (std::size_t q = 0; q < kPersons.size(); ++q) {
                for (int bits = 0; bits < 8; ++bits) {
                    DimensionAnnotation d{static_cast<MessageType>(m), static_cast<Perspective>(p),
                                          static_cast<Person>(q), (bits & 1) != 0, (bits & 2) != 0,
                                          (bits & 4) != 0};
                    try {
                        validate(d);
                        out.push_back(d);
                    } catch (const ValidationError&) {
                    }
                }
            }
        }
    }
    return out;
}

nlohmann::json to_json(const DimensionAnnotation& d) {
    return {{"message_type", std::string(to_string(d.message_type))},
            {"perspective", std::string(to_string(d.perspective))},
            {"person", std::string(to_string(d.person))},
            {"serious", d.serious},
            {"focus_on_bereaved", d.focus_on_bereaved},
            {"mentions_case", d.mentions_case}};
}

DimensionAnnotation dimensions_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("dimensions", "expected an object");
    auto text = [&](const char* key) -> std::string {
        if (!j.contains(key) || !j[key].is_string()) throw ValidationError(key, "missing or not a string");
        return j[key].get<std::string>();
    };
    auto flag = [&](const char* key, bool fallback) {
        if (!j.contains(key)) return fallback;
        if (!j[key].is_boolean()) throw ValidationError(key, "not a boolean");
        return j[key].get<bool>();
    };
    DimensionAnnotation d;
    const auto mt = text("message_type");
    const auto m = parse_message_type(mt);
    if (!m) throw ValidationError("message_type", "unknown value '" + mt + "'");
    d.message_type = *m;
    const auto pt = text("perspective");
    const auto p = parse_perspective(pt);
    if (!p) throw ValidationError("perspective", "unknown value '" + pt + "'");
    d.perspective = *p;
    if (j.contains("person")) {
        const auto st = text("person");
        const auto s = parse_person(st);
        if (!s) throw ValidationError("person", "unknown value '" + st + "'");
        d.person = *s;
    }
    d.serious = flag("serious", true);
    d.focus_on_bereaved = flag("focus_on_bereaved", false);
    d.mentions_case = flag("mentions_case", false);
    return d;
}

nlohmann::json taxonomy_json() {
    nlohmann::json cats = nlohmann::json::array();
    for (const auto& g : guidance()) {
        cats.push_back({{"name", std::string(to_string(g.category))},
                        {"task1", map_category(g.category, Level::task1)},
                        {"task2", map_category(g.category, Level::task2)},
                        {"definition", g.definition},
                        {"examples", g.examples}});
    }
    auto names = [](const auto& arr) {
        std::vector<std::string> v(arr.begin(), arr.end());
        return v;
    };
    return {{"categories", cats},
            {"levels",
             {{"fine", level_classes(Level::fine)},
              {"task1", level_classes(Level::task1)},
              {"task2", level_classes(Level::task2)}}},
            {"dimensions",
             {{"message_type", names(kMessageTypes)},
              {"perspective", names(kPerspectives)},
              {"person", names(kPersons)},
              {"flags", {"serious", "focus_on_bereaved", "mentions_case"}}}}};
}

}  // namespace papageno::annotate
