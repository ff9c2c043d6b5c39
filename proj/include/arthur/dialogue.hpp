#pragma once

#include "arthur/chatbot.hpp"
#include "arthur/memory.hpp"
#include "arthur/text_pipeline.hpp"
#include "arthur/types.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <filesystem>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace arthur {

// ─── Questions ─────────────────────────────────────────────────

enum class QuestionId { age, work, study, children, children_count, children_names };

inline constexpr std::array<QuestionId, 4> kIcebreakers = {QuestionId::age, QuestionId::work, QuestionId::study,
                                                           QuestionId::children};
inline constexpr std::array<QuestionId, 2> kChildrenFollowUps = {QuestionId::children_count,
                                                                 QuestionId::children_names};

inline constexpr std::array<std::string_view, 6> kQuestionNames = {"age",      "work",           "study",
                                                                   "children", "children_count", "children_names"};

inline std::string_view to_string(QuestionId q) { return kQuestionNames[static_cast<std::size_t>(q)]; }

inline std::optional<QuestionId> parse_question_id(std::string_view s) {
    return detail::enum_from_name<QuestionId>(kQuestionNames, s);
}

/// The profile fact that answers a question.
inline FactAttribute answered_attribute(QuestionId q) { return static_cast<FactAttribute>(static_cast<int>(q)); }

inline std::string_view question_text(QuestionId q) {
    switch (q) {
        case QuestionId::age: return "How old are you?";
        case QuestionId::work: return "Do you work?";
        case QuestionId::study: return "Do you study?";
        case QuestionId::children: return "Do you have children?";
        // Follow-up wording is ours.
        case QuestionId::children_count: return "How many children do you have?";
        case QuestionId::children_names: return "What are their names?";
    }
    return "";
}

inline bool is_follow_up(QuestionId q) {
    return q == QuestionId::children_count || q == QuestionId::children_names;
}

// ─── Reply catalog ─────────────────────────────────────────────

namespace replies {
inline constexpr std::string_view kStranger = "Hello stranger! May I know your name?";
inline constexpr std::string_view kAskNameAgain = "Sorry, I did not catch that. May I know your name?";
inline constexpr std::string_view kAnswerThanks = "Thank you, I will remember that.";
inline constexpr std::string_view kAnswerUnclear = "I see.";
inline constexpr std::string_view kAllQuestionsDone = "Thank you for telling me about yourself!";
inline constexpr std::string_view kOfferDeclined = "Alright, maybe another time.";
inline constexpr std::string_view kPositive = "That sounds nice!";
inline constexpr std::string_view kNegative = "I am sorry to hear that.";
inline constexpr std::string_view kNeutral = "I see.";
}  // namespace replies

// ─── Dialogue types ────────────────────────────────────────────

namespace phase {
struct Idle {
    bool operator==(const Idle&) const = default;
};
struct AwaitName {
    bool operator==(const AwaitName&) const = default;
};
struct Icebreaker {
    QuestionId question;
    bool operator==(const Icebreaker&) const = default;
};
struct AwaitFollowUp {
    QuestionId question;
    bool operator==(const AwaitFollowUp&) const = default;
};
struct OfferImage {
    std::string term;
    bool operator==(const OfferImage&) const = default;
};
struct AwaitImage {
    std::string term;
    bool operator==(const AwaitImage&) const = default;
};
}  // namespace phase

using Phase = std::variant<phase::Idle, phase::AwaitName, phase::Icebreaker, phase::AwaitFollowUp, phase::OfferImage,
                           phase::AwaitImage>;

inline std::string describe(const Phase& p) {
    return std::visit(
        [](const auto& ph) -> std::string {
            using T = std::decay_t<decltype(ph)>;
            if constexpr (std::is_same_v<T, phase::Idle>) return "Idle";
            else if constexpr (std::is_same_v<T, phase::AwaitName>) return "AwaitName";
            else if constexpr (std::is_same_v<T, phase::Icebreaker>) return "Icebreaker(" + std::string(to_string(ph.question)) + ")";
            else if constexpr (std::is_same_v<T, phase::AwaitFollowUp>) return "AwaitFollowUp(" + std::string(to_string(ph.question)) + ")";
            else if constexpr (std::is_same_v<T, phase::OfferImage>) return "OfferImage(" + ph.term + ")";
            else return "AwaitImage(" + ph.term + ")";
        },
        p);
}

struct DialogueState {
    Phase phase = phase::Idle{};
    std::optional<std::string> current_person;  // normalized name
    std::deque<QuestionId> pending_questions;   // remaining icebreakers for current_person
    std::set<QuestionId> declined;              // unparseable answers: not asked again this session

    bool operator==(const DialogueState&) const = default;
};

struct TurnInput {
    std::optional<std::string> declared_person;  // stands in for face recognition
    std::string text;
    EmotionLabel declared_emotion = EmotionLabel::neutral;  // stands in for emotion detection
    std::optional<std::string> attached_image;
};

struct AgentReply {
    std::string text;
    Expression expression = Expression::neutral;
    std::vector<EventId> retrieved_event_ids;
    std::vector<std::string> actions;
    std::optional<std::string> image_path;  // set when recalling a taught object
};

// ─── Intents ───────────────────────────────────────────────────

namespace intent {
struct FactQuery {
    std::string person;  // normalized; "i"/"me" are resolved by the dialogue manager
    FactAttribute attribute;
    bool operator==(const FactQuery&) const = default;
};
struct ObjectQuery {
    std::string term;
    bool operator==(const ObjectQuery&) const = default;
};
struct NameIntro {
    std::string name;  // display form, e.g. "Knob"
    bool operator==(const NameIntro&) const = default;
};
struct Statement {
    bool operator==(const Statement&) const = default;
};
struct Fallback {
    bool operator==(const Fallback&) const = default;
};
}  // namespace intent

using Intent = std::variant<intent::FactQuery, intent::ObjectQuery, intent::NameIntro, intent::Statement, intent::Fallback>;

namespace detail {

// Lowercase, single-spaced, without trailing punctuation.
inline std::string clean_utterance(std::string_view text) {
    std::string out;
    bool space = false;
    for (unsigned char c : trim(text)) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            space = !out.empty();
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    }
    while (!out.empty() && std::string_view("?!.,;: ").find(out.back()) != std::string_view::npos) out.pop_back();
    return out;
}

inline std::string capitalize_words(std::string_view s) {
    std::string out;
    bool start = true;
    for (unsigned char c : s) {
        if (c == ' ') {
            start = true;
            out.push_back(' ');
            continue;
        }
        out.push_back(start && c >= 'a' && c <= 'z' ? static_cast<char>(c - 'a' + 'A') : static_cast<char>(c));
        start = false;
    }
    return out;
}

inline bool is_question(std::string_view raw, std::string_view cleaned) {
    if (trim(raw).ends_with('?')) return true;
    static const std::set<std::string, std::less<>> openers = {
        "what", "who",  "whom", "whose", "where", "when",  "why",   "how",   "which", "can",  "could", "would",
        "will", "do",   "does", "did",   "is",    "are",   "was",   "were",  "should", "shall", "may",  "might"};
    const auto first = cleaned.substr(0, cleaned.find(' '));
    return openers.count(first) != 0;
}

struct Pattern {
    std::regex re;
    std::optional<FactAttribute> attribute;  // FactQuery when set
};

inline const std::vector<Pattern>& fact_patterns() {
    static const std::vector<Pattern> patterns = [] {
        const std::string who = "([a-z][a-z' -]*?)";
        auto p = [](const std::string& re, FactAttribute a) { return Pattern{std::regex(re), a}; };
        return std::vector<Pattern>{
            p("^how old (?:is|am) " + who + "$", FactAttribute::age),
            p("^does " + who + " (?:work|have a job)$", FactAttribute::works),
            p("^do(?:es)? " + who + " study$", FactAttribute::studies),
            p("^does " + who + " have (?:any )?(?:children|kids)$", FactAttribute::has_children),
            p("^how many (?:children|kids) does " + who + " have$", FactAttribute::children_count),
            p("^what are the names of " + who + "'s (?:children|kids)$", FactAttribute::children_names),
            p("^what are " + who + "'s (?:children|kids)(?:'s names| called| named)$", FactAttribute::children_names),
        };
    }();
    return patterns;
}

inline const std::vector<std::regex>& object_patterns() {
    static const std::vector<std::regex> patterns = {
        std::regex("^do you know what (?:a |an |the )?([a-z0-9][a-z0-9 -]*?) (?:is|are)$"),
        std::regex("^do you know (?:a |an )([a-z0-9][a-z0-9 -]*?)$"),
        std::regex("^what(?: is|'s) (?:a |an )([a-z0-9][a-z0-9 -]*?)$"),
    };
    return patterns;
}

inline const std::regex& name_pattern() {
    static const std::regex re("^(?:my name is|my name's|call me|you can call me) ([a-z][a-z' -]*)$");
    return re;
}

// Accepted only while the agent is waiting for a name.
inline const std::regex& await_name_pattern() {
    static const std::regex re("^(?:i am|i'm|im|it's|it is|this is|name's|hi,? i'm|hello,? i'm) ([a-z][a-z' -]*)$");
    return re;
}

// Words that make a short reply something other than a bare name ("hi arthur", "yes", "not now").
inline bool could_be_name(std::string_view word) {
    static const std::set<std::string, std::less<>> non_names = {
        "hi",    "hello", "hey",    "yo",    "greetings", "good",  "morning", "afternoon", "evening", "night",
        "thanks", "thank", "you",   "yes",   "yeah",      "yep",   "no",      "nope",      "not",     "ok",
        "okay",  "sure",  "maybe",  "bye",   "goodbye",   "please", "sorry",  "arthur",    "i",       "me",
        "my",    "a",     "an",     "the",   "is",        "am",    "are",     "what",      "who",     "why",
        "how",   "now",   "later",  "never", "nothing",   "fine",  "well",    "nice",      "and",     "or"};
    if (word.empty() || non_names.count(word)) return false;
    return std::none_of(word.begin(), word.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
}

inline std::string strip_name(std::string_view s) {
    std::string out;
    for (unsigned char c : s) {
        if (c == '\'') continue;
        out.push_back(static_cast<char>(c));
    }
    return std::string(trim(out));
}

}  // namespace detail

/// Pattern-table intent classifier. `awaiting_name` enables the bare-name rule.
inline Intent parse_utterance(std::string_view text, bool awaiting_name = false) {
    const auto cleaned = detail::clean_utterance(text);
    if (cleaned.empty()) return intent::Statement{};
    std::smatch m;
    for (const auto& p : detail::fact_patterns()) {
        if (std::regex_match(cleaned, m, p.re)) {
            const auto who = std::string(trim(m[1].str()));
            if (who == "you") return intent::Fallback{};
            return intent::FactQuery{normalize_name(who), *p.attribute};
        }
    }
    for (const auto& re : detail::object_patterns()) {
        if (std::regex_match(cleaned, m, re)) return intent::ObjectQuery{std::string(trim(m[1].str()))};
    }
    if (std::regex_match(cleaned, m, detail::name_pattern()) ||
        (awaiting_name && std::regex_match(cleaned, m, detail::await_name_pattern()))) {
        const auto name = detail::strip_name(m[1].str());
        if (!name.empty()) return intent::NameIntro{detail::capitalize_words(name)};
    }
    if (awaiting_name) {
        const auto words = split_words(cleaned);
        const bool plausible = std::all_of(words.begin(), words.end(), [](const std::string& w) { return detail::could_be_name(w); });
        if (!words.empty() && words.size() <= 2 && plausible && !detail::is_question(text, cleaned)) {
            std::string name = words[0];
            if (words.size() == 2) name += " " + words[1];
            return intent::NameIntro{detail::capitalize_words(name)};
        }
    }
    return detail::is_question(text, cleaned) ? Intent{intent::Fallback{}} : Intent{intent::Statement{}};
}

// ─── Answer extraction ─────────────────────────────────────────

namespace detail {

inline std::optional<int> number_word(std::string_view w) {
    static constexpr std::array<std::string_view, 13> words = {"zero", "one",   "two",   "three", "four",
                                                               "five", "six",   "seven", "eight", "nine",
                                                               "ten",  "eleven", "twelve"};
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i] == w) return static_cast<int>(i);
    }
    return std::nullopt;
}

inline std::optional<int> first_number(const TokenList& words, bool allow_words) {
    for (const auto& w : words) {
        if (!w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
            w.size() <= 3) {
            return std::stoi(w);
        }
        if (allow_words) {
            if (auto n = number_word(w)) return n;
        }
    }
    return std::nullopt;
}

inline bool has_any(const TokenList& words, std::initializer_list<std::string_view> set) {
    return std::any_of(words.begin(), words.end(),
                       [&](const std::string& w) { return std::find(set.begin(), set.end(), w) != set.end(); });
}

// true / false / unknown from a yes-no answer, with optional topic words counting as "yes".
inline std::optional<bool> yes_no(const TokenList& words, std::initializer_list<std::string_view> topic) {
    if (has_any(words, {"no", "nope", "nah", "not", "never", "dont", "doesnt", "havent", "hasnt", "none",
                        "neither", "unemployed", "zero"})) {
        return false;
    }
    if (has_any(words, {"yes", "yeah", "yep", "yup", "sure", "certainly", "absolutely", "indeed", "correct", "ok",
                        "okay", "do", "course"}) ||
        has_any(words, topic)) {
        return true;
    }
    return std::nullopt;
}

}  // namespace detail

// ─── Dialogue manager ──────────────────────────────────────────

/// Conversation controller over a shared MemoryCore. One DialogueState per session;
/// callers serialize turns.
class DialogueManager {
public:
    DialogueManager(MemoryCore& memory, const TextPipeline& pipeline, ChatbotClient& chatbot,
                    std::filesystem::path asset_dir = {})
        : memory_(memory), pipeline_(pipeline), chatbot_(chatbot), asset_dir_(std::move(asset_dir)) {}

    static void validate(const TurnInput& in) {
        if (trim(in.text).empty() && !(in.attached_image && !trim(*in.attached_image).empty())) {
            throw ValidationError("a turn needs text or an attached image");
        }
    }

    /// One user turn. On a validation error the state is left untouched.
    AgentReply handle_turn(DialogueState& state, const TurnInput& in) {
        validate(in);
        DialogueState next = state;
        Builder out;

        // A recognized face that differs from the current person is greeted; an unrecognized one only
        // matters when it replaces someone we were talking to.
        const auto declared = in.declared_person ? normalize_name(*in.declared_person) : std::string();
        const bool switch_person =
            !declared.empty() && declared != next.current_person.value_or("") &&
            (memory_.knows_person(declared) || next.current_person.has_value());
        if (switch_person) {
            auto greeting = greet(next, *in.declared_person);
            out.absorb(greeting);
            if (!next.current_person) {
                store_statement(in, out);
                return finish(state, next, out, in);
            }
            if (!trim(in.text).empty()) {
                const auto it = parse_utterance(in.text);
                if (is_query(it)) {
                    answer_query(next, it, in, out);
                } else {
                    store_statement(in, out);
                }
            } else {
                store_statement(in, out);
            }
            return finish(state, next, out, in);
        }

        if (!next.current_person && !std::holds_alternative<phase::AwaitName>(next.phase)) {
            out.absorb(greet(next, std::nullopt));
            store_statement(in, out);
            return finish(state, next, out, in);
        }

        const bool awaiting_name = std::holds_alternative<phase::AwaitName>(next.phase);
        const Intent it = trim(in.text).empty() ? Intent{intent::Statement{}} : parse_utterance(in.text, awaiting_name);

        std::visit(
            [&](const auto& ph) {
                using P = std::decay_t<decltype(ph)>;
                if constexpr (std::is_same_v<P, phase::AwaitName>) {
                    if (const auto* intro = std::get_if<intent::NameIntro>(&it)) {
                        introduce(next, intro->name, in, out);
                    } else {
                        out.say(replies::kAskNameAgain);
                        store_statement(in, out);
                    }
                } else if constexpr (std::is_same_v<P, phase::Icebreaker> || std::is_same_v<P, phase::AwaitFollowUp>) {
                    if (is_query(it)) {
                        answer_query(next, it, in, out);
                        if (std::holds_alternative<P>(next.phase)) out.say(question_text(ph.question));
                    } else if (const auto* intro = std::get_if<intent::NameIntro>(&it)) {
                        introduce(next, intro->name, in, out);
                    } else {
                        const auto facts = record_answer(next, ph.question, in, out);
                        out.say(facts.empty() ? replies::kAnswerUnclear : replies::kAnswerThanks);
                        ask_next(next, out, /*thank_when_done=*/true);
                    }
                } else if constexpr (std::is_same_v<P, phase::OfferImage> || std::is_same_v<P, phase::AwaitImage>) {
                    if (in.attached_image) {
                        learn_object_flow(next, ph.term, *in.attached_image, in.declared_emotion, out);
                    } else if (const auto yn = detail::yes_no(split_words(in.text), {}); yn && !is_query(it)) {
                        if (*yn && std::is_same_v<P, phase::OfferImage>) {
                            next.phase = phase::AwaitImage{ph.term};
                            out.say("Please show me a picture of " + with_article(ph.term) + ".");
                        } else if (*yn) {
                            out.say("I am still waiting for the picture of " + with_article(ph.term) + ".");
                        } else {
                            next.phase = phase::Idle{};
                            out.say(replies::kOfferDeclined);
                        }
                        store_statement(in, out);
                    } else {
                        next.phase = phase::Idle{};
                        handle_idle(next, it, in, out);
                    }
                } else {
                    handle_idle(next, it, in, out);
                }
            },
            next.phase);

        return finish(state, next, out, in);
    }

    /// Identity check: a known name is greeted and rehearsed, anyone else is asked for a name.
    AgentReply greet(DialogueState& state, const std::optional<std::string>& person) {
        Builder out;
        const auto key = person ? normalize_name(*person) : std::string();
        if (!key.empty() && memory_.knows_person(key)) {
            state.current_person = key;
            state.declined.clear();
            state.phase = phase::Idle{};
            const auto profile = memory_.person(key);
            out.say("Greetings " + profile->display_name + "!");
            out.action("greet " + key);
            if (const auto* name_res = memory_.fact_source(key, kNameAttribute)) rehearse(name_res->id, out);
            ask_next(state, out, /*thank_when_done=*/false);
        } else {
            state = DialogueState{};
            state.phase = phase::AwaitName{};
            out.say(replies::kStranger);
            out.action("greet stranger");
        }
        sync_pending(state);
        return out.reply;
    }

    /// First unanswered icebreaker for the profile, follow-ups after a "yes" to children.
    static std::optional<QuestionId> next_icebreaker(const DialogueState& state, const std::optional<PersonProfile>& profile) {
        for (const auto q : remaining_questions(state, profile)) return q;
        return std::nullopt;
    }

    static std::vector<QuestionId> remaining_questions(const DialogueState& state,
                                                       const std::optional<PersonProfile>& profile) {
        std::vector<QuestionId> out;
        auto answered = [&](QuestionId q) {
            return profile && profile->facts.count(std::string(to_string(answered_attribute(q))));
        };
        for (const auto q : kIcebreakers) {
            if (!answered(q) && !state.declined.count(q)) out.push_back(q);
        }
        const bool has_children = profile && profile->facts.count("has_children") &&
                                  profile->facts.at("has_children") == "true";
        if (has_children) {
            for (const auto q : kChildrenFollowUps) {
                if (!answered(q) && !state.declined.count(q)) out.push_back(q);
            }
        }
        return out;
    }

    /// Extracts facts for `question` from the answer and stores them as one LearnThing event.
    /// Unparseable answers are stored as Interaction tokens and the question is not asked again.
    std::vector<FactTriple> record_answer(DialogueState& state, QuestionId question, const TurnInput& in) {
        Builder out;
        return record_answer(state, question, in, out);
    }

    /// Object teaching: unknown term -> offer; image -> store/append; known term -> recall.
    AgentReply learn_object_flow(DialogueState& state, std::string_view term,
                                 const std::optional<std::string>& image_path,
                                 EmotionLabel emotion = EmotionLabel::neutral) {
        Builder out;
        if (image_path) {
            learn_object_flow(state, term, *image_path, emotion, out);
        } else {
            recall_object(state, term, out);
        }
        out.reply.expression = Expression::neutral;
        sync_pending(state);
        return out.reply;
    }

    std::string fallback(const std::string& text) {
        try {
            return chatbot_.reply(text);
        } catch (const std::exception&) {
            return std::string(kChatbotApology);
        }
    }

    /// Consolidation triggered by the Sleep control.
    std::pair<ConsolidationReport, AgentReply> sleep() {
        auto report = memory_.consolidate();
        AgentReply reply;
        reply.expression = Expression::sleeping;
        reply.text = "Zzz... (" + std::to_string(report.stm_cleared_count) + " items consolidated, " +
                     std::to_string(report.forgotten_resources.size()) + " resources and " +
                     std::to_string(report.forgotten_events.size()) + " events forgotten)";
        reply.actions.push_back("consolidate");
        return {std::move(report), std::move(reply)};
    }

    const std::filesystem::path& asset_dir() const { return asset_dir_; }

private:
    struct Builder {
        AgentReply reply;
        std::optional<EmotionLabel> recalled_emotion;

        void say(std::string_view s) {
            if (s.empty()) return;
            if (!reply.text.empty()) reply.text += ' ';
            reply.text += s;
        }
        void action(std::string a) { reply.actions.push_back(std::move(a)); }
        void absorb(const AgentReply& r) {
            say(r.text);
            reply.actions.insert(reply.actions.end(), r.actions.begin(), r.actions.end());
            reply.retrieved_event_ids.insert(reply.retrieved_event_ids.end(), r.retrieved_event_ids.begin(),
                                             r.retrieved_event_ids.end());
            if (r.image_path) reply.image_path = r.image_path;
        }
    };

    static bool is_query(const Intent& it) {
        return std::holds_alternative<intent::FactQuery>(it) || std::holds_alternative<intent::ObjectQuery>(it);
    }

    static std::string with_article(std::string_view term) {
        const bool vowel = !term.empty() && std::string_view("aeiou").find(term.front()) != std::string_view::npos;
        return std::string(vowel ? "an " : "a ") + std::string(term);
    }

    // Expression precedence: recalled non-neutral emotion, then the user's mirrored emotion, then neutral.
    AgentReply finish(DialogueState& state, DialogueState& next, Builder& out, const TurnInput& in) {
        if (out.recalled_emotion && *out.recalled_emotion != EmotionLabel::neutral) {
            out.reply.expression = to_expression(*out.recalled_emotion);
        } else if (in.declared_emotion != EmotionLabel::neutral) {
            out.reply.expression = to_expression(in.declared_emotion);
        } else {
            out.reply.expression = Expression::neutral;
        }
        sync_pending(next);
        state = std::move(next);
        return std::move(out.reply);
    }

    void sync_pending(DialogueState& state) const {
        state.pending_questions.clear();
        if (!state.current_person) return;
        const auto profile = memory_.person(*state.current_person);
        for (const auto q : remaining_questions(state, profile)) state.pending_questions.push_back(q);
    }

    void rehearse(ResourceId id, Builder& out) {
        memory_.rehearse(id);
        out.action("rehearse " + to_string(id));
    }

    void ask_next(DialogueState& state, Builder& out, bool thank_when_done) {
        const auto profile = state.current_person ? memory_.person(*state.current_person) : std::nullopt;
        if (const auto q = next_icebreaker(state, profile)) {
            out.say(question_text(*q));
            state.phase = is_follow_up(*q) ? Phase{phase::AwaitFollowUp{*q}} : Phase{phase::Icebreaker{*q}};
        } else {
            if (thank_when_done) out.say(replies::kAllQuestionsDone);
            state.phase = phase::Idle{};
        }
    }

    void handle_idle(DialogueState& state, const Intent& it, const TurnInput& in, Builder& out) {
        std::visit(
            [&](const auto& i) {
                using I = std::decay_t<decltype(i)>;
                if constexpr (std::is_same_v<I, intent::FactQuery> || std::is_same_v<I, intent::ObjectQuery>) {
                    answer_query(state, it, in, out);
                } else if constexpr (std::is_same_v<I, intent::NameIntro>) {
                    introduce(state, i.name, in, out);
                } else if constexpr (std::is_same_v<I, intent::Fallback>) {
                    out.say(fallback(in.text));
                    out.action("fallback");
                    store_statement(in, out);
                    ask_next(state, out, false);
                } else {
                    statement(in, out);
                    ask_next(state, out, false);
                }
            },
            it);
    }

    void answer_query(DialogueState& state, const Intent& it, const TurnInput& in, Builder& out) {
        if (const auto* q = std::get_if<intent::FactQuery>(&it)) {
            answer_fact(state, *q, out);
        } else if (const auto* o = std::get_if<intent::ObjectQuery>(&it)) {
            if (in.attached_image) {
                learn_object_flow(state, o->term, *in.attached_image, in.declared_emotion, out);
            } else {
                recall_object(state, o->term, out);
            }
        }
    }

    void answer_fact(DialogueState& state, const intent::FactQuery& q, Builder& out) {
        auto person = q.person;
        if ((person == "i" || person == "me") && state.current_person) person = *state.current_person;
        out.action("fact_lookup " + person + "." + std::string(to_string(q.attribute)));
        const auto profile = memory_.person(person);
        if (!profile) {
            out.say("I do not know anyone called " + detail::capitalize_words(person) + ".");
            return;
        }
        const auto& who = profile->display_name;
        const auto value = memory_.fact_lookup(person, q.attribute);
        if (!value) {
            out.say("I do not know that about " + who + ".");
            return;
        }
        if (const auto* src = memory_.fact_source(person, to_string(q.attribute))) rehearse(src->id, out);
        const bool yes = *value == "true";
        switch (q.attribute) {
            case FactAttribute::age: out.say(who + " is " + *value + " years old."); break;
            case FactAttribute::works: out.say(yes ? "Yes, " + who + " works." : "No, " + who + " does not work."); break;
            case FactAttribute::studies:
                out.say(yes ? "Yes, " + who + " studies." : "No, " + who + " does not study.");
                break;
            case FactAttribute::has_children:
                out.say(yes ? "Yes, " + who + " has children." : "No, " + who + " does not have children.");
                break;
            case FactAttribute::children_count: out.say(who + " has " + *value + " children."); break;
            case FactAttribute::children_names: out.say(who + "'s children are " + *value + "."); break;
        }
    }

    void introduce(DialogueState& state, const std::string& display, const TurnInput& in, Builder& out) {
        const auto key = normalize_name(display);
        if (memory_.knows_person(key)) {
            out.absorb(greet(state, key));
            store_statement(in, out);
            return;
        }
        const auto ev = memory_.meet_person(display, in.declared_emotion, pipeline_.polarity(in.text));
        out.action("create_event " + to_string(ev.id) + " MeetNewPerson");
        state = DialogueState{};
        state.current_person = key;
        out.say("Nice to meet you, " + memory_.person(key)->display_name + "!");
        ask_next(state, out, false);
    }

    std::vector<FactTriple> record_answer(DialogueState& state, QuestionId question, const TurnInput& in, Builder& out) {
        const auto& person = *state.current_person;
        const auto words = split_words(in.text);
        std::vector<FactTriple> facts;
        auto add = [&](FactAttribute a, std::string v) { facts.push_back({person, std::string(to_string(a)), std::move(v)}); };

        switch (question) {
            case QuestionId::age:
                if (const auto n = detail::first_number(words, false); n && *n > 0 && *n <= 130) {
                    add(FactAttribute::age, std::to_string(*n));
                }
                break;
            case QuestionId::work:
                if (const auto yn = detail::yes_no(words, {"work", "working", "works", "job", "employed"})) {
                    add(FactAttribute::works, *yn ? "true" : "false");
                }
                break;
            case QuestionId::study:
                if (const auto yn = detail::yes_no(words, {"study", "studying", "studies", "student", "university",
                                                           "college", "school"})) {
                    add(FactAttribute::studies, *yn ? "true" : "false");
                }
                break;
            case QuestionId::children: {
                const auto n = detail::first_number(words, true);
                auto yn = detail::yes_no(words, {"son", "sons", "daughter", "daughters", "child", "children", "kid",
                                                 "kids"});
                if (n && *n == 0) yn = false;
                if (yn) {
                    add(FactAttribute::has_children, *yn ? "true" : "false");
                    if (*yn && n && *n > 0) add(FactAttribute::children_count, std::to_string(*n));
                }
                break;
            }
            case QuestionId::children_count:
                if (const auto n = detail::first_number(words, true)) add(FactAttribute::children_count, std::to_string(*n));
                break;
            case QuestionId::children_names: {
                static const std::set<std::string, std::less<>> filler = {
                    "names", "name", "called", "named", "children", "child", "kids", "kid", "son", "sons",
                    "daughter", "daughters", "their", "they", "theyre", "are", "is", "and", "my"};
                std::vector<std::string> names;
                for (const auto& w : words) {
                    if (filler.count(w) || pipeline_.is_stop_word(w)) continue;
                    if (std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; })) continue;
                    names.push_back(detail::capitalize_words(w));
                }
                if (!names.empty()) {
                    std::string joined;
                    for (const auto& n : names) joined += (joined.empty() ? "" : ", ") + n;
                    add(FactAttribute::children_names, joined);
                }
                break;
            }
        }

        if (facts.empty()) {
            state.declined.insert(question);
            store_statement(in, out);
            return facts;
        }
        std::vector<Payload> payloads;
        for (const auto& f : facts) payloads.push_back(GrammaticalInfo{f.attribute, f});
        const auto ev = memory_.create_event(EventType::LearnThing, in.declared_emotion, pipeline_.polarity(in.text),
                                             std::move(payloads));
        out.action("create_event " + to_string(ev.id) + " LearnThing");
        return facts;
    }

    void recall_object(DialogueState& state, std::string_view raw_term, Builder& out) {
        const auto term = normalize_term(raw_term);
        out.action("object_lookup " + term);
        if (const auto ev = memory_.find_term_event(term)) {
            const auto* img = memory_.latest_image(*ev);
            for (const auto rid : memory_.ltm().events.at(*ev).resource_ids) {
                const auto& r = memory_.ltm().resources.at(rid);
                if (r.grammatical()) {
                    rehearse(rid, out);
                    break;
                }
            }
            out.reply.retrieved_event_ids.push_back(*ev);
            if (img) {
                out.say("Yes, I know what " + with_article(term) + " is! This is the picture you showed me: " +
                        img->image()->path);
                out.reply.image_path = img->image()->path;
            } else {
                out.say("Yes, I know what " + with_article(term) + " is!");
            }
            state.phase = phase::Idle{};
            return;
        }
        out.say("No, I do not! Would you like to show me a picture of " + with_article(term) + "?");
        state.phase = phase::OfferImage{term};
    }

    void learn_object_flow(DialogueState& state, std::string_view raw_term, const std::string& image_path,
                           EmotionLabel emotion, Builder& out) {
        const auto term = normalize_term(raw_term);
        state.phase = phase::Idle{};
        if (term.empty()) throw ValidationError("term must not be empty");
        if (!image_exists(image_path)) {
            out.say("Sorry, I could not open the picture at " + image_path + ".");
            out.action("teach_failed " + term);
            return;
        }
        if (const auto ev = memory_.find_term_event(term)) {
            const auto ids = memory_.append_resources(*ev, {ImageInfo{image_path}});
            out.action("append_resources " + to_string(*ev) + " " + to_string(ids.front()));
        } else {
            const auto created = memory_.create_event(EventType::LearnThing, emotion, 0.0,
                                                      {GrammaticalInfo{term, std::nullopt}, ImageInfo{image_path}});
            out.action("create_event " + to_string(created.id) + " LearnThing");
        }
        out.say("Thank you! Now I know what " + with_article(term) + " is.");
    }

    bool image_exists(const std::string& path) const {
        std::filesystem::path p(path);
        if (p.is_relative() && !asset_dir_.empty()) p = asset_dir_ / p;
        std::error_code ec;
        return std::filesystem::is_regular_file(p, ec);
    }

    static std::string normalize_term(std::string_view term) {
        auto t = detail::clean_utterance(term);
        for (std::string_view article : {"a ", "an ", "the "}) {
            if (t.starts_with(article)) {
                t.erase(0, article.size());
                break;
            }
        }
        return std::string(trim(t));
    }

    // Tokens of the utterance as one Interaction event (plus the attached image, if any).
    // With every word a stop word the raw words are stored instead, so a turn with words always leaves a trace.
    std::optional<EventId> store_statement(const TurnInput& in, Builder& out, const TokenList* tokens = nullptr) {
        TokenList local;
        if (!tokens) {
            local = pipeline_.tokenize(in.text);
            tokens = &local;
        }
        std::vector<Payload> payloads;
        for (const auto& t : *tokens) payloads.push_back(GrammaticalInfo{t, std::nullopt});
        if (payloads.empty()) {
            for (const auto& w : split_words(in.text)) payloads.push_back(GrammaticalInfo{w, std::nullopt});
        }
        if (in.attached_image && !trim(*in.attached_image).empty()) payloads.push_back(ImageInfo{*in.attached_image});
        if (payloads.empty()) return std::nullopt;
        const auto ev = memory_.create_event(EventType::Interaction, in.declared_emotion, pipeline_.polarity(in.text),
                                             std::move(payloads));
        out.action("create_event " + to_string(ev.id) + " Interaction");
        return ev.id;
    }

    // A statement first cues retrieval (so it cannot match itself), then is stored.
    void statement(const TurnInput& in, Builder& out) {
        const auto tokens = pipeline_.tokenize(in.text);
        std::vector<RetrievalHit> hits;
        if (!tokens.empty()) {
            hits = memory_.retrieve(tokens);
            out.action("retrieve " + std::to_string(hits.size()));
        }
        for (const auto& h : hits) {
            out.reply.retrieved_event_ids.push_back(h.event.id);
            if (!out.recalled_emotion && h.event.emotion != EmotionLabel::neutral) out.recalled_emotion = h.event.emotion;
        }
        const double pol = pipeline_.polarity(in.text);
        if (!hits.empty()) {
            std::string cues;
            for (const auto& c : hits.front().matched_cues) cues += (cues.empty() ? "" : " and ") + c;
            out.say("That reminds me of when we talked about " + cues + ".");
        } else if (pol > 0.05) {
            out.say(replies::kPositive);
        } else if (pol < -0.05) {
            out.say(replies::kNegative);
        } else {
            out.say(replies::kNeutral);
        }
        store_statement(in, out, &tokens);
    }

    MemoryCore& memory_;
    const TextPipeline& pipeline_;
    ChatbotClient& chatbot_;
    std::filesystem::path asset_dir_;
};

}  // namespace arthur
