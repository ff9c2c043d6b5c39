#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace arthur {

// ─── Errors ────────────────────────────────────────────────────

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LookupError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotFoundError : IoError {
    using IoError::IoError;
};

// Malformed input file; carries the 1-based line number.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// ─── Identifiers ───────────────────────────────────────────────

template <typename Tag>
struct Id {
    std::uint64_t value = 0;

    constexpr auto operator<=>(const Id&) const = default;
};

struct EventTag {};
struct ResourceTag {};

using EventId = Id<EventTag>;
using ResourceId = Id<ResourceTag>;

inline std::string to_string(EventId id) { return "E" + std::to_string(id.value); }
inline std::string to_string(ResourceId id) { return "R" + std::to_string(id.value); }

// Logical tick first, wall clock second: ordering uses both.
struct Timestamp {
    std::uint64_t tick = 0;
    std::int64_t wall_ms = 0;

    constexpr auto operator<=>(const Timestamp&) const = default;
};

// ─── Enumerations ──────────────────────────────────────────────

enum class EmotionLabel { anger, disgust, doubt, fear, joy, sadness, surprise, worry, neutral };

// Agent face expressions: the event emotions plus `sleeping`.
enum class Expression { anger, disgust, doubt, fear, joy, sadness, surprise, worry, neutral, sleeping };

enum class EventType { MeetNewPerson, LearnThing, Interaction };

enum class ResourceType { Grammatical, Image, Audio };

inline constexpr std::array<std::string_view, 9> kEmotionNames = {
    "anger", "disgust", "doubt", "fear", "joy", "sadness", "surprise", "worry", "neutral"};

inline constexpr std::array<std::string_view, 10> kExpressionNames = {
    "anger", "disgust", "doubt", "fear", "joy", "sadness", "surprise", "worry", "neutral", "sleeping"};

inline constexpr std::array<std::string_view, 3> kEventTypeNames = {"MeetNewPerson", "LearnThing",
                                                                    "Interaction"};

inline constexpr std::array<std::string_view, 3> kResourceTypeNames = {"Grammatical", "Image", "Audio"};

namespace detail {

template <typename Enum, std::size_t N>
std::optional<Enum> enum_from_name(const std::array<std::string_view, N>& names, std::string_view text) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == text) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

}  // namespace detail

inline std::string_view to_string(EmotionLabel e) { return kEmotionNames[static_cast<std::size_t>(e)]; }
inline std::string_view to_string(Expression e) { return kExpressionNames[static_cast<std::size_t>(e)]; }
inline std::string_view to_string(EventType t) { return kEventTypeNames[static_cast<std::size_t>(t)]; }
inline std::string_view to_string(ResourceType t) { return kResourceTypeNames[static_cast<std::size_t>(t)]; }

inline std::optional<EmotionLabel> parse_emotion(std::string_view s) {
    return detail::enum_from_name<EmotionLabel>(kEmotionNames, s);
}
inline std::optional<Expression> parse_expression(std::string_view s) {
    return detail::enum_from_name<Expression>(kExpressionNames, s);
}
inline std::optional<EventType> parse_event_type(std::string_view s) {
    return detail::enum_from_name<EventType>(kEventTypeNames, s);
}
inline std::optional<ResourceType> parse_resource_type(std::string_view s) {
    return detail::enum_from_name<ResourceType>(kResourceTypeNames, s);
}

inline Expression to_expression(EmotionLabel e) { return static_cast<Expression>(static_cast<int>(e)); }

// ─── Small string helpers shared across modules ────────────────

inline std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
    });
    return out;
}

inline std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

}  // namespace arthur
