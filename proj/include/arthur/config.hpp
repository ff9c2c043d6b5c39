#pragma once

#include "arthur/persistence.hpp"
#include "arthur/text_pipeline.hpp"
#include "arthur/types.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

namespace arthur {

enum class TickMode { turns, seconds };

inline std::optional<TickMode> parse_tick_mode(std::string_view s) {
    if (s == "turns") return TickMode::turns;
    if (s == "seconds") return TickMode::seconds;
    return std::nullopt;
}

inline std::string_view to_string(TickMode m) { return m == TickMode::turns ? "turns" : "seconds"; }

/// Runtime settings. Precedence: built-in defaults < config file < environment < command-line flags.
struct Config {
    TickMode tick_mode = TickMode::turns;
    double tick_seconds = 2.0;  // live mode: one decay tick per period
    std::filesystem::path ltm_path = kDefaultLtmPath;
    TextDataPaths data;
    std::string chatbot_url;  // empty: canned responder
    std::chrono::milliseconds chatbot_timeout{3000};
    bool show_thresholds = false;

    /// `key = value` lines; '#' starts a comment. Relative data paths resolve against the file's directory.
    static Config parse(std::string_view text, const std::filesystem::path& base_dir = {}) {
        Config c;
        c.apply(text, base_dir);
        return c;
    }

    static Config load(const std::filesystem::path& path) {
        return parse(detail::read_text_file(path), path.parent_path());
    }

    void apply(std::string_view text, const std::filesystem::path& base_dir = {}) {
        auto resolve = [&](std::string_view v) {
            std::filesystem::path p{std::string(v)};
            return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        };
        detail::for_each_data_line(text, [&](std::size_t line_no, std::string_view line) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));
            auto number = [&]() {
                try {
                    std::size_t used = 0;
                    const double v = std::stod(std::string(value), &used);
                    if (used != value.size() || !(v > 0.0)) throw std::invalid_argument("");
                    return v;
                } catch (const std::exception&) {
                    throw ParseError("'" + std::string(key) + "' needs a positive number", line_no);
                }
            };
            if (key == "tick_mode") {
                const auto m = parse_tick_mode(value);
                if (!m) throw ParseError("tick_mode must be turns or seconds", line_no);
                tick_mode = *m;
            } else if (key == "tick_seconds") {
                tick_seconds = number();
            } else if (key == "ltm_path") {
                ltm_path = resolve(value);
            } else if (key == "stopwords") {
                data.stopwords = resolve(value);
            } else if (key == "lexicon") {
                data.lexicon = resolve(value);
            } else if (key == "stemmer_rules") {
                data.stemmer_rules = resolve(value);
            } else if (key == "chatbot_url") {
                chatbot_url = std::string(value);
            } else if (key == "chatbot_timeout_ms") {
                chatbot_timeout = std::chrono::milliseconds(static_cast<long long>(number()));
            } else if (key == "show_thresholds") {
                if (value != "true" && value != "false") throw ParseError("show_thresholds must be true or false", line_no);
                show_thresholds = value == "true";
            } else {
                throw ParseError("unknown key '" + std::string(key) + "'", line_no);
            }
        });
    }

    /// ARTHUR_LTM_PATH and ARTHUR_CHATBOT_URL, when set and non-empty.
    void apply_environment() {
        if (const char* v = std::getenv("ARTHUR_LTM_PATH"); v && *v) ltm_path = v;
        if (const char* v = std::getenv("ARTHUR_CHATBOT_URL"); v && *v) chatbot_url = v;
    }
};

}  // namespace arthur
