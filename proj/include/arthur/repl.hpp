#pragma once

#include "arthur/agent.hpp"
#include "arthur/dialogue.hpp"

#include <cstdio>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <variant>

namespace arthur {

namespace cmd {
struct Say {
    std::string text;
};
struct Name {
    std::optional<std::string> name;  // empty: nobody recognized
};
struct Emotion {
    EmotionLabel label;
};
struct Teach {
    std::string term;
    std::string path;
};
struct Sleep {};
struct Tick {
    std::uint64_t n = 1;
};
struct ShowStm {};
struct ShowLtm {};
struct Quit {};
}  // namespace cmd

using ReplCommand =
    std::variant<cmd::Say, cmd::Name, cmd::Emotion, cmd::Teach, cmd::Sleep, cmd::Tick, cmd::ShowStm, cmd::ShowLtm, cmd::Quit>;

inline constexpr std::string_view kReplUsage =
    "commands: <text> | /name [person] | /emotion <label> | /teach <term> <image-path> | /sleep | /tick [n] | "
    "/stm | /ltm | /quit";

/// Plain text is a turn; slash-commands are parsed strictly. Throws ValidationError with usage text.
inline ReplCommand parse_repl_line(std::string_view line) {
    const auto t = trim(line);
    if (!t.starts_with('/')) return cmd::Say{std::string(t)};
    const auto space = t.find(' ');
    const auto name = t.substr(0, space);
    const auto arg = space == std::string_view::npos ? std::string_view{} : trim(t.substr(space + 1));
    auto bad = [&](const std::string& why) { return ValidationError(why + "\n" + std::string(kReplUsage)); };

    if (name == "/name") return cmd::Name{arg.empty() ? std::nullopt : std::optional<std::string>(std::string(arg))};
    if (name == "/emotion") {
        const auto label = parse_emotion(to_lower_ascii(arg));
        if (!label) throw bad("unknown emotion '" + std::string(arg) + "'");
        return cmd::Emotion{*label};
    }
    if (name == "/teach") {
        // The path is the last word; everything before it is the term.
        const auto last = arg.rfind(' ');
        if (arg.empty() || last == std::string_view::npos) throw bad("/teach needs a term and an image path");
        return cmd::Teach{std::string(trim(arg.substr(0, last))), std::string(trim(arg.substr(last + 1)))};
    }
    if (name == "/sleep" && arg.empty()) return cmd::Sleep{};
    if (name == "/tick") {
        if (arg.empty()) return cmd::Tick{1};
        std::uint64_t n = 0;
        const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
        if (ec != std::errc{} || ptr != arg.data() + arg.size() || n == 0) throw bad("/tick needs a positive integer");
        return cmd::Tick{n};
    }
    if (name == "/stm" && arg.empty()) return cmd::ShowStm{};
    if (name == "/ltm" && arg.empty()) return cmd::ShowLtm{};
    if (name == "/quit" && arg.empty()) return cmd::Quit{};
    throw bad("unknown command '" + std::string(t) + "'");
}

namespace detail {

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::string describe_payload(const Payload& p) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, GrammaticalInfo>) {
                std::string s = x.token;
                if (x.fact) s += " (" + x.fact->subject + "." + x.fact->attribute + "=" + x.fact->value + ")";
                return s;
            } else if constexpr (std::is_same_v<T, ImageInfo>) {
                return "image:" + x.path;
            } else {
                return "audio:" + x.tag;
            }
        },
        p);
}

}  // namespace detail

/// Executes REPL commands against one agent and one conversation, writing a plain-text transcript.
class Repl {
public:
    Repl(Agent& agent, std::ostream& out, bool echo_input) : agent_(agent), out_(out), echo_(echo_input) {}

    /// Returns false once /quit is seen.
    bool execute_line(std::string_view line) {
        const auto t = trim(line);
        if (t.empty() || t.starts_with('#')) return true;
        if (echo_) out_ << "> " << t << '\n';
        ReplCommand command;
        try {
            command = parse_repl_line(t);
        } catch (const ValidationError& e) {
            ++command_errors_;
            out_ << "error: " << e.what() << '\n';
            return true;
        }
        try {
            return execute(command);
        } catch (const std::exception& e) {
            out_ << "error: " << e.what() << '\n';
            return true;
        }
    }

    bool execute(const ReplCommand& command) {
        return std::visit([&](const auto& c) { return run(c); }, command);
    }

    /// Reads lines until EOF or /quit.
    void run(std::istream& in, bool prompt = false) {
        std::string line;
        for (;;) {
            if (prompt) out_ << "you> " << std::flush;
            if (!std::getline(in, line)) break;
            if (!execute_line(line)) break;
        }
    }

    std::size_t command_errors() const { return command_errors_; }
    const DialogueState& state() const { return state_; }

private:
    void print_reply(const AgentReply& r) {
        out_ << "Arthur: " << r.text << " [" << to_string(r.expression) << "]\n";
    }

    bool run(const cmd::Say& c) {
        TurnInput in;
        in.declared_person = declared_;
        in.text = c.text;
        in.declared_emotion = emotion_;
        print_reply(agent_.turn(state_, in));
        return true;
    }

    bool run(const cmd::Name& c) {
        declared_ = c.name;
        print_reply(agent_.identify(state_, c.name));
        return true;
    }

    bool run(const cmd::Emotion& c) {
        emotion_ = c.label;
        out_ << "(emotion: " << to_string(c.label) << ")\n";
        return true;
    }

    bool run(const cmd::Teach& c) {
        print_reply(agent_.teach(state_, c.term, c.path, emotion_));
        return true;
    }

    bool run(const cmd::Sleep&) {
        auto [report, reply] = agent_.sleep();
        out_ << "Consolidation: " << report.stm_cleared_count << " STM items, " << report.reduced.size()
             << " reduced, " << report.forgotten_resources.size() << " resources forgotten, "
             << report.forgotten_events.size() << " events forgotten\n";
        for (const auto& r : report.reduced) {
            out_ << "  reduced " << to_string(r.id) << ' ' << detail::fixed6(r.old_weight) << " -> "
                 << detail::fixed6(r.new_weight) << '\n';
        }
        for (const auto id : report.forgotten_resources) out_ << "  forgot " << to_string(id) << '\n';
        for (const auto id : report.forgotten_events) out_ << "  forgot " << to_string(id) << '\n';
        print_reply(reply);
        return true;
    }

    bool run(const cmd::Tick& c) {
        agent_.tick(c.n);
        out_ << "(" << c.n << (c.n == 1 ? " tick" : " ticks") << ")\n";
        return true;
    }

    bool run(const cmd::ShowStm&) {
        const auto& mem = agent_.memory();
        const auto& stm = mem.stm();
        out_ << "STM (" << stm.size() << "/" << kStmCapacity << ", tick " << stm.tick_counter() << "):\n";
        for (const auto& slot : stm.slots()) {
            const auto& r = mem.ltm().resources.at(slot.id);
            out_ << "  " << to_string(slot.id) << ' ' << detail::describe_payload(r.information)
                 << " activation=" << detail::fixed6(slot.activation) << " weight=" << detail::fixed6(r.weight) << '\n';
        }
        if (agent_.config().show_thresholds) {
            out_ << "  thresholds: activation<" << detail::fixed6(kActivationThreshold) << " reduces, weight<"
                 << detail::fixed6(kForgetThreshold) << " forgets\n";
        }
        return true;
    }

    bool run(const cmd::ShowLtm&) {
        const auto& ltm = agent_.memory().ltm();
        out_ << "LTM (" << ltm.events.size() << " events, " << ltm.resources.size() << " resources, "
             << ltm.people.size() << " people):\n";
        for (const auto& [id, ev] : ltm.events) {
            out_ << "  " << to_string(id) << ' ' << to_string(ev.event_type) << ' ' << to_string(ev.emotion)
                 << " polarity=" << detail::fixed6(ev.polarity) << ':';
            for (const auto rid : ev.resource_ids) {
                const auto& r = ltm.resources.at(rid);
                out_ << ' ' << to_string(rid) << '[' << detail::describe_payload(r.information)
                     << " w=" << detail::fixed6(r.weight) << ']';
            }
            out_ << '\n';
        }
        for (const auto& [key, p] : ltm.people) {
            out_ << "  person " << p.display_name;
            if (const auto profile = agent_.memory().person(key)) {
                for (const auto& [attr, value] : profile->facts) out_ << ' ' << attr << '=' << value;
            }
            out_ << '\n';
        }
        return true;
    }

    bool run(const cmd::Quit&) { return false; }

    Agent& agent_;
    std::ostream& out_;
    bool echo_;
    DialogueState state_;
    std::optional<std::string> declared_;
    EmotionLabel emotion_ = EmotionLabel::neutral;
    std::size_t command_errors_ = 0;
};

// ─── Entry points shared by the CLI and the tests ──────────────

enum ExitCode : int { kExitOk = 0, kExitScriptError = 1, kExitIoError = 2 };

inline LongTermMemory load_or_fresh(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return {};
    return load_ltm(path);
}

/// Interactive or piped session: reads `in`, saves LTM on exit.
inline int run_repl(const Config& config, std::istream& in, std::ostream& out, std::ostream& err,
                    bool prompt = false) {
    LongTermMemory ltm;
    try {
        ltm = load_or_fresh(config.ltm_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIoError;
    }
    Agent agent(config, std::move(ltm), nullptr, std::filesystem::current_path());
    Repl repl(agent, out, /*echo_input=*/false);
    repl.run(in, prompt);
    try {
        agent.save();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIoError;
    }
    return kExitOk;
}

/// Non-interactive run: echoes every line into the transcript, resolves images relative to the script,
/// saves LTM at the end. Unknown slash-commands make the run fail with kExitScriptError.
inline int run_script(const std::filesystem::path& script, const Config& config, std::ostream& out, std::ostream& err,
                      std::unique_ptr<ChatbotClient> chatbot = nullptr) {
    std::string text;
    try {
        text = detail::read_text_file(script);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitScriptError;
    }
    LongTermMemory ltm;
    try {
        ltm = load_or_fresh(config.ltm_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIoError;
    }
    Agent agent(config, std::move(ltm), std::move(chatbot), script.parent_path());
    Repl repl(agent, out, /*echo_input=*/true);
    std::istringstream lines(text);
    repl.run(lines);
    try {
        agent.save();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIoError;
    }
    return repl.command_errors() == 0 ? kExitOk : kExitScriptError;
}

}  // namespace arthur
