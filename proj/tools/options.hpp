#pragma once

#include <arthur/config.hpp>

#include <CLI11.hpp>

#include <optional>
#include <string>

// Flags shared by both binaries. Applied after the config file and environment.
struct CommonOptions {
    std::string config_path;
    std::string ltm_path;
    std::string tick_mode;
    std::string chatbot_url;

    void add_to(CLI::App& app) {
        app.add_option("--config", config_path, "key = value settings file");
        app.add_option("--ltm", ltm_path, "long-term memory file (JSONL)");
        app.add_option("--tick-mode", tick_mode, "turns or seconds")->check(CLI::IsMember({"turns", "seconds"}));
        app.add_option("--chatbot-url", chatbot_url, "fallback chatbot endpoint; empty uses the canned reply");
    }

    arthur::Config resolve() const {
        arthur::Config c = config_path.empty() ? arthur::Config{} : arthur::Config::load(config_path);
        c.apply_environment();
        if (!ltm_path.empty()) c.ltm_path = ltm_path;
        if (!tick_mode.empty()) c.tick_mode = *arthur::parse_tick_mode(tick_mode);
        if (!chatbot_url.empty()) c.chatbot_url = chatbot_url;
        return c;
    }
};
