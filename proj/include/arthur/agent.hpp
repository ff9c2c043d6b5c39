#pragma once

#include "arthur/chatbot.hpp"
#include "arthur/config.hpp"
#include "arthur/dialogue.hpp"
#include "arthur/memory.hpp"
#include "arthur/persistence.hpp"
#include "arthur/text_pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <memory>

namespace arthur {

/// Memory, text pipeline, chatbot and dialogue manager wired together with the configured tick policy.
///
/// turns mode: one decay tick after every user turn, timestamps derived from the tick count.
/// seconds mode: one decay tick per `tick_seconds` of wall clock, applied lazily before each operation.
class Agent {
public:
    explicit Agent(Config config, LongTermMemory ltm = {}, std::unique_ptr<ChatbotClient> chatbot = nullptr,
                   std::filesystem::path asset_dir = {})
        : config_(std::move(config)),
          pipeline_(TextPipeline::from_files(config_.data)),
          memory_(std::move(ltm),
                  config_.tick_mode == TickMode::turns ? tick_wall_clock(static_cast<std::int64_t>(config_.tick_seconds * 1000))
                                                       : WallClock(system_wall_ms),
                  pipeline_.stemmer()),
          chatbot_(chatbot ? std::move(chatbot) : make_chatbot(config_.chatbot_url, config_.chatbot_timeout)),
          dialogue_(memory_, pipeline_, *chatbot_, std::move(asset_dir)),
          last_tick_(std::chrono::steady_clock::now()) {}

    Agent(const Agent&) = delete;
    Agent& operator=(const Agent&) = delete;

    AgentReply turn(DialogueState& state, const TurnInput& in) {
        DialogueManager::validate(in);
        catch_up();
        auto reply = dialogue_.handle_turn(state, in);
        if (config_.tick_mode == TickMode::turns) memory_.decay_tick(1);
        return reply;
    }

    AgentReply identify(DialogueState& state, const std::optional<std::string>& person) {
        catch_up();
        return dialogue_.greet(state, person);
    }

    AgentReply teach(DialogueState& state, std::string_view term, const std::string& image_path,
                     EmotionLabel emotion = EmotionLabel::neutral) {
        catch_up();
        return dialogue_.learn_object_flow(state, term, image_path, emotion);
    }

    std::pair<ConsolidationReport, AgentReply> sleep() {
        catch_up();
        return dialogue_.sleep();
    }

    void tick(std::uint64_t n) { memory_.decay_tick(n); }

    std::size_t save() const { return save_ltm(memory_.ltm(), config_.ltm_path); }

    const Config& config() const { return config_; }
    const TextPipeline& pipeline() const { return pipeline_; }
    MemoryCore& memory() { return memory_; }
    const MemoryCore& memory() const { return memory_; }
    DialogueManager& dialogue() { return dialogue_; }

private:
    void catch_up() {
        if (config_.tick_mode != TickMode::seconds) return;
        const auto now = std::chrono::steady_clock::now();
        const auto period = std::chrono::duration<double>(config_.tick_seconds);
        const auto elapsed = std::chrono::duration<double>(now - last_tick_);
        const auto ticks = static_cast<std::uint64_t>(elapsed / period);
        if (ticks == 0) return;
        memory_.decay_tick(ticks);
        last_tick_ += std::chrono::duration_cast<std::chrono::steady_clock::duration>(period * static_cast<double>(ticks));
    }

    Config config_;
    TextPipeline pipeline_;
    MemoryCore memory_;
    std::unique_ptr<ChatbotClient> chatbot_;
    DialogueManager dialogue_;
    std::chrono::steady_clock::time_point last_tick_;
};

}  // namespace arthur
