// Acceptance checks: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.

#include <arthur/repl.hpp>

#include "support.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace arthur;
namespace ts = testing_support;
namespace fs = std::filesystem;

namespace {

constexpr double kTol = 1e-9;
const fs::path kScenarioDir = fs::path(ARTHUR_SOURCE_DIR) / "scenarios";

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

struct ScriptRun {
    int exit_code = -1;
    std::string transcript;
    std::string ltm;
    double seconds = 0.0;
};

ScriptRun run_scenario(const std::string& name, const ts::TempDir& dir) {
    Config config;
    config.ltm_path = dir / (name + ".jsonl");
    std::ostringstream out, err;
    const auto start = std::chrono::steady_clock::now();
    ScriptRun r;
    r.exit_code = run_script(kScenarioDir / name, config, out, err, std::make_unique<CannedChatbot>());
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.transcript = out.str();
    if (fs::exists(config.ltm_path)) r.ltm = detail::read_text_file(config.ltm_path);
    return r;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

GrammaticalInfo word(const std::string& w) { return GrammaticalInfo{w, std::nullopt}; }

Outcome introduction() {
    Outcome o;
    ts::TempDir dir("accept");
    const auto r = run_scenario("introduction.txt", dir);
    o.require(r.exit_code == 0, "script exit code " + std::to_string(r.exit_code));
    o.require(contains(r.transcript, "> Hello there\nArthur: Hello stranger! May I know your name?"),
              "no stranger greeting on first contact");
    o.require(contains(r.transcript, "> /name Knob\nArthur: Greetings Knob!"), "no greeting by stored name");
    o.require(r.seconds < 1.0, "took " + std::to_string(r.seconds) + " s");
    return o;
}

Outcome learning() {
    Outcome o;
    ts::TempDir dir("accept");
    const auto r = run_scenario("learning.txt", dir);
    o.require(r.exit_code == 0, "script exit code " + std::to_string(r.exit_code));
    o.require(contains(r.transcript, "> how old is knob?\nArthur: Knob is 31 years old."), "age query not answered with 31");
    const auto negative = r.transcript.find("No, I do not! Would you like to show me a picture of a cellphone?");
    const auto positive = r.transcript.find(
        "Yes, I know what a cellphone is! This is the picture you showed me: images/cellphone.png");
    o.require(negative != std::string::npos, "no negative answer before teaching");
    o.require(positive != std::string::npos && positive > negative, "no affirmative recall with image path after teaching");
    o.require(r.seconds < 1.0, "took " + std::to_string(r.seconds) + " s");
    return o;
}

Outcome decay_curve() {
    Outcome o;
    const auto oracle = ts::log_iteration(1, 20);
    MemoryCore m({}, tick_wall_clock());
    const auto id = m.create_event(EventType::LearnThing, EmotionLabel::neutral, 0.0, {word("x")}).resource_ids[0];
    int first_below = -1;
    for (int t = 1; t <= 20; ++t) {
        m.decay_tick(1);
        const double a = *m.stm().activation(id);
        o.require(std::abs(a - static_cast<double>(oracle[t])) <= kTol, "tick " + std::to_string(t) + " off the oracle");
        if (first_below < 0 && a < kActivationThreshold) first_below = t;
    }
    o.require(std::abs(static_cast<double>(oracle[1]) - 0.6931) < 1e-4, "oracle after one tick is not ~0.6931");
    o.require(first_below == 9 && ts::first_index_below(oracle, ts::Big("0.2")) == 9,
              "first tick below 0.2 is " + std::to_string(first_below));
    return o;
}

Outcome consolidation_arithmetic() {
    Outcome o;
    using boost::multiprecision::log;
    {
        MemoryCore m({}, tick_wall_clock());
        const auto ev = m.create_event(EventType::Interaction, EmotionLabel::neutral, 0.0, {word("weather")});
        m.decay_tick(9);
        const auto report = m.consolidate();
        o.require(report.reduced.size() == 1 &&
                      std::abs(report.reduced[0].new_weight - static_cast<double>(log(ts::Big("1.1")))) <= kTol,
                  "W=0.1 not reduced to ln(1.1)");
        o.require(report.forgotten_resources == std::vector<ResourceId>{ev.resource_ids[0]} &&
                      report.forgotten_events == std::vector<EventId>{ev.id},
                  "W=0.1 resource not forgotten");
    }
    {
        MemoryCore m({}, tick_wall_clock());
        const auto id = m.create_event(EventType::LearnThing, EmotionLabel::neutral, 0.0, {word("x")}).resource_ids[0];
        m.decay_tick(9);
        m.consolidate();
        const auto* r = m.ltm().find_resource(id);
        o.require(r && std::abs(r->weight - static_cast<double>(log(ts::Big("1.9")))) <= kTol,
                  "W=0.9 not reduced to ln(1.9) and retained");
    }
    {
        const auto oracle = ts::log_iteration(ts::Big("0.9"), 12);
        MemoryCore m({}, tick_wall_clock());
        const auto id = m.create_event(EventType::LearnThing, EmotionLabel::neutral, 0.0, {word("x")}).resource_ids[0];
        int forgotten_at = -1;
        for (int sleep = 1; sleep <= 12 && forgotten_at < 0; ++sleep) {
            m.rehearse(id);
            m.decay_tick(9);
            const auto report = m.consolidate();
            o.require(report.reduced.size() == 1 &&
                          std::abs(report.reduced[0].new_weight - static_cast<double>(oracle[sleep])) <= kTol,
                      "sleep " + std::to_string(sleep) + " weight off the oracle");
            if (!m.ltm().find_resource(id)) forgotten_at = sleep;
        }
        o.require(forgotten_at == 9 && ts::first_index_below(oracle, ts::Big("0.2")) == 9,
                  "forgotten at sleep " + std::to_string(forgotten_at));
    }
    return o;
}

Outcome invariant_suite() {
    Outcome o;
    std::mt19937_64 rng(7);
    MemoryCore m({}, tick_wall_clock());
    const auto& vocab = ts::vocabulary();
    for (int step = 0; step < 10000 && o.ok; ++step) {
        const auto op = rng() % 100;
        if (op < 40) {
            std::vector<Payload> payloads;
            for (auto i = 1 + rng() % 3; i > 0; --i) payloads.push_back(word(vocab[rng() % vocab.size()]));
            m.create_event(static_cast<EventType>(rng() % 3), EmotionLabel::neutral, 0.0, std::move(payloads));
        } else if (op < 50) {
            m.meet_person("p" + std::to_string(rng() % 5), EmotionLabel::neutral, 0.0);
        } else if (op < 65) {
            m.decay_tick(1 + rng() % 12);
        } else if (op < 75) {
            if (!m.ltm().resources.empty()) {
                auto it = m.ltm().resources.begin();
                std::advance(it, static_cast<long>(rng() % m.ltm().resources.size()));
                m.rehearse(it->first);
            }
        } else if (op < 90) {
            m.retrieve({vocab[rng() % vocab.size()]});
        } else {
            m.consolidate();
            for (const auto& [id, r] : m.ltm().resources) o.require(r.weight >= kForgetThreshold, "weight < 0.2 after sleep");
            for (const auto& [id, ev] : m.ltm().events) o.require(!ev.resource_ids.empty(), "empty event after sleep");
        }
        o.require(m.stm().size() <= kStmCapacity, "STM over capacity at step " + std::to_string(step));
        try {
            m.validate();
        } catch (const std::exception& e) {
            o.require(false, "step " + std::to_string(step) + ": " + e.what());
        }
    }
    MemoryCore big({}, tick_wall_clock());
    for (int i = 0; i < 1000; ++i) {
        big.create_event(EventType::LearnThing, EmotionLabel::neutral, 0.0, {word("item" + std::to_string(i))});
        if (i % 7 == 6) big.consolidate();
    }
    big.consolidate();
    o.require(big.ltm().resources.size() == 1000, "LTM dropped resources under load");
    return o;
}

Outcome retrieval_oracle() {
    Outcome o;
    std::mt19937_64 rng(11);
    const auto stemmer = MemoryCore::default_stemmer();
    const auto& vocab = ts::vocabulary();
    for (int instance = 0; instance < 200 && o.ok; ++instance) {
        auto ltm = ts::random_ltm(rng, 5);
        if (instance % 4 == 0) {
            for (auto& [id, r] : ltm.resources) r.weight = 0.5;
            for (auto& [id, ev] : ltm.events) ev.timestamp = {3, 6000};
        }
        std::vector<std::string> cues;
        for (auto c = 1 + rng() % 3; c > 0; --c) cues.push_back(vocab[rng() % vocab.size()]);
        MemoryCore m(ltm, tick_wall_clock(), stemmer);
        const auto expected = ts::brute_force_rank(ltm, stemmer, cues, kDefaultRetrievalK);
        const auto got = m.retrieve(cues);
        bool same = got.size() == expected.size();
        for (std::size_t i = 0; same && i < got.size(); ++i) {
            same = got[i].event.id == expected[i].id && got[i].matched_cues == expected[i].matched &&
                   got[i].score == expected[i].score && got[i].mean_weight == expected[i].mean_weight;
        }
        o.require(same, "instance " + std::to_string(instance) + " differs from brute force");
    }
    return o;
}

Outcome text_pipeline() {
    Outcome o;
    const TextPipeline p;
    o.require(p.tokenize("I am going on vacation with my dad to Glasgow") == TokenList{"vacation", "dad", "glasgow"},
              "sentence does not tokenize to [vacation, dad, glasgow]");
    o.require(p.stem("fishing") == "fish", "fishing does not stem to fish");
    o.require(p.polarity("I am feeling good") > 0.0, "positive sentence not positive");
    o.require(p.polarity("I am not feeling good") < 0.0, "negated sentence not negative");
    return o;
}

Outcome determinism() {
    Outcome o;
    for (const char* name : {"introduction.txt", "learning.txt"}) {
        ts::TempDir a("accept"), b("accept");
        const auto ra = run_scenario(name, a);
        const auto rb = run_scenario(name, b);
        o.require(ra.exit_code == 0 && rb.exit_code == 0, std::string(name) + " failed to run");
        o.require(ra.transcript == rb.transcript, std::string(name) + " transcripts differ");
        o.require(!ra.ltm.empty() && ra.ltm == rb.ltm, std::string(name) + " LTM files differ");
    }
    return o;
}

Outcome persistence() {
    Outcome o;
    std::mt19937_64 rng(5);
    ts::TempDir dir("accept");
    for (int i = 0; i < 200 && o.ok; ++i) {
        const auto ltm = ts::random_ltm(rng, 12);
        const auto path = dir / ("s" + std::to_string(i) + ".jsonl");
        save_ltm(ltm, path);
        o.require(load_ltm(path) == ltm, "store " + std::to_string(i) + " changed on round trip");
    }
    // Offline: this binary runs every check above with the canned chatbot and no network.
    o.require(std::string(CannedChatbot{}.reply("anything")) == kCannedChatbotReply, "stub chatbot unavailable");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"Introduction scenario", introduction},
        {"Learning scenario", learning},
        {"Decay curve", decay_curve},
        {"Consolidation arithmetic", consolidation_arithmetic},
        {"Invariant suite", invariant_suite},
        {"Retrieval oracle equivalence", retrieval_oracle},
        {"Text pipeline", text_pipeline},
        {"Determinism", determinism},
        {"Persistence round-trip, offline", persistence},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.ok ? "[PASS] " : "[FAIL] ") << name;
        if (!o.ok) std::cout << ": " << o.detail;
        std::cout << '\n';
        failures += o.ok ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
