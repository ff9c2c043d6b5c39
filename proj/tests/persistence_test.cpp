#include <arthur/config.hpp>
#include <arthur/persistence.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>

using namespace arthur;
namespace ts = testing_support;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) { return detail::read_text_file(p); }

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

LongTermMemory knob_store() {
    MemoryCore m({}, tick_wall_clock());
    m.meet_person("Knob", EmotionLabel::joy, 0.5);
    m.append_resources(EventId{1}, {GrammaticalInfo{"age", FactTriple{"knob", "age", "31"}}});
    return m.ltm();
}

}  // namespace

TEST(SaveLtm, EmptyStoreIsEmptyFile) {
    ts::TempDir dir("save");
    EXPECT_EQ(save_ltm({}, dir / "ltm.jsonl"), 0u);
    EXPECT_EQ(fs::file_size(dir / "ltm.jsonl"), 0u);
    EXPECT_TRUE(load_ltm(dir / "ltm.jsonl").empty());
}

TEST(SaveLtm, OneLinePerRecordInKindOrder) {
    ts::TempDir dir("save");
    const auto ltm = knob_store();
    ASSERT_EQ(ltm.events.size(), 1u);
    ASSERT_EQ(ltm.resources.size(), 2u);
    ASSERT_EQ(ltm.people.size(), 1u);
    const auto bytes = save_ltm(ltm, dir / "ltm.jsonl");
    const auto text = slurp(dir / "ltm.jsonl");
    EXPECT_EQ(bytes, text.size());
    const auto lines = lines_of(text);
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(Json::parse(lines[0])["kind"], "event");
    EXPECT_EQ(Json::parse(lines[1])["kind"], "resource");
    EXPECT_EQ(Json::parse(lines[1])["id"], 1);
    EXPECT_EQ(Json::parse(lines[2])["id"], 2);
    EXPECT_EQ(Json::parse(lines[3])["kind"], "person");
    EXPECT_EQ(text.back(), '\n');
    EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(SaveLtm, ByteIdenticalAcrossSaves) {
    ts::TempDir dir("save");
    const auto ltm = knob_store();
    save_ltm(ltm, dir / "a.jsonl");
    save_ltm(ltm, dir / "b.jsonl");
    save_ltm(load_ltm(dir / "a.jsonl"), dir / "c.jsonl");
    EXPECT_EQ(slurp(dir / "a.jsonl"), slurp(dir / "b.jsonl"));
    EXPECT_EQ(slurp(dir / "a.jsonl"), slurp(dir / "c.jsonl"));
}

TEST(SaveLtm, RoundTripOnGeneratedStores) {
    std::mt19937_64 rng(31337);
    ts::TempDir dir("roundtrip");
    for (int i = 0; i < 250; ++i) {
        const auto ltm = ts::random_ltm(rng, 12);
        ASSERT_NO_THROW(ltm.validate());
        const auto path = dir / ("s" + std::to_string(i) + ".jsonl");
        save_ltm(ltm, path);
        const auto back = load_ltm(path);
        ASSERT_EQ(back, ltm) << "instance " << i;
        EXPECT_EQ(serialize_ltm(back), slurp(path));
    }
}

TEST(SaveLtm, ExtremeDoublesSurvive) {
    auto ltm = knob_store();
    ltm.resources.at(ResourceId{1}).weight = std::nextafter(0.2, 1.0);
    ltm.resources.at(ResourceId{2}).weight = 0.1 + 0.2;
    ltm.events.at(EventId{1}).polarity = -1.0 / 3.0;
    EXPECT_EQ(parse_ltm(serialize_ltm(ltm)), ltm);
}

TEST(SaveLtm, FailedWriteLeavesPreviousFileIntact) {
    ts::TempDir dir("crash");
    const auto path = dir / "ltm.jsonl";
    const auto original = knob_store();
    save_ltm(original, path);
    const auto before = slurp(path);

    // A directory squatting on the temp name makes the write fail before rename.
    fs::create_directory(dir / "ltm.jsonl.tmp");
    try {
        save_ltm(LongTermMemory{}, path);
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
    }
    EXPECT_EQ(slurp(path), before);
    EXPECT_EQ(load_ltm(path), original);
}

TEST(SaveLtm, UnwritableDirectory) {
    ts::TempDir dir("crash");
    EXPECT_THROW(save_ltm(knob_store(), dir / "no" / "such" / "dir.jsonl"), IoError);
}

TEST(LoadLtm, MissingFileIsNotFound) {
    ts::TempDir dir("load");
    EXPECT_THROW(load_ltm(dir / "absent.jsonl"), NotFoundError);
}

TEST(LoadLtm, MalformedLineNamesLineNumber) {
    auto text = serialize_ltm(knob_store());
    const auto lines = lines_of(text);
    const std::string broken = lines[0] + "\n" + lines[1] + "\n{\"kind\": \"resource\", oops\n";
    try {
        parse_ltm(broken);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse_ltm("{\"kind\":\"spaceship\"}\n"), ParseError);
    EXPECT_THROW(parse_ltm(lines[0] + "\n" + lines[0] + "\n"), ParseError);  // duplicate id
}

TEST(LoadLtm, WrongFieldTypesAreParseErrors) {
    auto j = Json::parse(lines_of(serialize_ltm(knob_store()))[0]);
    j["emotion"] = "ecstatic";
    EXPECT_THROW(parse_ltm(j.dump() + "\n"), ParseError);
    j["emotion"] = 7;
    EXPECT_THROW(parse_ltm(j.dump() + "\n"), ParseError);
}

TEST(LoadLtm, DanglingReferenceIsIntegrityError) {
    const auto lines = lines_of(serialize_ltm(knob_store()));
    auto resource = Json::parse(lines[1]);
    resource["owner_event_id"] = 77;
    const std::string text = lines[0] + "\n" + resource.dump() + "\n" + lines[2] + "\n" + lines[3] + "\n";
    try {
        parse_ltm(text);
        FAIL() << "expected IntegrityError";
    } catch (const IntegrityError& e) {
        EXPECT_NE(std::string(e.what()).find("E77"), std::string::npos) << e.what();
    }
}

TEST(LoadLtm, PersonWithoutBackingIsIntegrityError) {
    const auto lines = lines_of(serialize_ltm(knob_store()));
    EXPECT_THROW(parse_ltm(lines[3] + "\n"), IntegrityError);
}

TEST(LoadLtm, ToleratesCrlf) {
    auto text = serialize_ltm(knob_store());
    std::string crlf;
    for (char c : text) {
        if (c == '\n') crlf += '\r';
        crlf += c;
    }
    EXPECT_EQ(parse_ltm(crlf), knob_store());
}

// ─── configuration ─────────────────────────────────────────────

TEST(Config, Defaults) {
    const Config c;
    EXPECT_EQ(c.tick_mode, TickMode::turns);
    EXPECT_EQ(c.tick_seconds, 2.0);
    EXPECT_EQ(c.ltm_path, fs::path("arthur_ltm.jsonl"));
    EXPECT_TRUE(c.chatbot_url.empty());
    EXPECT_EQ(c.chatbot_timeout, std::chrono::milliseconds(3000));
}

TEST(Config, ParsesKeysAndResolvesRelativePaths) {
    const auto c = Config::parse(
        "# settings\n"
        "tick_mode = seconds\n"
        "tick_seconds = 0.5\n"
        "ltm_path = memory/ltm.jsonl\n"
        "lexicon = /abs/lex.tsv\n"
        "show_thresholds = true\n"
        "chatbot_timeout_ms = 250\n",
        "/etc/arthur");
    EXPECT_EQ(c.tick_mode, TickMode::seconds);
    EXPECT_EQ(c.tick_seconds, 0.5);
    EXPECT_EQ(c.ltm_path, fs::path("/etc/arthur/memory/ltm.jsonl"));
    EXPECT_EQ(c.data.lexicon, fs::path("/abs/lex.tsv"));
    EXPECT_TRUE(c.show_thresholds);
    EXPECT_EQ(c.chatbot_timeout, std::chrono::milliseconds(250));
}

TEST(Config, RejectsBadLines) {
    EXPECT_THROW(Config::parse("tick_mode = hourly\n"), ParseError);
    EXPECT_THROW(Config::parse("colour = blue\n"), ParseError);
    EXPECT_THROW(Config::parse("tick_seconds = -1\n"), ParseError);
    EXPECT_THROW(Config::parse("just words\n"), ParseError);
}

TEST(Config, EnvironmentOverridesFile) {
    auto c = Config::parse("ltm_path = /from/file.jsonl\n");
    ::setenv("ARTHUR_LTM_PATH", "/from/env.jsonl", 1);
    ::setenv("ARTHUR_CHATBOT_URL", "http://127.0.0.1:1/chat", 1);
    c.apply_environment();
    ::unsetenv("ARTHUR_LTM_PATH");
    ::unsetenv("ARTHUR_CHATBOT_URL");
    EXPECT_EQ(c.ltm_path, fs::path("/from/env.jsonl"));
    EXPECT_EQ(c.chatbot_url, "http://127.0.0.1:1/chat");
}
