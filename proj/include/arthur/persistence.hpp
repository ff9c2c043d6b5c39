#pragma once

#include "arthur/memory.hpp"
#include "arthur/types.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

namespace arthur {

using Json = nlohmann::json;

inline constexpr const char* kDefaultLtmPath = "arthur_ltm.jsonl";

enum class RecordKind { event, resource, person };

// ─── Record encoding ───────────────────────────────────────────

namespace detail {

inline Json timestamp_json(const Timestamp& t) { return Json{{"tick", t.tick}, {"wall_ms", t.wall_ms}}; }

inline Timestamp timestamp_from(const Json& j) {
    return {j.at("tick").get<std::uint64_t>(), j.at("wall_ms").get<std::int64_t>()};
}

template <typename Enum, typename Parse>
Enum enum_field(const Json& j, const char* key, Parse parse) {
    const auto text = j.at(key).get<std::string>();
    const auto v = parse(text);
    if (!v) throw std::invalid_argument(std::string("unknown ") + key + " '" + text + "'");
    return *v;
}

}  // namespace detail

inline Json to_json(const GeneralEvent& ev) {
    Json ids = Json::array();
    for (const auto rid : ev.resource_ids) ids.push_back(rid.value);
    return Json{{"kind", "event"},
                {"id", ev.id.value},
                {"timestamp", detail::timestamp_json(ev.timestamp)},
                {"event_type", to_string(ev.event_type)},
                {"emotion", to_string(ev.emotion)},
                {"polarity", ev.polarity},
                {"resource_ids", std::move(ids)}};
}

inline Json to_json(const Resource& r) {
    Json info;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GrammaticalInfo>) {
                info = Json{{"token", p.token}};
                if (p.fact) {
                    info["fact"] = Json{{"subject", p.fact->subject},
                                        {"attribute", p.fact->attribute},
                                        {"value", p.fact->value}};
                }
            } else if constexpr (std::is_same_v<T, ImageInfo>) {
                info = Json{{"path", p.path}};
            } else {
                info = Json{{"tag", p.tag}};
            }
        },
        r.information);
    return Json{{"kind", "resource"},
                {"id", r.id.value},
                {"timestamp", detail::timestamp_json(r.timestamp)},
                {"resource_type", to_string(r.type())},
                {"information", std::move(info)},
                {"weight", r.weight},
                {"owner_event_id", r.owner_event_id.value},
                {"consolidated", r.consolidated}};
}

inline Json to_json(const PersonProfile& p) {
    return Json{{"kind", "person"},
                {"name", p.name},
                {"display_name", p.display_name},
                {"first_met", detail::timestamp_json(p.first_met)}};
}

inline GeneralEvent event_from_json(const Json& j) {
    GeneralEvent ev;
    ev.id = EventId{j.at("id").get<std::uint64_t>()};
    ev.timestamp = detail::timestamp_from(j.at("timestamp"));
    ev.event_type = detail::enum_field<EventType>(j, "event_type", parse_event_type);
    ev.emotion = detail::enum_field<EmotionLabel>(j, "emotion", parse_emotion);
    ev.polarity = j.at("polarity").get<double>();
    for (const auto& rid : j.at("resource_ids")) ev.resource_ids.push_back(ResourceId{rid.get<std::uint64_t>()});
    return ev;
}

inline Resource resource_from_json(const Json& j) {
    Resource r;
    r.id = ResourceId{j.at("id").get<std::uint64_t>()};
    r.timestamp = detail::timestamp_from(j.at("timestamp"));
    const auto type = detail::enum_field<ResourceType>(j, "resource_type", parse_resource_type);
    const auto& info = j.at("information");
    switch (type) {
        case ResourceType::Grammatical: {
            GrammaticalInfo g{info.at("token").get<std::string>(), std::nullopt};
            if (info.contains("fact")) {
                const auto& f = info.at("fact");
                g.fact = FactTriple{f.at("subject").get<std::string>(), f.at("attribute").get<std::string>(),
                                    f.at("value").get<std::string>()};
            }
            r.information = std::move(g);
            break;
        }
        case ResourceType::Image: r.information = ImageInfo{info.at("path").get<std::string>()}; break;
        case ResourceType::Audio: r.information = AudioInfo{info.at("tag").get<std::string>()}; break;
    }
    r.weight = j.at("weight").get<double>();
    r.owner_event_id = EventId{j.at("owner_event_id").get<std::uint64_t>()};
    r.consolidated = j.at("consolidated").get<bool>();
    return r;
}

inline PersonProfile person_from_json(const Json& j) {
    PersonProfile p;
    p.name = j.at("name").get<std::string>();
    p.display_name = j.at("display_name").get<std::string>();
    p.first_met = detail::timestamp_from(j.at("first_met"));
    return p;
}

// ─── Save / load ───────────────────────────────────────────────

/// Canonical text of a store: events, then resources, then people, each in key order.
/// Equal stores produce identical bytes.
inline std::string serialize_ltm(const LongTermMemory& ltm) {
    std::string out;
    auto emit = [&](const Json& j) {
        out += j.dump();
        out += '\n';
    };
    for (const auto& [id, ev] : ltm.events) emit(to_json(ev));
    for (const auto& [id, r] : ltm.resources) emit(to_json(r));
    for (const auto& [name, p] : ltm.people) emit(to_json(p));
    return out;
}

/// Parses the line-delimited store and runs the integrity validator.
inline LongTermMemory parse_ltm(std::string_view text) {
    LongTermMemory ltm;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const auto end = nl == std::string_view::npos ? text.size() : nl;
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        try {
            const auto j = Json::parse(line);
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "event") {
                auto ev = event_from_json(j);
                const auto id = ev.id;
                if (!ltm.events.emplace(id, std::move(ev)).second) throw std::invalid_argument("duplicate event id");
            } else if (kind == "resource") {
                auto r = resource_from_json(j);
                const auto id = r.id;
                if (!ltm.resources.emplace(id, std::move(r)).second) {
                    throw std::invalid_argument("duplicate resource id");
                }
            } else if (kind == "person") {
                auto p = person_from_json(j);
                auto key = p.name;
                if (!ltm.people.emplace(std::move(key), std::move(p)).second) {
                    throw std::invalid_argument("duplicate person");
                }
            } else {
                throw std::invalid_argument("unknown record kind '" + kind + "'");
            }
        } catch (const Json::exception& e) {
            throw ParseError(e.what(), line_no);
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    ltm.validate();
    return ltm;
}

/// Writes via a sibling temp file and rename, so a failed save leaves the old file untouched.
/// Returns the number of bytes written.
inline std::size_t save_ltm(const LongTermMemory& ltm, const std::filesystem::path& path) {
    const auto text = serialize_ltm(ltm);
    auto tmp = path;
    tmp += ".tmp";
    auto fail = [&](const std::string& cause) -> IoError {
        std::error_code ec;
        if (std::filesystem::is_regular_file(tmp, ec)) std::filesystem::remove(tmp, ec);
        return IoError("cannot save " + path.string() + ": " + cause);
    };
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw fail(std::strerror(errno));
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        out.flush();
        if (!out) throw fail("write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw fail(ec.message());
    return text.size();
}

inline LongTermMemory load_ltm(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) throw NotFoundError("LTM file not found: " + path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ltm(buf.str());
}

}  // namespace arthur
