#pragma once

#include "arthur/agent.hpp"
#include "arthur/persistence.hpp"

#include <httplib.h>

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

namespace arthur {

namespace detail {

inline Json reply_json(const AgentReply& r) {
    Json ids = Json::array();
    for (const auto id : r.retrieved_event_ids) ids.push_back(to_string(id));
    Json j{{"text", r.text},
           {"expression", std::string(to_string(r.expression))},
           {"retrieved_event_ids", std::move(ids)},
           {"actions", r.actions}};
    if (r.image_path) j["image_path"] = *r.image_path;
    return j;
}

inline Json report_json(const ConsolidationReport& report) {
    Json reduced = Json::array();
    for (const auto& r : report.reduced) {
        reduced.push_back({{"resource_id", to_string(r.id)}, {"old_weight", r.old_weight}, {"new_weight", r.new_weight}});
    }
    Json resources = Json::array();
    for (const auto id : report.forgotten_resources) resources.push_back(to_string(id));
    Json events = Json::array();
    for (const auto id : report.forgotten_events) events.push_back(to_string(id));
    return {{"reduced", std::move(reduced)},
            {"forgotten_resources", std::move(resources)},
            {"forgotten_events", std::move(events)},
            {"stm_cleared_count", report.stm_cleared_count}};
}

inline Json profile_json(const PersonProfile& p) {
    auto j = to_json(p);
    j.erase("kind");
    j["facts"] = p.facts;
    return j;
}

}  // namespace detail

/// REST front end over one shared Agent. Sessions each own a DialogueState; memory is shared.
///
/// Locking: a session mutex serializes turns within a session, then the memory lock is taken
/// (exclusive for mutations, shared for inspection). The session table has its own mutex.
class AgentService {
public:
    /// `persist` runs after each consolidation and on demand; pass nullptr to keep memory in-process only.
    explicit AgentService(Agent& agent, std::function<void(const LongTermMemory&)> persist = nullptr)
        : agent_(agent), persist_(std::move(persist)) {}

    AgentService(const AgentService&) = delete;
    AgentService& operator=(const AgentService&) = delete;

    void bind(httplib::Server& server) {
        server.Post("/sessions", [this](const httplib::Request&, httplib::Response& res) {
            const auto id = create_session();
            send(res, 201, session_json(*find_session(id)));
        });
        server.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
            Json list = Json::array();
            for (const auto& s : sessions_snapshot()) list.push_back(session_json(*s));
            send(res, 200, list);
        });
        server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send(res, 200, session_json(*require_session(req.matches[1]))); });
        });
        server.Post(R"(/sessions/([^/]+)/turns)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto session = require_session(req.matches[1]);
                const auto in = parse_turn(req.body);
                std::lock_guard session_lock(session->mutex);
                AgentReply reply;
                {
                    std::unique_lock memory_lock(memory_mutex_);
                    reply = agent_.turn(session->state, in);
                }
                ++session->turns;
                auto j = detail::reply_json(reply);
                add_state(j, *session);
                send(res, 200, j);
            });
        });
        server.Post(R"(/sessions/([^/]+)/identify)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto session = require_session(req.matches[1]);
                const auto body = parse_object(req.body);
                std::optional<std::string> name;
                if (body.contains("name") && !body["name"].is_null()) {
                    if (!body["name"].is_string()) throw ValidationError("'name' must be a string or null");
                    name = body["name"].get<std::string>();
                }
                std::lock_guard session_lock(session->mutex);
                AgentReply reply;
                {
                    std::unique_lock memory_lock(memory_mutex_);
                    reply = agent_.identify(session->state, name);
                }
                auto j = detail::reply_json(reply);
                add_state(j, *session);
                send(res, 200, j);
            });
        });
        server.Post(R"(/sessions/([^/]+)/sleep)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                require_session(req.matches[1]);
                send(res, 200, sleep());
            });
        });
        // Session-independent form used by the web UI's Sleep button.
        server.Post("/sleep", [this](const httplib::Request&, httplib::Response& res) { send(res, 200, sleep()); });
        server.Get(R"(/sessions/([^/]+)/stm)",[this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                require_session(req.matches[1]);
                send(res, 200, stm_json());
            });
        });
        server.Post("/teach", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto body = parse_object(req.body);
                const auto term = required_string(body, "term");
                const auto path = required_string(body, "image_path");
                if (trim(term).empty()) throw ValidationError("'term' must not be empty");
                DialogueState scratch;
                AgentReply reply;
                {
                    std::unique_lock memory_lock(memory_mutex_);
                    reply = agent_.teach(scratch, term, path);
                }
                const bool failed = std::any_of(reply.actions.begin(), reply.actions.end(),
                                                [](const std::string& a) { return a.starts_with("teach_failed"); });
                send(res, failed ? 400 : 200, failed ? Json{{"error", reply.text}} : detail::reply_json(reply));
            });
        });
        server.Get("/memory/ltm", [this](const httplib::Request&, httplib::Response& res) {
            std::shared_lock lock(memory_mutex_);
            const auto& ltm = agent_.memory().ltm();
            Json events = Json::array(), resources = Json::array(), people = Json::array();
            for (const auto& [id, ev] : ltm.events) events.push_back(to_json(ev));
            for (const auto& [id, r] : ltm.resources) resources.push_back(to_json(r));
            for (const auto& [name, p] : ltm.people) people.push_back(to_json(p));
            send(res, 200, {{"events", std::move(events)}, {"resources", std::move(resources)}, {"people", std::move(people)}});
        });
        server.Get("/people", [this](const httplib::Request&, httplib::Response& res) {
            std::shared_lock lock(memory_mutex_);
            Json list = Json::array();
            for (const auto& [name, p] : agent_.memory().ltm().people) {
                list.push_back(detail::profile_json(*agent_.memory().person(name)));
            }
            send(res, 200, list);
        });
        server.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                std::vector<std::string> cues;
                for (std::size_t i = 0; i < req.get_param_value_count("cue"); ++i) {
                    for (auto& w : split_words(req.get_param_value("cue", i))) cues.push_back(std::move(w));
                }
                std::size_t k = kDefaultRetrievalK;
                if (req.has_param("k")) {
                    const auto v = req.get_param_value("k");
                    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), k);
                    if (ec != std::errc{} || ptr != v.data() + v.size() || k == 0) {
                        throw ValidationError("'k' must be a positive integer");
                    }
                }
                if (cues.empty()) throw ValidationError("at least one 'cue' parameter is required");
                std::shared_lock lock(memory_mutex_);
                Json hits = Json::array();
                for (const auto& hit : agent_.memory().rank(cues, k)) {
                    hits.push_back({{"event", to_json(hit.event)},
                                    {"matched_cues", hit.matched_cues},
                                    {"score", hit.score},
                                    {"mean_weight", hit.mean_weight}});
                }
                send(res, 200, hits);
            });
        });
    }

    std::string create_session() {
        std::int64_t created;
        {
            std::shared_lock lock(memory_mutex_);
            created = agent_.memory().now().wall_ms;
        }
        std::lock_guard lock(sessions_mutex_);
        auto session = std::make_shared<Session>();
        session->id = "s" + std::to_string(++session_counter_);
        session->created_ms = created;
        sessions_.emplace(session->id, session);
        return session->id;
    }

    Json sleep() {
        std::unique_lock memory_lock(memory_mutex_);
        auto [report, reply] = agent_.sleep();
        if (persist_) persist_(agent_.memory().ltm());
        auto j = detail::reply_json(reply);
        j["report"] = detail::report_json(report);
        return j;
    }

    Json stm_json() const {
        std::shared_lock lock(memory_mutex_);
        const auto& mem = agent_.memory();
        Json slots = Json::array();
        for (const auto& slot : mem.stm().slots()) {
            const auto& r = mem.ltm().resources.at(slot.id);
            auto item = to_json(r);
            item.erase("kind");
            item["activation"] = slot.activation;
            slots.push_back(std::move(item));
        }
        return {{"capacity", kStmCapacity}, {"tick_counter", mem.stm().tick_counter()}, {"slots", std::move(slots)}};
    }

    void persist() {
        std::shared_lock lock(memory_mutex_);
        if (persist_) persist_(agent_.memory().ltm());
    }

    /// Runs `fn` with exclusive access to the agent, e.g. for validation in tests.
    template <class Fn>
    decltype(auto) with_agent(Fn&& fn) {
        std::unique_lock lock(memory_mutex_);
        return std::forward<Fn>(fn)(agent_);
    }

    std::size_t session_count() const {
        std::lock_guard lock(sessions_mutex_);
        return sessions_.size();
    }

private:
    struct Session {
        std::string id;
        std::int64_t created_ms = 0;
        std::mutex mutex;
        DialogueState state;
        std::size_t turns = 0;
    };

    static void send(httplib::Response& res, int status, const Json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    template <class Fn>
    static void guarded(httplib::Response& res, Fn&& fn) {
        try {
            fn();
        } catch (const NotFoundError& e) {
            send(res, 404, {{"error", e.what()}});
        } catch (const ValidationError& e) {
            send(res, 400, {{"error", e.what()}});
        } catch (const Json::exception& e) {
            send(res, 400, {{"error", e.what()}});
        }
    }

    static Json parse_object(const std::string& body) {
        auto j = Json::parse(body.empty() ? std::string("{}") : body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw ValidationError("request body must be a JSON object");
        return j;
    }

    static std::string required_string(const Json& j, const char* key) {
        if (!j.contains(key) || !j[key].is_string()) throw ValidationError(std::string("'") + key + "' must be a string");
        return j[key].get<std::string>();
    }

    static std::optional<std::string> optional_string(const Json& j, const char* key) {
        if (!j.contains(key) || j[key].is_null()) return std::nullopt;
        if (!j[key].is_string()) throw ValidationError(std::string("'") + key + "' must be a string");
        return j[key].get<std::string>();
    }

    static TurnInput parse_turn(const std::string& body) {
        const auto j = parse_object(body);
        TurnInput in;
        in.text = optional_string(j, "text").value_or("");
        in.declared_person = optional_string(j, "declared_person");
        in.attached_image = optional_string(j, "attached_image");
        if (const auto e = optional_string(j, "declared_emotion")) {
            const auto label = parse_emotion(to_lower_ascii(*e));
            if (!label) throw ValidationError("unknown emotion '" + *e + "'");
            in.declared_emotion = *label;
        }
        DialogueManager::validate(in);
        return in;
    }

    std::shared_ptr<Session> find_session(const std::string& id) const {
        std::lock_guard lock(sessions_mutex_);
        const auto it = sessions_.find(id);
        return it == sessions_.end() ? nullptr : it->second;
    }

    std::shared_ptr<Session> require_session(const std::string& id) const {
        auto s = find_session(id);
        if (!s) throw NotFoundError("no session '" + id + "'");
        return s;
    }

    std::vector<std::shared_ptr<Session>> sessions_snapshot() const {
        std::lock_guard lock(sessions_mutex_);
        std::vector<std::shared_ptr<Session>> out;
        for (const auto& [id, s] : sessions_) out.push_back(s);
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            return a->id.size() != b->id.size() ? a->id.size() < b->id.size() : a->id < b->id;
        });
        return out;
    }

    static void add_state(Json& j, const Session& s) {
        j["session_id"] = s.id;
        j["phase"] = describe(s.state.phase);
        j["current_person"] = s.state.current_person ? Json(*s.state.current_person) : Json(nullptr);
    }

    Json session_json(Session& s) const {
        std::lock_guard lock(s.mutex);
        Json j{{"session_id", s.id}, {"created_at_ms", s.created_ms}, {"turns", s.turns}};
        add_state(j, s);
        return j;
    }

    Agent& agent_;
    std::function<void(const LongTermMemory&)> persist_;
    mutable std::shared_mutex memory_mutex_;
    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t session_counter_ = 0;
};

}  // namespace arthur
