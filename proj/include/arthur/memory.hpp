#pragma once

#include "arthur/text_pipeline.hpp"
#include "arthur/types.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

namespace arthur {

// ─── Constants ─────────────────────────────────────────────────

inline constexpr std::size_t kStmCapacity = 7;
inline constexpr double kActivationThreshold = 0.2;  // below this an STM item is "stale" at sleep
inline constexpr double kForgetThreshold = 0.2;      // LTM resources lighter than this are wiped
inline constexpr std::size_t kDefaultRetrievalK = 3;

inline double initial_weight(EventType type) {
    switch (type) {
        case EventType::MeetNewPerson: return 0.9;
        case EventType::LearnThing: return 0.9;
        case EventType::Interaction: return 0.1;
    }
    return 0.1;
}

// One step of the logarithmic decay / weight reduction: x <- ln(x + 1).
inline double log_step(double x) { return std::log1p(x); }

// ─── Facts ─────────────────────────────────────────────────────

enum class FactAttribute { age, works, studies, has_children, children_count, children_names };

inline constexpr std::array<std::string_view, 6> kFactAttributeNames = {
    "age", "works", "studies", "has_children", "children_count", "children_names"};

// Triples with this attribute mark who a MeetNewPerson resource introduces.
inline constexpr std::string_view kNameAttribute = "name";

inline std::string_view to_string(FactAttribute a) { return kFactAttributeNames[static_cast<std::size_t>(a)]; }

inline std::optional<FactAttribute> parse_fact_attribute(std::string_view s) {
    return detail::enum_from_name<FactAttribute>(kFactAttributeNames, s);
}

/// Person names are keyed case-insensitively.
inline std::string normalize_name(std::string_view name) { return to_lower_ascii(trim(name)); }

struct FactTriple {
    std::string subject;  // normalized person name
    std::string attribute;
    std::string value;

    bool operator==(const FactTriple&) const = default;
};

// ─── Resources and events ──────────────────────────────────────

struct GrammaticalInfo {
    std::string token;
    std::optional<FactTriple> fact;

    bool operator==(const GrammaticalInfo&) const = default;
};

struct ImageInfo {
    std::string path;

    bool operator==(const ImageInfo&) const = default;
};

struct AudioInfo {
    std::string tag;

    bool operator==(const AudioInfo&) const = default;
};

using Payload = std::variant<GrammaticalInfo, ImageInfo, AudioInfo>;

inline ResourceType payload_type(const Payload& p) { return static_cast<ResourceType>(p.index()); }

struct Resource {
    ResourceId id;
    Timestamp timestamp;
    Payload information;
    double weight = 0.0;
    EventId owner_event_id;
    bool consolidated = false;  // survived at least one sleep

    ResourceType type() const { return payload_type(information); }
    const GrammaticalInfo* grammatical() const { return std::get_if<GrammaticalInfo>(&information); }
    const ImageInfo* image() const { return std::get_if<ImageInfo>(&information); }

    bool operator==(const Resource&) const = default;
};

struct GeneralEvent {
    EventId id;
    Timestamp timestamp;
    EventType event_type = EventType::Interaction;
    EmotionLabel emotion = EmotionLabel::neutral;
    double polarity = 0.0;
    std::vector<ResourceId> resource_ids;

    bool operator==(const GeneralEvent&) const = default;
};

struct PersonProfile {
    std::string name;          // normalized key
    std::string display_name;  // as greeted, e.g. "Knob"
    Timestamp first_met;
    std::map<std::string, std::string> facts;  // derived view; never persisted

    bool operator==(const PersonProfile&) const = default;
};

// ─── Long-term memory ──────────────────────────────────────────

/// Unbounded store of events, resources and people. Holds no policy; MemoryCore mutates it.
class LongTermMemory {
public:
    std::map<EventId, GeneralEvent> events;
    std::map<ResourceId, Resource> resources;
    std::map<std::string, PersonProfile> people;

    bool empty() const { return events.empty() && resources.empty() && people.empty(); }

    const GeneralEvent* find_event(EventId id) const {
        const auto it = events.find(id);
        return it == events.end() ? nullptr : &it->second;
    }

    const Resource* find_resource(ResourceId id) const {
        const auto it = resources.find(id);
        return it == resources.end() ? nullptr : &it->second;
    }

    /// Full-scan referential-integrity check. Throws IntegrityError naming the first offender.
    void validate() const {
        for (const auto& [id, r] : resources) {
            if (r.id != id) throw IntegrityError("resource key mismatch at " + to_string(id));
            if (!(r.weight >= 0.0 && r.weight <= 1.0)) {
                throw IntegrityError("resource " + to_string(id) + " weight outside [0,1]");
            }
            const auto* ev = find_event(r.owner_event_id);
            if (!ev) {
                throw IntegrityError("resource " + to_string(id) + " references missing event " +
                                     to_string(r.owner_event_id));
            }
            if (std::find(ev->resource_ids.begin(), ev->resource_ids.end(), id) == ev->resource_ids.end()) {
                throw IntegrityError("event " + to_string(ev->id) + " does not list its resource " + to_string(id));
            }
            if (const auto* g = r.grammatical(); g && g->token.empty()) {
                throw IntegrityError("resource " + to_string(id) + " has an empty token");
            }
        }
        for (const auto& [id, ev] : events) {
            if (ev.id != id) throw IntegrityError("event key mismatch at " + to_string(id));
            if (ev.resource_ids.empty()) throw IntegrityError("event " + to_string(id) + " has no resources");
            if (!(ev.polarity >= -1.0 && ev.polarity <= 1.0)) {
                throw IntegrityError("event " + to_string(id) + " polarity outside [-1,1]");
            }
            std::set<ResourceId> seen;
            for (const auto rid : ev.resource_ids) {
                const auto* r = find_resource(rid);
                if (!r) throw IntegrityError("event " + to_string(id) + " references missing resource " + to_string(rid));
                if (r->owner_event_id != id) {
                    throw IntegrityError("resource " + to_string(rid) + " is listed by foreign event " + to_string(id));
                }
                if (!seen.insert(rid).second) {
                    throw IntegrityError("event " + to_string(id) + " lists " + to_string(rid) + " twice");
                }
            }
        }
        for (const auto& [key, person] : people) {
            if (person.name != key || normalize_name(key) != key || key.empty()) {
                throw IntegrityError("person key '" + key + "' is not a normalized name");
            }
            if (!has_backing(key)) throw IntegrityError("person '" + key + "' has no live resource");
        }
    }

    /// True while some live grammatical resource carries a fact about the person.
    bool has_backing(const std::string& person) const {
        return std::any_of(resources.begin(), resources.end(), [&](const auto& kv) {
            const auto* g = kv.second.grammatical();
            return g && g->fact && g->fact->subject == person;
        });
    }

    bool operator==(const LongTermMemory&) const = default;
};

// ─── Short-term memory ─────────────────────────────────────────

struct StmSlot {
    ResourceId id;
    double activation = 1.0;

    bool operator==(const StmSlot&) const = default;
};

/// Capacity-bounded working set. Weights live on the resources; this only tracks activation.
class ShortTermMemory {
public:
    static constexpr std::size_t capacity = kStmCapacity;

    const std::vector<StmSlot>& slots() const { return slots_; }
    std::size_t size() const { return slots_.size(); }
    bool empty() const { return slots_.empty(); }
    bool full() const { return slots_.size() >= capacity; }
    std::uint64_t tick_counter() const { return tick_counter_; }

    bool contains(ResourceId id) const { return find(id) != slots_.end(); }

    std::optional<double> activation(ResourceId id) const {
        const auto it = find(id);
        return it == slots_.end() ? std::nullopt : std::optional<double>(it->activation);
    }

    void push(ResourceId id) { slots_.push_back({id, 1.0}); }

    void reset_activation(ResourceId id) {
        if (auto it = find(id); it != slots_.end()) it->activation = 1.0;
    }

    void erase(ResourceId id) {
        slots_.erase(std::remove_if(slots_.begin(), slots_.end(), [&](const StmSlot& s) { return s.id == id; }),
                     slots_.end());
    }

    void decay(std::uint64_t n) {
        for (auto& slot : slots_) {
            for (std::uint64_t i = 0; i < n && slot.activation > 0.0; ++i) slot.activation = log_step(slot.activation);
        }
        tick_counter_ += n;
    }

    std::size_t clear() {
        const auto n = slots_.size();
        slots_.clear();
        tick_counter_ = 0;
        return n;
    }

private:
    std::vector<StmSlot>::const_iterator find(ResourceId id) const {
        return std::find_if(slots_.begin(), slots_.end(), [&](const StmSlot& s) { return s.id == id; });
    }
    std::vector<StmSlot>::iterator find(ResourceId id) {
        return std::find_if(slots_.begin(), slots_.end(), [&](const StmSlot& s) { return s.id == id; });
    }

    std::vector<StmSlot> slots_;
    std::uint64_t tick_counter_ = 0;
};

// ─── Operation results ─────────────────────────────────────────

struct ConsolidationReport {
    struct Reduction {
        ResourceId id;
        double old_weight = 0.0;
        double new_weight = 0.0;

        bool operator==(const Reduction&) const = default;
    };

    std::vector<Reduction> reduced;
    std::vector<ResourceId> forgotten_resources;
    std::vector<EventId> forgotten_events;
    std::size_t stm_cleared_count = 0;

    bool empty() const {
        return reduced.empty() && forgotten_resources.empty() && forgotten_events.empty() && stm_cleared_count == 0;
    }
};

struct RetrievalHit {
    GeneralEvent event;
    std::vector<std::string> matched_cues;  // in cue order
    std::size_t score = 0;
    double mean_weight = 0.0;
};

// ─── Memory core ───────────────────────────────────────────────

/// Receives the logical tick, returns wall-clock milliseconds for timestamps.
using WallClock = std::function<std::int64_t(std::uint64_t tick)>;

inline std::int64_t system_wall_ms(std::uint64_t) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

/// Deterministic clock for scripted runs: each logical tick counts as `period_ms`.
inline WallClock tick_wall_clock(std::int64_t period_ms = 2000) {
    return [period_ms](std::uint64_t tick) { return static_cast<std::int64_t>(tick) * period_ms; };
}

/// STM + LTM with decay, rehearsal, consolidation, forgetting and cue retrieval.
///
/// Every new resource is written to LTM at creation (with its initial weight) and placed in STM.
/// A resource that is evicted from STM before its first consolidation is discarded from LTM too.
/// Not internally synchronized: callers serialize mutations.
class MemoryCore {
public:
    explicit MemoryCore(LongTermMemory ltm = {}, WallClock clock = system_wall_ms, Stemmer stemmer = default_stemmer())
        : ltm_(std::move(ltm)), clock_(std::move(clock)), stemmer_(std::move(stemmer)) {
        ltm_.validate();
        for (const auto& [id, ev] : ltm_.events) {
            next_event_ = std::max(next_event_, id.value + 1);
            lifetime_tick_ = std::max(lifetime_tick_, ev.timestamp.tick);
        }
        for (const auto& [id, r] : ltm_.resources) {
            next_resource_ = std::max(next_resource_, id.value + 1);
            lifetime_tick_ = std::max(lifetime_tick_, r.timestamp.tick);
        }
        for (const auto& [name, p] : ltm_.people) lifetime_tick_ = std::max(lifetime_tick_, p.first_met.tick);
    }

    const LongTermMemory& ltm() const { return ltm_; }
    const ShortTermMemory& stm() const { return stm_; }
    std::uint64_t lifetime_tick() const { return lifetime_tick_; }
    Timestamp now() const { return {lifetime_tick_, clock_(lifetime_tick_)}; }

    // ── creation ──

    GeneralEvent create_event(EventType type, EmotionLabel emotion, double polarity, std::vector<Payload> payloads) {
        if (!(polarity >= -1.0 && polarity <= 1.0)) throw ValidationError("polarity must lie in [-1,1]");
        if (payloads.empty()) throw ValidationError("an event needs at least one resource");
        for (const auto& p : payloads) check_payload(p);

        GeneralEvent ev;
        ev.id = EventId{next_event_++};
        ev.timestamp = now();
        ev.event_type = type;
        ev.emotion = emotion;
        ev.polarity = polarity;
        ltm_.events.emplace(ev.id, ev);
        add_resources(ev.id, std::move(payloads));
        return ltm_.events.at(ev.id);
    }

    /// Appends resources to an existing event; weights follow the event's type.
    std::vector<ResourceId> append_resources(EventId event_id, std::vector<Payload> payloads) {
        if (!ltm_.find_event(event_id)) throw LookupError("unknown event " + to_string(event_id));
        if (payloads.empty()) throw ValidationError("nothing to append");
        for (const auto& p : payloads) check_payload(p);
        ltm_.events.at(event_id).timestamp = now();
        return add_resources(event_id, std::move(payloads));
    }

    /// Records a new person with a MeetNewPerson event whose resource carries the name.
    GeneralEvent meet_person(std::string_view display_name, EmotionLabel emotion, double polarity) {
        const auto key = normalize_name(display_name);
        if (key.empty()) throw ValidationError("empty person name");
        auto ev = create_event(EventType::MeetNewPerson, emotion, polarity,
                               {GrammaticalInfo{key, FactTriple{key, std::string(kNameAttribute), std::string(trim(display_name))}}});
        if (!ltm_.people.count(key)) {
            ltm_.people.emplace(key, PersonProfile{key, std::string(trim(display_name)), ev.timestamp, {}});
        }
        return ltm_.events.at(ev.id);
    }

    // ── STM ──

    /// Places the resource in STM at activation 1. Returns the evicted resource, if any.
    std::optional<ResourceId> stm_insert(ResourceId id) {
        if (!ltm_.find_resource(id)) throw LookupError("unknown resource " + to_string(id));
        if (stm_.contains(id)) {
            stm_.reset_activation(id);
            return std::nullopt;
        }
        std::optional<ResourceId> evicted;
        if (stm_.full()) {
            evicted = eviction_candidate();
            stm_.erase(*evicted);
            const auto& victim = ltm_.resources.at(*evicted);
            if (!victim.consolidated) discard_resource(*evicted);
        }
        stm_.push(id);
        return evicted;
    }

    void decay_tick(std::uint64_t n = 1) {
        if (n == 0) throw ValidationError("decay_tick needs a positive tick count");
        stm_.decay(n);
        lifetime_tick_ += n;
    }

    /// Resets activation to 1; a resource only in LTM is brought back into STM.
    void rehearse(ResourceId id) {
        if (!ltm_.find_resource(id)) throw LookupError("unknown resource " + to_string(id));
        if (stm_.contains(id)) {
            stm_.reset_activation(id);
        } else {
            stm_insert(id);
        }
    }

    // ── sleep ──

    ConsolidationReport consolidate() {
        ConsolidationReport report;
        for (const auto& slot : stm_.slots()) {
            auto& r = ltm_.resources.at(slot.id);
            if (slot.activation < kActivationThreshold) {
                const double old_weight = r.weight;
                r.weight = log_step(old_weight);
                report.reduced.push_back({slot.id, old_weight, r.weight});
            }
            // Otherwise the STM weight is committed as is: it already equals the LTM copy.
            r.consolidated = true;
        }

        std::vector<ResourceId> doomed;
        for (const auto& [id, r] : ltm_.resources) {
            if (r.weight < kForgetThreshold) doomed.push_back(id);
        }
        for (const auto id : doomed) {
            if (auto ev = remove_resource(id)) report.forgotten_events.push_back(*ev);
            report.forgotten_resources.push_back(id);
        }
        std::sort(report.forgotten_events.begin(), report.forgotten_events.end());
        sweep_people();
        report.stm_cleared_count = stm_.clear();
        return report;
    }

    // ── retrieval ──

    /// Side-effect-free ranking of LTM events against cue stems.
    std::vector<RetrievalHit> rank(const std::vector<std::string>& cues, std::size_t k = kDefaultRetrievalK) const {
        const auto stems = normalize_cues(cues);
        std::vector<RetrievalHit> hits;
        for (const auto& [id, ev] : ltm_.events) {
            std::vector<std::string> matched;
            for (const auto& cue : stems) {
                if (event_mentions(ev, cue)) matched.push_back(cue);
            }
            if (matched.empty()) continue;
            RetrievalHit hit;
            hit.event = ev;
            hit.score = matched.size();
            hit.matched_cues = std::move(matched);
            hit.mean_weight = mean_weight(ev);
            hits.push_back(std::move(hit));
        }
        std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.mean_weight != b.mean_weight) return a.mean_weight > b.mean_weight;
            if (a.event.timestamp != b.event.timestamp) return a.event.timestamp > b.event.timestamp;
            return a.event.id < b.event.id;
        });
        if (hits.size() > k) hits.resize(k);
        return hits;
    }

    /// Ranks events and rehearses every resource that matched a cue in the returned events.
    std::vector<RetrievalHit> retrieve(const std::vector<std::string>& cues, std::size_t k = kDefaultRetrievalK) {
        auto hits = rank(cues, k);
        std::vector<ResourceId> to_rehearse;
        for (const auto& hit : hits) {
            for (const auto rid : hit.event.resource_ids) {
                const auto* g = ltm_.resources.at(rid).grammatical();
                if (!g) continue;
                const auto s = stemmer_.stem(g->token);
                if (std::find(hit.matched_cues.begin(), hit.matched_cues.end(), s) != hit.matched_cues.end()) {
                    to_rehearse.push_back(rid);
                }
            }
        }
        for (const auto rid : to_rehearse) {
            // An earlier rehearsal in this loop may have evicted a never-consolidated match.
            if (ltm_.find_resource(rid)) rehearse(rid);
        }
        return hits;
    }

    // ── people and facts ──

    bool knows_person(std::string_view name) const { return ltm_.people.count(normalize_name(name)) != 0; }

    /// Profile with the facts currently backed by live resources.
    std::optional<PersonProfile> person(std::string_view name) const {
        const auto key = normalize_name(name);
        const auto it = ltm_.people.find(key);
        if (it == ltm_.people.end()) return std::nullopt;
        PersonProfile p = it->second;
        for (const auto attr : kFactAttributeNames) {
            if (auto v = latest_fact(key, attr)) p.facts.emplace(std::string(attr), *v);
        }
        return p;
    }

    std::optional<std::string> fact_lookup(std::string_view person_name, FactAttribute attribute) const {
        const auto key = normalize_name(person_name);
        if (!ltm_.people.count(key)) return std::nullopt;
        return latest_fact(key, to_string(attribute));
    }

    std::optional<std::string> fact_lookup(std::string_view person_name, std::string_view attribute) const {
        const auto attr = parse_fact_attribute(attribute);
        if (!attr) throw ValidationError("unsupported attribute '" + std::string(attribute) + "'");
        return fact_lookup(person_name, *attr);
    }

    /// Resource holding the most recent live (person, attribute) triple; `attribute` may also be "name".
    const Resource* fact_source(std::string_view person_name, std::string_view attribute) const {
        return latest_fact_resource(normalize_name(person_name), attribute);
    }

    // ── objects ──

    /// Most recent LearnThing event teaching `term` (a plain grammatical token, no fact).
    std::optional<EventId> find_term_event(std::string_view term) const {
        const auto stem = stemmer_.stem(normalize_word(trim(term)));
        std::optional<EventId> best;
        Timestamp best_ts;
        for (const auto& [id, ev] : ltm_.events) {
            if (ev.event_type != EventType::LearnThing) continue;
            const bool teaches = std::any_of(ev.resource_ids.begin(), ev.resource_ids.end(), [&](ResourceId rid) {
                const auto* g = ltm_.resources.at(rid).grammatical();
                return g && !g->fact && stemmer_.stem(g->token) == stem;
            });
            if (teaches && (!best || ev.timestamp >= best_ts)) {
                best = id;
                best_ts = ev.timestamp;
            }
        }
        return best;
    }

    /// Latest image attached to an event (by timestamp, then id).
    const Resource* latest_image(EventId event_id) const {
        const auto* ev = ltm_.find_event(event_id);
        if (!ev) return nullptr;
        const Resource* best = nullptr;
        for (const auto rid : ev->resource_ids) {
            const auto& r = ltm_.resources.at(rid);
            if (!r.image()) continue;
            if (!best || std::tie(r.timestamp, r.id) > std::tie(best->timestamp, best->id)) best = &r;
        }
        return best;
    }

    /// LTM integrity plus STM capacity, range and residency checks.
    void validate() const {
        ltm_.validate();
        if (stm_.size() > kStmCapacity) throw IntegrityError("STM over capacity");
        std::set<ResourceId> seen;
        for (const auto& slot : stm_.slots()) {
            if (!(slot.activation >= 0.0 && slot.activation <= 1.0)) {
                throw IntegrityError("STM activation outside [0,1] for " + to_string(slot.id));
            }
            if (!ltm_.find_resource(slot.id)) throw IntegrityError("STM holds unknown resource " + to_string(slot.id));
            if (!seen.insert(slot.id).second) throw IntegrityError("STM holds " + to_string(slot.id) + " twice");
        }
    }

    const Stemmer& stemmer() const { return stemmer_; }

    static Stemmer default_stemmer() { return Stemmer(StemmerRules::parse(data::kStemmerRules)); }

private:
    static void check_payload(const Payload& p) {
        if (const auto* g = std::get_if<GrammaticalInfo>(&p)) {
            if (normalize_word(trim(g->token)).empty()) throw ValidationError("grammatical token is empty");
        } else if (const auto* img = std::get_if<ImageInfo>(&p)) {
            if (img->path.empty()) throw ValidationError("image path is empty");
        }
    }

    std::vector<ResourceId> add_resources(EventId event_id, std::vector<Payload> payloads) {
        const double weight = initial_weight(ltm_.events.at(event_id).event_type);
        std::vector<ResourceId> ids;
        for (auto& p : payloads) {
            if (auto* g = std::get_if<GrammaticalInfo>(&p)) g->token = normalize_word(trim(g->token));
            Resource r;
            r.id = ResourceId{next_resource_++};
            r.timestamp = now();
            r.information = std::move(p);
            r.weight = weight;
            r.owner_event_id = event_id;
            ltm_.resources.emplace(r.id, r);
            ltm_.events.at(event_id).resource_ids.push_back(r.id);
            ids.push_back(r.id);
        }
        for (const auto id : ids) {
            // A full STM of freshly created items can evict an earlier sibling; skip those.
            if (ltm_.find_resource(id)) stm_insert(id);
        }
        return ids;
    }

    // Lowest weight, then oldest timestamp, then smallest id.
    ResourceId eviction_candidate() const {
        const auto& slots = stm_.slots();
        const auto it = std::min_element(slots.begin(), slots.end(), [&](const StmSlot& a, const StmSlot& b) {
            const auto& ra = ltm_.resources.at(a.id);
            const auto& rb = ltm_.resources.at(b.id);
            return std::tie(ra.weight, ra.timestamp, ra.id) < std::tie(rb.weight, rb.timestamp, rb.id);
        });
        return it->id;
    }

    // Removes a resource from LTM; returns the owner event id if the event became empty and was removed.
    std::optional<EventId> remove_resource(ResourceId id) {
        const auto owner = ltm_.resources.at(id).owner_event_id;
        ltm_.resources.erase(id);
        auto& ids = ltm_.events.at(owner).resource_ids;
        ids.erase(std::remove(ids.begin(), ids.end(), id), ids.end());
        if (ids.empty()) {
            ltm_.events.erase(owner);
            return owner;
        }
        return std::nullopt;
    }

    void discard_resource(ResourceId id) {
        remove_resource(id);
        sweep_people();
    }

    void sweep_people() {
        for (auto it = ltm_.people.begin(); it != ltm_.people.end();) {
            it = ltm_.has_backing(it->first) ? std::next(it) : ltm_.people.erase(it);
        }
    }

    std::vector<std::string> normalize_cues(const std::vector<std::string>& cues) const {
        std::vector<std::string> out;
        for (const auto& c : cues) {
            const auto w = normalize_word(trim(c));
            if (w.empty()) continue;
            auto s = stemmer_.stem(w);
            if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
        }
        if (out.empty()) throw ValidationError("retrieval needs at least one cue");
        return out;
    }

    bool event_mentions(const GeneralEvent& ev, const std::string& cue) const {
        return std::any_of(ev.resource_ids.begin(), ev.resource_ids.end(), [&](ResourceId rid) {
            const auto* g = ltm_.resources.at(rid).grammatical();
            return g && stemmer_.stem(g->token) == cue;
        });
    }

    double mean_weight(const GeneralEvent& ev) const {
        double sum = 0.0;
        for (const auto rid : ev.resource_ids) sum += ltm_.resources.at(rid).weight;
        return ev.resource_ids.empty() ? 0.0 : sum / static_cast<double>(ev.resource_ids.size());
    }

    const Resource* latest_fact_resource(const std::string& person, std::string_view attribute) const {
        const Resource* best = nullptr;
        for (const auto& [id, r] : ltm_.resources) {
            const auto* g = r.grammatical();
            if (!g || !g->fact || g->fact->subject != person || g->fact->attribute != attribute) continue;
            if (!best || std::tie(r.timestamp, r.id) > std::tie(best->timestamp, best->id)) best = &r;
        }
        return best;
    }

    std::optional<std::string> latest_fact(const std::string& person, std::string_view attribute) const {
        const auto* r = latest_fact_resource(person, attribute);
        if (!r) return std::nullopt;
        return r->grammatical()->fact->value;
    }

    LongTermMemory ltm_;
    ShortTermMemory stm_;
    WallClock clock_;
    Stemmer stemmer_;
    std::uint64_t lifetime_tick_ = 0;
    std::uint64_t next_event_ = 1;
    std::uint64_t next_resource_ = 1;
};

}  // namespace arthur
