#pragma once

#include <arthur/memory.hpp>
#include <arthur/persistence.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testing_support {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("arthur_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(++counter));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

// ─── High-precision log iteration ──────────────────────────────

using Big = boost::multiprecision::cpp_bin_float_50;

// x_{i+1} = ln(x_i + 1), evaluated at 50 significant digits. Element 0 is the start value.
inline std::vector<Big> log_iteration(const Big& start, int steps) {
    std::vector<Big> out{start};
    for (int i = 0; i < steps; ++i) out.push_back(boost::multiprecision::log(out.back() + 1));
    return out;
}

inline int first_index_below(const std::vector<Big>& seq, const Big& bound) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i] < bound) return static_cast<int>(i);
    }
    return -1;
}

// ─── Brute-force retrieval ─────────────────────────────────────

struct BruteHit {
    arthur::EventId id;
    std::vector<std::string> matched;
    std::size_t score = 0;
    double mean_weight = 0.0;
};

// Scores every event by scanning every resource for every cue, then orders with an explicit
// pairwise comparison count (a rank is the number of events that beat it).
inline std::vector<BruteHit> brute_force_rank(const arthur::LongTermMemory& ltm, const arthur::Stemmer& stemmer,
                                              const std::vector<std::string>& raw_cues, std::size_t k) {
    std::vector<std::string> cues;
    for (const auto& c : raw_cues) {
        const auto s = stemmer.stem(arthur::normalize_word(c));
        if (!s.empty() && std::find(cues.begin(), cues.end(), s) == cues.end()) cues.push_back(s);
    }
    std::vector<BruteHit> all;
    std::vector<arthur::Timestamp> stamps;
    for (const auto& [id, ev] : ltm.events) {
        BruteHit h;
        h.id = id;
        for (const auto& cue : cues) {
            bool hit = false;
            for (const auto rid : ev.resource_ids) {
                const auto& r = ltm.resources.at(rid);
                if (const auto* g = std::get_if<arthur::GrammaticalInfo>(&r.information)) {
                    if (stemmer.stem(g->token) == cue) hit = true;
                }
            }
            if (hit) h.matched.push_back(cue);
        }
        h.score = h.matched.size();
        double sum = 0.0;
        for (const auto rid : ev.resource_ids) sum += ltm.resources.at(rid).weight;
        h.mean_weight = sum / static_cast<double>(ev.resource_ids.size());
        if (h.score > 0) {
            all.push_back(h);
            stamps.push_back(ev.timestamp);
        }
    }
    auto beats = [&](std::size_t a, std::size_t b) {
        if (all[a].score != all[b].score) return all[a].score > all[b].score;
        if (all[a].mean_weight != all[b].mean_weight) return all[a].mean_weight > all[b].mean_weight;
        if (stamps[a].tick != stamps[b].tick) return stamps[a].tick > stamps[b].tick;
        if (stamps[a].wall_ms != stamps[b].wall_ms) return stamps[a].wall_ms > stamps[b].wall_ms;
        return all[a].id.value < all[b].id.value;
    };
    std::vector<BruteHit> ordered(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        std::size_t rank = 0;
        for (std::size_t j = 0; j < all.size(); ++j) {
            if (j != i && beats(j, i)) ++rank;
        }
        ordered[rank] = all[i];
    }
    if (ordered.size() > k) ordered.resize(k);
    return ordered;
}

// ─── Random stores ─────────────────────────────────────────────

inline const std::vector<std::string>& vocabulary() {
    static const std::vector<std::string> words = {"fish", "dad",   "lake",   "glasgow", "vacation", "cellphone",
                                                   "mum",  "dog",   "school", "garden",  "rain",     "football",
                                                   "tea",  "piano", "train",  "beach"};
    return words;
}

// Builds an LTM directly (not through MemoryCore) with consistent references and people backing.
inline arthur::LongTermMemory random_ltm(std::mt19937_64& rng, std::size_t max_events) {
    using namespace arthur;
    LongTermMemory ltm;
    std::uniform_int_distribution<std::size_t> n_events(0, max_events);
    std::uniform_int_distribution<int> n_res(1, 4);
    std::uniform_int_distribution<int> kind(0, 9);
    std::uniform_int_distribution<int> type(0, 2);
    std::uniform_int_distribution<int> emotion(0, 8);
    std::uniform_real_distribution<double> pol(-1.0, 1.0);
    std::uniform_real_distribution<double> w(0.2, 1.0);
    std::uniform_int_distribution<std::size_t> word(0, vocabulary().size() - 1);
    std::bernoulli_distribution coin(0.5);

    std::uint64_t next_res = 1;
    std::uint64_t tick = 0;
    const auto events = n_events(rng);
    for (std::size_t e = 0; e < events; ++e) {
        tick += 1 + rng() % 3;
        GeneralEvent ev;
        ev.id = EventId{e + 1 + rng() % 2 * 100};  // gaps in the id space
        while (ltm.events.count(ev.id)) ev.id.value += 1;
        ev.timestamp = {tick, static_cast<std::int64_t>(tick * 2000 + rng() % 1000)};
        ev.event_type = static_cast<EventType>(type(rng));
        ev.emotion = static_cast<EmotionLabel>(emotion(rng));
        ev.polarity = pol(rng);
        const int count = n_res(rng);
        for (int i = 0; i < count; ++i) {
            Resource r;
            r.id = ResourceId{next_res++};
            r.timestamp = ev.timestamp;
            r.weight = w(rng);
            r.owner_event_id = ev.id;
            r.consolidated = coin(rng);
            const int k = kind(rng);
            if (k < 6) {
                r.information = GrammaticalInfo{vocabulary()[word(rng)], std::nullopt};
            } else if (k < 8) {
                const auto who = "p" + std::to_string(rng() % 4);
                if (coin(rng)) {
                    r.information = GrammaticalInfo{who, FactTriple{who, "name", "P" + who.substr(1)}};
                    ltm.people.try_emplace(who, PersonProfile{who, "P" + who.substr(1), ev.timestamp, {}});
                } else {
                    r.information = GrammaticalInfo{"age", FactTriple{who, "age", std::to_string(rng() % 90)}};
                }
            } else if (k < 9) {
                r.information = ImageInfo{"images/" + vocabulary()[word(rng)] + ".png"};
            } else {
                r.information = AudioInfo{"clip-" + std::to_string(rng() % 50)};
            }
            ev.resource_ids.push_back(r.id);
            ltm.resources.emplace(r.id, std::move(r));
        }
        ltm.events.emplace(ev.id, std::move(ev));
    }
    return ltm;
}

}  // namespace testing_support
