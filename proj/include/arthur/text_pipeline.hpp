#pragma once

#include "arthur/default_data.hpp"
#include "arthur/types.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace arthur {

using TokenList = std::vector<std::string>;

inline constexpr std::size_t kMinStemLength = 3;
inline constexpr int kDefaultNegationWindow = 3;

namespace detail {

inline bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '\'' ||
           c >= 0x80;
}

// Yields (line_number, trimmed line) for every non-blank, non-comment line.
template <typename Fn>
void for_each_data_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto end = nl == std::string_view::npos ? text.size() : nl;
        ++line_no;
        const auto line = trim(text.substr(pos, end - pos));
        if (!line.empty() && line.front() != '#') fn(line_no, line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    for (;;) {
        const auto tab = line.find('\t', pos);
        fields.push_back(trim(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos)));
        if (tab == std::string_view::npos) break;
        pos = tab + 1;
    }
    return fields;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (!std::filesystem::exists(path)) throw NotFoundError("file not found: " + path.string());
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace detail

/// Lowercases ASCII letters and drops apostrophes, so "Don't" and "dont" compare equal.
inline std::string normalize_word(std::string_view word) {
    std::string out;
    out.reserve(word.size());
    for (unsigned char c : word) {
        if (c == '\'') continue;
        out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    }
    return out;
}

/// Splits on anything that is not a letter, digit, apostrophe or non-ASCII byte, then normalizes.
inline TokenList split_words(std::string_view sentence) {
    TokenList words;
    std::size_t i = 0;
    while (i < sentence.size()) {
        while (i < sentence.size() && !detail::is_word_byte(static_cast<unsigned char>(sentence[i]))) ++i;
        const auto start = i;
        while (i < sentence.size() && detail::is_word_byte(static_cast<unsigned char>(sentence[i]))) ++i;
        if (i > start) {
            auto w = normalize_word(sentence.substr(start, i - start));
            if (!w.empty()) words.push_back(std::move(w));
        }
    }
    return words;
}

// ─── Stop words ────────────────────────────────────────────────

class StopWords {
public:
    StopWords() = default;

    static StopWords parse(std::string_view text) {
        StopWords sw;
        detail::for_each_data_line(text, [&](std::size_t, std::string_view line) {
            auto w = normalize_word(line);
            if (!w.empty()) sw.words_.insert(std::move(w));
        });
        return sw;
    }

    bool contains(std::string_view word) const { return words_.count(std::string(word)) != 0; }
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

// ─── Stemmer ───────────────────────────────────────────────────

struct StemmerRules {
    std::vector<std::string> protect;
    std::vector<std::string> strip;
    std::map<std::string, std::string> restore;

    static StemmerRules parse(std::string_view text) {
        StemmerRules rules;
        detail::for_each_data_line(text, [&](std::size_t line_no, std::string_view line) {
            const auto f = detail::split_tabs(line);
            if (f[0] == "protect" && f.size() == 2 && !f[1].empty()) {
                rules.protect.emplace_back(f[1]);
            } else if (f[0] == "strip" && f.size() == 2 && !f[1].empty()) {
                rules.strip.emplace_back(f[1]);
            } else if (f[0] == "restore" && f.size() == 3) {
                if (f[1].size() < kMinStemLength || f[2].size() < kMinStemLength) {
                    throw ParseError("restore entries must be at least 3 characters", line_no);
                }
                rules.restore.emplace(std::string(f[1]), std::string(f[2]));
            } else {
                throw ParseError("unrecognized stemmer rule: " + std::string(line), line_no);
            }
        });
        // A restored word that could be stripped again would make stemming non-terminating.
        for (const auto& [stem, word] : rules.restore) {
            for (const auto& suffix : rules.strip) {
                if (word.ends_with(suffix)) {
                    throw ParseError("restore target '" + word + "' ends with strip suffix '" + suffix + "'", 0);
                }
            }
        }
        return rules;
    }
};

class Stemmer {
public:
    Stemmer() = default;
    explicit Stemmer(StemmerRules rules) : rules_(std::move(rules)) {}

    // Applies the first strip rule (in table order) that leaves at least kMinStemLength characters,
    // restores a silent e if the table lists the stem, and repeats until nothing fires.
    std::string stem(std::string_view token) const {
        std::string word(token);
        for (;;) {
            if (is_protected(word)) return word;
            bool changed = false;
            for (const auto& suffix : rules_.strip) {
                if (word.size() >= suffix.size() + kMinStemLength && word.ends_with(suffix)) {
                    word.resize(word.size() - suffix.size());
                    if (auto it = rules_.restore.find(word); it != rules_.restore.end()) word = it->second;
                    changed = true;
                    break;
                }
            }
            if (!changed) return word;
        }
    }

    const StemmerRules& rules() const { return rules_; }

private:
    bool is_protected(const std::string& word) const {
        return std::any_of(rules_.protect.begin(), rules_.protect.end(),
                           [&](const std::string& p) { return word.ends_with(p); });
    }

    StemmerRules rules_;
};

// ─── Polarity lexicon ──────────────────────────────────────────

struct PolarityLexicon {
    std::unordered_map<std::string, double> entries;
    std::unordered_set<std::string> negators;
    int negation_window = kDefaultNegationWindow;

    // Lines are `word<TAB>score` or `word<TAB>negator`.
    static PolarityLexicon parse(std::string_view text, int window = kDefaultNegationWindow) {
        PolarityLexicon lex;
        lex.negation_window = window;
        detail::for_each_data_line(text, [&](std::size_t line_no, std::string_view line) {
            const auto f = detail::split_tabs(line);
            if (f.size() != 2 || f[0].empty()) throw ParseError("expected word<TAB>score", line_no);
            auto word = normalize_word(f[0]);
            if (f[1] == "negator") {
                lex.negators.insert(std::move(word));
                return;
            }
            double score = 0.0;
            const auto* first = f[1].data();
            const auto* last = f[1].data() + f[1].size();
            const auto [ptr, ec] = std::from_chars(first, last, score);
            if (ec != std::errc{} || ptr != last) throw ParseError("bad score '" + std::string(f[1]) + "'", line_no);
            if (score < -1.0 || score > 1.0) throw ParseError("score outside [-1,1]", line_no);
            lex.entries[std::move(word)] = score;
        });
        return lex;
    }
};

/// Mean of the lexicon scores of the raw tokens, each negated when a negator sits within the
/// negation window before it; clamped to [-1, 1]. Stop words are not removed here.
inline double polarity(std::string_view sentence, const PolarityLexicon& lexicon) {
    const auto tokens = split_words(sentence);
    double sum = 0.0;
    int scored = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (lexicon.negators.count(tokens[i])) continue;
        const auto it = lexicon.entries.find(tokens[i]);
        if (it == lexicon.entries.end()) continue;
        double score = it->second;
        const std::size_t window = static_cast<std::size_t>(std::max(0, lexicon.negation_window));
        const std::size_t from = i >= window ? i - window : 0;
        for (std::size_t j = from; j < i; ++j) {
            if (lexicon.negators.count(tokens[j])) {
                score = -score;
                break;
            }
        }
        sum += score;
        ++scored;
    }
    return std::clamp(sum / std::max(1, scored), -1.0, 1.0);
}

// ─── Pipeline ──────────────────────────────────────────────────

struct TextDataPaths {
    std::optional<std::filesystem::path> stopwords;
    std::optional<std::filesystem::path> lexicon;
    std::optional<std::filesystem::path> stemmer_rules;
};

class TextPipeline {
public:
    /// Built from the data files compiled into the library.
    TextPipeline()
        : TextPipeline(StopWords::parse(data::kStopwords), Stemmer(StemmerRules::parse(data::kStemmerRules)),
                       PolarityLexicon::parse(data::kLexicon)) {}

    TextPipeline(StopWords stop_words, Stemmer stemmer, PolarityLexicon lexicon)
        : stop_words_(std::move(stop_words)), stemmer_(std::move(stemmer)), lexicon_(std::move(lexicon)) {}

    /// Any path left unset falls back to the built-in copy.
    static TextPipeline from_files(const TextDataPaths& paths) {
        auto load = [](const std::optional<std::filesystem::path>& p, std::string_view fallback) {
            return p ? detail::read_text_file(*p) : std::string(fallback);
        };
        return TextPipeline(StopWords::parse(load(paths.stopwords, data::kStopwords)),
                            Stemmer(StemmerRules::parse(load(paths.stemmer_rules, data::kStemmerRules))),
                            PolarityLexicon::parse(load(paths.lexicon, data::kLexicon)));
    }

    TokenList tokenize(std::string_view sentence) const {
        TokenList out;
        for (const auto& word : split_words(sentence)) {
            if (stop_words_.contains(word)) continue;
            auto s = stemmer_.stem(word);
            if (s.empty() || stop_words_.contains(s)) continue;
            out.push_back(std::move(s));
        }
        return out;
    }

    std::string stem(std::string_view token) const { return stemmer_.stem(token); }

    double polarity(std::string_view sentence) const { return arthur::polarity(sentence, lexicon_); }

    bool is_stop_word(std::string_view word) const { return stop_words_.contains(word); }

    const PolarityLexicon& lexicon() const { return lexicon_; }
    const Stemmer& stemmer() const { return stemmer_; }

private:
    StopWords stop_words_;
    Stemmer stemmer_;
    PolarityLexicon lexicon_;
};

}  // namespace arthur
