#pragma once

// Topic-structured description word list. The entry order defines the
// descriptive-vector dimension order.
//
// File format:
//
//     name: full
//     kind: standard          (or: substitution)
//
//     [occupation]
//     homemaker
//     ...
//
// A word repeated inside one topic is an error for standard lists and a
// warning for substitution lists (published substitute lists repeat words).
// A word shared by two topics ("strong", "weak") is kept in both, with a
// warning; both dimensions then read the same sentence score.

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "herb/error.hpp"
#include "herb/text_io.hpp"

namespace herb {

enum class Topic { occupation, intelligence, appearance, strength, morality };

inline constexpr std::array<Topic, 5> all_topics{Topic::occupation, Topic::intelligence, Topic::appearance,
                                                 Topic::strength, Topic::morality};

inline std::string_view topic_name(Topic t) {
    switch (t) {
    case Topic::occupation: return "occupation";
    case Topic::intelligence: return "intelligence";
    case Topic::appearance: return "appearance";
    case Topic::strength: return "strength";
    case Topic::morality: return "morality";
    }
    return "?";
}

/// Capitalised label used in report rows ("w/o Occupation").
inline std::string topic_title(Topic t) {
    std::string s(topic_name(t));
    s.front() = static_cast<char>(s.front() - 'a' + 'A');
    return s;
}

inline Topic parse_topic(std::string_view s) {
    for (auto t : all_topics)
        if (topic_name(t) == s) return t;
    throw ValidationError("unknown topic '" + std::string(s) + "'");
}

enum class LexiconKind { standard, substitution };

struct DescriptionEntry {
    std::string word;
    Topic topic = Topic::occupation;
    std::size_t index = 0;

    bool operator==(const DescriptionEntry&) const = default;
};

class Lexicon {
public:
    Lexicon() = default;

    /// Builds a lexicon from (topic, word) pairs in dimension order.
    /// Indices are assigned densely 0..n-1.
    static Lexicon from_words(std::string name, LexiconKind kind,
                              const std::vector<std::pair<Topic, std::string>>& words) {
        Lexicon lex;
        lex.name_ = std::move(name);
        lex.kind_ = kind;
        std::map<Topic, std::set<std::string>> seen;
        std::map<std::string, Topic> first_topic;
        for (const auto& [topic, word] : words) {
            if (word.empty() || word.find_first_of("\t\n") != std::string::npos)
                throw ValidationError("lexicon '" + lex.name_ + "': invalid word '" + word + "'");
            if (!seen[topic].insert(word).second) {
                const auto msg = "lexicon '" + lex.name_ + "': duplicate word '" + word + "' in topic " +
                                 std::string(topic_name(topic));
                if (kind == LexiconKind::standard) throw ValidationError(msg);
                lex.warnings_.push_back(msg);
            } else if (auto it = first_topic.find(word); it != first_topic.end() && it->second != topic) {
                lex.warnings_.push_back("lexicon '" + lex.name_ + "': word '" + word + "' appears in topics " +
                                        std::string(topic_name(it->second)) + " and " +
                                        std::string(topic_name(topic)));
            }
            first_topic.emplace(word, topic);
            lex.entries_.push_back({word, topic, lex.entries_.size()});
        }
        return lex;
    }

    const std::string& name() const { return name_; }
    LexiconKind kind() const { return kind_; }
    const std::vector<DescriptionEntry>& entries() const { return entries_; }
    const Warnings& warnings() const { return warnings_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    std::vector<std::string> words() const {
        std::vector<std::string> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(e.word);
        return out;
    }

    /// Distinct words, sorted.
    std::set<std::string> vocabulary() const {
        std::set<std::string> out;
        for (const auto& e : entries_) out.insert(e.word);
        return out;
    }

    bool contains_word(std::string_view w) const {
        return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.word == w; });
    }

    bool has_topic(Topic t) const { return topic_size(t) > 0; }

    std::size_t topic_size(Topic t) const {
        return static_cast<std::size_t>(
            std::count_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.topic == t; }));
    }

    /// Topics in order of first appearance.
    std::vector<Topic> topics() const {
        std::vector<Topic> out;
        for (const auto& e : entries_)
            if (std::find(out.begin(), out.end(), e.topic) == out.end()) out.push_back(e.topic);
        return out;
    }

    std::vector<std::string> topic_words(Topic t) const {
        std::vector<std::string> out;
        for (const auto& e : entries_)
            if (e.topic == t) out.push_back(e.word);
        return out;
    }

private:
    std::string name_;
    LexiconKind kind_ = LexiconKind::standard;
    std::vector<DescriptionEntry> entries_;
    Warnings warnings_;
};

inline Lexicon parse_lexicon(const std::string& text, const std::string& source = "<lexicon>") {
    std::string name = "unnamed";
    LexiconKind kind = LexiconKind::standard;
    std::vector<std::pair<Topic, std::string>> words;
    std::optional<Topic> current;
    std::set<Topic> sections;
    std::map<Topic, std::size_t> section_sizes;

    for (const auto& line : io::content_lines(text)) {
        const auto t = std::string(io::trim(line.text));
        const auto where = source + ":" + std::to_string(line.number);
        if (t.front() == '[') {
            if (t.back() != ']') throw ValidationError(where + ": malformed section header '" + t + "'");
            const auto topic = parse_topic(io::trim(std::string_view(t).substr(1, t.size() - 2)));
            if (!sections.insert(topic).second)
                throw ValidationError(where + ": topic section '" + std::string(topic_name(topic)) + "' repeated");
            current = topic;
            section_sizes[topic] = 0;
            continue;
        }
        if (!current) {
            const auto colon = t.find(':');
            if (colon == std::string::npos) throw ValidationError(where + ": expected 'key: value' header");
            const auto key = io::trim(std::string_view(t).substr(0, colon));
            const auto value = std::string(io::trim(std::string_view(t).substr(colon + 1)));
            if (key == "name") {
                name = value;
            } else if (key == "kind") {
                if (value == "standard") kind = LexiconKind::standard;
                else if (value == "substitution") kind = LexiconKind::substitution;
                else throw ValidationError(where + ": unknown lexicon kind '" + value + "'");
            } else {
                throw ValidationError(where + ": unknown header field '" + std::string(key) + "'");
            }
            continue;
        }
        words.emplace_back(*current, t);
        ++section_sizes[*current];
    }
    for (const auto& [topic, count] : section_sizes)
        if (count == 0)
            throw ValidationError(source + ": empty topic section '" + std::string(topic_name(topic)) + "'");
    if (words.empty()) throw ValidationError(source + ": lexicon has no words");
    return Lexicon::from_words(std::move(name), kind, words);
}

inline Lexicon load_lexicon(const std::filesystem::path& path) {
    return parse_lexicon(io::read_file(path), path.string());
}

/// Lexicon without `topic`; indices are re-densified.
inline Lexicon ablate_topic(const Lexicon& lex, Topic topic) {
    if (!lex.has_topic(topic))
        throw ValidationError("lexicon '" + lex.name() + "' has no topic '" + std::string(topic_name(topic)) + "'");
    std::vector<std::pair<Topic, std::string>> kept;
    for (const auto& e : lex.entries())
        if (e.topic != topic) kept.emplace_back(e.topic, e.word);
    if (kept.empty())
        throw ValidationError("removing topic '" + std::string(topic_name(topic)) + "' from lexicon '" + lex.name() +
                              "' leaves an empty lexicon");
    return Lexicon::from_words(lex.name() + "_wo_" + std::string(topic_name(topic)), lex.kind(), kept);
}

/// Swaps `topic`'s words position-wise with the same topic of `substitutes`.
inline Lexicon replace_topic(const Lexicon& lex, Topic topic, const Lexicon& substitutes) {
    const auto tname = std::string(topic_name(topic));
    if (!lex.has_topic(topic)) throw ValidationError("lexicon '" + lex.name() + "' has no topic '" + tname + "'");
    if (!substitutes.has_topic(topic))
        throw ValidationError("substitute lexicon '" + substitutes.name() + "' has no topic '" + tname + "'");
    const auto replacement = substitutes.topic_words(topic);
    if (replacement.size() != lex.topic_size(topic))
        throw ValidationError("topic '" + tname + "' word count mismatch: " + std::to_string(lex.topic_size(topic)) +
                              " in '" + lex.name() + "' vs " + std::to_string(replacement.size()) + " in '" +
                              substitutes.name() + "'");
    std::vector<std::pair<Topic, std::string>> words;
    std::size_t next = 0;
    for (const auto& e : lex.entries())
        words.emplace_back(e.topic, e.topic == topic ? replacement[next++] : e.word);
    // Substitute lists may repeat a word within a topic; keep it and warn.
    return Lexicon::from_words(lex.name() + "_replace_" + tname, LexiconKind::substitution, words);
}

} // namespace herb
