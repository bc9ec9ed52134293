#pragma once

// Template sentences handed to the scorer, and the reverse lookup that
// picks the highest-likelihood sentences per description word.
//
// Prompt file (tab-delimited):  region_id  word  sentence
// Prior prompt file:            region_id  text      (bare region name)

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "herb/error.hpp"
#include "herb/lexicon.hpp"
#include "herb/region_tree.hpp"
#include "herb/score_store.hpp"
#include "herb/text_io.hpp"

namespace herb {

struct PromptTask {
    RegionId region;
    std::string word;
    std::string sentence;

    bool operator==(const PromptTask&) const = default;
};

inline std::string template_sentence(std::string_view region_name, std::string_view word) {
    std::string s = "People in ";
    s += region_name;
    s += " are ";
    s += word;
    s += '.';
    return s;
}

/// Every non-root region at one of `levels`, crossed with every lexicon
/// entry in dimension order. An empty level set selects all levels.
inline std::vector<PromptTask> gen_prompts(const RegionTree& tree, const Lexicon& lex, const std::set<int>& levels = {}) {
    std::vector<PromptTask> out;
    for (const auto& id : tree.scoreable_regions()) {
        const auto& node = tree.node(id);
        if (!levels.empty() && !levels.count(node.level)) continue;
        for (const auto& e : lex.entries()) out.push_back({id, e.word, template_sentence(node.name, e.word)});
    }
    return out;
}

inline std::string format_prompts(const std::vector<PromptTask>& tasks) {
    std::string out = "region_id\tword\tsentence\n";
    for (const auto& t : tasks) out += t.region + '\t' + t.word + '\t' + t.sentence + '\n';
    return out;
}

/// Bare region names, scored by the same procedure to obtain region priors.
inline std::string format_prior_prompts(const RegionTree& tree, const std::set<int>& levels = {}) {
    std::string out = "region_id\ttext\n";
    for (const auto& id : tree.scoreable_regions()) {
        const auto& node = tree.node(id);
        if (!levels.empty() && !levels.count(node.level)) continue;
        out += id + '\t' + node.name + '\n';
    }
    return out;
}

/// Writes the prompt file and returns the task count.
inline std::size_t write_prompts(const std::filesystem::path& out, const RegionTree& tree, const Lexicon& lex,
                                 const std::set<int>& levels = {}) {
    const auto tasks = gen_prompts(tree, lex, levels);
    io::write_atomic(out, format_prompts(tasks));
    return tasks.size();
}

enum class ProbeDataset { imdb, hatespeech };

inline ProbeDataset parse_probe_dataset(std::string_view s) {
    if (s == "imdb") return ProbeDataset::imdb;
    if (s == "hatespeech" || s == "hatespeech18") return ProbeDataset::hatespeech;
    throw ValidationError("unknown probe dataset '" + std::string(s) + "' (expected imdb or hatespeech)");
}

/// Neutral regional prefix prepended (with one space) to downstream samples.
inline std::string probe_prefix(ProbeDataset d, std::string_view region_name) {
    std::string s = d == ProbeDataset::imdb ? "The cast is from " : "I am from ";
    s += region_name;
    s += '.';
    return s;
}

inline std::string probe_text(ProbeDataset d, std::string_view region_name, std::string_view sample) {
    return probe_prefix(d, region_name) + " " + std::string(sample);
}

struct RankedSentence {
    PromptTask task;
    double score = 0.0;
    std::size_t rank = 0; ///< 1-based within its word
};

/// For each lexicon entry, the `k` covered regions with the highest score.
/// Ties are broken by ascending region id.
inline std::vector<RankedSentence> top_biased_sentences(const ScoreMatrix& m, const Lexicon& lex,
                                                        const RegionTree& tree, std::size_t k) {
    const auto regions = m.coverage();
    if (k == 0) throw ValidationError("k must be at least 1");
    if (k > regions.size())
        throw ValidationError("k = " + std::to_string(k) + " exceeds the " + std::to_string(regions.size()) +
                              " scored regions");
    std::vector<RankedSentence> out;
    out.reserve(k * lex.size());
    for (const auto& e : lex.entries()) {
        std::vector<std::pair<double, RegionId>> ranked;
        ranked.reserve(regions.size());
        for (const auto& r : regions) ranked.emplace_back(m.at(r, e.word), r);
        std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(),
                          [](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first > b.first;
                              return a.second < b.second;
                          });
        for (std::size_t i = 0; i < k; ++i) {
            const auto& id = ranked[i].second;
            out.push_back({{id, e.word, template_sentence(tree.node(id).name, e.word)}, ranked[i].first, i + 1});
        }
    }
    return out;
}

inline std::string format_ranked(const std::vector<RankedSentence>& rows) {
    std::string out = "word\trank\tregion_id\tscore\tsentence\n";
    for (const auto& r : rows)
        out += r.task.word + '\t' + std::to_string(r.rank) + '\t' + r.task.region + '\t' + io::format_exact(r.score) +
               '\t' + r.task.sentence + '\n';
    return out;
}

} // namespace herb
