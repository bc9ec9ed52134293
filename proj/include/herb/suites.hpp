#pragma once

// Topic ablation and word-replacement robustness runs. Both reuse one score
// matrix: a template sentence depends only on its own (region, word) pair,
// so a lexicon variant just selects a different subset of rows.

#include <map>
#include <string>
#include <vector>

#include "herb/error.hpp"
#include "herb/lexicon.hpp"
#include "herb/metric.hpp"
#include "herb/report.hpp"
#include "herb/score_store.hpp"

namespace herb {

inline constexpr std::string_view full_list_label = "Full List";

inline std::string ablation_label(Topic t) { return "w/o " + topic_title(t); }
inline std::string replacement_label(Topic t) { return "Replace " + topic_title(t); }

/// Variant key used to attach a dedicated score file to an ablation row.
inline std::string ablation_key(Topic t) { return "wo_" + std::string(topic_name(t)); }

/// Full lexicon plus one row per topic present in it, each without that topic.
/// `overrides` maps an ablation key ("wo_strength") to a dedicated matrix;
/// rows without an override read `scores`.
inline std::vector<LabeledReport> ablation_suite(const RegionTree& tree, const Lexicon& full, const ScoreMatrix& scores,
                                                 const RegionPriors* priors, Variant variant,
                                                 const std::map<std::string, const ScoreMatrix*>& overrides = {}) {
    std::vector<LabeledReport> rows;
    rows.push_back({std::string(full_list_label), compute_report(tree, scores, full, priors, variant)});
    for (auto topic : all_topics) {
        if (!full.has_topic(topic)) continue;
        const auto lex = ablate_topic(full, topic);
        const ScoreMatrix* m = &scores;
        if (auto it = overrides.find(ablation_key(topic)); it != overrides.end()) m = it->second;
        m->require_complete(lex.vocabulary());
        rows.push_back({ablation_label(topic), compute_report(tree, *m, lex, priors, variant)});
    }
    for (const auto& [key, _] : overrides) {
        bool known = false;
        for (auto topic : all_topics) known |= key == ablation_key(topic) && full.has_topic(topic);
        if (!known) throw ValidationError("score override for unknown ablation variant '" + key + "'");
    }
    return rows;
}

/// Full lexicon plus one row per topic, that topic swapped for its substitutes.
/// `scores` must cover both the original and the substitute words.
inline std::vector<LabeledReport> robustness_suite(const RegionTree& tree, const Lexicon& full,
                                                   const Lexicon& substitutes, const ScoreMatrix& scores,
                                                   const RegionPriors* priors, Variant variant) {
    std::vector<LabeledReport> rows;
    rows.push_back({std::string(full_list_label), compute_report(tree, scores, full, priors, variant)});
    for (auto topic : all_topics) {
        if (!full.has_topic(topic)) continue;
        const auto lex = replace_topic(full, topic, substitutes);
        scores.require_complete(lex.vocabulary());
        rows.push_back({replacement_label(topic), compute_report(tree, scores, lex, priors, variant)});
    }
    return rows;
}

} // namespace herb
