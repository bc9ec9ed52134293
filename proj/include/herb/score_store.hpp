#pragma once

// Likelihood score ingestion and descriptive vectors.
//
// Score file (tab-delimited, header required):
//     model_id  region_id  word  score
// Priors file:
//     model_id  region_id  score
// Lines starting with '#' carry free-form metadata and are skipped.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "herb/error.hpp"
#include "herb/lexicon.hpp"
#include "herb/region_tree.hpp"
#include "herb/text_io.hpp"
#include "herb/vector_math.hpp"

namespace herb {

class ScoreMatrix {
public:
    ScoreMatrix() = default;
    ScoreMatrix(std::string model_id, std::string lexicon_name)
        : model_id_(std::move(model_id)), lexicon_name_(std::move(lexicon_name)) {}

    const std::string& model_id() const { return model_id_; }
    const std::string& lexicon_name() const { return lexicon_name_; }
    const Warnings& warnings() const { return warnings_; }
    const std::map<RegionId, std::map<std::string, double>>& rows() const { return scores_; }

    /// Returns false when the pair was already present (the value is overwritten).
    bool set(const RegionId& region, const std::string& word, double value) {
        auto [it, inserted] = scores_[region].insert_or_assign(word, value);
        return inserted;
    }

    bool covers(const RegionId& region) const { return scores_.count(region) != 0; }

    std::set<RegionId> coverage() const {
        std::set<RegionId> out;
        for (const auto& [r, _] : scores_) out.insert(r);
        return out;
    }

    std::size_t entry_count() const {
        std::size_t n = 0;
        for (const auto& [_, words] : scores_) n += words.size();
        return n;
    }

    double at(const RegionId& region, const std::string& word) const {
        auto r = scores_.find(region);
        if (r == scores_.end()) throw ValidationError("region '" + region + "' is not covered by the score matrix");
        auto w = r->second.find(word);
        if (w == r->second.end())
            throw ValidationError("no score for region '" + region + "' and word '" + word + "'");
        return w->second;
    }

    /// Every covered region must have a score for every vocabulary word.
    void require_complete(const std::set<std::string>& vocabulary) const {
        std::vector<std::string> missing;
        std::size_t total = 0;
        for (const auto& [region, words] : scores_)
            for (const auto& w : vocabulary)
                if (!words.count(w)) {
                    ++total;
                    if (missing.size() < 10) missing.push_back("(" + region + ", " + w + ")");
                }
        if (total == 0) return;
        std::string msg = "score matrix incomplete: " + std::to_string(total) + " missing (region, word) pair(s): ";
        for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", " : "") + missing[i];
        if (total > missing.size()) msg += ", ...";
        throw ValidationError(msg);
    }

    /// Same scores multiplied by `k`. Used by scale-invariance checks.
    ScoreMatrix scaled(double k) const {
        ScoreMatrix out(model_id_, lexicon_name_);
        for (const auto& [r, words] : scores_)
            for (const auto& [w, v] : words) out.scores_[r][w] = v * k;
        return out;
    }

    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

private:
    std::string model_id_;
    std::string lexicon_name_;
    std::map<RegionId, std::map<std::string, double>> scores_;
    Warnings warnings_;
};

struct RegionPriors {
    std::string model_id;
    std::map<RegionId, double> priors;

    bool contains(const RegionId& r) const { return priors.count(r) != 0; }
    double at(const RegionId& r) const {
        auto it = priors.find(r);
        if (it == priors.end()) throw ValidationError("no region prior for '" + r + "'");
        return it->second;
    }
};

struct DescriptiveVector {
    RegionId region;
    Vector values;
};

namespace detail {

inline std::string check_model_id(std::string& model_id, const std::string& row_model, const std::string& where) {
    if (row_model.empty()) throw ValidationError(where + ": empty model_id");
    if (model_id.empty()) model_id = row_model;
    else if (model_id != row_model)
        throw ValidationError(where + ": mixed model ids '" + model_id + "' and '" + row_model + "' in one file");
    return model_id;
}

} // namespace detail

/// Parses and validates a score file against a word vocabulary and a region
/// tree. Duplicate (region, word) rows keep the last value and add a warning.
inline ScoreMatrix parse_scores(const std::string& text, const std::string& source,
                                const std::set<std::string>& vocabulary, const std::string& lexicon_name,
                                const RegionTree& tree) {
    const auto table = io::parse_delimited(text, source, {"model_id", "region_id", "word", "score"});
    const auto c_model = table.column("model_id", source);
    const auto c_region = table.column("region_id", source);
    const auto c_word = table.column("word", source);
    const auto c_score = table.column("score", source);

    std::string model_id;
    std::map<RegionId, std::map<std::string, double>> staged;
    std::size_t duplicates = 0;
    std::vector<std::string> duplicate_examples;
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
        const auto& row = table.cells[i];
        const auto where = source + ":" + std::to_string(table.rows[i].number);
        detail::check_model_id(model_id, row[c_model], where);
        const auto& region = row[c_region];
        const auto& word = row[c_word];
        if (!tree.contains(region)) throw ValidationError(where + ": unknown region '" + region + "'");
        if (!vocabulary.count(word)) throw ValidationError(where + ": word '" + word + "' is not in the lexicon");
        const double value = io::parse_double(row[c_score], where);
        auto [it, inserted] = staged[region].insert_or_assign(word, value);
        if (!inserted) {
            ++duplicates;
            if (duplicate_examples.size() < 5) duplicate_examples.push_back("(" + region + ", " + word + ")");
        }
    }

    ScoreMatrix m(model_id, lexicon_name);
    for (const auto& [r, words] : staged)
        for (const auto& [w, v] : words) m.set(r, w, v);
    if (duplicates) {
        std::string msg = source + ": " + std::to_string(duplicates) + " duplicate row(s), last value kept: ";
        for (std::size_t i = 0; i < duplicate_examples.size(); ++i) msg += (i ? ", " : "") + duplicate_examples[i];
        m.add_warning(msg);
    }
    m.require_complete(vocabulary);
    return m;
}

inline ScoreMatrix ingest_scores(const std::filesystem::path& path, const std::set<std::string>& vocabulary,
                                 const std::string& lexicon_name, const RegionTree& tree) {
    return parse_scores(io::read_file(path), path.string(), vocabulary, lexicon_name, tree);
}

inline ScoreMatrix ingest_scores(const std::filesystem::path& path, const Lexicon& lex, const RegionTree& tree) {
    return ingest_scores(path, lex.vocabulary(), lex.name(), tree);
}

inline RegionPriors parse_priors(const std::string& text, const std::string& source, const RegionTree& tree) {
    const auto table = io::parse_delimited(text, source, {"model_id", "region_id", "score"});
    const auto c_model = table.column("model_id", source);
    const auto c_region = table.column("region_id", source);
    const auto c_score = table.column("score", source);
    RegionPriors out;
    for (std::size_t i = 0; i < table.cells.size(); ++i) {
        const auto& row = table.cells[i];
        const auto where = source + ":" + std::to_string(table.rows[i].number);
        detail::check_model_id(out.model_id, row[c_model], where);
        if (!tree.contains(row[c_region])) throw ValidationError(where + ": unknown region '" + row[c_region] + "'");
        out.priors[row[c_region]] = io::parse_double(row[c_score], where);
    }
    return out;
}

inline RegionPriors load_priors(const std::filesystem::path& path, const RegionTree& tree) {
    return parse_priors(io::read_file(path), path.string(), tree);
}

/// v'(r): raw scores in lexicon dimension order.
inline Vector raw_vector(const ScoreMatrix& m, const Lexicon& lex, const RegionId& r) {
    if (!m.covers(r)) throw ValidationError("region '" + r + "' is not covered by the score matrix");
    Vector out;
    out.reserve(lex.size());
    for (const auto& e : lex.entries()) out.push_back(m.at(r, e.word));
    return out;
}

/// v(r) = v'(r) / ||v'(r)||, signs preserved.
inline DescriptiveVector descriptive_vector(const ScoreMatrix& m, const Lexicon& lex, const RegionId& r) {
    if (lex.empty()) throw ValidationError("descriptive vector over an empty lexicon");
    auto raw = raw_vector(m, lex, r);
    const double norm = l2_norm(raw);
    if (norm == 0.0)
        throw ValidationError("descriptive vector of region '" + r + "' is undefined: all scores are zero");
    for (auto& x : raw) x /= norm;
    return {r, std::move(raw)};
}

/// Raw scores of one description word across all covered regions.
inline std::map<RegionId, double> likelihood_grid(const ScoreMatrix& m, const Lexicon& lex, const std::string& word) {
    if (!lex.contains_word(word))
        throw ValidationError("word '" + word + "' is not in lexicon '" + lex.name() + "'");
    std::map<RegionId, double> out;
    for (const auto& [region, words] : m.rows()) out.emplace(region, m.at(region, word));
    return out;
}

} // namespace herb
