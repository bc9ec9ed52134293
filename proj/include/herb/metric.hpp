#pragma once

// Hierarchical regional bias metrics.
//
//   sparseness c(R)   average pairwise L2 distance of a cluster
//   alpha             softmax over per-dimension sparseness of the children
//   V(r)              v(r) + alpha * mean(children v), or v(r) at leaves
//   Cw(r)             2/(k(k-1)) * sum_pairs w_ab * ||V(a) - V(b)||,
//                     w = softmax over pairs of C(a) + C(b)
//   Cz(r)             same, with w replaced by softmax of f(a) + f(b)
//   leaf rule         ||v(r) - mean(v(siblings incl. r))||
//
// Children are always visited in id order so reports are bit-reproducible.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "herb/error.hpp"
#include "herb/lexicon.hpp"
#include "herb/region_tree.hpp"
#include "herb/score_store.hpp"
#include "herb/vector_math.hpp"

namespace herb {

enum class Variant { cw, cz, plain };

inline std::string_view variant_name(Variant v) {
    switch (v) {
    case Variant::cw: return "Cw";
    case Variant::cz: return "Cz";
    case Variant::plain: return "plain";
    }
    return "?";
}

inline Variant parse_variant(std::string_view s) {
    if (s == "cw" || s == "Cw") return Variant::cw;
    if (s == "cz" || s == "Cz") return Variant::cz;
    if (s == "plain") return Variant::plain;
    throw ValidationError("unknown variant '" + std::string(s) + "' (expected cw, cz or plain)");
}

namespace detail {

inline void check_cluster(std::span<const Vector> vectors) {
    if (vectors.empty()) throw ValidationError("sparseness of an empty cluster");
    for (const auto& v : vectors)
        if (v.size() != vectors.front().size()) throw ValidationError("cluster vectors have mismatched lengths");
}

inline double pair_prefactor(std::size_t k) { return 2.0 / (static_cast<double>(k) * static_cast<double>(k - 1)); }

} // namespace detail

/// Average pairwise Euclidean distance; 0 for a single vector.
inline double cluster_sparseness(std::span<const Vector> vectors) {
    detail::check_cluster(vectors);
    const std::size_t k = vectors.size();
    if (k == 1) return 0.0;
    double sum = 0.0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) sum += euclidean_distance(vectors[a], vectors[b]);
    return detail::pair_prefactor(k) * sum;
}

/// Sparseness restricted to coordinate `i` (absolute differences).
inline double dimension_sparseness(std::span<const Vector> vectors, std::size_t i) {
    detail::check_cluster(vectors);
    if (i >= vectors.front().size())
        throw ValidationError("dimension index " + std::to_string(i) + " out of range for length " +
                              std::to_string(vectors.front().size()));
    const std::size_t k = vectors.size();
    if (k == 1) return 0.0;
    double sum = 0.0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) sum += std::abs(vectors[a][i] - vectors[b][i]);
    return detail::pair_prefactor(k) * sum;
}

/// Softmax over per-dimension sparseness. Uniform for singleton clusters.
inline Vector alpha_weights(std::span<const Vector> vectors) {
    detail::check_cluster(vectors);
    Vector c(vectors.front().size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = dimension_sparseness(vectors, i);
    return softmax(c);
}

/// Unordered child pair, `first < second`.
using RegionPair = std::pair<RegionId, RegionId>;
using PairWeights = std::map<RegionPair, double>;

namespace detail {

inline PairWeights pair_softmax(const std::map<RegionId, double>& node_values) {
    if (node_values.size() < 2) throw ValidationError("pair weights need at least two children");
    std::vector<RegionPair> pairs;
    Vector logits;
    for (auto a = node_values.begin(); a != node_values.end(); ++a)
        for (auto b = std::next(a); b != node_values.end(); ++b) {
            pairs.emplace_back(a->first, b->first);
            logits.push_back(a->second + b->second);
        }
    const auto weights = softmax(logits);
    PairWeights out;
    for (std::size_t i = 0; i < pairs.size(); ++i) out.emplace(pairs[i], weights[i]);
    return out;
}

} // namespace detail

/// w_ab = exp(C(a) + C(b)) normalised over all unordered child pairs.
inline PairWeights pair_weights_w(const std::map<RegionId, double>& child_biases) {
    for (const auto& [id, c] : child_biases)
        if (!std::isfinite(c)) throw ValidationError("non-finite bias for child '" + id + "'");
    return detail::pair_softmax(child_biases);
}

/// z_ab = exp(f(a) + f(b)) normalised over all unordered child pairs.
inline PairWeights pair_weights_z(const RegionPriors& priors, std::span<const RegionId> children) {
    std::map<RegionId, double> values;
    for (const auto& c : children) values[c] = priors.at(c);
    return detail::pair_softmax(values);
}

struct AggregatedVector {
    RegionId region;
    Vector values;
    Vector alpha;    ///< empty for leaf-rule nodes
    Vector centroid; ///< mean of the children's v; empty for leaf-rule nodes
};

struct BiasScore {
    RegionId region;
    Variant variant = Variant::cw;
    double value = 0.0;
    int level = 0;
};

struct BiasReport {
    std::string model_id;
    std::string lexicon_name;
    Variant variant = Variant::cw;
    std::vector<BiasScore> scores; ///< sorted by region id, root included
    BiasScore overall;
    /// Mean of the children's scores for each child of the root (the
    /// per-continent average of country scores).
    std::map<RegionId, double> child_mean;
    Warnings warnings;

    const BiasScore& score(const RegionId& r) const {
        for (const auto& s : scores)
            if (s.region == r) return s;
        throw ValidationError("report has no score for region '" + r + "'");
    }
    bool has(const RegionId& r) const {
        for (const auto& s : scores)
            if (s.region == r) return true;
        return false;
    }
};

/// Memoising bottom-up evaluator over one (tree, scores, lexicon, priors)
/// tuple. Holds references; the inputs must outlive it. Not thread-safe.
class HerbEvaluator {
public:
    HerbEvaluator(const RegionTree& tree, const ScoreMatrix& scores, const Lexicon& lex,
                  const RegionPriors* priors = nullptr)
        : tree_(tree), scores_(scores), lex_(lex), priors_(priors) {}

    const RegionTree& tree() const { return tree_; }

    /// Throws if any region needed to score `r` lacks scores (or priors for Cz).
    void require_inputs(const RegionId& r, Variant variant) const {
        std::vector<RegionId> needed = tree_.descendants(r);
        // A childless non-root node is scored against its siblings' centroid.
        if (r != tree_.root() && tree_.is_leaf(r))
            for (const auto& s : tree_.siblings(r)) needed.push_back(s);
        for (const auto& id : needed)
            if (!scores_.covers(id)) throw ValidationError("uncovered region '" + id + "' (no scores)");
        if (variant == Variant::cz) {
            if (!priors_) throw ValidationError("variant Cz requires region priors");
            for (const auto& id : tree_.descendants(r))
                if (!priors_->contains(id)) throw ValidationError("missing region prior for '" + id + "'");
        }
    }

    const Vector& descriptive(const RegionId& r) {
        auto it = v_.find(r);
        if (it != v_.end()) return it->second;
        return v_.emplace(r, descriptive_vector(scores_, lex_, r).values).first->second;
    }

    const AggregatedVector& aggregated(const RegionId& r) {
        auto it = agg_.find(r);
        if (it != agg_.end()) return it->second;
        AggregatedVector out{r, descriptive(r), {}, {}};
        const auto& kids = tree_.sub_regions(r);
        if (!kids.empty()) {
            const auto cluster = child_vectors(r);
            out.centroid = centroid(cluster);
            out.alpha = alpha_weights(cluster);
            for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += out.alpha[i] * out.centroid[i];
        }
        return agg_.emplace(r, std::move(out)).first->second;
    }

    /// Pair weights used at internal node `r` (requires >= 2 children).
    const PairWeights& pair_weights(const RegionId& r, Variant variant) {
        auto& cache = variant == Variant::cw ? w_ : z_;
        auto it = cache.find(r);
        if (it != cache.end()) return it->second;
        const auto& kids = tree_.sub_regions(r);
        PairWeights weights;
        if (variant == Variant::cw) {
            std::map<RegionId, double> child_bias;
            for (const auto& c : kids) child_bias[c] = bias(c, Variant::cw);
            weights = pair_weights_w(child_bias);
        } else if (variant == Variant::cz) {
            if (!priors_) throw ValidationError("variant Cz requires region priors");
            weights = pair_weights_z(*priors_, kids);
        } else {
            throw ValidationError("pair weights are undefined for the plain variant");
        }
        return cache.emplace(r, std::move(weights)).first->second;
    }

    double bias(const RegionId& r, Variant variant) {
        if (variant == Variant::plain) throw ValidationError("use plain_bias for the plain variant");
        auto& cache = variant == Variant::cw ? cw_ : cz_;
        if (auto it = cache.find(r); it != cache.end()) return it->second;

        const auto& kids = tree_.sub_regions(r);
        double value = 0.0;
        if (kids.empty()) {
            if (r != tree_.root()) {
                const auto sibs = tree_.siblings(r);
                std::vector<Vector> cluster;
                for (const auto& s : sibs) cluster.push_back(descriptive(s));
                value = euclidean_distance(descriptive(r), centroid(cluster));
            }
        } else if (kids.size() == 1) {
            (void)bias(kids.front(), variant);
        } else {
            // Children first: Cw weights depend on completed child biases.
            for (const auto& c : kids) (void)bias(c, variant);
            const auto& weights = pair_weights(r, variant);
            double sum = 0.0;
            for (std::size_t a = 0; a < kids.size(); ++a)
                for (std::size_t b = a + 1; b < kids.size(); ++b) {
                    const double w = weights.at({kids[a], kids[b]});
                    sum += w * euclidean_distance(aggregated(kids[a]).values, aggregated(kids[b]).values);
                }
            value = detail::pair_prefactor(kids.size()) * sum;
        }
        cache.emplace(r, value);
        return value;
    }

    BiasScore score(const RegionId& r, Variant variant) {
        return {r, variant, bias(r, variant), tree_.node(r).level};
    }

    /// Scores every node of the tree, root last as `overall`.
    BiasReport report(Variant variant) {
        require_inputs(tree_.root(), variant);
        BiasReport rep;
        rep.model_id = scores_.model_id();
        rep.lexicon_name = lex_.name();
        rep.variant = variant;
        for (const auto& [id, node] : tree_.nodes()) rep.scores.push_back(score(id, variant));
        rep.overall = score(tree_.root(), variant);
        for (const auto& top : tree_.sub_regions(tree_.root())) {
            const auto& kids = tree_.sub_regions(top);
            if (kids.empty()) continue;
            double sum = 0.0;
            for (const auto& c : kids) sum += bias(c, variant);
            rep.child_mean[top] = sum / static_cast<double>(kids.size());
        }
        return rep;
    }

private:
    std::vector<Vector> child_vectors(const RegionId& r) {
        std::vector<Vector> out;
        for (const auto& c : tree_.sub_regions(r)) out.push_back(descriptive(c));
        return out;
    }

    const RegionTree& tree_;
    const ScoreMatrix& scores_;
    const Lexicon& lex_;
    const RegionPriors* priors_;
    std::map<RegionId, Vector> v_;
    std::map<RegionId, AggregatedVector> agg_;
    std::map<RegionId, PairWeights> w_, z_;
    std::map<RegionId, double> cw_, cz_;
};

inline AggregatedVector aggregate_vector(const RegionTree& tree, const ScoreMatrix& m, const Lexicon& lex,
                                         const RegionId& r) {
    HerbEvaluator eval(tree, m, lex);
    for (const auto& id : tree.descendants(r))
        if (!m.covers(id)) throw ValidationError("uncovered region '" + id + "' below '" + r + "'");
    return eval.aggregated(r);
}

inline BiasScore herb_bias(const RegionTree& tree, const ScoreMatrix& m, const Lexicon& lex,
                           const RegionPriors* priors, const RegionId& r, Variant variant) {
    HerbEvaluator eval(tree, m, lex, priors);
    eval.require_inputs(r, variant);
    return eval.score(r, variant);
}

inline BiasReport herb_report(const RegionTree& tree, const ScoreMatrix& m, const Lexicon& lex,
                              const RegionPriors* priors, Variant variant) {
    HerbEvaluator eval(tree, m, lex, priors);
    return eval.report(variant);
}

/// Non-hierarchical baseline: per top-level group, the sparseness of its
/// children's plain vectors; overall, the sparseness of all those children
/// pooled into one cluster. Scores only the root and its children.
inline BiasReport plain_bias(const RegionTree& tree, const ScoreMatrix& m, const Lexicon& lex) {
    BiasReport rep;
    rep.model_id = m.model_id();
    rep.lexicon_name = lex.name();
    rep.variant = Variant::plain;
    for (const auto& top : tree.sub_regions(tree.root())) {
        std::vector<Vector> cluster;
        for (const auto& c : tree.sub_regions(top)) cluster.push_back(descriptive_vector(m, lex, c).values);
        double value = 0.0;
        if (cluster.size() < 2) {
            rep.warnings.push_back("'" + top + "' has " + std::to_string(cluster.size()) +
                                   " sub-region(s); plain score set to 0");
        } else {
            value = cluster_sparseness(cluster);
        }
        rep.scores.push_back({top, Variant::plain, value, tree.node(top).level});
    }
    // Pool in id order, independent of the grouping.
    std::map<RegionId, Vector> by_id;
    for (const auto& top : tree.sub_regions(tree.root()))
        for (const auto& c : tree.sub_regions(top)) by_id.emplace(c, descriptive_vector(m, lex, c).values);
    std::vector<Vector> pooled;
    for (auto& [_, v] : by_id) pooled.push_back(std::move(v));
    const double overall = pooled.empty() ? 0.0 : cluster_sparseness(pooled);
    rep.overall = {tree.root(), Variant::plain, overall, tree.node(tree.root()).level};
    rep.scores.push_back(rep.overall);
    std::sort(rep.scores.begin(), rep.scores.end(),
              [](const BiasScore& a, const BiasScore& b) { return a.region < b.region; });
    return rep;
}

/// Dispatches to the hierarchical evaluator or the plain baseline.
inline BiasReport compute_report(const RegionTree& tree, const ScoreMatrix& m, const Lexicon& lex,
                                 const RegionPriors* priors, Variant variant) {
    if (variant == Variant::plain) return plain_bias(tree, m, lex);
    return herb_report(tree, m, lex, priors, variant);
}

} // namespace herb
