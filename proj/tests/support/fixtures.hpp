#pragma once

// Helpers shared by the unit suite and the acceptance binary: fixture paths,
// oracle comparison, and randomized instance generators.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "herb/herb.hpp"

namespace herb::testing {

inline std::filesystem::path source_path(const std::string& rel) { return std::filesystem::path(HERB_SOURCE_DIR) / rel; }

inline std::filesystem::path fixture_path(const std::string& rel) { return source_path("tests/fixtures/" + rel); }

inline bool close_rel(double actual, double expected, double rel_tol) {
    return std::abs(actual - expected) <= rel_tol * std::abs(expected) + 1e-15;
}

struct Instance {
    RegionTree tree;
    Lexicon lexicon;
    ScoreMatrix scores;
    RegionPriors priors;
};

/// Scores are ingested against the fixture's full lexicon.txt; `lexicon_file`
/// selects the (possibly reduced) lexicon used for evaluation.
inline Instance load_fixture(const std::string& dir, const std::string& lexicon_file = "lexicon.txt") {
    const auto base = fixture_path(dir);
    auto tree = load_region_tree(base / "tree.tsv");
    const auto full = load_lexicon(base / "lexicon.txt");
    auto lex = load_lexicon(base / lexicon_file);
    auto scores = ingest_scores(base / "scores.tsv", full, tree);
    auto priors = load_priors(base / "priors.tsv", tree);
    return {std::move(tree), std::move(lex), std::move(scores), std::move(priors)};
}

/// Compares every intermediate and final quantity against a frozen oracle
/// dump. Returns one message per mismatch and the number of values checked.
struct OracleComparison {
    std::vector<std::string> mismatches;
    std::size_t checked = 0;
};

inline OracleComparison compare_with_oracle(const Instance& in, const json& expected, double rel_tol) {
    OracleComparison out;
    auto check = [&](const std::string& what, double actual, double want) {
        ++out.checked;
        if (!close_rel(actual, want, rel_tol)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << what << ": got " << actual << ", expected " << want;
            out.mismatches.push_back(msg.str());
        }
    };
    auto check_vec = [&](const std::string& what, const Vector& actual, const json& want) {
        if (actual.size() != want.size()) {
            out.mismatches.push_back(what + ": length " + std::to_string(actual.size()) + " vs " +
                                     std::to_string(want.size()));
            return;
        }
        for (std::size_t i = 0; i < actual.size(); ++i)
            check(what + "[" + std::to_string(i) + "]", actual[i], want[i].get<double>());
    };

    HerbEvaluator eval(in.tree, in.scores, in.lexicon, &in.priors);
    for (const auto& [id, want] : expected.at("v").items()) check_vec("v(" + id + ")", eval.descriptive(id), want);
    for (const auto& [id, want] : expected.at("V").items())
        check_vec("V(" + id + ")", eval.aggregated(id).values, want);
    for (const auto& [id, want] : expected.at("centroid").items())
        check_vec("centroid(" + id + ")", eval.aggregated(id).centroid, want);
    for (const auto& [id, want] : expected.at("alpha").items())
        check_vec("alpha(" + id + ")", eval.aggregated(id).alpha, want);

    const std::pair<const char*, Variant> weight_keys[] = {{"pair_weights_w", Variant::cw},
                                                           {"pair_weights_z", Variant::cz}};
    for (const auto& [key, variant] : weight_keys) {
        for (const auto& [id, pairs] : expected.at(key).items()) {
            const auto& got = eval.pair_weights(id, variant);
            if (got.size() != pairs.size())
                out.mismatches.push_back(std::string(key) + "(" + id + "): pair count differs");
            for (const auto& [pair, w] : pairs.items()) {
                const auto bar = pair.find('|');
                const RegionPair p{pair.substr(0, bar), pair.substr(bar + 1)};
                auto it = got.find(p);
                if (it == got.end()) {
                    out.mismatches.push_back(std::string(key) + "(" + id + "): missing pair " + pair);
                    continue;
                }
                check(std::string(key) + "(" + id + ")[" + pair + "]", it->second, w.get<double>());
            }
        }
    }

    const auto cw = compute_report(in.tree, in.scores, in.lexicon, &in.priors, Variant::cw);
    const auto cz = compute_report(in.tree, in.scores, in.lexicon, &in.priors, Variant::cz);
    const auto plain = compute_report(in.tree, in.scores, in.lexicon, &in.priors, Variant::plain);
    for (const auto& [id, want] : expected.at("cw").items()) check("Cw(" + id + ")", cw.score(id).value, want.get<double>());
    for (const auto& [id, want] : expected.at("cz").items()) check("Cz(" + id + ")", cz.score(id).value, want.get<double>());
    for (const auto& [id, want] : expected.at("plain").items())
        check("plain(" + id + ")", plain.score(id).value, want.get<double>());
    check("Cw overall", cw.overall.value, expected.at("cw").at(in.tree.root()).get<double>());
    check("plain overall", plain.overall.value, expected.at("plain").at(in.tree.root()).get<double>());
    return out;
}

inline json load_json(const std::filesystem::path& p) { return json::parse(io::read_file(p)); }

// ---------------------------------------------------------------------------
// Randomized instances

inline std::string word_name(std::size_t i) { return "w" + std::to_string(i); }

inline Lexicon random_lexicon(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::pair<Topic, std::string>> words;
    std::uniform_int_distribution<std::size_t> topic(0, all_topics.size() - 1);
    for (std::size_t i = 0; i < n; ++i) words.emplace_back(all_topics[topic(rng)], word_name(i));
    return Lexicon::from_words("random", LexiconKind::standard, words);
}

/// Random tree with `depth` levels below the root. Each internal node gets
/// 1..4 children; a non-bottom node is occasionally left childless.
inline RegionTree random_tree(int depth, std::mt19937_64& rng) {
    std::vector<RegionNode> nodes;
    nodes.push_back({"earth", "Earth", depth + 1, std::nullopt, {}});
    std::uniform_int_distribution<int> fanout(1, 4);
    std::bernoulli_distribution stop(0.15);
    std::vector<std::pair<RegionId, int>> frontier{{"earth", depth + 1}};
    int counter = 0;
    while (!frontier.empty()) {
        auto [parent, lvl] = frontier.back();
        frontier.pop_back();
        if (lvl == 1) continue;
        if (parent != "earth" && stop(rng)) continue;
        const int k = parent == "earth" ? std::max(2, fanout(rng)) : fanout(rng);
        for (int i = 0; i < k; ++i) {
            RegionId id = "n" + std::to_string(counter++);
            nodes.push_back({id, "Region " + id, lvl - 1, parent, {}});
            frontier.emplace_back(id, lvl - 1);
        }
    }
    return RegionTree::from_nodes(std::move(nodes));
}

inline ScoreMatrix random_scores(const RegionTree& tree, const Lexicon& lex, std::mt19937_64& rng) {
    ScoreMatrix m("random-mlm", lex.name());
    std::uniform_real_distribution<double> score(-9.0, -0.5);
    for (const auto& id : tree.scoreable_regions())
        for (const auto& w : lex.words()) m.set(id, w, score(rng));
    return m;
}

inline RegionPriors random_priors(const RegionTree& tree, std::mt19937_64& rng) {
    RegionPriors p{"random-mlm", {}};
    std::uniform_real_distribution<double> score(-10.0, -2.0);
    for (const auto& id : tree.scoreable_regions()) p.priors[id] = score(rng);
    return p;
}

inline Instance random_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> depth(1, 3);
    std::uniform_int_distribution<std::size_t> dims(1, 16);
    const int d = depth(rng);
    auto lex = random_lexicon(dims(rng), rng);
    auto tree = random_tree(d, rng);
    auto scores = random_scores(tree, lex, rng);
    auto priors = random_priors(tree, rng);
    return {std::move(tree), std::move(lex), std::move(scores), std::move(priors)};
}

/// Same instance with every region id replaced through a random bijection,
/// so children are visited in a different order.
inline std::pair<Instance, std::map<RegionId, RegionId>> relabel(const Instance& in, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<RegionId> ids;
    for (const auto& [id, _] : in.tree.nodes()) ids.push_back(id);
    std::vector<std::size_t> perm(ids.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::map<RegionId, RegionId> to_new;
    for (std::size_t i = 0; i < ids.size(); ++i) to_new[ids[i]] = "x" + std::to_string(perm[i]);

    std::vector<RegionNode> nodes;
    for (const auto& [id, n] : in.tree.nodes()) {
        RegionNode copy{to_new[id], n.name, n.level, std::nullopt, {}};
        if (n.parent) copy.parent = to_new[*n.parent];
        nodes.push_back(std::move(copy));
    }
    Instance out{RegionTree::from_nodes(std::move(nodes)), in.lexicon, ScoreMatrix(in.scores.model_id(), in.lexicon.name()),
                 RegionPriors{in.priors.model_id, {}}};
    for (const auto& [r, words] : in.scores.rows())
        for (const auto& [w, v] : words) out.scores.set(to_new[r], w, v);
    for (const auto& [r, v] : in.priors.priors) out.priors.priors[to_new[r]] = v;
    return {std::move(out), std::move(to_new)};
}

/// Every region's raw scores share one direction, each with its own positive scale.
inline Instance identical_direction(const Instance& in, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> scale(0.2, 5.0);
    Instance out{in.tree, in.lexicon, ScoreMatrix(in.scores.model_id(), in.lexicon.name()), in.priors};
    const auto first = in.tree.scoreable_regions().front();
    for (const auto& id : in.tree.scoreable_regions()) {
        const double k = scale(rng);
        for (const auto& w : in.lexicon.words()) out.scores.set(id, w, k * in.scores.at(first, w));
    }
    return out;
}

/// Property checks over one randomized instance. Returns failure messages.
inline std::vector<std::string> check_properties(std::uint64_t seed, double tol = 1e-12) {
    std::vector<std::string> fails;
    auto fail = [&](const std::string& what) { fails.push_back("seed " + std::to_string(seed) + ": " + what); };
    const auto in = random_instance(seed);
    const auto& tree = in.tree;
    HerbEvaluator eval(tree, in.scores, in.lexicon, &in.priors);
    const auto cw = compute_report(tree, in.scores, in.lexicon, &in.priors, Variant::cw);
    const auto cz = compute_report(tree, in.scores, in.lexicon, &in.priors, Variant::cz);
    const auto plain = compute_report(tree, in.scores, in.lexicon, &in.priors, Variant::plain);

    for (const auto& id : tree.scoreable_regions()) {
        const double norm = l2_norm(eval.descriptive(id));
        if (std::abs(norm - 1.0) > tol) fail("||v(" + id + ")|| = " + std::to_string(norm));
    }

    for (const auto& [id, node] : tree.nodes()) {
        const auto& kids = node.children;
        if (kids.empty() && id != tree.root()) {
            const auto& agg = eval.aggregated(id);
            if (!agg.alpha.empty() || agg.values != eval.descriptive(id)) fail("leaf " + id + ": V differs from v");
        }
        if (!kids.empty() && id != tree.root()) {
            const auto& a = eval.aggregated(id).alpha;
            const double s = std::accumulate(a.begin(), a.end(), 0.0);
            if (std::abs(s - 1.0) > tol) fail("alpha(" + id + ") sums to " + std::to_string(s));
            for (double x : a)
                if (!(x > 0.0)) fail("alpha(" + id + ") has a non-positive entry");
        }
        if (kids.size() >= 2) {
            for (auto variant : {Variant::cw, Variant::cz}) {
                double s = 0.0;
                for (const auto& [_, w] : eval.pair_weights(id, variant)) s += w;
                if (std::abs(s - 1.0) > tol)
                    fail(std::string(variant_name(variant)) + " pair weights at " + id + " sum to " + std::to_string(s));
            }
            std::vector<Vector> cluster;
            for (const auto& c : kids) cluster.push_back(eval.descriptive(c));
            double l1 = 0.0;
            for (std::size_t i = 0; i < in.lexicon.size(); ++i) l1 += dimension_sparseness(cluster, i);
            if (cluster_sparseness(cluster) > l1 + tol) fail("triangle bound violated under " + id);
        }
        if (kids.size() == 2) {
            const double want = euclidean_distance(eval.aggregated(kids[0]).values, eval.aggregated(kids[1]).values);
            for (const auto* rep : {&cw, &cz})
                if (std::abs(rep->score(id).value - want) > tol)
                    fail(std::string(variant_name(rep->variant)) + "(" + id + ") differs from ||Va - Vb||");
        }
    }

    for (const auto* rep : {&cw, &cz, &plain})
        for (const auto& s : rep->scores)
            if (!(s.value >= 0.0) || !std::isfinite(s.value))
                fail(std::string(variant_name(rep->variant)) + "(" + s.region + ") = " + std::to_string(s.value));

    {
        // With one shared direction, V = v at leaves and v(1 + 1/n) at internal
        // nodes, so a node scores 0 when its children are all leaves or all internal.
        const auto same = identical_direction(in, seed ^ 0x5eedULL);
        for (auto variant : {Variant::cw, Variant::cz, Variant::plain}) {
            const auto rep = compute_report(same.tree, same.scores, same.lexicon, &same.priors, variant);
            for (const auto& s : rep.scores) {
                const auto& kids = tree.sub_regions(s.region);
                const bool uniform = std::all_of(kids.begin(), kids.end(), [&](const RegionId& c) {
                    return tree.is_leaf(c) == tree.is_leaf(kids.front());
                });
                if ((uniform || variant == Variant::plain) && s.value > tol)
                    fail("identical vectors: " + std::string(variant_name(variant)) + "(" + s.region +
                         ") = " + std::to_string(s.value));
            }
        }
        HerbEvaluator same_eval(same.tree, same.scores, same.lexicon, &same.priors);
        std::vector<Vector> all;
        for (const auto& id : tree.scoreable_regions()) all.push_back(same_eval.descriptive(id));
        if (cluster_sparseness(all) > tol) fail("identical vectors: cluster_sparseness > 0");
    }

    {
        const auto [moved, to_new] = relabel(in, seed ^ 0xabcdefULL);
        for (const auto* rep : {&cw, &cz, &plain}) {
            const auto other = compute_report(moved.tree, moved.scores, moved.lexicon, &moved.priors, rep->variant);
            for (const auto& s : rep->scores)
                if (std::abs(other.score(to_new.at(s.region)).value - s.value) > tol)
                    fail("relabelling changed " + std::string(variant_name(rep->variant)) + "(" + s.region + ")");
        }
    }

    {
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
        const double k = std::uniform_real_distribution<double>(0.05, 20.0)(rng);
        const auto scaled = in.scores.scaled(k);
        for (const auto* rep : {&cw, &cz, &plain}) {
            const auto other = compute_report(tree, scaled, in.lexicon, &in.priors, rep->variant);
            for (const auto& s : rep->scores)
                if (std::abs(other.score(s.region).value - s.value) > tol)
                    fail("scaling by " + std::to_string(k) + " changed " + std::string(variant_name(rep->variant)) +
                         "(" + s.region + ")");
        }
    }

    {
        const auto again = compute_report(tree, in.scores, in.lexicon, &in.priors, Variant::cw);
        for (std::size_t i = 0; i < cw.scores.size(); ++i)
            if (again.scores[i].value != cw.scores[i].value) fail("repeated Cw run is not bit-identical");
    }
    return fails;
}

/// A base continent subtree copied under several continents, each copy with
/// its descriptive dimensions permuted and all continent priors equal.
inline Instance symmetric_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
    const int copies = std::uniform_int_distribution<int>(2, 6)(rng);
    const auto lex = random_lexicon(n, rng);
    const auto base = random_tree(2, rng); // earth(3) -> countries(2) -> cities(1)
    const auto base_scores = random_scores(base, lex, rng);

    std::vector<RegionNode> nodes{{"earth", "Earth", 4, std::nullopt, {}}};
    ScoreMatrix scores("sym-mlm", lex.name());
    RegionPriors priors{"sym-mlm", {}};
    std::uniform_real_distribution<double> prior(-9.0, -3.0);
    const double continent_prior = prior(rng);
    const auto words = lex.words();
    std::uniform_real_distribution<double> score(-9.0, -0.5);
    std::vector<double> own(n);
    for (auto& x : own) x = score(rng);
    for (int c = 0; c < copies; ++c) {
        const RegionId cont = "c" + std::to_string(c);
        nodes.push_back({cont, "Continent " + cont, 3, RegionId("earth"), {}});
        priors.priors[cont] = continent_prior;
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t i = 0; i < n; ++i) scores.set(cont, words[perm[i]], own[i]);
        for (const auto& [id, node] : base.nodes()) {
            if (id == base.root()) continue;
            const RegionId nid = cont + "_" + id;
            const RegionId parent = *node.parent == base.root() ? cont : cont + "_" + *node.parent;
            nodes.push_back({nid, "Region " + nid, node.level, parent, {}});
            priors.priors[nid] = prior(rng);
            for (std::size_t i = 0; i < n; ++i) scores.set(nid, words[perm[i]], base_scores.at(id, words[i]));
        }
    }
    return {RegionTree::from_nodes(std::move(nodes)), lex, std::move(scores), std::move(priors)};
}

} // namespace herb::testing
