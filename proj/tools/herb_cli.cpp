// herb: hierarchical regional bias evaluation from likelihood score files.
//
// Exit codes: 0 success, 2 validation error, 3 I/O error.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "herb/herb.hpp"

namespace {

using namespace herb;

constexpr int exit_validation = 2;
constexpr int exit_io = 3;

void print_warnings(const Warnings& w) {
    for (const auto& msg : w) std::cerr << "warning: " << msg << '\n';
}

void write_outputs(const std::string& out, const std::string& text, const std::string& json_path, const json& j) {
    io::write_atomic(out, text);
    if (!json_path.empty()) io::write_atomic(json_path, j.dump(2) + "\n");
}

std::set<int> parse_levels(const std::string& spec) {
    std::set<int> out;
    if (io::trim(spec).empty()) return out;
    for (const auto& item : io::split(spec, ',')) out.insert(parse_level(io::trim(item)));
    return out;
}

struct Inputs {
    RegionTree tree;
    Lexicon lexicon;
};

Inputs load_inputs(const std::string& tree_path, const std::string& lexicon_path) {
    Inputs in{load_region_tree(tree_path), load_lexicon(lexicon_path)};
    print_warnings(in.lexicon.warnings());
    return in;
}

ScoreMatrix load_scores(const std::string& path, const std::set<std::string>& vocab, const std::string& lexicon_name,
                        const RegionTree& tree) {
    auto m = ingest_scores(path, vocab, lexicon_name, tree);
    print_warnings(m.warnings());
    return m;
}

std::optional<RegionPriors> maybe_priors(const std::string& path, const RegionTree& tree) {
    if (path.empty()) return std::nullopt;
    return load_priors(path, tree);
}

// Options shared by the table-producing commands.
struct TableOptions {
    std::string out;
    std::string json_path;
    std::string columns;
    bool scale = true;

    void attach(CLI::App* cmd) {
        cmd->add_option("--out", out, "Delimited text output")->required();
        cmd->add_option("--json", json_path, "Machine-readable JSON output (raw values)");
        cmd->add_option("--columns", columns, "Continent columns as id[:label],... (default: root children)");
        cmd->add_flag("--scale-1e3,!--no-scale-1e3", scale, "Present table values multiplied by 1e3 (default on)");
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical regional bias evaluation for language-model likelihood scores"};
    app.set_config("--config", "", "TOML/INI file whose keys mirror the command-line flags");
    app.require_subcommand(1);

    std::string tree_path, lexicon_path, scores_path, priors_path, variant_name_opt = "cw";

    // gen-prompts
    auto* gen = app.add_subcommand("gen-prompts", "Write template sentences to score");
    std::string gen_out, gen_levels, gen_priors_out, probe_dataset, probe_out;
    gen->add_option("--tree", tree_path)->required()->check(CLI::ExistingFile);
    gen->add_option("--lexicon", lexicon_path)->required()->check(CLI::ExistingFile);
    gen->add_option("--out", gen_out, "Prompt file (region_id, word, sentence)")->required();
    gen->add_option("--level,--levels", gen_levels, "Comma-separated levels to include (default: all below root)");
    gen->add_option("--priors-out", gen_priors_out, "Also write bare region names for prior scoring");
    gen->add_option("--probe-dataset", probe_dataset, "imdb or hatespeech: write downstream prefix strings");
    gen->add_option("--probe-out", probe_out, "Prefix file for --probe-dataset");

    // compute
    auto* compute = app.add_subcommand("compute", "Score one model and emit the continent table");
    TableOptions compute_opts;
    std::string model_label;
    compute->add_option("--tree", tree_path)->required()->check(CLI::ExistingFile);
    compute->add_option("--lexicon", lexicon_path)->required()->check(CLI::ExistingFile);
    compute->add_option("--scores", scores_path)->required()->check(CLI::ExistingFile);
    compute->add_option("--priors", priors_path)->check(CLI::ExistingFile);
    compute->add_option("--variant", variant_name_opt, "cw, cz or plain")->check(CLI::IsMember({"cw", "cz", "plain"}));
    compute->add_option("--model-label", model_label, "Row label (default: model_id from the score file)");
    compute_opts.attach(compute);

    // compare
    auto* compare = app.add_subcommand("compare", "Side-by-side Cw/Cz table for several models");
    TableOptions compare_opts;
    std::vector<std::string> compare_scores, compare_priors;
    compare->add_option("--tree", tree_path)->required()->check(CLI::ExistingFile);
    compare->add_option("--lexicon", lexicon_path)->required()->check(CLI::ExistingFile);
    compare->add_option("--scores", compare_scores, "One score file per model")->required()->check(CLI::ExistingFile);
    compare->add_option("--priors", compare_priors, "Prior files, matched to models by model_id")
        ->check(CLI::ExistingFile);
    compare_opts.attach(compare);

    // ablate
    auto* ablate = app.add_subcommand("ablate", "Topic ablation table");
    TableOptions ablate_opts;
    std::vector<std::string> variant_scores;
    ablate->add_option("--tree", tree_path)->required()->check(CLI::ExistingFile);
    ablate->add_option("--lexicon", lexicon_path)->required()->check(CLI::ExistingFile);
    ablate->add_option("--scores", scores_path, "Full-lexicon scores (rows are reused per variant)")
        ->required()
        ->check(CLI::ExistingFile);
    ablate->add_option("--variant-scores", variant_scores, "Dedicated scores for one variant: wo_<topic>=PATH");
    ablate->add_option("--priors", priors_path)->check(CLI::ExistingFile);
    ablate->add_option("--variant", variant_name_opt)->check(CLI::IsMember({"cw", "cz", "plain"}));
    ablate_opts.attach(ablate);

    // robustness
    auto* robust = app.add_subcommand("robustness", "Topic word-replacement table");
    TableOptions robust_opts;
    std::string substitutes_path;
    robust->add_option("--tree", tree_path)->required()->check(CLI::ExistingFile);
    robust->add_option("--lexicon", lexicon_path)->required()->check(CLI::ExistingFile);
    robust->add_option("--substitutes", substitutes_path)->required()->check(CLI::ExistingFile);
    robust->add_option("--scores", scores_path, "Scores covering original and substitute words")
        ->required()
        ->check(CLI::ExistingFile);
    robust->add_option("--priors", priors_path)->check(CLI::ExistingFile);
    robust->add_option("--variant", variant_name_opt)->check(CLI::IsMember({"cw", "cz", "plain"}));
    robust_opts.attach(robust);

    // choropleth
    auto* choro = app.add_subcommand("choropleth", "Region-keyed values for mapping tools");
    std::string choro_out, choro_json, choro_word, choro_report, choro_level;
    choro->add_option("--tree", tree_path)->required()->check(CLI::ExistingFile);
    choro->add_option("--lexicon", lexicon_path)->check(CLI::ExistingFile);
    choro->add_option("--scores", scores_path)->check(CLI::ExistingFile);
    choro->add_option("--word", choro_word, "Export raw likelihoods of one description word");
    choro->add_option("--report", choro_report, "Export scores from a compute --json report")->check(CLI::ExistingFile);
    choro->add_option("--level", choro_level, "city, country, continent, root or an integer");
    choro->add_option("--out", choro_out)->required();
    choro->add_option("--json", choro_json);

    // top-sentences
    auto* top = app.add_subcommand("top-sentences", "Highest-likelihood template sentences per word");
    std::string top_out, top_json;
    std::size_t top_k = 20;
    top->add_option("--tree", tree_path)->required()->check(CLI::ExistingFile);
    top->add_option("--lexicon", lexicon_path)->required()->check(CLI::ExistingFile);
    top->add_option("--scores", scores_path)->required()->check(CLI::ExistingFile);
    top->add_option("--k", top_k, "Regions kept per word")->check(CLI::PositiveNumber);
    top->add_option("--out", top_out)->required();
    top->add_option("--json", top_json);

    // downstream-stats
    auto* down = app.add_subcommand("downstream-stats", "Prediction-change statistics for prefix probes");
    std::string predictions_path, gold_path, down_out, down_json;
    down->add_option("--predictions", predictions_path)->required()->check(CLI::ExistingFile);
    down->add_option("--gold", gold_path, "Gold labels (sample_id, label) for accuracy and macro-F1")
        ->check(CLI::ExistingFile);
    down->add_option("--out", down_out)->required();
    down->add_option("--json", down_json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation;
    }

    try {
        if (*gen) {
            const auto in = load_inputs(tree_path, lexicon_path);
            const auto levels = parse_levels(gen_levels);
            for (int l : levels)
                if (in.tree.ids_at_level(l).empty())
                    throw ValidationError("no region in the tree has level " + std::to_string(l));
            const auto count = write_prompts(gen_out, in.tree, in.lexicon, levels);
            if (!gen_priors_out.empty()) io::write_atomic(gen_priors_out, format_prior_prompts(in.tree, levels));
            if (!probe_dataset.empty()) {
                if (probe_out.empty()) throw ValidationError("--probe-dataset needs --probe-out");
                const auto d = parse_probe_dataset(probe_dataset);
                std::string text = "region_id\tprefix\n";
                for (const auto& id : in.tree.scoreable_regions()) {
                    const auto& node = in.tree.node(id);
                    if (!levels.empty() && !levels.count(node.level)) continue;
                    text += id + '\t' + probe_prefix(d, node.name) + '\n';
                }
                io::write_atomic(probe_out, text);
            }
            std::cout << count << '\n';
        } else if (*compute) {
            const auto in = load_inputs(tree_path, lexicon_path);
            const auto variant = parse_variant(variant_name_opt);
            const auto scores = load_scores(scores_path, in.lexicon.vocabulary(), in.lexicon.name(), in.tree);
            const auto priors = maybe_priors(priors_path, in.tree);
            const auto rep = compute_report(in.tree, scores, in.lexicon, priors ? &*priors : nullptr, variant);
            print_warnings(rep.warnings);
            const auto columns = parse_columns(compute_opts.columns, in.tree);
            const auto table =
                overall_table({{model_label.empty() ? scores.model_id() : model_label, {rep}}}, columns, compute_opts.scale);
            auto j = report_to_json(rep, in.tree);
            j["table"] = table_to_json(table);
            write_outputs(compute_opts.out, table.to_tsv(), compute_opts.json_path, j);
        } else if (*compare) {
            const auto in = load_inputs(tree_path, lexicon_path);
            std::map<std::string, RegionPriors> priors_by_model;
            for (const auto& p : compare_priors) {
                auto pr = load_priors(p, in.tree);
                priors_by_model[pr.model_id] = std::move(pr);
            }
            std::vector<ModelReports> models;
            json j = json::array();
            for (const auto& path : compare_scores) {
                const auto scores = load_scores(path, in.lexicon.vocabulary(), in.lexicon.name(), in.tree);
                ModelReports mr{scores.model_id(), {}};
                mr.reports.push_back(compute_report(in.tree, scores, in.lexicon, nullptr, Variant::cw));
                if (auto it = priors_by_model.find(scores.model_id()); it != priors_by_model.end())
                    mr.reports.push_back(compute_report(in.tree, scores, in.lexicon, &it->second, Variant::cz));
                else
                    std::cerr << "warning: no priors for model '" << scores.model_id() << "'; Cz row skipped\n";
                for (const auto& r : mr.reports) j.push_back(report_to_json(r, in.tree));
                models.push_back(std::move(mr));
            }
            const auto table = overall_table(models, parse_columns(compare_opts.columns, in.tree), compare_opts.scale);
            write_outputs(compare_opts.out, table.to_tsv(), compare_opts.json_path,
                          json{{"reports", j}, {"table", table_to_json(table)}});
        } else if (*ablate) {
            const auto in = load_inputs(tree_path, lexicon_path);
            const auto variant = parse_variant(variant_name_opt);
            const auto scores = load_scores(scores_path, in.lexicon.vocabulary(), in.lexicon.name(), in.tree);
            const auto priors = maybe_priors(priors_path, in.tree);
            std::map<std::string, ScoreMatrix> dedicated;
            for (const auto& spec : variant_scores) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos) throw ValidationError("--variant-scores expects wo_<topic>=PATH");
                const auto key = spec.substr(0, eq);
                if (key.rfind("wo_", 0) != 0) throw ValidationError("unknown ablation variant '" + key + "'");
                const auto lex = ablate_topic(in.lexicon, parse_topic(key.substr(3)));
                dedicated.emplace(key, load_scores(spec.substr(eq + 1), lex.vocabulary(), lex.name(), in.tree));
            }
            std::map<std::string, const ScoreMatrix*> overrides;
            for (const auto& [k, m] : dedicated) overrides[k] = &m;
            const auto rows =
                ablation_suite(in.tree, in.lexicon, scores, priors ? &*priors : nullptr, variant, overrides);
            const auto table = labeled_table("Description", rows, parse_columns(ablate_opts.columns, in.tree), ablate_opts.scale);
            json reports = json::array();
            for (const auto& r : rows) reports.push_back({{"label", r.label}, {"report", report_to_json(r.report, in.tree)}});
            write_outputs(ablate_opts.out, table.to_tsv(), ablate_opts.json_path,
                          json{{"rows", reports}, {"table", table_to_json(table)}});
        } else if (*robust) {
            const auto in = load_inputs(tree_path, lexicon_path);
            const auto subs = load_lexicon(substitutes_path);
            print_warnings(subs.warnings());
            const auto variant = parse_variant(variant_name_opt);
            auto vocab = in.lexicon.vocabulary();
            const auto sub_vocab = subs.vocabulary();
            vocab.insert(sub_vocab.begin(), sub_vocab.end());
            const auto scores = load_scores(scores_path, vocab, in.lexicon.name(), in.tree);
            const auto priors = maybe_priors(priors_path, in.tree);
            const auto rows = robustness_suite(in.tree, in.lexicon, subs, scores, priors ? &*priors : nullptr, variant);
            const auto table = labeled_table("Description", rows, parse_columns(robust_opts.columns, in.tree), robust_opts.scale);
            json reports = json::array();
            for (const auto& r : rows) reports.push_back({{"label", r.label}, {"report", report_to_json(r.report, in.tree)}});
            write_outputs(robust_opts.out, table.to_tsv(), robust_opts.json_path,
                          json{{"rows", reports}, {"table", table_to_json(table)}});
        } else if (*choro) {
            const auto tree = load_region_tree(tree_path);
            std::optional<int> lvl;
            if (!choro_level.empty()) lvl = parse_level(choro_level);
            std::vector<ChoroplethRow> rows;
            if (!choro_report.empty()) {
                if (!choro_word.empty()) throw ValidationError("use either --report or --word, not both");
                rows = choropleth_rows(tree, load_report_json(choro_report), lvl);
            } else {
                if (choro_word.empty() || scores_path.empty() || lexicon_path.empty())
                    throw ValidationError("choropleth needs --report, or --scores with --lexicon and --word");
                const auto lex = load_lexicon(lexicon_path);
                const auto scores = load_scores(scores_path, lex.vocabulary(), lex.name(), tree);
                rows = choropleth_rows(tree, likelihood_grid(scores, lex, choro_word), lvl);
            }
            write_outputs(choro_out, format_choropleth(rows), choro_json, choropleth_to_json(rows));
        } else if (*top) {
            const auto in = load_inputs(tree_path, lexicon_path);
            const auto scores = load_scores(scores_path, in.lexicon.vocabulary(), in.lexicon.name(), in.tree);
            const auto rows = top_biased_sentences(scores, in.lexicon, in.tree, top_k);
            json j = json::array();
            for (const auto& r : rows)
                j.push_back({{"word", r.task.word},
                             {"rank", r.rank},
                             {"region", r.task.region},
                             {"score", r.score},
                             {"sentence", r.task.sentence}});
            write_outputs(top_out, format_ranked(rows), top_json, j);
            std::cout << rows.size() << '\n';
        } else if (*down) {
            const auto records = load_predictions(predictions_path);
            std::optional<std::map<std::string, std::string>> gold;
            if (!gold_path.empty()) gold = load_gold_labels(gold_path);
            const auto sum = downstream_stats(records, gold ? &*gold : nullptr);
            write_outputs(down_out, downstream_table(sum).to_tsv(), down_json, downstream_to_json(sum));
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    }
    return EXIT_SUCCESS;
}
