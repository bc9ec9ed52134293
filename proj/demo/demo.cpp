// Scores a small fixture directory (tree.tsv, lexicon.txt, scores.tsv,
// priors.tsv) with both hierarchical variants and prints the tables.

#include <filesystem>
#include <iostream>

#include "herb/herb.hpp"

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: herb_demo FIXTURE_DIR\n";
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    try {
        const auto tree = herb::load_region_tree(dir / "tree.tsv");
        const auto lex = herb::load_lexicon(dir / "lexicon.txt");
        const auto scores = herb::ingest_scores(dir / "scores.tsv", lex, tree);
        const auto priors = herb::load_priors(dir / "priors.tsv", tree);

        herb::ModelReports model{scores.model_id(), {}};
        for (auto v : {herb::Variant::cw, herb::Variant::cz, herb::Variant::plain})
            model.reports.push_back(herb::compute_report(tree, scores, lex, &priors, v));
        std::cout << herb::overall_table({model}, herb::default_columns(tree), true).to_tsv();

        herb::HerbEvaluator eval(tree, scores, lex, &priors);
        std::cout << "\nper-country Cw:\n";
        for (const auto& id : tree.ids_at_level(herb::level::country))
            std::cout << "  " << id << '\t' << herb::io::format_fixed(eval.bias(id, herb::Variant::cw), 6) << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
