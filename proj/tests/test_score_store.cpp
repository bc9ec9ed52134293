#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"

namespace {

using namespace herb;
using herb::testing::source_path;

const char* tree_text = "id\tname\tlevel\tparent\n"
                        "earth\tEarth\t3\t\n"
                        "europe\tEurope\t2\tearth\n"
                        "france\tFrance\t1\teurope\n"
                        "germany\tGermany\t1\teurope\n";

const char* lexicon_text = "name: mini\n[occupation]\nnurse\ncaptain\n[appearance]\nbald\nslim\n";

std::string score_file() {
    std::string s = "model_id\tregion_id\tword\tscore\n";
    double x = -1.0;
    for (const char* r : {"europe", "france", "germany"})
        for (const char* w : {"nurse", "captain", "bald", "slim"}) {
            s += std::string("m1\t") + r + "\t" + w + "\t" + io::format_exact(x) + "\n";
            x -= 0.25;
        }
    return s;
}

struct Fixture {
    RegionTree tree = parse_region_tree(tree_text);
    Lexicon lex = parse_lexicon(lexicon_text);

    ScoreMatrix parse(const std::string& text) const {
        return parse_scores(text, "<scores>", lex.vocabulary(), lex.name(), tree);
    }
};

TEST(Ingest, CompleteFixture) {
    Fixture f;
    const auto m = f.parse(score_file());
    EXPECT_EQ(m.entry_count(), 12u);
    EXPECT_EQ(m.coverage(), (std::set<RegionId>{"europe", "france", "germany"}));
    EXPECT_EQ(m.model_id(), "m1");
    EXPECT_EQ(m.lexicon_name(), "mini");
    EXPECT_DOUBLE_EQ(m.at("europe", "nurse"), -1.0);
}

TEST(Ingest, MissingRowNamesThePair) {
    Fixture f;
    auto text = score_file();
    const auto pos = text.find("m1\tgermany\tbald");
    text.erase(pos, text.find('\n', pos) - pos + 1);
    try {
        (void)f.parse(text);
        FAIL() << "expected a completeness error";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("(germany, bald)"), std::string::npos) << e.what();
    }
}

TEST(Ingest, RejectsUnknownRegionWordAndBadValues) {
    Fixture f;
    EXPECT_THROW((void)f.parse(score_file() + "m1\tspain\tnurse\t-1.0\n"), ValidationError);
    EXPECT_THROW((void)f.parse(score_file() + "m1\tfrance\tpilot\t-1.0\n"), ValidationError);
    EXPECT_THROW((void)f.parse(score_file() + "m1\tfrance\tnurse\tnan\n"), ValidationError);
    EXPECT_THROW((void)f.parse(score_file() + "m1\tfrance\tnurse\tinf\n"), ValidationError);
    EXPECT_THROW((void)f.parse(score_file() + "m1\tfrance\tnurse\tabc\n"), ValidationError);
    EXPECT_THROW((void)f.parse(score_file() + "m2\tfrance\tnurse\t-1.0\n"), ValidationError);
}

TEST(Ingest, DuplicateRowLastWinsWithWarning) {
    Fixture f;
    const auto m = f.parse(score_file() + "m1\tfrance\tnurse\t-9.5\n");
    EXPECT_DOUBLE_EQ(m.at("france", "nurse"), -9.5);
    ASSERT_FALSE(m.warnings().empty());
    EXPECT_NE(m.warnings()[0].find("duplicate"), std::string::npos);
}

TEST(Ingest, RowOrderDoesNotChangeVectors) {
    Fixture f;
    const auto text = score_file();
    std::vector<std::string> lines;
    std::size_t start = text.find('\n') + 1;
    while (start < text.size()) {
        const auto end = text.find('\n', start);
        lines.push_back(text.substr(start, end - start + 1));
        start = end + 1;
    }
    std::mt19937_64 rng(7);
    std::shuffle(lines.begin(), lines.end(), rng);
    std::string shuffled = "model_id\tregion_id\tword\tscore\n";
    for (const auto& l : lines) shuffled += l;
    const auto a = f.parse(text);
    const auto b = f.parse(shuffled);
    for (const auto& r : {"europe", "france", "germany"})
        EXPECT_EQ(descriptive_vector(a, f.lex, r).values, descriptive_vector(b, f.lex, r).values);
}

TEST(Priors, ParseAndLookup) {
    Fixture f;
    const auto p = parse_priors("model_id\tregion_id\tscore\nm1\tfrance\t-5.5\nm1\tgermany\t-6\n", "<p>", f.tree);
    EXPECT_EQ(p.model_id, "m1");
    EXPECT_DOUBLE_EQ(p.at("germany"), -6.0);
    EXPECT_THROW((void)p.at("europe"), ValidationError);
    EXPECT_THROW((void)parse_priors("model_id\tregion_id\tscore\nm1\tmars\t-5\n", "<p>", f.tree), ValidationError);
}

ScoreMatrix one_region(const std::vector<double>& raw, Lexicon& lex) {
    std::vector<std::pair<Topic, std::string>> words;
    for (std::size_t i = 0; i < raw.size(); ++i) words.emplace_back(Topic::occupation, "w" + std::to_string(i));
    lex = Lexicon::from_words("t", LexiconKind::standard, words);
    ScoreMatrix m("m", "t");
    for (std::size_t i = 0; i < raw.size(); ++i) m.set("r", "w" + std::to_string(i), raw[i]);
    return m;
}

TEST(DescriptiveVector, ThreeFourFive) {
    Lexicon lex;
    const auto m = one_region({-3.0, -4.0}, lex);
    const auto v = descriptive_vector(m, lex, "r").values;
    EXPECT_NEAR(v[0], -0.6, 1e-15);
    EXPECT_NEAR(v[1], -0.8, 1e-15);
}

TEST(DescriptiveVector, Symmetric) {
    Lexicon lex;
    const auto m = one_region({-1.0, -1.0, -1.0, -1.0}, lex);
    for (double x : descriptive_vector(m, lex, "r").values) EXPECT_NEAR(x, -0.5, 1e-15);
}

TEST(DescriptiveVector, NormThree) {
    Lexicon lex;
    const auto m = one_region({-2.0, -1.0, -2.0}, lex);
    const auto v = descriptive_vector(m, lex, "r").values;
    EXPECT_NEAR(v[0], -2.0 / 3.0, 1e-15);
    EXPECT_NEAR(v[1], -1.0 / 3.0, 1e-15);
    EXPECT_NEAR(v[2], -2.0 / 3.0, 1e-15);
}

TEST(DescriptiveVector, ZeroVectorIsAnError) {
    Lexicon lex;
    const auto m = one_region({0.0, 0.0}, lex);
    EXPECT_THROW((void)descriptive_vector(m, lex, "r"), ValidationError);
}

TEST(DescriptiveVector, ScaleInvariant) {
    Lexicon lex;
    const auto m = one_region({-2.5, -0.75, -4.0, -1.0}, lex);
    const auto base = descriptive_vector(m, lex, "r").values;
    for (double k : {0.001, 0.5, 3.0, 1e4}) {
        const auto v = descriptive_vector(m.scaled(k), lex, "r").values;
        for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], base[i], 1e-12);
    }
}

TEST(DescriptiveVector, UncoveredRegion) {
    Fixture f;
    const auto m = f.parse(score_file());
    EXPECT_THROW((void)descriptive_vector(m, f.lex, "earth"), ValidationError);
}

TEST(LikelihoodGrid, PassesThroughRawScores) {
    Fixture f;
    const auto m = f.parse(score_file());
    const auto grid = likelihood_grid(m, f.lex, "bald");
    ASSERT_EQ(grid.size(), 3u);
    for (const auto& [r, v] : grid) EXPECT_EQ(v, m.at(r, "bald"));
    EXPECT_THROW((void)likelihood_grid(m, f.lex, "pilot"), ValidationError);
}

TEST(LikelihoodGrid, ConstantScoresGiveConstantMap) {
    Fixture f;
    std::string s = "model_id\tregion_id\tword\tscore\n";
    for (const char* r : {"europe", "france", "germany"})
        for (const char* w : {"nurse", "captain", "bald", "slim"}) s += std::string("m1\t") + r + "\t" + w + "\t-2.5\n";
    for (const auto& [r, v] : likelihood_grid(f.parse(s), f.lex, "slim")) EXPECT_EQ(v, -2.5);
}

TEST(Ingest, FullWorldRunCoversEveryRegion) {
    const auto tree = load_region_tree(source_path("data/regions_world.tsv"));
    const auto lex = load_lexicon(source_path("data/lexicon_full.txt"));
    std::string s = "model_id\tregion_id\tword\tscore\n";
    std::size_t rows = 0;
    for (const auto& r : tree.scoreable_regions())
        for (const auto& w : lex.words()) {
            s += "m\t" + r + "\t" + w + "\t-3.000000000000\n";
            ++rows;
        }
    // 109 regions x 112 entries; "strong" and "weak" repeat across topics.
    EXPECT_EQ(rows, 12208u);
    const auto m = parse_scores(s, "<world>", lex.vocabulary(), lex.name(), tree);
    EXPECT_EQ(m.coverage().size(), 109u);
    EXPECT_EQ(m.entry_count(), 109u * lex.vocabulary().size());
}

} // namespace
