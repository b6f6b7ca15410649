#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hcsa/metrics.hpp"

using namespace hcsa;
using namespace hcsa::metrics;

namespace {

SimilarityOracle fixture_taxonomy() {
    return SimilarityOracle::taxonomy_from_file(std::string(HCSA_ASSETS_DIR) + "/taxonomy.tsv");
}

using Words = std::vector<std::string>;

}  // namespace

TEST(Tokenize, LowercasesStripsPunctuationSplitsWhitespace) {
    EXPECT_EQ(tokenize("Red, Blue!"), (Words{"red", "blue"}));
    EXPECT_EQ(tokenize("  running   (fast)  "), (Words{"running", "fast"}));
    EXPECT_TRUE(tokenize(" ... ").empty());
}

TEST(WupSimilarity, IdentityIsOneInEveryMode) {
    EXPECT_DOUBLE_EQ(wup_similarity("red", "red", SimilarityOracle::exact()), 1.0);
    EXPECT_DOUBLE_EQ(wup_similarity("red", "red", fixture_taxonomy()), 1.0);
    // identity holds even for out-of-taxonomy words
    EXPECT_DOUBLE_EQ(wup_similarity("zzz", "zzz", fixture_taxonomy()), 1.0);
}

TEST(WupSimilarity, ExactModeIsZeroOnMismatch) {
    EXPECT_DOUBLE_EQ(wup_similarity("red", "blue", SimilarityOracle::exact()), 0.0);
}

TEST(WupSimilarity, FixtureDogCatIsTwoThirds) {
    // entity(1) -> animal(2) -> dog/cat(3): 2·2 / (3+3)
    SimilarityOracle oracle = fixture_taxonomy();
    EXPECT_NEAR(oracle.similarity("dog", "cat"), 2.0 / 3.0, 1e-15);
}

TEST(WupSimilarity, SymmetricAndBounded) {
    SimilarityOracle oracle = fixture_taxonomy();
    const Words words = {"dog", "cat", "red", "blue", "run", "apple", "zzz", "entity"};
    for (const auto& a : words) {
        for (const auto& b : words) {
            const double s = oracle.similarity(a, b);
            EXPECT_DOUBLE_EQ(s, oracle.similarity(b, a));
            EXPECT_GE(s, 0.0);
            EXPECT_LE(s, 1.0);
        }
    }
}

TEST(WupSimilarity, OutOfTaxonomyScoresZero) {
    EXPECT_DOUBLE_EQ(fixture_taxonomy().similarity("dog", "zzz"), 0.0);
}

TEST(WupSimilarity, SynonymTable) {
    SimilarityOracle oracle =
        SimilarityOracle::synonyms_from_file(std::string(HCSA_ASSETS_DIR) + "/synonyms.tsv");
    EXPECT_DOUBLE_EQ(oracle.similarity("sofa", "couch"), 1.0);
    EXPECT_DOUBLE_EQ(oracle.similarity("couch", "sofa"), 1.0);
    EXPECT_DOUBLE_EQ(oracle.similarity("sofa", "chair"), 0.0);
}

TEST(WupSimilarity, MalformedTaxonomyFilesThrow) {
    EXPECT_THROW(SimilarityOracle::taxonomy_from_file("/no/such/file.tsv"), InputError);
    EXPECT_THROW(SimilarityOracle::with_taxonomy({{"a", "b"}, {"b", "a"}}), DataError);  // cycle
}

TEST(WupGamma, ThresholdingFormula) {
    // shallow pair at similarity 0.5: root(1) -> a(2), b(2)
    SimilarityOracle half = SimilarityOracle::with_taxonomy(
        {{"root", "root"}, {"a", "root"}, {"b", "root"}});
    EXPECT_NEAR(half.similarity("a", "b"), 0.5, 1e-15);
    EXPECT_NEAR(wup_gamma("a", "b", 0.9, half), 0.05, 1e-15);  // below threshold: 0.1·s
    EXPECT_NEAR(wup_gamma("a", "b", 0.0, half), 0.5, 1e-15);   // γ=0 always passes
    EXPECT_NEAR(wup_gamma("a", "b", 0.5, half), 0.5, 1e-15);   // equality passes

    // deep pair above 0.9 passes untouched: chain of 20 under a root
    std::vector<std::pair<std::string, std::string>> chain = {{"n0", "n0"}};
    for (int i = 1; i < 21; ++i) {
        chain.emplace_back("n" + std::to_string(i), "n" + std::to_string(i - 1));
    }
    chain.emplace_back("leaf", "n20");
    SimilarityOracle deep = SimilarityOracle::with_taxonomy(chain);
    const double s = deep.similarity("n20", "leaf");  // 2·21/(21+22) ≈ 0.977
    EXPECT_GT(s, 0.9);
    EXPECT_DOUBLE_EQ(wup_gamma("n20", "leaf", 0.9, deep), s);

    EXPECT_THROW(wup_gamma("a", "b", 1.5, half), ConfigError);
}

TEST(WupGamma, MonotoneInUnderlyingSimilarity) {
    SimilarityOracle oracle = fixture_taxonomy();
    // similarities: dog/zzz = 0 < dog/red < dog/cat < dog/dog = 1
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"dog", "zzz"}, {"dog", "red"}, {"dog", "cat"}, {"dog", "dog"}};
    for (double gamma : {0.0, 0.5, 0.9}) {
        double prev_sim = -1.0, prev_score = -1.0;
        for (const auto& [a, b] : pairs) {
            const double sim = oracle.similarity(a, b);
            const double score = wup_gamma(a, b, gamma, oracle);
            ASSERT_GE(sim, prev_sim);
            EXPECT_GE(score, prev_score);
            prev_sim = sim;
            prev_score = score;
        }
    }
}

TEST(Wups, IdenticalCorpusScoresOne) {
    const std::vector<Words> answers = {{"dog"}, {"red", "car"}, {"three"}};
    EXPECT_DOUBLE_EQ(wups(answers, answers, 0.9, SimilarityOracle::exact()), 1.0);
    EXPECT_DOUBLE_EQ(wups(answers, answers, 0.0, SimilarityOracle::exact()), 1.0);
}

TEST(Wups, DisjointSingleWordsScoreZeroUnderExactOracle) {
    const std::vector<Words> pred = {{"dog"}, {"red"}};
    const std::vector<Words> refs = {{"cat"}, {"blue"}};
    EXPECT_DOUBLE_EQ(wups(pred, refs, 0.0, SimilarityOracle::exact()), 0.0);
    EXPECT_DOUBLE_EQ(wups(pred, refs, 0.9, SimilarityOracle::exact()), 0.0);
}

TEST(Wups, DogCatFixtureGoldens) {
    SimilarityOracle oracle = fixture_taxonomy();
    const std::vector<Words> pred = {{"dog"}};
    const std::vector<Words> refs = {{"cat"}};
    EXPECT_NEAR(wups(pred, refs, 0.0, oracle), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(wups(pred, refs, 0.9, oracle), 0.1 * (2.0 / 3.0), 1e-12);  // ≈ 0.0667
}

TEST(Wups, PerSideNormalizationForUnequalLengths) {
    // pred {a b}, ref {a}: ref side mean = 1, pred side mean = (1+0)/2
    const double score =
        wups({{"a", "b"}}, {{"a"}}, 0.0, SimilarityOracle::exact());
    EXPECT_NEAR(score, 0.5, 1e-15);
}

TEST(Wups, SymmetricUnderSwapForEqualLengths) {
    SimilarityOracle oracle = fixture_taxonomy();
    const std::vector<Words> a = {{"dog", "red"}, {"cat", "blue"}};
    const std::vector<Words> b = {{"cat", "blue"}, {"dog", "red"}};
    // swap prediction/reference pair by pair
    EXPECT_DOUBLE_EQ(wups(a, b, 0.9, oracle), wups(b, a, 0.9, oracle));
}

TEST(Wups, ThresholdingNeverIncreasesScore) {
    SimilarityOracle oracle = fixture_taxonomy();
    std::mt19937_64 rng(4);
    const Words pool = {"dog", "cat", "bird", "red", "blue", "run", "apple", "zzz"};
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<Words> pred, refs;
        const std::size_t count = 1 + rng() % 5;
        for (std::size_t i = 0; i < count; ++i) {
            pred.push_back({pool[rng() % pool.size()], pool[rng() % pool.size()]});
            refs.push_back({pool[rng() % pool.size()]});
        }
        const double w0 = wups(pred, refs, 0.0, oracle);
        const double w9 = wups(pred, refs, 0.9, oracle);
        EXPECT_LE(w9, w0 + 1e-15);
        EXPECT_GE(w9, 0.0);
        EXPECT_LE(w0, 1.0);
    }
}

TEST(Wups, EmptyAnswerScoresZero) {
    const double score = wups({{}, {"dog"}}, {{"dog"}, {"dog"}}, 0.0, SimilarityOracle::exact());
    EXPECT_DOUBLE_EQ(score, 0.5);  // first question 0, second 1
}

TEST(Bleu1, IdenticalSingleWords) {
    EXPECT_DOUBLE_EQ(bleu1_sentence({"red"}, {"red"}), 1.0);
}

TEST(Bleu1, LongPredictionHalvesPrecision) {
    // precision 1/2, BP = 1 since prediction is longer
    EXPECT_DOUBLE_EQ(bleu1_sentence({"red", "blue"}, {"red"}), 0.5);
}

TEST(Bleu1, ShortPredictionBrevityPenalty) {
    // precision 1, BP = exp(1 − 2) ≈ 0.3679
    EXPECT_NEAR(bleu1_sentence({"red"}, {"red", "blue"}), std::exp(-1.0), 1e-12);
}

TEST(Bleu1, ClippedCounts) {
    // "red red" vs "red": only one match counts, precision 1/2, BP 1
    EXPECT_DOUBLE_EQ(bleu1_sentence({"red", "red"}, {"red"}), 0.5);
}

TEST(Bleu1, EmptyCases) {
    EXPECT_DOUBLE_EQ(bleu1_sentence({}, {"red"}), 0.0);
    EXPECT_THROW(bleu1_sentence({"red"}, {}), InputError);
}

TEST(Evaluate, IdentityCorpusAllOnes) {
    std::vector<EvalItem> items = {{"q1", "dog", "dog", "object"},
                                   {"q2", "red", "red", "color"},
                                   {"q3", "two", "two", "number"}};
    EvalReport report = evaluate(items, SimilarityOracle::exact());
    EXPECT_DOUBLE_EQ(report.bleu1, 1.0);
    EXPECT_DOUBLE_EQ(report.wups_0, 1.0);
    EXPECT_DOUBLE_EQ(report.wups_9, 1.0);
    EXPECT_EQ(report.sample_count, 3u);
    std::size_t total = 0;
    for (const auto& [type, scores] : report.by_type) total += scores.count;
    EXPECT_EQ(total, report.sample_count);
    EXPECT_EQ(report.by_type.at("color").count, 1u);
}

TEST(Evaluate, ScoresLieInUnitInterval) {
    std::vector<EvalItem> items = {{"q1", "dog", "cat", "object"},
                                   {"q2", "red blue", "red", "color"}};
    EvalReport report = evaluate(items, fixture_taxonomy());
    for (double v : {report.bleu1, report.wups_0, report.wups_9}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    EXPECT_LE(report.wups_9, report.wups_0);
}
