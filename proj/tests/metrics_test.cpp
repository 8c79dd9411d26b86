#include "atcnn/metrics.hpp"

#include <gtest/gtest.h>

#include "atcnn/rng.hpp"

namespace atcnn {
namespace {

TEST(DeriveMetrics, ConfusionCountFixtures) {
    // hand-checked against the definitions with exact rational arithmetic
    const auto a = derive_metrics({811, 93, 172, 1027});
    EXPECT_NEAR(a.recall, 0.8971238938053098, 1e-12);
    EXPECT_NEAR(a.precision, 0.8250254323499492, 1e-12);
    EXPECT_NEAR(a.specificity, 0.8565471226021685, 1e-12);
    EXPECT_NEAR(a.accuracy, 0.8739895387541607, 1e-12);
    EXPECT_NEAR(a.f1, 0.8595654478007420, 1e-12);

    const auto b = derive_metrics({367, 86, 131, 1519});
    EXPECT_NEAR(b.recall, 0.8101545253863135, 1e-12);
    EXPECT_NEAR(b.precision, 0.7369477911646586, 1e-12);
    EXPECT_NEAR(b.specificity, 0.9206060606060606, 1e-12);
    EXPECT_NEAR(b.accuracy, 0.8968140751307656, 1e-12);
    EXPECT_NEAR(b.f1, 0.7718191377497371, 1e-12);
    EXPECT_TRUE(b.recall_defined && b.precision_defined && b.specificity_defined &&
                b.accuracy_defined && b.f1_defined);
}

TEST(DeriveMetrics, FlagsUndefinedRatios) {
    const auto none = derive_metrics({0, 0, 0, 0});
    EXPECT_FALSE(none.recall_defined);
    EXPECT_FALSE(none.precision_defined);
    EXPECT_FALSE(none.specificity_defined);
    EXPECT_FALSE(none.accuracy_defined);
    EXPECT_FALSE(none.f1_defined);
    EXPECT_EQ(none.f1, 0.0);

    // no actual positives: recall and F1 undefined, the rest fine
    const auto no_pos = derive_metrics({0, 0, 5, 10});
    EXPECT_FALSE(no_pos.recall_defined);
    EXPECT_TRUE(no_pos.precision_defined);
    EXPECT_EQ(no_pos.precision, 0.0);
    EXPECT_TRUE(no_pos.specificity_defined);
    EXPECT_FALSE(no_pos.f1_defined);

    // predictions never fire: precision undefined
    const auto silent = derive_metrics({0, 7, 0, 10});
    EXPECT_FALSE(silent.precision_defined);
    EXPECT_TRUE(silent.recall_defined);
    EXPECT_EQ(silent.recall, 0.0);
}

TEST(DeriveMetrics, CountConfusionMatchesByHand) {
    const std::vector<bool> pred = {true, true, false, false, true};
    const std::vector<bool> truth = {true, false, true, false, true};
    const auto c = count_confusion(pred, truth);
    EXPECT_EQ(c.tp, 2);
    EXPECT_EQ(c.fp, 1);
    EXPECT_EQ(c.fn, 1);
    EXPECT_EQ(c.tn, 1);
    EXPECT_THROW(count_confusion(pred, {true}), std::invalid_argument);
}

TEST(ExactMatch, CountsFullyCorrectRecords) {
    using L = std::array<bool, kNumClasses>;
    const std::vector<L> truth = {L{true, false, false, false, false},
                                  L{false, true, false, true, false},
                                  L{false, false, true, false, false}};
    std::vector<L> pred = truth;
    pred[2][4] = true;  // one stray label on the third record
    EXPECT_NEAR(exact_match(pred, truth), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(exact_match(truth, truth), 1.0, 1e-12);
    EXPECT_THROW(exact_match({}, {}), std::invalid_argument);
}

TEST(MacroF1, AveragesAcrossClasses) {
    std::array<ClassMetrics, kNumClasses> per_class{};
    for (int c = 0; c < kNumClasses; ++c) {
        per_class[static_cast<std::size_t>(c)].f1 = 0.1 * (c + 1);
        per_class[static_cast<std::size_t>(c)].f1_defined = true;
    }
    EXPECT_NEAR(macro_f1(per_class), 0.3, 1e-12);
}

TEST(Roc, KnownFourPointExample) {
    const auto roc = roc_curve({0.1f, 0.4f, 0.35f, 0.8f}, {0, 0, 1, 1});
    EXPECT_NEAR(roc.auc, 0.75, 1e-12);
    ASSERT_GE(roc.points.size(), 2u);
    EXPECT_EQ(roc.points.front().fpr, 0.0);
    EXPECT_EQ(roc.points.front().tpr, 0.0);
    EXPECT_EQ(roc.points.back().fpr, 1.0);
    EXPECT_EQ(roc.points.back().tpr, 1.0);
}

TEST(Roc, AllScoresTiedGivesHalf) {
    const auto roc = roc_curve({0.5f, 0.5f, 0.5f, 0.5f}, {0, 1, 0, 1});
    EXPECT_NEAR(roc.auc, 0.5, 1e-12);
}

TEST(Roc, PerfectAndInvertedSeparation) {
    EXPECT_NEAR(roc_curve({0.1f, 0.2f, 0.8f, 0.9f}, {0, 0, 1, 1}).auc, 1.0, 1e-12);
    EXPECT_NEAR(roc_curve({0.9f, 0.8f, 0.2f, 0.1f}, {0, 0, 1, 1}).auc, 0.0, 1e-12);
}

// trapezoid area must agree with the rank statistic: the fraction of
// positive/negative pairs ranked correctly, ties counting half
TEST(Roc, MatchesPairCountingOnRandomInputs) {
    Rng rng(97);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(40));
        std::vector<float> scores;
        std::vector<int> labels;
        int pos = 0;
        for (int i = 0; i < n; ++i) {
            // coarse grid so ties actually happen
            scores.push_back(static_cast<float>(rng.uniform_int(8)) / 8.0f);
            labels.push_back(rng.uniform() < 0.5 ? 1 : 0);
            pos += labels.back();
        }
        if (pos == 0 || pos == n) {
            EXPECT_THROW(roc_curve(scores, labels), std::invalid_argument);
            continue;
        }
        double pairs = 0.0, correct = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (!(labels[i] == 1 && labels[j] == 0)) continue;
                pairs += 1.0;
                if (scores[i] > scores[j])
                    correct += 1.0;
                else if (scores[i] == scores[j])
                    correct += 0.5;
            }
        EXPECT_NEAR(roc_curve(scores, labels).auc, correct / pairs, 1e-12) << "trial " << trial;
    }
}

TEST(Roc, RejectsDegenerateInputs) {
    EXPECT_THROW(roc_curve({0.5f, 0.6f}, {1, 1}), std::invalid_argument);
    EXPECT_THROW(roc_curve({0.5f, 0.6f}, {0, 0}), std::invalid_argument);
    EXPECT_THROW(roc_curve({0.5f}, {0, 1}), std::invalid_argument);
    EXPECT_THROW(roc_curve({0.5f, 0.6f}, {0, 2}), std::invalid_argument);
}

}  // namespace
}  // namespace atcnn
