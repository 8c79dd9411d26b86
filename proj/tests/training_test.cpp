#include "atcnn/training.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "atcnn/data.hpp"

namespace atcnn {
namespace {

Dataset tiny_dataset() {
    SyntheticSpec spec;
    spec.count = 80;
    spec.samples = 120;
    spec.seed = 5;
    spec.distractors = 0;
    return generate_synthetic(spec).data;
}

ArchConfig tiny_arch(int cls) {
    ArchConfig arch;
    arch.channels = 2;
    arch.samples = 120;
    arch.leads = {6, 7};  // where the broad-QRS class expresses itself
    arch.target_class = cls;
    return arch;
}

long dev_count(const Dataset& ds, int cls, bool positive) {
    long n = 0;
    for (const auto& rec : ds.records)
        if (rec.partition == Partition::development &&
            rec.labels[static_cast<std::size_t>(cls)] == positive)
            ++n;
    return n;
}

TEST(BuildSubdataset, KeepsAllNegativesForNormalClass) {
    const auto ds = tiny_dataset();
    const auto split = build_subdataset(ds, 0, 3);
    const long pos = dev_count(ds, 0, true);
    const long neg = dev_count(ds, 0, false);
    ASSERT_GT(neg, 2 * pos);  // the no-undersampling case is actually exercised
    EXPECT_EQ(static_cast<long>(split.train.size() + split.val.size()), pos + neg);
}

TEST(BuildSubdataset, UndersamplesDiseaseNegativesToTwicePositives) {
    const auto ds = tiny_dataset();
    const int cls = 1;
    const auto split = build_subdataset(ds, cls, 3);
    const long pos = dev_count(ds, cls, true);
    ASSERT_GT(dev_count(ds, cls, false), 2 * pos);
    EXPECT_EQ(static_cast<long>(split.train.size() + split.val.size()), 3 * pos);

    long val_pos = 0;
    std::set<int> seen;
    for (int i : split.val) {
        seen.insert(i);
        val_pos += ds.records[static_cast<std::size_t>(i)].labels[cls];
    }
    for (int i : split.train) {
        EXPECT_TRUE(seen.insert(i).second) << "index " << i << " in both sides";
        EXPECT_EQ(ds.records[static_cast<std::size_t>(i)].partition, Partition::development);
    }
    const long train_pos = pos - val_pos;
    EXPECT_EQ(train_pos, static_cast<long>(0.8 * static_cast<double>(pos)));
}

TEST(BuildSubdataset, ExactSplitSizes) {
    // 10 positives and 25 negatives for class 1: keep 20 negatives, then
    // 8 + 16 train and 2 + 4 validation
    Dataset ds;
    for (int i = 0; i < 35; ++i) {
        EcgRecord rec;
        rec.id = "r" + std::to_string(i);
        rec.samples = 4;
        rec.signal.assign(48, 0.0f);
        rec.labels[i < 10 ? 1 : 0] = true;
        ds.records.push_back(std::move(rec));
    }
    const auto split = build_subdataset(ds, 1, 9);
    EXPECT_EQ(split.train.size(), 24u);
    EXPECT_EQ(split.val.size(), 6u);
}

TEST(BuildSubdataset, DeterministicPerSeed) {
    const auto ds = tiny_dataset();
    const auto a = build_subdataset(ds, 2, 17);
    const auto b = build_subdataset(ds, 2, 17);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.val, b.val);
    const auto c = build_subdataset(ds, 2, 18);
    EXPECT_TRUE(a.train != c.train || a.val != c.val);
}

TEST(BuildSubdataset, RejectsImpossibleSplits) {
    Dataset ds;  // one positive, one negative: no room for a validation side
    for (int i = 0; i < 2; ++i) {
        EcgRecord rec;
        rec.id = "r" + std::to_string(i);
        rec.samples = 4;
        rec.signal.assign(48, 0.0f);
        rec.labels[i] = true;
        ds.records.push_back(std::move(rec));
    }
    EXPECT_THROW(build_subdataset(ds, 1, 1), std::runtime_error);
    EXPECT_THROW(build_subdataset(ds, 4, 1), std::runtime_error);  // no positives at all
    EXPECT_THROW(build_subdataset(ds, -1, 1), std::invalid_argument);
}

TEST(TrainBinary, LearnsSeparableClass) {
    const auto ds = tiny_dataset();
    TrainConfig cfg;
    cfg.seed = 21;
    cfg.lr = 3e-3;
    cfg.max_epochs = 15;
    cfg.patience = 15;
    const auto res = train_binary(ds, tiny_arch(1), cfg);

    ASSERT_GE(res.log.size(), 2u);
    double best = res.log[0].val_loss;
    for (const auto& e : res.log) best = std::min(best, e.val_loss);
    EXPECT_LT(best, res.log[0].val_loss);
    EXPECT_EQ(res.best_value, best);
    for (const auto& e : res.log) {
        EXPECT_TRUE(std::isfinite(e.train_loss));
        EXPECT_TRUE(std::isfinite(e.val_loss));
    }
}

TEST(TrainBinary, RestoresTheBestEpochSnapshot) {
    const auto ds = tiny_dataset();
    TrainConfig cfg;
    cfg.seed = 23;
    cfg.lr = 3e-3;
    cfg.max_epochs = 8;
    cfg.patience = 8;
    const auto res = train_binary(ds, tiny_arch(1), cfg);
    const auto val = evaluate_binary(res.model, ds, res.split.val);
    EXPECT_NEAR(val.mean_loss, res.best_value, 1e-12);
    EXPECT_NEAR(val.mean_loss, res.log[static_cast<std::size_t>(res.best_epoch - 1)].val_loss,
                1e-12);
}

TEST(TrainBinary, DeterministicGivenSeed) {
    const auto ds = tiny_dataset();
    TrainConfig cfg;
    cfg.seed = 29;
    cfg.lr = 1e-3;
    cfg.max_epochs = 4;
    cfg.patience = 4;
    const auto a = train_binary(ds, tiny_arch(2), cfg);
    const auto b = train_binary(ds, tiny_arch(2), cfg);
    const auto pa = a.model.params(), pb = b.model.params();
    ASSERT_EQ(pa.size(), pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->values, pb[i]->values);
    ASSERT_EQ(a.log.size(), b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i)
        EXPECT_EQ(a.log[i].train_loss, b.log[i].train_loss);

    cfg.seed = 30;
    const auto c = train_binary(ds, tiny_arch(2), cfg);
    bool any_diff = false;
    const auto pc = c.model.params();
    for (std::size_t i = 0; i < pa.size(); ++i)
        if (pa[i]->values != pc[i]->values) any_diff = true;
    EXPECT_TRUE(any_diff);
}

// with a zero learning rate nothing improves after the first epoch, so the
// run must stop exactly when patience is exhausted
TEST(TrainBinary, StopsAtThePatienceBoundary) {
    const auto ds = tiny_dataset();
    TrainConfig cfg;
    cfg.seed = 31;
    cfg.lr = 0.0;
    cfg.max_epochs = 50;
    cfg.patience = 4;
    const auto res = train_binary(ds, tiny_arch(1), cfg);
    EXPECT_EQ(res.log.size(), 5u);  // epoch 1 improves, then patience more epochs
    EXPECT_EQ(res.best_epoch, 1);
    EXPECT_EQ(res.best_value, res.log[0].val_loss);
}

TEST(TrainBinary, ReportsDivergence) {
    const auto ds = tiny_dataset();
    TrainConfig cfg;
    cfg.seed = 37;
    cfg.lr = 1e300;
    cfg.max_epochs = 4;
    cfg.patience = 4;
    EXPECT_THROW(train_binary(ds, tiny_arch(1), cfg), std::runtime_error);
}

TEST(TrainBinary, CanStopOnValidationF1) {
    const auto ds = tiny_dataset();
    TrainConfig cfg;
    cfg.seed = 41;
    cfg.lr = 3e-3;
    cfg.max_epochs = 6;
    cfg.patience = 6;
    cfg.stop_metric = TrainConfig::StopMetric::val_f1;
    const auto res = train_binary(ds, tiny_arch(1), cfg);
    double best = 0.0;
    for (const auto& e : res.log) best = std::max(best, e.val_f1);
    EXPECT_EQ(res.best_value, best);
    EXPECT_EQ(res.log[static_cast<std::size_t>(res.best_epoch - 1)].val_f1, best);
}

}  // namespace
}  // namespace atcnn
