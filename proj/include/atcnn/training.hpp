#ifndef ATCNN_TRAINING_HPP
#define ATCNN_TRAINING_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "atcnn/adam.hpp"
#include "atcnn/metrics.hpp"
#include "atcnn/model.hpp"
#include "atcnn/rng.hpp"
#include "atcnn/types.hpp"

namespace atcnn {

struct TrainConfig {
    double lr = 1e-3;
    int batch = 32;
    int max_epochs = 100;
    int patience = 10;           // epochs without strict improvement before stopping
    enum class StopMetric { val_loss, val_f1 } stop_metric = StopMetric::val_loss;
    std::uint64_t seed = 0;
};

struct EpochLog {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_f1 = 0.0;
};
using TrainLog = std::vector<EpochLog>;

// One binary training pool: indices into Dataset::records, development
// partition only. All positives are kept; negatives are subsampled to twice
// the positive count, except for the normal-rhythm class, which trains
// against every abnormal record there is.
struct BinarySplit {
    std::vector<int> train, val;
};

inline BinarySplit build_subdataset(const Dataset& ds, int cls, std::uint64_t seed) {
    if (cls < 0 || cls >= kNumClasses)
        throw std::invalid_argument("build_subdataset: class index out of range");
    std::vector<int> pos, neg;
    for (int i = 0; i < static_cast<int>(ds.records.size()); ++i) {
        const auto& rec = ds.records[static_cast<std::size_t>(i)];
        if (rec.partition != Partition::development) continue;
        (rec.labels[static_cast<std::size_t>(cls)] ? pos : neg).push_back(i);
    }
    const std::string name = kClassNames[static_cast<std::size_t>(cls)];
    if (pos.empty())
        throw std::runtime_error("class " + name + " has no positive development records");
    if (neg.empty())
        throw std::runtime_error("class " + name + " has no negative development records");

    Rng rng(seed);
    rng.shuffle(pos);
    rng.shuffle(neg);
    if (cls != 0 && static_cast<int>(neg.size()) > 2 * static_cast<int>(pos.size()))
        neg.resize(2 * pos.size());

    // 8:2 split within each side so both keep the class balance of the pool
    const auto n_train_pos = static_cast<std::size_t>(0.8 * static_cast<double>(pos.size()));
    const auto n_train_neg = static_cast<std::size_t>(0.8 * static_cast<double>(neg.size()));
    if (n_train_pos == 0 || n_train_pos == pos.size() || n_train_neg == 0 ||
        n_train_neg == neg.size())
        throw std::runtime_error("class " + name + ": too few records to split for validation");

    BinarySplit split;
    split.train.assign(pos.begin(), pos.begin() + static_cast<long>(n_train_pos));
    split.train.insert(split.train.end(), neg.begin(), neg.begin() + static_cast<long>(n_train_neg));
    split.val.assign(pos.begin() + static_cast<long>(n_train_pos), pos.end());
    split.val.insert(split.val.end(), neg.begin() + static_cast<long>(n_train_neg), neg.end());
    return split;
}

inline double bce_value(double p, int y) {
    constexpr double kEps = 1e-7;
    const double ph = std::min(1.0 - kEps, std::max(kEps, p));
    return -(y * std::log(ph) + (1 - y) * std::log(1.0 - ph));
}

struct EvalResult {
    double mean_loss = 0.0;
    double f1 = 0.0;  // 0 when undefined
    bool f1_defined = false;
};

inline EvalResult evaluate_binary(const AtcnnModel& model, const Dataset& ds,
                                  const std::vector<int>& idx, double threshold = 0.5) {
    if (idx.empty()) throw std::invalid_argument("evaluate_binary: no records");
    const int cls = model.config.target_class;
    EvalResult out;
    std::vector<bool> pred, truth;
    double loss = 0.0;
    for (int i : idx) {
        const auto& rec = ds.records[static_cast<std::size_t>(i)];
        const double p = model.forward(rec).p->values[0];
        if (!std::isfinite(p))
            throw std::runtime_error("model produced a non-finite probability on record " + rec.id);
        const int y = rec.labels[static_cast<std::size_t>(cls)] ? 1 : 0;
        loss += bce_value(p, y);
        pred.push_back(p >= threshold);  // a score exactly at threshold counts positive
        truth.push_back(y == 1);
    }
    out.mean_loss = loss / static_cast<double>(idx.size());
    const auto m = derive_metrics(count_confusion(pred, truth));
    out.f1 = m.f1;
    out.f1_defined = m.f1_defined;
    return out;
}

struct TrainResult {
    AtcnnModel model;  // parameters of the best validation epoch
    TrainLog log;
    int best_epoch = 0;
    double best_value = 0.0;  // stopping metric at the best epoch
    BinarySplit split;
};

// One binary classifier, Adam on mini-batches, early stopping on the
// validation metric with strict improvement and snapshot restore. Fully
// deterministic for a given seed: initialization and batch order both come
// from it and nothing runs concurrently.
inline TrainResult train_binary(const Dataset& ds, const ArchConfig& arch,
                                const TrainConfig& cfg) {
    if (cfg.batch < 1) throw std::invalid_argument("train_binary: batch must be >= 1");
    if (cfg.max_epochs < 1) throw std::invalid_argument("train_binary: max_epochs must be >= 1");
    if (cfg.patience < 1) throw std::invalid_argument("train_binary: patience must be >= 1");

    TrainResult res{AtcnnModel(arch), {}, 0, 0.0, build_subdataset(ds, arch.target_class, cfg.seed)};
    auto& model = res.model;
    model.init_parameters(cfg.seed);
    Rng order_rng(cfg.seed + 1);  // distinct stream from the init draw

    AdamConfig opt_cfg;
    opt_cfg.lr = cfg.lr;
    const auto params = model.params();
    Adam opt(params, opt_cfg);

    const int cls = arch.target_class;
    const bool lower_is_better = cfg.stop_metric == TrainConfig::StopMetric::val_loss;
    std::vector<std::vector<float>> snapshot;
    int since_best = 0;

    auto train_order = res.split.train;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        order_rng.shuffle(train_order);
        double epoch_loss = 0.0;
        std::size_t at = 0;
        while (at < train_order.size()) {
            const std::size_t stop = std::min(at + static_cast<std::size_t>(cfg.batch),
                                              train_order.size());
            const auto batch_size = static_cast<float>(stop - at);
            for (; at < stop; ++at) {
                const auto& rec = ds.records[static_cast<std::size_t>(train_order[at])];
                auto tr = model.forward(rec);
                if (!std::isfinite(tr.p->values[0]))
                    throw std::runtime_error("training diverged: non-finite output at epoch " +
                                             std::to_string(epoch) + " on record " + rec.id);
                const int y = rec.labels[static_cast<std::size_t>(cls)] ? 1 : 0;
                auto loss = bce(tr.p, y);
                epoch_loss += loss->values[0];
                backward(loss);  // leaf gradients accumulate across the batch
            }
            for (const auto& p : params) {
                if (p->grad.empty()) continue;
                for (auto& g : p->grad) g /= batch_size;
            }
            opt.step();
            opt.zero_grad();
        }

        const auto val = evaluate_binary(model, ds, res.split.val);
        EpochLog entry;
        entry.epoch = epoch;
        entry.train_loss = epoch_loss / static_cast<double>(train_order.size());
        entry.val_loss = val.mean_loss;
        entry.val_f1 = val.f1;
        res.log.push_back(entry);
        if (!std::isfinite(entry.train_loss) || !std::isfinite(entry.val_loss))
            throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                     std::to_string(epoch));

        const double metric = lower_is_better ? val.mean_loss : val.f1;
        const bool improved = res.best_epoch == 0 ||
                              (lower_is_better ? metric < res.best_value
                                               : metric > res.best_value);
        if (improved) {
            res.best_epoch = epoch;
            res.best_value = metric;
            since_best = 0;
            snapshot.clear();
            for (const auto& p : params) snapshot.push_back(p->values);
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }

    for (std::size_t i = 0; i < params.size(); ++i) params[i]->values = snapshot[i];
    return res;
}

inline void write_train_log(const std::filesystem::path& path, const TrainLog& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write training log: " + path.string());
    out << "epoch train_loss val_loss val_f1\n";
    for (const auto& e : log)
        out << e.epoch << ' ' << std::setprecision(10) << e.train_loss << ' ' << e.val_loss << ' '
            << e.val_f1 << '\n';
}

}  // namespace atcnn

#endif
