#ifndef ATCNN_METRICS_HPP
#define ATCNN_METRICS_HPP

#include <algorithm>
#include <array>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "atcnn/types.hpp"

namespace atcnn {

struct ClassCounts {
    long tp = 0, fn = 0, fp = 0, tn = 0;
    long total() const { return tp + fn + fp + tn; }
};

// Ratios come with a defined flag instead of silently reporting 0 when the
// denominator is empty; an undefined ratio still contributes 0 to averages.
struct ClassMetrics {
    double recall = 0.0, precision = 0.0, specificity = 0.0, accuracy = 0.0, f1 = 0.0;
    bool recall_defined = false, precision_defined = false, specificity_defined = false,
         accuracy_defined = false, f1_defined = false;
};

inline ClassMetrics derive_metrics(const ClassCounts& c) {
    ClassMetrics m;
    if (c.tp + c.fn > 0) {
        m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
        m.recall_defined = true;
    }
    if (c.tp + c.fp > 0) {
        m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
        m.precision_defined = true;
    }
    if (c.tn + c.fp > 0) {
        m.specificity = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
        m.specificity_defined = true;
    }
    if (c.total() > 0) {
        m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
        m.accuracy_defined = true;
    }
    if (m.recall_defined && m.precision_defined && m.precision + m.recall > 0.0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
        m.f1_defined = true;
    }
    return m;
}

inline ClassCounts count_confusion(const std::vector<bool>& predicted,
                                   const std::vector<bool>& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("count_confusion: prediction and truth sizes differ");
    ClassCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i])
            ++(predicted[i] ? c.tp : c.fn);
        else
            ++(predicted[i] ? c.fp : c.tn);
    }
    return c;
}

inline double macro_f1(const std::array<ClassMetrics, kNumClasses>& per_class) {
    double acc = 0.0;
    for (const auto& m : per_class) acc += m.f1;  // undefined contributes its 0
    return acc / kNumClasses;
}

// fraction of records whose full label vector is reproduced exactly
inline double exact_match(const std::vector<std::array<bool, kNumClasses>>& predicted,
                          const std::vector<std::array<bool, kNumClasses>>& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("exact_match: prediction and truth sizes differ");
    if (truth.empty()) throw std::invalid_argument("exact_match: no records");
    long hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (predicted[i] == truth[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

struct RocPoint {
    double fpr = 0.0, tpr = 0.0;
};

struct RocResult {
    std::vector<RocPoint> points;  // from (0, 0) to (1, 1)
    double auc = 0.0;
};

// Threshold sweep over the distinct scores, one point per group of ties, area
// by trapezoid. Tied positive/negative scores therefore count half, the same
// convention as rank-based formulations.
inline RocResult roc_curve(const std::vector<float>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("roc_curve: score and label sizes differ");
    long pos = 0, neg = 0;
    for (int y : labels) {
        if (y != 0 && y != 1) throw std::invalid_argument("roc_curve: labels must be 0 or 1");
        ++(y ? pos : neg);
    }
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("roc_curve: needs at least one positive and one negative");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    RocResult out;
    out.points.push_back({0.0, 0.0});
    long tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const float s = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == s; ++i)
            ++(labels[order[i]] ? tp : fp);
        out.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                              static_cast<double>(tp) / static_cast<double>(pos)});
    }
    for (std::size_t j = 1; j < out.points.size(); ++j) {
        const auto& a = out.points[j - 1];
        const auto& b = out.points[j];
        out.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    return out;
}

}  // namespace atcnn

#endif
