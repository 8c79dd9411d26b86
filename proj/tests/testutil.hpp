#ifndef ATCNN_TESTUTIL_HPP
#define ATCNN_TESTUTIL_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "atcnn/rng.hpp"
#include "atcnn/tensor.hpp"

namespace testutil {

using vecd = std::vector<double>;

// Compares the tape gradients of a scalar production graph against central
// finite differences of an independently written double-precision reference
// of the same function. The reference is also used to validate the forward
// value itself. ref_loss receives one double vector per leaf, in order.
struct GradCheckResult {
    double max_rel_err = 0.0;
    double forward_abs_err = 0.0;
    std::string worst;
};

inline GradCheckResult grad_check(const std::vector<atcnn::TensorRef>& leaves,
                                  const std::function<atcnn::TensorRef()>& make_loss,
                                  const std::function<double(const std::vector<vecd>&)>& ref_loss,
                                  double h = 1e-4) {
    for (const auto& leaf : leaves) {
        leaf->ensure_grad();
        leaf->zero_grad();
    }
    auto loss = make_loss();
    atcnn::backward(loss);

    std::vector<vecd> vals;
    vals.reserve(leaves.size());
    for (const auto& leaf : leaves)
        vals.emplace_back(leaf->values.begin(), leaf->values.end());

    GradCheckResult res;
    res.forward_abs_err = std::fabs(static_cast<double>(loss->values[0]) - ref_loss(vals));

    for (std::size_t k = 0; k < leaves.size(); ++k) {
        auto& leaf = *leaves[k];
        for (std::size_t i = 0; i < leaf.values.size(); ++i) {
            const double saved = vals[k][i];
            vals[k][i] = saved + h;
            const double lp = ref_loss(vals);
            vals[k][i] = saved - h;
            const double lm = ref_loss(vals);
            vals[k][i] = saved;
            const double numeric = (lp - lm) / (2.0 * h);
            const double analytic = leaf.grad[i];
            if (std::fabs(analytic) < 1e-9 && std::fabs(numeric) < 1e-9) continue;
            const double rel = std::fabs(analytic - numeric) /
                               std::max(std::fabs(analytic), std::fabs(numeric));
            if (rel > res.max_rel_err) {
                res.max_rel_err = rel;
                res.worst = "leaf " + std::to_string(k) + " entry " + std::to_string(i) +
                            " analytic " + std::to_string(analytic) + " numeric " +
                            std::to_string(numeric);
            }
        }
    }
    return res;
}

inline std::vector<float> random_values(atcnn::Rng& rng, int n, double lo = -1.0,
                                        double hi = 1.0) {
    std::vector<float> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = static_cast<float>(rng.uniform(lo, hi));
    return v;
}

inline vecd as_doubles(const std::vector<float>& v) { return vecd(v.begin(), v.end()); }

}  // namespace testutil

#endif
