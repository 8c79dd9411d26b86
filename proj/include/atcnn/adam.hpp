#ifndef ATCNN_ADAM_HPP
#define ATCNN_ADAM_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "atcnn/tensor.hpp"

namespace atcnn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Moment estimates are kept as float to mirror the parameters they track;
// the per-element update itself runs in double.
class Adam {
public:
    Adam(std::vector<TensorRef> params, AdamConfig cfg = {})
        : params_(std::move(params)), cfg_(cfg) {
        m_.reserve(params_.size());
        v_.reserve(params_.size());
        for (const auto& p : params_) {
            m_.emplace_back(p->values.size(), 0.0f);
            v_.emplace_back(p->values.size(), 0.0f);
        }
    }

    void step() {
        ++step_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
        for (std::size_t k = 0; k < params_.size(); ++k) {
            Tensor& p = *params_[k];
            if (p.grad.empty()) continue;  // parameter untouched by the last backward
            if (p.grad.size() != p.values.size())
                throw std::runtime_error("Adam: gradient size mismatch");
            for (std::size_t i = 0; i < p.values.size(); ++i) {
                const double g = p.grad[i];
                const double m = cfg_.beta1 * m_[k][i] + (1.0 - cfg_.beta1) * g;
                const double v = cfg_.beta2 * v_[k][i] + (1.0 - cfg_.beta2) * g * g;
                m_[k][i] = static_cast<float>(m);
                v_[k][i] = static_cast<float>(v);
                const double mhat = m / bc1;
                const double vhat = v / bc2;
                p.values[i] =
                    static_cast<float>(p.values[i] - cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps));
            }
        }
    }

    void zero_grad() {
        for (const auto& p : params_) p->zero_grad();
    }

    std::int64_t step_count() const { return step_; }

private:
    std::vector<TensorRef> params_;
    AdamConfig cfg_;
    std::int64_t step_ = 0;
    std::vector<std::vector<float>> m_, v_;
};

}  // namespace atcnn

#endif
