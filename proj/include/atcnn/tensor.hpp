#ifndef ATCNN_TENSOR_HPP
#define ATCNN_TENSOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace atcnn {

// Reverse-mode autodiff over whole-tensor ops. Each op records its parents
// and a closure that pushes the output gradient back into them; backward()
// replays the recorded graph in reverse topological order. Values and
// gradients are stored as float; every reduction accumulates in double so
// results do not depend on how the compiler reassociates float sums.
struct Tensor;
using TensorRef = std::shared_ptr<Tensor>;

struct Tensor {
    std::vector<int> shape;
    std::vector<float> values;
    std::vector<float> grad;  // allocated on first use, same length as values
    bool requires_grad = false;

    std::vector<TensorRef> parents;
    std::function<void(Tensor&)> backprop;  // must not capture the node itself

    int numel() const {
        int n = 1;
        for (int d : shape) n *= d;
        return n;
    }

    void ensure_grad() {
        if (grad.empty()) grad.assign(values.size(), 0.0f);
    }

    void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0f); }

    static TensorRef zeros(std::vector<int> shape, bool requires_grad = false) {
        auto t = std::make_shared<Tensor>();
        t->shape = std::move(shape);
        int n = t->numel();
        if (n <= 0) throw std::invalid_argument("Tensor: shape must have positive extents");
        t->values.assign(static_cast<std::size_t>(n), 0.0f);
        t->requires_grad = requires_grad;
        return t;
    }

    static TensorRef from(std::vector<int> shape, std::vector<float> vals,
                          bool requires_grad = false) {
        auto t = zeros(std::move(shape), requires_grad);
        if (vals.size() != t->values.size())
            throw std::invalid_argument("Tensor: value count does not match shape");
        t->values = std::move(vals);
        return t;
    }
};

namespace detail {

inline TensorRef make_result(std::vector<int> shape, std::vector<TensorRef> parents) {
    auto t = Tensor::zeros(std::move(shape));
    for (const auto& p : parents)
        if (p->requires_grad) t->requires_grad = true;
    t->parents = std::move(parents);
    return t;
}

inline void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape != b.shape)
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

}  // namespace detail

inline TensorRef add(const TensorRef& a, const TensorRef& b) {
    detail::check_same_shape(*a, *b, "add");
    auto out = detail::make_result(a->shape, {a, b});
    const int n = out->numel();
    for (int i = 0; i < n; ++i) out->values[i] = a->values[i] + b->values[i];
    out->backprop = [a, b, n](Tensor& self) {
        if (a->requires_grad) {
            a->ensure_grad();
            for (int i = 0; i < n; ++i) a->grad[i] += self.grad[i];
        }
        if (b->requires_grad) {
            b->ensure_grad();
            for (int i = 0; i < n; ++i) b->grad[i] += self.grad[i];
        }
    };
    return out;
}

inline TensorRef mul(const TensorRef& a, const TensorRef& b) {
    detail::check_same_shape(*a, *b, "mul");
    auto out = detail::make_result(a->shape, {a, b});
    const int n = out->numel();
    for (int i = 0; i < n; ++i) out->values[i] = a->values[i] * b->values[i];
    out->backprop = [a, b, n](Tensor& self) {
        if (a->requires_grad) {
            a->ensure_grad();
            for (int i = 0; i < n; ++i) a->grad[i] += b->values[i] * self.grad[i];
        }
        if (b->requires_grad) {
            b->ensure_grad();
            for (int i = 0; i < n; ++i) b->grad[i] += a->values[i] * self.grad[i];
        }
    };
    return out;
}

inline TensorRef scale(const TensorRef& a, float c) {
    auto out = detail::make_result(a->shape, {a});
    const int n = out->numel();
    for (int i = 0; i < n; ++i) out->values[i] = c * a->values[i];
    out->backprop = [a, c, n](Tensor& self) {
        if (!a->requires_grad) return;
        a->ensure_grad();
        for (int i = 0; i < n; ++i) a->grad[i] += c * self.grad[i];
    };
    return out;
}

inline TensorRef relu(const TensorRef& a) {
    auto out = detail::make_result(a->shape, {a});
    const int n = out->numel();
    for (int i = 0; i < n; ++i) out->values[i] = a->values[i] > 0.0f ? a->values[i] : 0.0f;
    out->backprop = [a, n](Tensor& self) {
        if (!a->requires_grad) return;
        a->ensure_grad();
        for (int i = 0; i < n; ++i)
            if (a->values[i] > 0.0f) a->grad[i] += self.grad[i];
    };
    return out;
}

inline TensorRef tanh_act(const TensorRef& a) {
    auto out = detail::make_result(a->shape, {a});
    const int n = out->numel();
    for (int i = 0; i < n; ++i)
        out->values[i] = static_cast<float>(std::tanh(static_cast<double>(a->values[i])));
    // capture the outputs by value so the closure stays self-contained
    auto saved = std::make_shared<std::vector<float>>(out->values);
    out->backprop = [a, saved, n](Tensor& self) {
        if (!a->requires_grad) return;
        a->ensure_grad();
        for (int i = 0; i < n; ++i) {
            const float y = (*saved)[i];
            a->grad[i] += (1.0f - y * y) * self.grad[i];
        }
    };
    return out;
}

// Softmax over a rank-1 tensor, max-shifted, sums taken in double.
inline TensorRef softmax(const TensorRef& a) {
    if (a->shape.size() != 1)
        throw std::invalid_argument("softmax: expected a rank-1 tensor");
    const int n = a->numel();
    auto out = detail::make_result(a->shape, {a});
    float mx = a->values[0];
    for (int i = 1; i < n; ++i) mx = std::max(mx, a->values[i]);
    double sum = 0.0;
    std::vector<double> e(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        e[i] = std::exp(static_cast<double>(a->values[i]) - static_cast<double>(mx));
        sum += e[i];
    }
    for (int i = 0; i < n; ++i) out->values[i] = static_cast<float>(e[i] / sum);
    auto probs = std::make_shared<std::vector<float>>(out->values);
    out->backprop = [a, probs, n](Tensor& self) {
        if (!a->requires_grad) return;
        a->ensure_grad();
        double dot = 0.0;
        for (int i = 0; i < n; ++i)
            dot += static_cast<double>(self.grad[i]) * static_cast<double>((*probs)[i]);
        for (int i = 0; i < n; ++i)
            a->grad[i] += static_cast<float>((*probs)[i] * (static_cast<double>(self.grad[i]) - dot));
    };
    return out;
}

// M (r x c) times x (c) -> (r).
inline TensorRef matvec(const TensorRef& M, const TensorRef& x) {
    if (M->shape.size() != 2 || x->shape.size() != 1 || M->shape[1] != x->shape[0])
        throw std::invalid_argument("matvec: expected (r x c) matrix and length-c vector");
    const int r = M->shape[0], c = M->shape[1];
    auto out = detail::make_result({r}, {M, x});
    for (int i = 0; i < r; ++i) {
        double acc = 0.0;
        const float* row = M->values.data() + static_cast<std::size_t>(i) * c;
        for (int j = 0; j < c; ++j) acc += static_cast<double>(row[j]) * x->values[j];
        out->values[i] = static_cast<float>(acc);
    }
    out->backprop = [M, x, r, c](Tensor& self) {
        if (M->requires_grad) {
            M->ensure_grad();
            for (int i = 0; i < r; ++i) {
                const float g = self.grad[i];
                float* grow = M->grad.data() + static_cast<std::size_t>(i) * c;
                for (int j = 0; j < c; ++j) grow[j] += g * x->values[j];
            }
        }
        if (x->requires_grad) {
            x->ensure_grad();
            for (int j = 0; j < c; ++j) {
                double acc = 0.0;
                for (int i = 0; i < r; ++i)
                    acc += static_cast<double>(M->values[static_cast<std::size_t>(i) * c + j]) *
                           self.grad[i];
                x->grad[j] += static_cast<float>(acc);
            }
        }
    };
    return out;
}

// M^T (c x r) times x (r) -> (c), without materializing the transpose.
inline TensorRef matvec_t(const TensorRef& M, const TensorRef& x) {
    if (M->shape.size() != 2 || x->shape.size() != 1 || M->shape[0] != x->shape[0])
        throw std::invalid_argument("matvec_t: expected (r x c) matrix and length-r vector");
    const int r = M->shape[0], c = M->shape[1];
    auto out = detail::make_result({c}, {M, x});
    for (int j = 0; j < c; ++j) {
        double acc = 0.0;
        for (int i = 0; i < r; ++i)
            acc += static_cast<double>(M->values[static_cast<std::size_t>(i) * c + j]) *
                   x->values[i];
        out->values[j] = static_cast<float>(acc);
    }
    out->backprop = [M, x, r, c](Tensor& self) {
        if (M->requires_grad) {
            M->ensure_grad();
            for (int i = 0; i < r; ++i) {
                const float xi = x->values[i];
                float* grow = M->grad.data() + static_cast<std::size_t>(i) * c;
                for (int j = 0; j < c; ++j) grow[j] += xi * self.grad[j];
            }
        }
        if (x->requires_grad) {
            x->ensure_grad();
            for (int i = 0; i < r; ++i) {
                double acc = 0.0;
                const float* row = M->values.data() + static_cast<std::size_t>(i) * c;
                for (int j = 0; j < c; ++j) acc += static_cast<double>(row[j]) * self.grad[j];
                x->grad[i] += static_cast<float>(acc);
            }
        }
    };
    return out;
}

// Causal dilated convolution. x is (c_in x t), W is (c_out x c_in x k),
// b is (c_out); output (c_out x t). Sample n of each output row sees only
// x[.., n - d*i] for i in [0, k), with indices before 0 reading as zero, so
// the output never depends on future samples and keeps the input length.
inline TensorRef conv1d_causal(const TensorRef& x, const TensorRef& W, const TensorRef& b,
                               int dilation) {
    if (x->shape.size() != 2 || W->shape.size() != 3 || b->shape.size() != 1)
        throw std::invalid_argument("conv1d_causal: expected x (c_in x t), W (c_out x c_in x k), b (c_out)");
    if (dilation < 1) throw std::invalid_argument("conv1d_causal: dilation must be >= 1");
    const int cin = x->shape[0], t = x->shape[1];
    const int cout = W->shape[0], k = W->shape[2];
    if (W->shape[1] != cin) throw std::invalid_argument("conv1d_causal: channel mismatch");
    if (b->shape[0] != cout) throw std::invalid_argument("conv1d_causal: bias size mismatch");

    auto out = detail::make_result({cout, t}, {x, W, b});
    std::vector<double> acc(static_cast<std::size_t>(t));
    for (int zo = 0; zo < cout; ++zo) {
        std::fill(acc.begin(), acc.end(), static_cast<double>(b->values[zo]));
        for (int zi = 0; zi < cin; ++zi) {
            const float* xrow = x->values.data() + static_cast<std::size_t>(zi) * t;
            const float* wrow =
                W->values.data() + (static_cast<std::size_t>(zo) * cin + zi) * k;
            for (int i = 0; i < k; ++i) {
                const double w = wrow[i];
                const int off = dilation * i;
                for (int n = off; n < t; ++n) acc[n] += w * xrow[n - off];
            }
        }
        float* orow = out->values.data() + static_cast<std::size_t>(zo) * t;
        for (int n = 0; n < t; ++n) orow[n] = static_cast<float>(acc[n]);
    }

    out->backprop = [x, W, b, dilation, cin, cout, t, k](Tensor& self) {
        if (b->requires_grad) {
            b->ensure_grad();
            for (int zo = 0; zo < cout; ++zo) {
                double acc = 0.0;
                const float* grow = self.grad.data() + static_cast<std::size_t>(zo) * t;
                for (int n = 0; n < t; ++n) acc += grow[n];
                b->grad[zo] += static_cast<float>(acc);
            }
        }
        if (W->requires_grad) {
            W->ensure_grad();
            for (int zo = 0; zo < cout; ++zo) {
                const float* grow = self.grad.data() + static_cast<std::size_t>(zo) * t;
                for (int zi = 0; zi < cin; ++zi) {
                    const float* xrow = x->values.data() + static_cast<std::size_t>(zi) * t;
                    float* gw = W->grad.data() + (static_cast<std::size_t>(zo) * cin + zi) * k;
                    for (int i = 0; i < k; ++i) {
                        const int off = dilation * i;
                        double acc = 0.0;
                        for (int n = off; n < t; ++n)
                            acc += static_cast<double>(grow[n]) * xrow[n - off];
                        gw[i] += static_cast<float>(acc);
                    }
                }
            }
        }
        if (x->requires_grad) {
            x->ensure_grad();
            std::vector<double> gx(static_cast<std::size_t>(t));
            for (int zi = 0; zi < cin; ++zi) {
                std::fill(gx.begin(), gx.end(), 0.0);
                for (int zo = 0; zo < cout; ++zo) {
                    const float* grow = self.grad.data() + static_cast<std::size_t>(zo) * t;
                    const float* wrow =
                        W->values.data() + (static_cast<std::size_t>(zo) * cin + zi) * k;
                    for (int i = 0; i < k; ++i) {
                        const double w = wrow[i];
                        const int off = dilation * i;
                        for (int n = off; n < t; ++n) gx[n - off] += w * grow[n];
                    }
                }
                float* gxrow = x->grad.data() + static_cast<std::size_t>(zi) * t;
                for (int n = 0; n < t; ++n) gxrow[n] += static_cast<float>(gx[n]);
            }
        }
    };
    return out;
}

// Mean over the time axis of (r x c): one value per row. This is the global
// average pooling used by the attention-free model variant.
inline TensorRef mean_rows(const TensorRef& M) {
    if (M->shape.size() != 2) throw std::invalid_argument("mean_rows: expected a rank-2 tensor");
    const int r = M->shape[0], c = M->shape[1];
    auto out = detail::make_result({r}, {M});
    for (int i = 0; i < r; ++i) {
        double acc = 0.0;
        const float* row = M->values.data() + static_cast<std::size_t>(i) * c;
        for (int j = 0; j < c; ++j) acc += row[j];
        out->values[i] = static_cast<float>(acc / c);
    }
    out->backprop = [M, r, c](Tensor& self) {
        if (!M->requires_grad) return;
        M->ensure_grad();
        const float inv = 1.0f / static_cast<float>(c);
        for (int i = 0; i < r; ++i) {
            const float g = self.grad[i] * inv;
            float* grow = M->grad.data() + static_cast<std::size_t>(i) * c;
            for (int j = 0; j < c; ++j) grow[j] += g;
        }
    };
    return out;
}

// Collect m rank-1 tensors of length r into an (r x m) matrix, column per input.
inline TensorRef stack_columns(const std::vector<TensorRef>& cols) {
    if (cols.empty()) throw std::invalid_argument("stack_columns: no columns");
    const int r = cols[0]->shape[0];
    for (const auto& cvec : cols) {
        if (cvec->shape.size() != 1 || cvec->shape[0] != r)
            throw std::invalid_argument("stack_columns: columns must be rank-1 of equal length");
    }
    const int m = static_cast<int>(cols.size());
    auto out = detail::make_result({r, m}, cols);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < r; ++i)
            out->values[static_cast<std::size_t>(i) * m + j] = cols[j]->values[i];
    out->backprop = [cols, r, m](Tensor& self) {
        for (int j = 0; j < m; ++j) {
            if (!cols[j]->requires_grad) continue;
            cols[j]->ensure_grad();
            for (int i = 0; i < r; ++i)
                cols[j]->grad[i] += self.grad[static_cast<std::size_t>(i) * m + j];
        }
    };
    return out;
}

inline TensorRef concat(const std::vector<TensorRef>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat: no inputs");
    int total = 0;
    for (const auto& p : parts) {
        if (p->shape.size() != 1) throw std::invalid_argument("concat: expected rank-1 tensors");
        total += p->shape[0];
    }
    auto out = detail::make_result({total}, parts);
    int at = 0;
    for (const auto& p : parts) {
        std::copy(p->values.begin(), p->values.end(), out->values.begin() + at);
        at += p->shape[0];
    }
    out->backprop = [parts](Tensor& self) {
        int at = 0;
        for (const auto& p : parts) {
            if (p->requires_grad) {
                p->ensure_grad();
                for (int i = 0; i < p->shape[0]; ++i) p->grad[i] += self.grad[at + i];
            }
            at += p->shape[0];
        }
    };
    return out;
}

// Repeat a scalar n times; the gradient sums back into the single source entry.
inline TensorRef broadcast(const TensorRef& s, int n) {
    if (s->numel() != 1) throw std::invalid_argument("broadcast: expected a scalar");
    if (n < 1) throw std::invalid_argument("broadcast: length must be >= 1");
    auto out = detail::make_result({n}, {s});
    std::fill(out->values.begin(), out->values.end(), s->values[0]);
    out->backprop = [s](Tensor& self) {
        if (!s->requires_grad) return;
        s->ensure_grad();
        double acc = 0.0;
        for (float g : self.grad) acc += g;
        s->grad[0] += static_cast<float>(acc);
    };
    return out;
}

inline TensorRef pick(const TensorRef& v, int index) {
    if (v->shape.size() != 1 || index < 0 || index >= v->shape[0])
        throw std::invalid_argument("pick: index out of range");
    auto out = detail::make_result({1}, {v});
    out->values[0] = v->values[index];
    out->backprop = [v, index](Tensor& self) {
        if (!v->requires_grad) return;
        v->ensure_grad();
        v->grad[index] += self.grad[0];
    };
    return out;
}

// Fixed-coefficient reduction to a scalar; the workhorse of gradient tests.
inline TensorRef weighted_sum(const TensorRef& a, std::vector<float> coeff) {
    if (static_cast<int>(coeff.size()) != a->numel())
        throw std::invalid_argument("weighted_sum: coefficient count mismatch");
    auto out = detail::make_result({1}, {a});
    double acc = 0.0;
    for (std::size_t i = 0; i < coeff.size(); ++i)
        acc += static_cast<double>(coeff[i]) * a->values[i];
    out->values[0] = static_cast<float>(acc);
    auto c = std::make_shared<std::vector<float>>(std::move(coeff));
    out->backprop = [a, c](Tensor& self) {
        if (!a->requires_grad) return;
        a->ensure_grad();
        for (std::size_t i = 0; i < c->size(); ++i) a->grad[i] += (*c)[i] * self.grad[0];
    };
    return out;
}

// Binary cross-entropy of a scalar probability against label y in {0, 1}.
// p is clamped to [1e-7, 1 - 1e-7]; outside the clamp the gradient is zero.
inline TensorRef bce(const TensorRef& p, int y) {
    if (p->numel() != 1) throw std::invalid_argument("bce: expected a scalar probability");
    if (y != 0 && y != 1) throw std::invalid_argument("bce: label must be 0 or 1");
    constexpr double kEps = 1e-7;
    auto out = detail::make_result({1}, {p});
    const double raw = p->values[0];
    const double ph = std::min(1.0 - kEps, std::max(kEps, raw));
    out->values[0] =
        static_cast<float>(-(y * std::log(ph) + (1 - y) * std::log(1.0 - ph)));
    out->backprop = [p, y, raw, ph](Tensor& self) {
        if (!p->requires_grad) return;
        p->ensure_grad();
        if (raw <= kEps || raw >= 1.0 - kEps) return;
        const double d = -(y / ph) + (1 - y) / (1.0 - ph);
        p->grad[0] += static_cast<float>(d * self.grad[0]);
    };
    return out;
}

inline TensorRef mean_of(const std::vector<TensorRef>& scalars) {
    if (scalars.empty()) throw std::invalid_argument("mean_of: no inputs");
    for (const auto& s : scalars)
        if (s->numel() != 1) throw std::invalid_argument("mean_of: expected scalars");
    auto out = detail::make_result({1}, scalars);
    double acc = 0.0;
    for (const auto& s : scalars) acc += s->values[0];
    const int n = static_cast<int>(scalars.size());
    out->values[0] = static_cast<float>(acc / n);
    out->backprop = [scalars, n](Tensor& self) {
        const float g = self.grad[0] / static_cast<float>(n);
        for (const auto& s : scalars) {
            if (!s->requires_grad) continue;
            s->ensure_grad();
            s->grad[0] += g;
        }
    };
    return out;
}

// Reverse topological replay. Gradients of interior nodes are rebuilt per
// call while leaves keep accumulating, so two successive calls double a
// parameter's gradient.
inline void backward(const TensorRef& loss) {
    if (loss->numel() != 1)
        throw std::invalid_argument("backward: root must be a scalar");
    std::vector<Tensor*> order;
    std::unordered_set<Tensor*> seen;
    std::vector<std::pair<Tensor*, std::size_t>> stack;
    stack.emplace_back(loss.get(), 0);
    seen.insert(loss.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Tensor* parent = node->parents[next++].get();
            if (seen.insert(parent).second) stack.emplace_back(parent, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    // interior gradients start from zero; leaf gradients are left to accumulate
    for (Tensor* node : order)
        if (!node->parents.empty()) {
            node->ensure_grad();
            node->zero_grad();
        }
    loss->ensure_grad();
    loss->grad[0] += 1.0f;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Tensor* node = *it;
        if (node->backprop && node->requires_grad) node->backprop(*node);
    }
}

}  // namespace atcnn

#endif
