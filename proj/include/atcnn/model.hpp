#ifndef ATCNN_MODEL_HPP
#define ATCNN_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "atcnn/rng.hpp"
#include "atcnn/tensor.hpp"
#include "atcnn/types.hpp"

namespace atcnn {

// One binary classifier: a dilated-convolution stack per lead, temporal
// attention pooling each lead's feature map to a vector, spatial attention
// fusing the per-lead vectors, and a two-way softmax head. The variants
// switch parts of that pipeline off for comparison runs.
enum class Variant {
    full,              // dilated convs + temporal + spatial attention
    traditional_conv,  // same network with every dilation forced to 1
    no_attention_gap,  // attention replaced by per-lead global average pooling
    single_lead,       // one lead only; temporal attention feeds the head directly
};

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::full: return "full";
        case Variant::traditional_conv: return "traditional_conv";
        case Variant::no_attention_gap: return "no_attention_gap";
        case Variant::single_lead: return "single_lead";
    }
    throw std::invalid_argument("unknown variant");
}

inline Variant variant_from(const std::string& s) {
    for (Variant v : {Variant::full, Variant::traditional_conv, Variant::no_attention_gap,
                      Variant::single_lead})
        if (s == variant_name(v)) return v;
    throw std::invalid_argument("unknown variant: " + s);
}

struct ArchConfig {
    int channels = 32;                     // feature channels per conv layer
    int kernel = 3;
    std::vector<int> dilations = {1, 2, 4};  // one per block
    int layers_per_block = 2;
    int samples = 500;                     // input length per lead
    Variant variant = Variant::full;
    std::vector<int> leads = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    bool per_timestep_temporal_bias = true;  // false: one shared bias per lead
    bool residual = false;                   // reserved; rejected when set
    int target_class = 0;
};

// widest input span any single output sample can see
inline int receptive_field(const ArchConfig& cfg) {
    int span = 0;
    for (int d : cfg.dilations) {
        const int eff = cfg.variant == Variant::traditional_conv ? 1 : d;
        span += cfg.layers_per_block * (cfg.kernel - 1) * eff;
    }
    return span + 1;
}

struct ForwardTrace {
    TensorRef p;      // scalar, probability the target class is present
    TensorRef probs;  // the two-way softmax output [p, 1 - p]
    std::vector<TensorRef> features;  // per modeled lead, channels x samples
    std::vector<TensorRef> alpha;     // temporal attention per modeled lead (empty for GAP)
    TensorRef beta;   // spatial attention over modeled leads (null when unused)
};

class AtcnnModel {
public:
    struct LeadStack {
        int lead = 0;  // global lead index this stack reads
        std::vector<TensorRef> conv_w;  // layer order: block 0 layer 0, block 0 layer 1, ...
        std::vector<TensorRef> conv_b;
        TensorRef attn_w, attn_b;  // unused (null) for the pooling variant
    };

    ArchConfig config;
    std::vector<LeadStack> stacks;
    TensorRef spatial_w, spatial_b;  // null unless the variant fuses leads by attention
    TensorRef head_w, head_b;

    explicit AtcnnModel(ArchConfig cfg) : config(std::move(cfg)) {
        validate(config);
        const int z = config.channels;
        const int k = config.kernel;
        const int layers = static_cast<int>(config.dilations.size()) * config.layers_per_block;

        for (int lead : config.leads) {
            LeadStack s;
            s.lead = lead;
            for (int l = 0; l < layers; ++l) {
                const int cin = l == 0 ? 1 : z;
                s.conv_w.push_back(Tensor::zeros({z, cin, k}, true));
                s.conv_b.push_back(Tensor::zeros({z}, true));
            }
            if (has_temporal_attention()) {
                s.attn_w = Tensor::zeros({z}, true);
                s.attn_b = Tensor::zeros({config.per_timestep_temporal_bias ? config.samples : 1},
                                         true);
            }
            stacks.push_back(std::move(s));
        }
        if (has_spatial_attention()) {
            spatial_w = Tensor::zeros({z}, true);
            spatial_b = Tensor::zeros({static_cast<int>(config.leads.size())}, true);
        }
        head_w = Tensor::zeros({2, head_inputs()}, true);
        head_b = Tensor::zeros({2}, true);
    }

    bool has_temporal_attention() const { return config.variant != Variant::no_attention_gap; }
    bool has_spatial_attention() const {
        return config.variant == Variant::full || config.variant == Variant::traditional_conv;
    }
    int head_inputs() const {
        return config.variant == Variant::no_attention_gap
                   ? static_cast<int>(config.leads.size()) * config.channels
                   : config.channels;
    }

    // uniform init with variance 2 / fan_in, which keeps activation scale
    // roughly constant through the rectified conv stack; zero biases.
    // Fully determined by the seed.
    void init_parameters(std::uint64_t seed) {
        Rng rng(seed);
        auto fill = [&rng](const TensorRef& w, int fan_in) {
            const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
            for (auto& v : w->values) v = static_cast<float>(rng.uniform(-bound, bound));
        };
        for (auto& s : stacks) {
            for (std::size_t l = 0; l < s.conv_w.size(); ++l) {
                fill(s.conv_w[l], s.conv_w[l]->shape[1] * s.conv_w[l]->shape[2]);
                std::fill(s.conv_b[l]->values.begin(), s.conv_b[l]->values.end(), 0.0f);
            }
            if (s.attn_w) {
                fill(s.attn_w, config.channels);
                std::fill(s.attn_b->values.begin(), s.attn_b->values.end(), 0.0f);
            }
        }
        if (spatial_w) {
            fill(spatial_w, config.channels);
            std::fill(spatial_b->values.begin(), spatial_b->values.end(), 0.0f);
        }
        fill(head_w, head_inputs());
        std::fill(head_b->values.begin(), head_b->values.end(), 0.0f);
    }

    // fixed order: lead stacks first (convs in layer order, then attention),
    // then spatial attention, then the head
    std::vector<TensorRef> params() const {
        std::vector<TensorRef> out;
        for (const auto& s : stacks) {
            for (std::size_t l = 0; l < s.conv_w.size(); ++l) {
                out.push_back(s.conv_w[l]);
                out.push_back(s.conv_b[l]);
            }
            if (s.attn_w) {
                out.push_back(s.attn_w);
                out.push_back(s.attn_b);
            }
        }
        if (spatial_w) {
            out.push_back(spatial_w);
            out.push_back(spatial_b);
        }
        out.push_back(head_w);
        out.push_back(head_b);
        return out;
    }

    ForwardTrace forward(const EcgRecord& rec) const {
        if (rec.samples != config.samples)
            throw std::invalid_argument("forward: record " + rec.id + " has " +
                                        std::to_string(rec.samples) +
                                        " samples per lead, model expects " +
                                        std::to_string(config.samples));
        ForwardTrace tr;
        std::vector<TensorRef> pooled;  // one vector per modeled lead
        for (const auto& s : stacks) {
            const auto lead = rec.lead(s.lead);
            auto x = Tensor::from({1, config.samples},
                                  std::vector<float>(lead.begin(), lead.end()));
            for (std::size_t l = 0; l < s.conv_w.size(); ++l) {
                const int block = static_cast<int>(l) / config.layers_per_block;
                const int d = config.variant == Variant::traditional_conv
                                  ? 1
                                  : config.dilations[static_cast<std::size_t>(block)];
                x = relu(conv1d_causal(x, s.conv_w[l], s.conv_b[l], d));
            }
            tr.features.push_back(x);
            if (has_temporal_attention()) {
                auto bias = config.per_timestep_temporal_bias ? s.attn_b
                                                              : broadcast(s.attn_b, config.samples);
                auto alpha = softmax(tanh_act(add(matvec_t(x, s.attn_w), bias)));
                tr.alpha.push_back(alpha);
                pooled.push_back(matvec(x, alpha));
            } else {
                pooled.push_back(mean_rows(x));
            }
        }

        TensorRef fused;
        if (has_spatial_attention()) {
            auto stacked = stack_columns(pooled);
            tr.beta = softmax(tanh_act(add(matvec_t(stacked, spatial_w), spatial_b)));
            fused = matvec(stacked, tr.beta);
        } else if (config.variant == Variant::no_attention_gap) {
            fused = pooled.size() == 1 ? pooled[0] : concat(pooled);
        } else {
            fused = pooled[0];  // single lead
        }

        tr.probs = softmax(add(matvec(head_w, fused), head_b));
        tr.p = pick(tr.probs, 0);
        return tr;
    }

private:
    static void validate(const ArchConfig& cfg) {
        if (cfg.channels < 1) throw std::invalid_argument("ArchConfig: channels must be >= 1");
        if (cfg.kernel < 1) throw std::invalid_argument("ArchConfig: kernel must be >= 1");
        if (cfg.layers_per_block < 1)
            throw std::invalid_argument("ArchConfig: layers_per_block must be >= 1");
        if (cfg.samples < 1) throw std::invalid_argument("ArchConfig: samples must be >= 1");
        if (cfg.dilations.empty())
            throw std::invalid_argument("ArchConfig: need at least one block dilation");
        for (int d : cfg.dilations)
            if (d < 1) throw std::invalid_argument("ArchConfig: dilations must be >= 1");
        if (cfg.leads.empty()) throw std::invalid_argument("ArchConfig: need at least one lead");
        std::set<int> seen;
        for (int m : cfg.leads) {
            if (m < 0 || m >= kNumLeads)
                throw std::invalid_argument("ArchConfig: lead index out of range: " +
                                            std::to_string(m));
            if (!seen.insert(m).second)
                throw std::invalid_argument("ArchConfig: duplicate lead: " + std::to_string(m));
        }
        if (cfg.variant == Variant::single_lead && cfg.leads.size() != 1)
            throw std::invalid_argument("ArchConfig: the single-lead variant takes exactly one lead");
        if (cfg.residual)
            throw std::invalid_argument(
                "ArchConfig: residual connections are reserved and not implemented");
        if (cfg.target_class < 0 || cfg.target_class >= kNumClasses)
            throw std::invalid_argument("ArchConfig: target_class out of range");
    }
};

}  // namespace atcnn

#endif
