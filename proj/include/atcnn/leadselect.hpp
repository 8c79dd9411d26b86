#ifndef ATCNN_LEADSELECT_HPP
#define ATCNN_LEADSELECT_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "atcnn/model.hpp"
#include "atcnn/training.hpp"
#include "atcnn/types.hpp"

namespace atcnn {

struct LeadRank {
    int lead = 0;          // global lead index
    double median_beta = 0.0;
};

namespace detail {
inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}
}  // namespace detail

// Rank leads by how much spatial attention they receive: median of each
// lead's attention weight across the given records, highest first, ties
// resolved by lead order.
inline std::vector<LeadRank> rank_leads(const AtcnnModel& model, const Dataset& ds,
                                        const std::vector<int>& idx) {
    if (!model.has_spatial_attention())
        throw std::invalid_argument("rank_leads: this model variant has no spatial attention");
    if (idx.empty()) throw std::invalid_argument("rank_leads: no records");

    const auto n_leads = model.config.leads.size();
    std::vector<std::vector<double>> betas(n_leads);
    for (int i : idx) {
        const auto tr = model.forward(ds.records[static_cast<std::size_t>(i)]);
        for (std::size_t j = 0; j < n_leads; ++j)
            betas[j].push_back(tr.beta->values[j]);
    }

    std::vector<LeadRank> out;
    for (std::size_t j = 0; j < n_leads; ++j)
        out.push_back({model.config.leads[j], detail::median(std::move(betas[j]))});
    std::stable_sort(out.begin(), out.end(), [](const LeadRank& a, const LeadRank& b) {
        if (a.median_beta != b.median_beta) return a.median_beta > b.median_beta;
        return a.lead < b.lead;
    });
    return out;
}

struct SubsetSweepEntry {
    int k = 0;
    std::vector<int> leads;  // the k highest-ranked leads
    double val_f1 = 0.0;
    int epochs = 0;
};

struct SubsetSweepResult {
    std::vector<SubsetSweepEntry> entries;  // k = 1 .. ranking size
    int optimal_k = 0;
};

// Retrain on growing prefixes of the ranking and keep the smallest subset
// that later, larger subsets fail to beat by at least improvement_tol. Each
// subset trains from its own seed so runs stay independently reproducible.
inline SubsetSweepResult sweep_subsets(const Dataset& ds, const ArchConfig& base_arch,
                                       const TrainConfig& base_cfg,
                                       const std::vector<int>& ranked_leads,
                                       double improvement_tol = 0.005) {
    if (ranked_leads.empty() || ranked_leads.size() > kNumLeads)
        throw std::invalid_argument("sweep_subsets: need between 1 and 12 ranked leads");

    SubsetSweepResult res;
    for (std::size_t k = 1; k <= ranked_leads.size(); ++k) {
        ArchConfig arch = base_arch;
        arch.leads.assign(ranked_leads.begin(), ranked_leads.begin() + static_cast<long>(k));
        arch.variant = k == 1 ? Variant::single_lead : base_arch.variant;

        TrainConfig cfg = base_cfg;
        cfg.seed = base_cfg.seed + k;
        const auto trained = train_binary(ds, arch, cfg);
        const auto val = evaluate_binary(trained.model, ds, trained.split.val);
        res.entries.push_back({static_cast<int>(k), arch.leads, val.f1,
                               static_cast<int>(trained.log.size())});
    }

    for (std::size_t k = 0; k < res.entries.size(); ++k) {
        bool beaten = false;
        for (std::size_t j = k + 1; j < res.entries.size(); ++j)
            if (res.entries[j].val_f1 - res.entries[k].val_f1 >= improvement_tol) beaten = true;
        if (!beaten) {
            res.optimal_k = res.entries[k].k;
            break;
        }
    }
    return res;
}

}  // namespace atcnn

#endif
