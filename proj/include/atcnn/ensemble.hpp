#ifndef ATCNN_ENSEMBLE_HPP
#define ATCNN_ENSEMBLE_HPP

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "atcnn/model.hpp"
#include "atcnn/model_io.hpp"
#include "atcnn/types.hpp"

namespace atcnn {

// Five independent binary classifiers, one per class, trained separately and
// combined only at prediction time.
struct Ensemble {
    std::vector<AtcnnModel> members;  // class order, size kNumClasses
};

inline std::filesystem::path member_path(const std::filesystem::path& dir, int cls) {
    return dir / ("model_" + std::string(kClassNames[static_cast<std::size_t>(cls)]) + ".atcn");
}

inline Ensemble load_ensemble(const std::filesystem::path& dir) {
    Ensemble e;
    for (int c = 0; c < kNumClasses; ++c) {
        const auto path = member_path(dir, c);
        if (!std::filesystem::exists(path))
            throw std::runtime_error("ensemble incomplete: missing " + path.string());
        e.members.push_back(load_model(path));
        if (e.members.back().config.target_class != c)
            throw std::runtime_error(path.string() + " was trained for class " +
                                     kClassNames[static_cast<std::size_t>(
                                         e.members.back().config.target_class)] +
                                     ", expected " + kClassNames[static_cast<std::size_t>(c)]);
    }
    return e;
}

inline std::array<double, kNumClasses> predict_probs(const Ensemble& e, const EcgRecord& rec) {
    std::array<double, kNumClasses> p{};
    for (int c = 0; c < kNumClasses; ++c)
        p[static_cast<std::size_t>(c)] =
            e.members[static_cast<std::size_t>(c)].forward(rec).p->values[0];
    return p;
}

// a probability exactly at the threshold counts as positive
inline std::array<bool, kNumClasses> predict_multilabel(const Ensemble& e, const EcgRecord& rec,
                                                        double threshold = 0.5) {
    const auto p = predict_probs(e, rec);
    std::array<bool, kNumClasses> out{};
    for (int c = 0; c < kNumClasses; ++c)
        out[static_cast<std::size_t>(c)] = p[static_cast<std::size_t>(c)] >= threshold;
    return out;
}

// Risk looks only at the four disease labels; the normal-rhythm bit never
// changes the group.
enum class RiskGroup { normal, single_disorder, multimorbidity };

inline RiskGroup risk_stratify(const std::array<bool, kNumClasses>& labels) {
    int diseases = 0;
    for (int c = 1; c < kNumClasses; ++c) diseases += labels[static_cast<std::size_t>(c)];
    if (diseases == 0) return RiskGroup::normal;
    return diseases == 1 ? RiskGroup::single_disorder : RiskGroup::multimorbidity;
}

inline const char* risk_group_name(RiskGroup g) {
    switch (g) {
        case RiskGroup::normal: return "normal";
        case RiskGroup::single_disorder: return "single-disorder";
        case RiskGroup::multimorbidity: return "multimorbidity";
    }
    throw std::invalid_argument("unknown risk group");
}

}  // namespace atcnn

#endif
