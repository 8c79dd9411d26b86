#ifndef ATCNN_TYPES_HPP
#define ATCNN_TYPES_HPP

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace atcnn {

inline constexpr int kNumLeads = 12;
inline constexpr int kNumClasses = 5;

// class order is fixed everywhere: models, decision files, reports
inline constexpr std::array<const char*, kNumClasses> kClassNames = {"NSR", "CD", "HYP",
                                                                     "MI", "STTC"};

// standard lead order; signal rows, attention exports and masks all use it
inline constexpr std::array<const char*, kNumLeads> kLeadNames = {
    "I", "II", "III", "aVR", "aVL", "aVF", "V1", "V2", "V3", "V4", "V5", "V6"};

inline int class_index(const std::string& name) {
    for (int i = 0; i < kNumClasses; ++i)
        if (name == kClassNames[i]) return i;
    throw std::invalid_argument("unknown class label: " + name);
}

inline int lead_index(const std::string& name) {
    for (int i = 0; i < kNumLeads; ++i)
        if (name == kLeadNames[i]) return i;
    throw std::invalid_argument("unknown lead name: " + name);
}

enum class Partition { development, test };

inline Partition partition_from(const std::string& s) {
    if (s == "development") return Partition::development;
    if (s == "test") return Partition::test;
    throw std::invalid_argument("unknown partition: " + s);
}

inline const char* partition_name(Partition p) {
    return p == Partition::development ? "development" : "test";
}

struct EcgRecord {
    std::string id;
    int samples = 0;                        // per lead
    std::array<bool, kNumClasses> labels{};  // multi-hot, class order above
    Partition partition = Partition::development;
    std::vector<float> signal;  // 12 x samples, row-major, lead-major

    std::span<const float> lead(int m) const {
        if (m < 0 || m >= kNumLeads) throw std::out_of_range("lead index out of range");
        return {signal.data() + static_cast<std::size_t>(m) * samples,
                static_cast<std::size_t>(samples)};
    }
    std::span<float> lead(int m) {
        if (m < 0 || m >= kNumLeads) throw std::out_of_range("lead index out of range");
        return {signal.data() + static_cast<std::size_t>(m) * samples,
                static_cast<std::size_t>(samples)};
    }
    int label_count() const {
        int n = 0;
        for (bool b : labels) n += b;
        return n;
    }
};

struct Dataset {
    double sampling_rate_hz = 100.0;
    std::vector<EcgRecord> records;
};

}  // namespace atcnn

#endif
