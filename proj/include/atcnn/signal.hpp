#ifndef ATCNN_SIGNAL_HPP
#define ATCNN_SIGNAL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "atcnn/types.hpp"

namespace atcnn {

struct FilterSpec {
    double low_hz = 0.5;
    double high_hz = 45.0;
    int order = 4;  // prototype order; the bandpass transfer function has 2x the poles
    double sampling_hz = 100.0;
    enum class Mode { forward, forward_backward } mode = Mode::forward_backward;
};

// One second-order section, direct form II transposed.
// H(z) = g * (1 - z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct Biquad {
    double g, a1, a2;
};

namespace detail {

inline std::complex<double> bilinear(std::complex<double> s, double fs) {
    return (2.0 * fs + s) / (2.0 * fs - s);
}

}  // namespace detail

// Butterworth bandpass design: analog lowpass prototype, lowpass-to-bandpass
// transformation, bilinear mapping with prewarped band edges. Every section
// carries one zero at z=1 and one at z=-1, so DC and Nyquist are nulled
// exactly; gain is normalized to 1 at the geometric band center.
inline std::vector<Biquad> design_butterworth_bandpass(const FilterSpec& spec) {
    const double fs = spec.sampling_hz;
    if (spec.order < 1) throw std::invalid_argument("filter design: order must be >= 1");
    if (!(0.0 < spec.low_hz && spec.low_hz < spec.high_hz && spec.high_hz < fs / 2.0))
        throw std::invalid_argument(
            "filter design: need 0 < low < high < sampling/2, got [" +
            std::to_string(spec.low_hz) + ", " + std::to_string(spec.high_hz) + "] at " +
            std::to_string(fs) + " Hz");

    const int n = spec.order;
    const double pi = 3.14159265358979323846;
    const double wl = 2.0 * fs * std::tan(pi * spec.low_hz / fs);
    const double wh = 2.0 * fs * std::tan(pi * spec.high_hz / fs);
    const double w0 = std::sqrt(wl * wh);
    const double bw = wh - wl;

    // analog bandpass poles via s_lp -> (s^2 + w0^2) / (bw s); each prototype
    // pole p yields the two roots of s^2 - (bw p) s + w0^2
    std::vector<std::complex<double>> zpoles;
    auto push_pair = [&](std::complex<double> p) {
        const std::complex<double> bp = bw * p;
        const std::complex<double> disc = std::sqrt(bp * bp - 4.0 * w0 * w0);
        zpoles.push_back(detail::bilinear((bp + disc) / 2.0, fs));
        zpoles.push_back(detail::bilinear((bp - disc) / 2.0, fs));
    };
    for (int k = 0; k < n / 2; ++k) {
        const double theta = pi * (2.0 * k + n + 1.0) / (2.0 * n);
        push_pair({std::cos(theta), std::sin(theta)});  // Im > 0 half only
    }
    const bool odd = (n % 2) != 0;
    if (odd) push_pair({-1.0, 0.0});

    std::vector<Biquad> sections;
    if (odd) {
        // the last two poles come from the real prototype pole: either a
        // conjugate pair or two real poles, both forming a single section
        const auto q1 = zpoles[zpoles.size() - 2];
        const auto q2 = zpoles[zpoles.size() - 1];
        sections.push_back({1.0, -(q1 + q2).real(), (q1 * q2).real()});
        zpoles.resize(zpoles.size() - 2);
    }
    for (const auto& q : zpoles)
        sections.push_back({1.0, -2.0 * q.real(), std::norm(q)});

    // normalize |H| = 1 at the digital frequency whose prewarped image is w0
    const double f0 = fs / pi * std::atan(w0 / (2.0 * fs));
    const std::complex<double> z = std::exp(std::complex<double>(0.0, 2.0 * pi * f0 / fs));
    const std::complex<double> zi = 1.0 / z;
    double mag = 1.0;
    for (const auto& s : sections) {
        const std::complex<double> num = 1.0 - zi * zi;
        const std::complex<double> den = 1.0 + s.a1 * zi + s.a2 * zi * zi;
        mag *= std::abs(num / den);
    }
    const double g = std::pow(1.0 / mag, 1.0 / static_cast<double>(sections.size()));
    for (auto& s : sections) s.g = g;
    return sections;
}

inline std::complex<double> frequency_response(const std::vector<Biquad>& sections,
                                               double freq_hz, double sampling_hz) {
    const double pi = 3.14159265358979323846;
    const std::complex<double> zi =
        std::exp(std::complex<double>(0.0, -2.0 * pi * freq_hz / sampling_hz));
    std::complex<double> h = 1.0;
    for (const auto& s : sections)
        h *= s.g * (1.0 - zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
    return h;
}

namespace detail {

// Each section starts in the steady state it would have reached under a
// constant input equal to the first sample; without this a step-sized
// turn-on transient rings far beyond any reasonable edge padding.
inline void run_cascade(std::vector<double>& x, const std::vector<Biquad>& sections) {
    // each section's numerator (g, 0, -g) sums to zero, so the steady output
    // for any constant input is 0 and only the first section sees a nonzero
    // steady input level
    double level = x.empty() ? 0.0 : x.front();
    for (const auto& s : sections) {
        double s2 = -s.g * level;
        double s1 = s2;
        for (auto& v : x) {
            const double in = v;
            const double out = s.g * in + s1;
            s1 = -s.a1 * out + s2;
            s2 = s.g * -in - s.a2 * out;
            v = out;
        }
        level = 0.0;
    }
}

}  // namespace detail

// Applies the designed cascade in double precision. forward_backward runs the
// cascade twice (once reversed) over an odd-reflection extension, giving zero
// phase and the squared magnitude response.
inline std::vector<float> filter_signal(const std::vector<float>& x, const FilterSpec& spec) {
    const int t = static_cast<int>(x.size());
    if (t < 3 * spec.order)
        throw std::invalid_argument("filter_signal: signal length " + std::to_string(t) +
                                    " is shorter than 3x the filter order");
    const auto sections = design_butterworth_bandpass(spec);

    if (spec.mode == FilterSpec::Mode::forward) {
        std::vector<double> work(x.begin(), x.end());
        detail::run_cascade(work, sections);
        return std::vector<float>(work.begin(), work.end());
    }

    const int pad = std::min(3 * (2 * spec.order + 1), t - 1);
    std::vector<double> work;
    work.reserve(static_cast<std::size_t>(t) + 2 * pad);
    for (int i = pad; i >= 1; --i) work.push_back(2.0 * x[0] - x[i]);
    work.insert(work.end(), x.begin(), x.end());
    for (int i = 1; i <= pad; ++i) work.push_back(2.0 * x[t - 1] - x[t - 1 - i]);

    detail::run_cascade(work, sections);
    std::reverse(work.begin(), work.end());
    detail::run_cascade(work, sections);
    std::reverse(work.begin(), work.end());

    return std::vector<float>(work.begin() + pad, work.begin() + pad + t);
}

struct ZscoreResult {
    std::vector<float> values;
    bool constant = false;  // input had (numerically) zero variance; output is all zeros
};

inline ZscoreResult zscore(const std::vector<float>& x) {
    if (x.empty()) throw std::invalid_argument("zscore: empty input");
    double mean = 0.0;
    for (float v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (float v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size());  // population variance
    const double sigma = std::sqrt(var);

    ZscoreResult res;
    res.values.resize(x.size());
    if (sigma <= 1e-12 * (1.0 + std::fabs(mean))) {
        res.constant = true;
        std::fill(res.values.begin(), res.values.end(), 0.0f);
        return res;
    }
    for (std::size_t i = 0; i < x.size(); ++i)
        res.values[i] = static_cast<float>((x[i] - mean) / sigma);
    return res;
}

struct PreprocessResult {
    EcgRecord record;
    std::array<bool, kNumLeads> constant_lead{};  // flagged leads were zeroed, not filtered
};

// Bandpass then per-lead z-score. A flat input lead is zeroed directly: its
// filtered version would be pure numeric noise, and normalizing that noise to
// unit variance would hand the model garbage.
inline PreprocessResult preprocess_record(const EcgRecord& rec, const FilterSpec& spec = {}) {
    PreprocessResult out;
    out.record = rec;
    for (int m = 0; m < kNumLeads; ++m) {
        auto lead = rec.lead(m);
        std::vector<float> x(lead.begin(), lead.end());
        auto pre = zscore(x);
        if (pre.constant) {
            out.constant_lead[m] = true;
            std::fill(out.record.lead(m).begin(), out.record.lead(m).end(), 0.0f);
            continue;
        }
        auto z = zscore(filter_signal(x, spec));
        std::copy(z.values.begin(), z.values.end(), out.record.lead(m).begin());
    }
    return out;
}

}  // namespace atcnn

#endif
