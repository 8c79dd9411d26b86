#ifndef ATCNN_DATA_HPP
#define ATCNN_DATA_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <iomanip>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "atcnn/rng.hpp"
#include "atcnn/types.hpp"

namespace atcnn {

namespace detail {

inline std::vector<float> read_f32_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open signal file: " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() % 4 != 0)
        throw std::runtime_error("signal file size is not a multiple of 4: " + path.string());
    std::vector<float> out(bytes.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::uint32_t u = static_cast<std::uint32_t>(bytes[4 * i]) |
                                (static_cast<std::uint32_t>(bytes[4 * i + 1]) << 8) |
                                (static_cast<std::uint32_t>(bytes[4 * i + 2]) << 16) |
                                (static_cast<std::uint32_t>(bytes[4 * i + 3]) << 24);
        out[i] = std::bit_cast<float>(u);
    }
    return out;
}

inline void write_f32_file(const std::filesystem::path& path, const std::vector<float>& v) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write signal file: " + path.string());
    std::vector<unsigned char> bytes(v.size() * 4);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto u = std::bit_cast<std::uint32_t>(v[i]);
        bytes[4 * i] = static_cast<unsigned char>(u & 0xff);
        bytes[4 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
        bytes[4 * i + 2] = static_cast<unsigned char>((u >> 16) & 0xff);
        bytes[4 * i + 3] = static_cast<unsigned char>((u >> 24) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace detail

// Manifest: {"version": 1, "sampling_rate_hz": 100.0, "records": [...]} with
// one {"id", "file", "labels", "partition"} object per record. Signal files
// are headerless little-endian float32, 12 rows of equal length, lead-major.
inline Dataset load_dataset(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("manifest is not valid JSON: " + std::string(e.what()));
    }

    if (!j.contains("version") || !j["version"].is_number_integer() || j["version"] != 1)
        throw std::runtime_error("manifest: missing or unsupported version (expected 1)");
    if (!j.contains("sampling_rate_hz") || !j["sampling_rate_hz"].is_number())
        throw std::runtime_error("manifest: missing sampling_rate_hz");
    if (!j.contains("records") || !j["records"].is_array())
        throw std::runtime_error("manifest: missing records array");

    Dataset ds;
    ds.sampling_rate_hz = j["sampling_rate_hz"].get<double>();
    if (ds.sampling_rate_hz <= 0) throw std::runtime_error("manifest: sampling rate must be positive");

    const auto base = manifest_path.parent_path();
    std::set<std::string> ids;
    for (const auto& rj : j["records"]) {
        EcgRecord rec;
        if (!rj.contains("id") || !rj["id"].is_string() || rj["id"].get<std::string>().empty())
            throw std::runtime_error("manifest: record without a usable id");
        rec.id = rj["id"].get<std::string>();
        if (!ids.insert(rec.id).second)
            throw std::runtime_error("manifest: duplicate record id: " + rec.id);
        if (!rj.contains("file") || !rj["file"].is_string())
            throw std::runtime_error("record " + rec.id + ": missing file field");
        if (!rj.contains("labels") || !rj["labels"].is_array() || rj["labels"].empty())
            throw std::runtime_error("record " + rec.id + ": needs at least one label");
        for (const auto& tok : rj["labels"]) {
            if (!tok.is_string())
                throw std::runtime_error("record " + rec.id + ": labels must be strings");
            try {
                rec.labels[static_cast<std::size_t>(class_index(tok.get<std::string>()))] = true;
            } catch (const std::invalid_argument& e) {
                throw std::runtime_error("record " + rec.id + ": " + e.what());
            }
        }
        if (!rj.contains("partition") || !rj["partition"].is_string())
            throw std::runtime_error("record " + rec.id + ": missing partition");
        rec.partition = partition_from(rj["partition"].get<std::string>());

        const auto sig_path = base / rj["file"].get<std::string>();
        rec.signal = detail::read_f32_file(sig_path);
        if (rec.signal.size() % kNumLeads != 0)
            throw std::runtime_error("record " + rec.id + ": sample count " +
                                     std::to_string(rec.signal.size()) +
                                     " does not divide into " + std::to_string(kNumLeads) +
                                     " leads");
        rec.samples = static_cast<int>(rec.signal.size()) / kNumLeads;
        if (!ds.records.empty() && rec.samples != ds.records.front().samples)
            throw std::runtime_error("record " + rec.id + ": has " +
                                     std::to_string(rec.samples) + " samples per lead but " +
                                     ds.records.front().id + " has " +
                                     std::to_string(ds.records.front().samples));
        ds.records.push_back(std::move(rec));
    }
    if (ds.records.empty())
        std::cerr << "warning: manifest lists no records: " << manifest_path << "\n";
    return ds;
}

inline void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "signals");
    nlohmann::json j;
    j["version"] = 1;
    j["sampling_rate_hz"] = ds.sampling_rate_hz;
    j["records"] = nlohmann::json::array();
    for (const auto& rec : ds.records) {
        const std::string rel = "signals/" + rec.id + ".f32";
        detail::write_f32_file(dir / rel, rec.signal);
        nlohmann::json rj;
        rj["id"] = rec.id;
        rj["file"] = rel;
        rj["labels"] = nlohmann::json::array();
        for (int c = 0; c < kNumClasses; ++c)
            if (rec.labels[static_cast<std::size_t>(c)]) rj["labels"].push_back(kClassNames[c]);
        rj["partition"] = partition_name(rec.partition);
        j["records"].push_back(std::move(rj));
    }
    std::ofstream out(dir / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Synthetic ECG generation. Beats are sums of Gaussian bumps (P, QRS, T) on a
// per-lead gain profile; each disease class alters the waveform on its own
// small set of leads, which is what makes lead ranking and attention
// placement verifiable on this data.

struct SyntheticSpec {
    enum class Feature { broad_qrs, tall_r, st_elevation, st_depression };
    struct Injection {
        std::vector<int> leads;
        Feature feature = Feature::broad_qrs;
        double magnitude = 1.0;
        // persistent features mark every beat; episodic ones mark a random
        // subset of feature_beats_min..feature_beats_max beats
        bool persistent = false;
    };

    int count = 600;
    int samples = 500;
    double sampling_hz = 100.0;
    std::uint64_t seed = 1;
    // noise and lump amplitudes are in units of the normalized lead, whose
    // normal morphology has unit standard deviation by construction
    double noise_sigma = 0.15;
    // slow label-independent lumps dropped on random leads; they keep pooled
    // background statistics record-dependent so attention has to earn its keep
    int distractors = 3;
    double distractor_amp = 0.9;
    // sharp label-independent transients for texture
    int artifacts = 2;
    double artifact_amp = 0.7;
    // heart-rate spread and per-beat amplitude jitter; both vary how much of
    // a record the disease evidence occupies, which global pooling cannot
    // normalize away but localized attention can
    double bpm_low = 48.0;
    double bpm_high = 84.0;
    double beat_jitter = 0.15;
    // per-record scaling of the injected magnitude; borderline positives keep
    // the training loss alive instead of letting it collapse early
    double magnitude_jitter = 0.25;
    // how many beats an episodic disease marks. Sparse expression gives the
    // temporal attention specific sites to find instead of a rhythmic
    // pattern spread over the whole record
    int feature_beats_min = 2;
    int feature_beats_max = 4;
    // label-independent lookalikes: isolated extra beats carrying a disease
    // shape at partial strength. Off by default: they blur the line between
    // summed and per-site readouts, but because they put feature-shaped
    // content on negative records they also train the attention scores away
    // from feature-shaped sites, which works against localization. They are
    // described by their own table so that reconfiguring the true diseases
    // cannot change them
    int decoys_max = 0;
    double decoy_lo = 0.30;
    double decoy_hi = 0.55;
    double nsr_fraction = 0.30;    // records labeled NSR only
    double multi_fraction = 0.20;  // records carrying two disease labels
    double test_fraction = 0.20;
    // indexed by class - 1 (CD, HYP, MI, STTC). Magnitudes are set so that
    // each feature occupies a region of shape space that nothing
    // label-independent visits: wide QRS sits in a width band between the
    // sharp transients and the slow lumps, the tall R clears the highest
    // normal peak by a wide margin, and the ST shelves are the only
    // edge-plus-plateau content anywhere. Without that separation the
    // majority-negative records carry lookalikes, and training pushes the
    // attention scores down on feature-shaped sites instead of up
    std::array<Injection, 4> disease = {
        Injection{{6, 7}, Feature::broad_qrs, 2.0},       // CD: wide QRS, V1 V2
        Injection{{10, 11}, Feature::tall_r, 1.6},        // HYP: tall R, V5 V6
        Injection{{1, 5}, Feature::st_elevation, 0.25},   // MI: raised ST, II aVF
        Injection{{0, 4}, Feature::st_depression, 0.25},  // STTC: depressed ST, I aVL
    };
    // nominal decoy shapes; the drawn strength in [decoy_lo, decoy_hi]
    // keeps them clearly weaker than the weakest true feature
    std::array<Injection, 4> decoy = {
        Injection{{6, 7}, Feature::broad_qrs, 2.0},
        Injection{{10, 11}, Feature::tall_r, 1.6},
        Injection{{1, 5}, Feature::st_elevation, 0.25},
        Injection{{0, 4}, Feature::st_depression, 0.25},
    };

    // every disease expressed on one lead only; all other leads carry
    // identical normal morphology, so exactly one lead is informative
    static SyntheticSpec single_informative(int lead, std::uint64_t seed) {
        SyntheticSpec s;
        s.seed = seed;
        for (auto& inj : s.disease) inj.leads = {lead};
        for (auto& inj : s.decoy) inj.leads = {lead};
        return s;
    }
};

struct FeatureWindows {
    int cls = 0;                                // class whose feature was injected
    std::vector<int> leads;                     // leads carrying the feature
    std::vector<std::pair<int, int>> windows;   // [start, end) sample ranges
};

struct SyntheticData {
    Dataset data;
    std::vector<std::vector<FeatureWindows>> injections;  // parallel to data.records
};

inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    if (spec.count < 1 || spec.samples < 32)
        throw std::invalid_argument("generate_synthetic: need count >= 1 and samples >= 32");
    if (spec.magnitude_jitter < 0.0 || spec.magnitude_jitter >= 1.0)
        throw std::invalid_argument("generate_synthetic: magnitude_jitter must be in [0, 1)");
    Rng rng(spec.seed);
    const double fs = spec.sampling_hz;
    const int t = spec.samples;

    static constexpr std::array<double, kNumLeads> kLeadGain = {
        0.80, 1.00, 0.60, -0.70, 0.50, 0.90, 0.70, 0.90, 1.10, 1.00, 0.95, 0.85};

    // record kinds: 0 = NSR, 1 = single disease, 2 = disease pair
    const int n_nsr = static_cast<int>(std::llround(spec.nsr_fraction * spec.count));
    const int n_multi = static_cast<int>(std::llround(spec.multi_fraction * spec.count));
    std::vector<int> kind(static_cast<std::size_t>(spec.count), 1);
    for (int i = 0; i < n_nsr && i < spec.count; ++i) kind[static_cast<std::size_t>(i)] = 0;
    for (int i = n_nsr; i < n_nsr + n_multi && i < spec.count; ++i)
        kind[static_cast<std::size_t>(i)] = 2;
    rng.shuffle(kind);

    std::vector<int> test_flags(static_cast<std::size_t>(spec.count), 0);
    const int n_test = static_cast<int>(std::llround(spec.test_fraction * spec.count));
    for (int i = 0; i < n_test && i < spec.count; ++i) test_flags[static_cast<std::size_t>(i)] = 1;
    rng.shuffle(test_flags);

    SyntheticData out;
    out.data.sampling_rate_hz = fs;
    out.data.records.reserve(static_cast<std::size_t>(spec.count));
    out.injections.resize(static_cast<std::size_t>(spec.count));

    for (int r = 0; r < spec.count; ++r) {
        EcgRecord rec;
        {
            std::ostringstream id;
            id << "syn-" << std::setw(5) << std::setfill('0') << r;
            rec.id = id.str();
        }
        rec.samples = t;
        rec.partition = test_flags[static_cast<std::size_t>(r)] ? Partition::test
                                                                : Partition::development;
        rec.signal.assign(static_cast<std::size_t>(kNumLeads) * t, 0.0f);

        std::vector<int> classes;  // diseases present (1..4)
        switch (kind[static_cast<std::size_t>(r)]) {
            case 0:
                rec.labels[0] = true;
                break;
            case 1:
                classes.push_back(1 + static_cast<int>(rng.uniform_int(4)));
                break;
            default: {
                const int a = 1 + static_cast<int>(rng.uniform_int(4));
                int b = 1 + static_cast<int>(rng.uniform_int(3));
                if (b >= a) ++b;
                classes = {std::min(a, b), std::max(a, b)};
            }
        }
        for (int c : classes) rec.labels[static_cast<std::size_t>(c)] = true;

        const double bpm = rng.uniform(spec.bpm_low, spec.bpm_high);
        const int period = static_cast<int>(std::llround(fs * 60.0 / bpm));
        const int phase = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(period)));

        // the P/QRS/T amplitude mix varies per record; pooled waveform energy
        // is then ambiguous about any single component, and per-lead z-scoring
        // cannot undo a mix change the way it undoes a plain gain change
        const double p_amp = rng.uniform(0.08, 0.22);
        const double qrs_base = rng.uniform(0.85, 1.15);
        const double t_amp = rng.uniform(0.25, 0.55);

        const double qrs_sigma0 = 0.015 * fs;

        // beat grid; a pure function of phase and period
        std::vector<int> beat_centers;
        for (int c = phase; c < t + period; c += period) {
            if (c - 0.20 * fs > t) break;
            beat_centers.push_back(c);
        }
        const int n_beats = static_cast<int>(beat_centers.size());

        // per labeled class: jittered magnitude and the subset of beats that
        // express the feature at full strength
        std::vector<double> class_mag(classes.size());
        std::vector<std::vector<char>> class_on(classes.size(),
                                                std::vector<char>(static_cast<std::size_t>(n_beats), 0));
        for (std::size_t ci = 0; ci < classes.size(); ++ci) {
            const auto& inj = spec.disease[static_cast<std::size_t>(classes[ci] - 1)];
            class_mag[ci] = inj.magnitude *
                            rng.uniform(1.0 - spec.magnitude_jitter, 1.0 + spec.magnitude_jitter);
            if (n_beats == 0) continue;
            if (inj.persistent) {
                std::fill(class_on[ci].begin(), class_on[ci].end(), char{1});
                continue;
            }
            const int lo_k = std::max(1, std::min(spec.feature_beats_min, n_beats));
            const int hi_k = std::max(lo_k, std::min(spec.feature_beats_max, n_beats));
            const int k = lo_k + static_cast<int>(rng.uniform_int(
                                     static_cast<std::uint64_t>(hi_k - lo_k + 1)));
            std::vector<int> idx(static_cast<std::size_t>(n_beats));
            std::iota(idx.begin(), idx.end(), 0);
            for (int i = 0; i < k; ++i) {
                const int j = i + static_cast<int>(rng.uniform_int(
                                      static_cast<std::uint64_t>(n_beats - i)));
                std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
                class_on[ci][static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1;
            }
        }

        // decoys are drawn for every record from their own table, so their
        // population is identical whether or not any disease is present
        struct Decoy {
            int entry;
            double center, strength, jit;
        };
        std::vector<Decoy> decoys;
        for (int e = 0; e < 4; ++e) {
            const int n = static_cast<int>(rng.uniform_int(
                static_cast<std::uint64_t>(std::max(0, spec.decoys_max) + 1)));
            for (int d = 0; d < n; ++d) {
                Decoy dec;
                dec.entry = e;
                dec.center = rng.uniform(0.0, static_cast<double>(t));
                dec.strength = rng.uniform(spec.decoy_lo, spec.decoy_hi);
                dec.jit = rng.uniform(1.0 - spec.beat_jitter, 1.0 + spec.beat_jitter);
                decoys.push_back(dec);
            }
        }

        // distractor draws sit after the label and shape draws, so changing
        // their count cannot reshuffle what a record is labeled with
        struct Lump {
            int lead;
            double center, sigma, amp;
        };
        std::vector<Lump> lumps;
        lumps.reserve(static_cast<std::size_t>(
            std::max(0, spec.distractors) + std::max(0, spec.artifacts)));
        // lump widths are banded to stay off the injected features: sharp
        // transients below the wide-QRS band, slow lumps above it, and both
        // round-crested so neither imitates a shelf edge
        for (int d = 0; d < spec.distractors; ++d) {
            Lump l;
            l.lead = static_cast<int>(rng.uniform_int(kNumLeads));
            l.center = rng.uniform(0.0, static_cast<double>(t));
            l.sigma = rng.uniform(0.08, 0.14) * fs;
            l.amp = rng.uniform(0.5, 1.0) * spec.distractor_amp;
            if (rng.uniform_int(2) == 0) l.amp = -l.amp;
            lumps.push_back(l);
        }
        for (int d = 0; d < spec.artifacts; ++d) {
            Lump l;
            l.lead = static_cast<int>(rng.uniform_int(kNumLeads));
            l.center = rng.uniform(0.0, static_cast<double>(t));
            l.sigma = rng.uniform(0.01, 0.025) * fs;
            l.amp = rng.uniform(0.5, 1.0) * spec.artifact_amp;
            if (rng.uniform_int(2) == 0) l.amp = -l.amp;
            lumps.push_back(l);
        }

        auto add_bump = [t](float* row, double center, double sigma, double amp) {
            const int lo = std::max(0, static_cast<int>(std::floor(center - 4.0 * sigma)));
            const int hi = std::min(t - 1, static_cast<int>(std::ceil(center + 4.0 * sigma)));
            for (int i = lo; i <= hi; ++i) {
                const double d = (i - center) / sigma;
                row[i] += static_cast<float>(amp * std::exp(-0.5 * d * d));
            }
        };
        // flat plateau with logistic edges, used for the ST segment shift: a
        // level change between the QRS and the T wave rather than another
        // peak, so no combination of waves and lumps mimics it
        auto add_shelf = [t](float* row, double left, double right, double tau, double amp) {
            const int lo = std::max(0, static_cast<int>(std::floor(left - 5.0 * tau)));
            const int hi = std::min(t - 1, static_cast<int>(std::ceil(right + 5.0 * tau)));
            for (int i = lo; i <= hi; ++i) {
                const double up = 1.0 / (1.0 + std::exp(-(i - left) / tau));
                const double down = 1.0 / (1.0 + std::exp(-(i - right) / tau));
                row[i] += static_cast<float>(amp * (up - down));
            }
        };

        struct Shape {
            double qrs_amp, qrs_sigma, st_amp;
        };
        auto apply_feature = [qrs_sigma0](Shape& s, SyntheticSpec::Feature f, double mag) {
            switch (f) {
                case SyntheticSpec::Feature::broad_qrs:
                    s.qrs_sigma = qrs_sigma0 * (1.0 + mag);
                    break;
                case SyntheticSpec::Feature::tall_r:
                    s.qrs_amp *= 1.0 + mag;
                    break;
                case SyntheticSpec::Feature::st_elevation:
                    s.st_amp += mag;
                    break;
                case SyntheticSpec::Feature::st_depression:
                    s.st_amp -= mag;
                    break;
            }
        };

        // Each lead is assembled twice: once as drawn and once with every
        // shape parameter at its normal value. Dividing the lead by the
        // normal assembly's spread removes overall amplitude as a cue: a
        // record's scale then says nothing about its labels, and a feature
        // survives only as a change of shape at the injection site. The
        // normal assembly ignores the injected features, so the divisor is
        // the same whether or not a disease is present.
        std::vector<float> base(static_cast<std::size_t>(kNumLeads) * t, 0.0f);
        for (int j = 0; j < n_beats; ++j) {
            const int c = beat_centers[static_cast<std::size_t>(j)];
            const double jit = rng.uniform(1.0 - spec.beat_jitter, 1.0 + spec.beat_jitter);
            for (int m = 0; m < kNumLeads; ++m) {
                float* row = rec.signal.data() + static_cast<std::size_t>(m) * t;
                float* ref = base.data() + static_cast<std::size_t>(m) * t;
                const double gain = jit * kLeadGain[static_cast<std::size_t>(m)];
                Shape s{qrs_base, qrs_sigma0, 0.0};
                for (std::size_t ci = 0; ci < classes.size(); ++ci) {
                    if (!class_on[ci][static_cast<std::size_t>(j)]) continue;
                    const auto& inj = spec.disease[static_cast<std::size_t>(classes[ci] - 1)];
                    if (std::find(inj.leads.begin(), inj.leads.end(), m) != inj.leads.end())
                        apply_feature(s, inj.feature, class_mag[ci]);
                }
                add_bump(row, c - 0.16 * fs, 0.020 * fs, p_amp * gain);   // P
                add_bump(ref, c - 0.16 * fs, 0.020 * fs, p_amp * gain);
                add_bump(row, c, s.qrs_sigma, s.qrs_amp * gain);          // QRS
                add_bump(ref, c, qrs_sigma0, qrs_base * gain);
                add_bump(row, c + 0.34 * fs, 0.080 * fs, t_amp * gain);   // T
                add_bump(ref, c + 0.34 * fs, 0.080 * fs, t_amp * gain);
                if (s.st_amp != 0.0)
                    add_shelf(row, c + 0.08 * fs, c + 0.23 * fs, 0.012 * fs,
                              s.st_amp * gain);
            }
        }

        // decoy beats go in before the per-lead scaling so a decoy's strength
        // stays a fixed fraction of a true feature's, and only into the drawn
        // signal, never the normal reference
        for (const auto& dec : decoys) {
            const auto& inj = spec.decoy[static_cast<std::size_t>(dec.entry)];
            for (int m : inj.leads) {
                float* row = rec.signal.data() + static_cast<std::size_t>(m) * t;
                const double gain = dec.jit * kLeadGain[static_cast<std::size_t>(m)];
                Shape s{qrs_base, qrs_sigma0, 0.0};
                apply_feature(s, inj.feature, dec.strength * inj.magnitude);
                add_bump(row, dec.center - 0.16 * fs, 0.020 * fs, p_amp * gain);
                add_bump(row, dec.center, s.qrs_sigma, s.qrs_amp * gain);
                add_bump(row, dec.center + 0.34 * fs, 0.080 * fs, t_amp * gain);
                if (s.st_amp != 0.0)
                    add_shelf(row, dec.center + 0.08 * fs, dec.center + 0.23 * fs,
                              0.012 * fs, s.st_amp * gain);
            }
        }

        for (int m = 0; m < kNumLeads; ++m) {
            const float* ref = base.data() + static_cast<std::size_t>(m) * t;
            double sum = 0.0;
            for (int i = 0; i < t; ++i) sum += ref[i];
            const double mean = sum / t;
            double sq = 0.0;
            for (int i = 0; i < t; ++i) sq += (ref[i] - mean) * (ref[i] - mean);
            const double sd = std::sqrt(sq / t);
            // a record short enough to hold no beat stays unscaled
            const double k = sd > 1e-6 ? 1.0 / sd : 1.0;
            float* row = rec.signal.data() + static_cast<std::size_t>(m) * t;
            for (int i = 0; i < t; ++i)
                row[i] = static_cast<float>(row[i] * k);
        }

        // feature windows: the beats expressing each class, clipped to the record
        for (std::size_t ci = 0; ci < classes.size(); ++ci) {
            const int c = classes[ci];
            const auto& inj = spec.disease[static_cast<std::size_t>(c - 1)];
            FeatureWindows fw;
            fw.cls = c;
            fw.leads = inj.leads;
            for (int j = 0; j < n_beats; ++j) {
                if (!class_on[ci][static_cast<std::size_t>(j)]) continue;
                const int beat = beat_centers[static_cast<std::size_t>(j)];
                int lo, hi;
                if (inj.feature == SyntheticSpec::Feature::broad_qrs ||
                    inj.feature == SyntheticSpec::Feature::tall_r) {
                    const double sigma = inj.feature == SyntheticSpec::Feature::broad_qrs
                                             ? qrs_sigma0 * (1.0 + class_mag[ci])
                                             : qrs_sigma0;
                    lo = beat - static_cast<int>(std::ceil(5.0 * sigma));
                    hi = beat + static_cast<int>(std::ceil(5.0 * sigma));
                } else {
                    // ST shelf edges sit at 0.08 s and 0.23 s; pad past the
                    // logistic tails so the window holds nearly all its mass
                    lo = beat + static_cast<int>(0.03 * fs);
                    hi = beat + static_cast<int>(std::ceil(0.28 * fs));
                }
                lo = std::max(0, lo);
                hi = std::min(t, hi + 1);
                if (lo < hi) fw.windows.emplace_back(lo, hi);
            }
            out.injections[static_cast<std::size_t>(r)].push_back(std::move(fw));
        }

        for (const auto& l : lumps) {
            float* row = rec.signal.data() + static_cast<std::size_t>(l.lead) * t;
            add_bump(row, l.center, l.sigma, l.amp);
        }

        for (auto& v : rec.signal)
            v += static_cast<float>(spec.noise_sigma * rng.normal());

        out.data.records.push_back(std::move(rec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-partition summary: label instances per class, label-count histogram,
// record and instance totals.

struct PartitionCounts {
    std::array<std::array<long, kNumClasses>, 2> labels{};     // [partition][class]
    std::array<std::array<long, kNumClasses + 1>, 2> cardinality{};  // [partition][count]
    std::array<long, 2> records{};
    std::array<long, 2> label_instances{};
};

inline PartitionCounts partition_counts(const Dataset& ds) {
    PartitionCounts pc;
    for (const auto& rec : ds.records) {
        const int p = rec.partition == Partition::test ? 1 : 0;
        ++pc.records[static_cast<std::size_t>(p)];
        const int n = rec.label_count();
        ++pc.cardinality[static_cast<std::size_t>(p)][static_cast<std::size_t>(n)];
        pc.label_instances[static_cast<std::size_t>(p)] += n;
        for (int c = 0; c < kNumClasses; ++c)
            if (rec.labels[static_cast<std::size_t>(c)])
                ++pc.labels[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)];
    }
    return pc;
}

inline std::string format_partition_counts(const PartitionCounts& pc) {
    std::ostringstream os;
    os << "                development      test\n";
    auto row = [&os](const std::string& name, long dev, long test) {
        os << std::left << std::setw(16) << name << std::right << std::setw(11) << dev
           << std::setw(10) << test << "\n";
    };
    for (int c = 0; c < kNumClasses; ++c)
        row(kClassNames[static_cast<std::size_t>(c)], pc.labels[0][static_cast<std::size_t>(c)],
            pc.labels[1][static_cast<std::size_t>(c)]);
    static constexpr std::array<const char*, kNumClasses> kCardNames = {"one", "two", "three",
                                                                        "four", "five"};
    for (int n = 1; n <= kNumClasses; ++n)
        row(std::string("labels: ") + kCardNames[static_cast<std::size_t>(n - 1)],
            pc.cardinality[0][static_cast<std::size_t>(n)],
            pc.cardinality[1][static_cast<std::size_t>(n)]);
    row("label instances", pc.label_instances[0], pc.label_instances[1]);
    row("records", pc.records[0], pc.records[1]);
    return os.str();
}

}  // namespace atcnn

#endif
