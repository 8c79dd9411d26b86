// Command-line front end: dataset synthesis, preprocessing, per-class
// training, ensemble prediction, evaluation, lead selection and attention
// export. Each subcommand is a thin wrapper over the library headers.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "atcnn/data.hpp"
#include "atcnn/ensemble.hpp"
#include "atcnn/leadselect.hpp"
#include "atcnn/metrics.hpp"
#include "atcnn/model_io.hpp"
#include "atcnn/signal.hpp"
#include "atcnn/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// exit codes: 1 generic failure, then one per recognizable disappointment
constexpr int kExitMissingInput = 2;
constexpr int kExitIncompleteEnsemble = 3;
constexpr int kExitEmptyPartition = 4;
constexpr int kExitUntrainedClass = 5;

struct CliError : std::runtime_error {
    int code;
    CliError(int code, const std::string& msg) : std::runtime_error(msg), code(code) {}
};

atcnn::Dataset load_checked(const fs::path& manifest) {
    if (!fs::exists(manifest))
        throw CliError(kExitMissingInput, "manifest not found: " + manifest.string());
    return atcnn::load_dataset(manifest);
}

std::vector<int> partition_indices(const atcnn::Dataset& ds, const std::string& which) {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(ds.records.size()); ++i) {
        const auto p = ds.records[static_cast<std::size_t>(i)].partition;
        if (which == "all" || partition_name(p) == which) idx.push_back(i);
    }
    if (idx.empty())
        throw CliError(kExitEmptyPartition, "no records in partition: " + which);
    return idx;
}

int parse_lead(const std::string& token) {
    try {
        return atcnn::lead_index(token);
    } catch (const std::invalid_argument&) {
        try {
            const int m = std::stoi(token);
            if (m >= 0 && m < atcnn::kNumLeads) return m;
        } catch (...) {
        }
        throw std::runtime_error("not a lead name or index: " + token);
    }
}

// ---------------------------------------------------------------------------

struct SynthOptions {
    std::string out;
    int count = 600;
    int samples = 500;
    double rate = 100.0;
    double noise = atcnn::SyntheticSpec{}.noise_sigma;
    int distractors = atcnn::SyntheticSpec{}.distractors;
    std::uint64_t seed = 1;
    std::string preset = "mixed";
    int informative_lead = 7;
};

int run_synth(const SynthOptions& opt) {
    atcnn::SyntheticSpec spec;
    if (opt.preset == "single")
        spec = atcnn::SyntheticSpec::single_informative(opt.informative_lead, opt.seed);
    else if (opt.preset != "mixed")
        throw std::runtime_error("unknown preset: " + opt.preset);
    spec.count = opt.count;
    spec.samples = opt.samples;
    spec.sampling_hz = opt.rate;
    spec.noise_sigma = opt.noise;
    spec.distractors = opt.distractors;
    spec.seed = opt.seed;

    const auto syn = atcnn::generate_synthetic(spec);
    atcnn::save_dataset(syn.data, opt.out);

    json sidecar = json::array();
    for (std::size_t r = 0; r < syn.data.records.size(); ++r) {
        json rec;
        rec["id"] = syn.data.records[r].id;
        rec["features"] = json::array();
        for (const auto& fw : syn.injections[r]) {
            json f;
            f["class"] = atcnn::kClassNames[static_cast<std::size_t>(fw.cls)];
            f["leads"] = fw.leads;
            f["windows"] = json::array();
            for (const auto& [lo, hi] : fw.windows) f["windows"].push_back({lo, hi});
            rec["features"].push_back(std::move(f));
        }
        sidecar.push_back(std::move(rec));
    }
    std::ofstream(fs::path(opt.out) / "injections.json") << sidecar.dump(2) << "\n";

    const auto pc = atcnn::partition_counts(syn.data);
    std::cout << "wrote " << syn.data.records.size() << " records to " << opt.out << "\n"
              << atcnn::format_partition_counts(pc);
    return 0;
}

// ---------------------------------------------------------------------------

struct PreprocessOptions {
    std::string manifest, out;
    double low = 0.5, high = 45.0;
    int order = 4;
    bool forward_only = false;
};

int run_preprocess(const PreprocessOptions& opt) {
    auto ds = load_checked(opt.manifest);
    if (ds.records.empty()) throw CliError(kExitEmptyPartition, "manifest lists no records");

    atcnn::FilterSpec filter;
    filter.low_hz = opt.low;
    filter.high_hz = opt.high;
    filter.order = opt.order;
    filter.sampling_hz = ds.sampling_rate_hz;
    filter.mode = opt.forward_only ? atcnn::FilterSpec::Mode::forward
                                   : atcnn::FilterSpec::Mode::forward_backward;

    atcnn::Dataset out;
    out.sampling_rate_hz = ds.sampling_rate_hz;
    for (const auto& rec : ds.records) {
        auto res = atcnn::preprocess_record(rec, filter);
        for (int m = 0; m < atcnn::kNumLeads; ++m)
            if (res.constant_lead[static_cast<std::size_t>(m)])
                std::cerr << "warning: record " << rec.id << " lead " << atcnn::kLeadNames[m]
                          << " is constant; zeroed\n";
        out.records.push_back(std::move(res.record));
    }
    atcnn::save_dataset(out, opt.out);
    std::cout << "preprocessed " << out.records.size() << " records into " << opt.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct TrainOptions {
    std::string manifest, models_dir;
    std::string cls = "all";
    std::uint64_t seed = 0;
    double lr = 1e-3;
    int batch = 32;
    int epochs = 100;
    int patience = 10;
    std::string stop_metric = "loss";
    int channels = 32;
    int kernel = 3;
    int layers_per_block = 2;
    std::vector<int> dilations = {1, 2, 4};
    std::string variant = "full";
    std::vector<std::string> leads;
    bool scalar_temporal_bias = false;
    bool parallel = false;
};

int run_train(const TrainOptions& opt) {
    const auto ds = load_checked(opt.manifest);
    bool any_dev = false;
    for (const auto& rec : ds.records) any_dev |= rec.partition == atcnn::Partition::development;
    if (!any_dev)
        throw CliError(kExitEmptyPartition, "no development records to train on");

    atcnn::ArchConfig arch;
    arch.channels = opt.channels;
    arch.kernel = opt.kernel;
    arch.layers_per_block = opt.layers_per_block;
    arch.dilations = opt.dilations;
    arch.samples = ds.records.front().samples;
    arch.variant = atcnn::variant_from(opt.variant);
    arch.per_timestep_temporal_bias = !opt.scalar_temporal_bias;
    if (!opt.leads.empty()) {
        arch.leads.clear();
        for (const auto& tok : opt.leads) arch.leads.push_back(parse_lead(tok));
    }

    std::vector<int> classes;
    if (opt.cls == "all")
        for (int c = 0; c < atcnn::kNumClasses; ++c) classes.push_back(c);
    else
        classes.push_back(atcnn::class_index(opt.cls));

    fs::create_directories(opt.models_dir);

    // every class trains from its own derived seed, so results do not depend
    // on whether the classes run one by one or side by side
    auto train_one = [&](int c) {
        atcnn::ArchConfig a = arch;
        a.target_class = c;
        atcnn::TrainConfig cfg;
        cfg.lr = opt.lr;
        cfg.batch = opt.batch;
        cfg.max_epochs = opt.epochs;
        cfg.patience = opt.patience;
        cfg.stop_metric = opt.stop_metric == "f1" ? atcnn::TrainConfig::StopMetric::val_f1
                                                  : atcnn::TrainConfig::StopMetric::val_loss;
        cfg.seed = opt.seed + static_cast<std::uint64_t>(c);
        auto res = atcnn::train_binary(ds, a, cfg);

        const auto name = std::string(atcnn::kClassNames[static_cast<std::size_t>(c)]);
        atcnn::save_model(res.model, atcnn::member_path(opt.models_dir, c));
        atcnn::write_train_log(fs::path(opt.models_dir) / ("train_" + name + ".log"), res.log);

        std::ostringstream line;
        line << name << ": " << res.log.size() << " epochs, best epoch " << res.best_epoch
             << ", val loss " << std::setprecision(6)
             << res.log[static_cast<std::size_t>(res.best_epoch - 1)].val_loss << ", val F1 "
             << res.log[static_cast<std::size_t>(res.best_epoch - 1)].val_f1;
        return line.str();
    };

    if (opt.parallel && classes.size() > 1) {
        std::vector<std::string> summaries(classes.size());
        std::vector<std::string> failures(classes.size());
        std::vector<std::thread> workers;
        for (std::size_t i = 0; i < classes.size(); ++i)
            workers.emplace_back([&, i] {
                try {
                    summaries[i] = train_one(classes[i]);
                } catch (const std::exception& e) {
                    failures[i] = e.what();
                }
            });
        for (auto& w : workers) w.join();
        for (const auto& f : failures)
            if (!f.empty()) throw std::runtime_error(f);
        for (const auto& s : summaries) std::cout << s << "\n";
    } else {
        for (int c : classes) std::cout << train_one(c) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------

atcnn::Ensemble load_ensemble_checked(const fs::path& dir) {
    std::string missing;
    for (int c = 0; c < atcnn::kNumClasses; ++c)
        if (!fs::exists(atcnn::member_path(dir, c)))
            missing += missing.empty() ? atcnn::member_path(dir, c).filename().string()
                                       : ", " + atcnn::member_path(dir, c).filename().string();
    if (!missing.empty())
        throw CliError(kExitIncompleteEnsemble, "ensemble in " + dir.string() +
                                                    " is incomplete: missing " + missing);
    return atcnn::load_ensemble(dir);
}

struct PredictOptions {
    std::string manifest, models_dir, partition = "test", out;
    double threshold = 0.5;
};

int run_predict(const PredictOptions& opt) {
    const auto ds = load_checked(opt.manifest);
    const auto ensemble = load_ensemble_checked(opt.models_dir);
    const auto idx = partition_indices(ds, opt.partition);

    json out_json = json::array();
    std::cout << std::left << std::setw(14) << "record";
    for (const auto* name : atcnn::kClassNames) std::cout << std::right << std::setw(7) << name;
    std::cout << "  labels            risk\n";

    for (int i : idx) {
        const auto& rec = ds.records[static_cast<std::size_t>(i)];
        const auto probs = atcnn::predict_probs(ensemble, rec);
        std::array<bool, atcnn::kNumClasses> labels{};
        std::string label_text;
        for (int c = 0; c < atcnn::kNumClasses; ++c) {
            labels[static_cast<std::size_t>(c)] = probs[static_cast<std::size_t>(c)] >= opt.threshold;
            if (labels[static_cast<std::size_t>(c)])
                label_text += (label_text.empty() ? "" : ",") + std::string(atcnn::kClassNames[c]);
        }
        if (label_text.empty()) label_text = "-";
        const auto risk = atcnn::risk_stratify(labels);

        std::cout << std::left << std::setw(14) << rec.id;
        for (double p : probs)
            std::cout << std::right << std::setw(7) << std::fixed << std::setprecision(3) << p;
        std::cout << "  " << std::left << std::setw(18) << label_text
                  << atcnn::risk_group_name(risk) << "\n";
        std::cout.unsetf(std::ios::fixed);

        json rj;
        rj["id"] = rec.id;
        for (int c = 0; c < atcnn::kNumClasses; ++c)
            rj["probs"][atcnn::kClassNames[c]] = probs[static_cast<std::size_t>(c)];
        rj["labels"] = json::array();
        for (int c = 0; c < atcnn::kNumClasses; ++c)
            if (labels[static_cast<std::size_t>(c)]) rj["labels"].push_back(atcnn::kClassNames[c]);
        rj["risk"] = atcnn::risk_group_name(risk);
        out_json.push_back(std::move(rj));
    }
    if (!opt.out.empty()) std::ofstream(opt.out) << out_json.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct EvaluateOptions {
    std::string manifest, models_dir, partition = "test", out;
    double threshold = 0.5;
};

int run_evaluate(const EvaluateOptions& opt) {
    const auto ds = load_checked(opt.manifest);
    const auto ensemble = load_ensemble_checked(opt.models_dir);
    const auto idx = partition_indices(ds, opt.partition);

    std::vector<std::array<bool, atcnn::kNumClasses>> pred, truth;
    std::vector<std::array<double, atcnn::kNumClasses>> scores;
    for (int i : idx) {
        const auto& rec = ds.records[static_cast<std::size_t>(i)];
        const auto probs = atcnn::predict_probs(ensemble, rec);
        std::array<bool, atcnn::kNumClasses> labels{};
        for (int c = 0; c < atcnn::kNumClasses; ++c)
            labels[static_cast<std::size_t>(c)] = probs[static_cast<std::size_t>(c)] >= opt.threshold;
        pred.push_back(labels);
        truth.push_back(rec.labels);
        scores.push_back(probs);
    }

    json out_json;
    out_json["partition"] = opt.partition;
    out_json["records"] = idx.size();
    out_json["threshold"] = opt.threshold;

    std::cout << "class     recall  precision  specificity  accuracy       f1      auc\n";
    std::array<atcnn::ClassMetrics, atcnn::kNumClasses> per_class;
    for (int c = 0; c < atcnn::kNumClasses; ++c) {
        std::vector<bool> p, t;
        std::vector<float> s;
        std::vector<int> y;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            p.push_back(pred[i][static_cast<std::size_t>(c)]);
            t.push_back(truth[i][static_cast<std::size_t>(c)]);
            s.push_back(static_cast<float>(scores[i][static_cast<std::size_t>(c)]));
            y.push_back(truth[i][static_cast<std::size_t>(c)] ? 1 : 0);
        }
        const auto m = atcnn::derive_metrics(atcnn::count_confusion(p, t));
        per_class[static_cast<std::size_t>(c)] = m;

        double auc = 0.0;
        bool auc_defined = true;
        try {
            auc = atcnn::roc_curve(s, y).auc;
        } catch (const std::invalid_argument&) {
            auc_defined = false;  // partition carries only one side of this class
        }

        auto cell = [](double v, bool defined) {
            std::ostringstream os;
            if (defined)
                os << std::fixed << std::setprecision(4) << v;
            else
                os << "n/a";
            return os.str();
        };
        std::cout << std::left << std::setw(6) << atcnn::kClassNames[c] << std::right
                  << std::setw(10) << cell(m.recall, m.recall_defined) << std::setw(11)
                  << cell(m.precision, m.precision_defined) << std::setw(13)
                  << cell(m.specificity, m.specificity_defined) << std::setw(10)
                  << cell(m.accuracy, m.accuracy_defined) << std::setw(9)
                  << cell(m.f1, m.f1_defined) << std::setw(9) << cell(auc, auc_defined) << "\n";

        json cj;
        cj["recall"] = m.recall_defined ? json(m.recall) : json();
        cj["precision"] = m.precision_defined ? json(m.precision) : json();
        cj["specificity"] = m.specificity_defined ? json(m.specificity) : json();
        cj["accuracy"] = m.accuracy_defined ? json(m.accuracy) : json();
        cj["f1"] = m.f1_defined ? json(m.f1) : json();
        cj["auc"] = auc_defined ? json(auc) : json();
        out_json["classes"][atcnn::kClassNames[c]] = std::move(cj);
    }

    const double macro = atcnn::macro_f1(per_class);
    const double exact = atcnn::exact_match(pred, truth);
    long risk_agree = 0;
    std::array<std::array<long, 3>, 3> risk_counts{};  // [truth group][predicted group]
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const auto tg = static_cast<int>(atcnn::risk_stratify(truth[i]));
        const auto pg = static_cast<int>(atcnn::risk_stratify(pred[i]));
        ++risk_counts[static_cast<std::size_t>(tg)][static_cast<std::size_t>(pg)];
        risk_agree += tg == pg;
    }
    const double risk_agreement = static_cast<double>(risk_agree) / static_cast<double>(pred.size());

    std::cout << std::fixed << std::setprecision(4);
    std::cout << "macro F1        " << macro << "\n"
              << "exact match     " << exact << "\n"
              << "risk agreement  " << risk_agreement << "\n";
    std::cout.unsetf(std::ios::fixed);

    out_json["macro_f1"] = macro;
    out_json["exact_match"] = exact;
    out_json["risk_agreement"] = risk_agreement;
    for (int tg = 0; tg < 3; ++tg)
        for (int pg = 0; pg < 3; ++pg)
            out_json["risk_counts"][atcnn::risk_group_name(static_cast<atcnn::RiskGroup>(tg))]
                    [atcnn::risk_group_name(static_cast<atcnn::RiskGroup>(pg))] =
                        risk_counts[static_cast<std::size_t>(tg)][static_cast<std::size_t>(pg)];
    if (!opt.out.empty()) std::ofstream(opt.out) << out_json.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct SelectLeadsOptions {
    std::string manifest, models_dir, cls, out;
    std::uint64_t seed = 0;
    double lr = 1e-3;
    int batch = 32;
    int epochs = 100;
    int patience = 10;
    double improvement_tol = 0.005;
};

int run_select_leads(const SelectLeadsOptions& opt) {
    const auto ds = load_checked(opt.manifest);
    const int cls = atcnn::class_index(opt.cls);
    const auto model_file = atcnn::member_path(opt.models_dir, cls);
    if (!fs::exists(model_file))
        throw CliError(kExitUntrainedClass,
                       "class " + opt.cls + " has no trained model: " + model_file.string());
    const auto model = atcnn::load_model(model_file);
    if (model.config.target_class != cls)
        throw std::runtime_error(model_file.string() + " was not trained for class " + opt.cls);

    // rank on the validation slice of this class's training pool, which the
    // train command derives the same way from its base seed
    const auto split =
        atcnn::build_subdataset(ds, cls, opt.seed + static_cast<std::uint64_t>(cls));
    const auto ranking = atcnn::rank_leads(model, ds, split.val);
    std::cout << "lead ranking (median attention, high to low):\n";
    for (const auto& r : ranking)
        std::cout << "  " << std::left << std::setw(4) << atcnn::kLeadNames[r.lead] << std::fixed
                  << std::setprecision(4) << r.median_beta << "\n";
    std::cout.unsetf(std::ios::fixed);

    std::vector<int> ranked;
    for (const auto& r : ranking) ranked.push_back(r.lead);

    atcnn::ArchConfig arch = model.config;
    arch.variant = atcnn::Variant::full;
    atcnn::TrainConfig cfg;
    cfg.lr = opt.lr;
    cfg.batch = opt.batch;
    cfg.max_epochs = opt.epochs;
    cfg.patience = opt.patience;
    cfg.seed = opt.seed;
    const auto sweep = atcnn::sweep_subsets(ds, arch, cfg, ranked, opt.improvement_tol);

    std::cout << "subset sweep:\n   k  val F1  epochs  leads\n";
    json sweep_json = json::array();
    for (const auto& e : sweep.entries) {
        std::cout << std::right << std::setw(4) << e.k << "  " << std::fixed
                  << std::setprecision(4) << e.val_f1 << "  " << std::setw(6) << e.epochs << "  ";
        std::cout.unsetf(std::ios::fixed);
        std::string names;
        for (int m : e.leads) names += (names.empty() ? "" : ",") + std::string(atcnn::kLeadNames[m]);
        std::cout << names << "\n";
        json ej;
        ej["k"] = e.k;
        ej["val_f1"] = e.val_f1;
        ej["epochs"] = e.epochs;
        ej["leads"] = json::array();
        for (int m : e.leads) ej["leads"].push_back(atcnn::kLeadNames[m]);
        sweep_json.push_back(std::move(ej));
    }
    std::cout << "optimal subset size: " << sweep.optimal_k << "\n";

    if (!opt.out.empty()) {
        json out_json;
        out_json["class"] = opt.cls;
        out_json["ranking"] = json::array();
        for (const auto& r : ranking) {
            json rj;
            rj["lead"] = atcnn::kLeadNames[r.lead];
            rj["median_beta"] = r.median_beta;
            out_json["ranking"].push_back(std::move(rj));
        }
        out_json["sweep"] = std::move(sweep_json);
        out_json["optimal_k"] = sweep.optimal_k;
        std::ofstream(opt.out) << out_json.dump(2) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ExportAttentionOptions {
    std::string manifest, models_dir, cls, record, out;
};

int run_export_attention(const ExportAttentionOptions& opt) {
    const auto ds = load_checked(opt.manifest);
    const int cls = atcnn::class_index(opt.cls);
    const auto model_file = atcnn::member_path(opt.models_dir, cls);
    if (!fs::exists(model_file))
        throw CliError(kExitUntrainedClass,
                       "class " + opt.cls + " has no trained model: " + model_file.string());
    const auto model = atcnn::load_model(model_file);

    const atcnn::EcgRecord* rec = nullptr;
    for (const auto& r : ds.records)
        if (r.id == opt.record) rec = &r;
    if (!rec) throw std::runtime_error("record not found in manifest: " + opt.record);

    const auto tr = model.forward(*rec);
    json out_json;
    out_json["record"] = rec->id;
    out_json["class"] = opt.cls;
    out_json["variant"] = atcnn::variant_name(model.config.variant);
    out_json["probability"] = tr.p->values[0];
    if (tr.beta)
        for (std::size_t j = 0; j < model.config.leads.size(); ++j)
            out_json["beta"][atcnn::kLeadNames[model.config.leads[j]]] = tr.beta->values[j];
    for (std::size_t j = 0; j < tr.alpha.size(); ++j)
        out_json["alpha"][atcnn::kLeadNames[model.config.leads[j]]] = tr.alpha[j]->values;

    std::ofstream file(opt.out);
    if (!file) throw std::runtime_error("cannot write " + opt.out);
    file << out_json.dump(2) << "\n";
    std::cout << "wrote attention for " << rec->id << " to " << opt.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"attention-based temporal convolutional classifier for 12-lead ECG"};
    app.require_subcommand(1);

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic labeled dataset");
    synth_cmd->add_option("--out", synth.out, "output dataset directory")->required();
    synth_cmd->add_option("--count", synth.count, "number of records");
    synth_cmd->add_option("--samples", synth.samples, "samples per lead");
    synth_cmd->add_option("--rate", synth.rate, "sampling rate in Hz");
    synth_cmd->add_option("--noise", synth.noise, "additive noise sigma");
    synth_cmd->add_option("--distractors", synth.distractors,
                          "label-independent lumps per record");
    synth_cmd->add_option("--seed", synth.seed, "generator seed");
    synth_cmd->add_option("--preset", synth.preset, "mixed or single (one informative lead)");
    synth_cmd->add_option("--informative-lead", synth.informative_lead,
                          "lead carrying all disease features for the single preset");

    PreprocessOptions pre;
    auto* pre_cmd = app.add_subcommand("preprocess", "bandpass filter and normalize a dataset");
    pre_cmd->add_option("--manifest", pre.manifest, "input manifest")->required();
    pre_cmd->add_option("--out", pre.out, "output dataset directory")->required();
    pre_cmd->add_option("--low", pre.low, "low cutoff in Hz");
    pre_cmd->add_option("--high", pre.high, "high cutoff in Hz");
    pre_cmd->add_option("--order", pre.order, "filter prototype order");
    pre_cmd->add_flag("--forward-only", pre.forward_only, "single pass instead of zero phase");

    TrainOptions train;
    auto* train_cmd = app.add_subcommand("train", "train binary classifiers");
    train_cmd->add_option("--manifest", train.manifest, "training manifest")->required();
    train_cmd->add_option("--models-dir", train.models_dir, "output model directory")->required();
    train_cmd->add_option("--class", train.cls, "class name or all");
    train_cmd->add_option("--seed", train.seed, "base seed; class index is added per model");
    train_cmd->add_option("--lr", train.lr, "Adam learning rate");
    train_cmd->add_option("--batch", train.batch, "batch size");
    train_cmd->add_option("--epochs", train.epochs, "epoch cap");
    train_cmd->add_option("--patience", train.patience, "early stopping patience");
    train_cmd->add_option("--stop-metric", train.stop_metric, "loss or f1");
    train_cmd->add_option("--channels", train.channels, "conv channels");
    train_cmd->add_option("--kernel", train.kernel, "conv kernel width");
    train_cmd->add_option("--layers-per-block", train.layers_per_block, "conv layers per block");
    train_cmd->add_option("--dilations", train.dilations, "per-block dilations")->delimiter(',');
    train_cmd->add_option("--variant", train.variant,
                          "full, traditional_conv, no_attention_gap or single_lead");
    train_cmd->add_option("--leads", train.leads, "leads to model (names or indices)")
        ->delimiter(',');
    train_cmd->add_flag("--scalar-temporal-bias", train.scalar_temporal_bias,
                        "share one temporal attention bias across time");
    train_cmd->add_flag("--parallel", train.parallel, "train the classes in parallel threads");

    PredictOptions predict;
    auto* predict_cmd = app.add_subcommand("predict", "multi-label prediction with an ensemble");
    predict_cmd->add_option("--manifest", predict.manifest, "input manifest")->required();
    predict_cmd->add_option("--models-dir", predict.models_dir, "trained model directory")
        ->required();
    predict_cmd->add_option("--threshold", predict.threshold, "decision threshold");
    predict_cmd->add_option("--partition", predict.partition, "test, development or all");
    predict_cmd->add_option("--out", predict.out, "also write predictions as JSON");

    EvaluateOptions evaluate;
    auto* eval_cmd = app.add_subcommand("evaluate", "score an ensemble against labels");
    eval_cmd->add_option("--manifest", evaluate.manifest, "input manifest")->required();
    eval_cmd->add_option("--models-dir", evaluate.models_dir, "trained model directory")
        ->required();
    eval_cmd->add_option("--threshold", evaluate.threshold, "decision threshold");
    eval_cmd->add_option("--partition", evaluate.partition, "test, development or all");
    eval_cmd->add_option("--out", evaluate.out, "also write metrics as JSON");

    SelectLeadsOptions select;
    auto* select_cmd = app.add_subcommand("select-leads", "rank leads and sweep subset sizes");
    select_cmd->add_option("--manifest", select.manifest, "input manifest")->required();
    select_cmd->add_option("--models-dir", select.models_dir, "trained model directory")
        ->required();
    select_cmd->add_option("--class", select.cls, "class to select leads for")->required();
    select_cmd->add_option("--seed", select.seed, "base seed for the sweep");
    select_cmd->add_option("--lr", select.lr, "Adam learning rate");
    select_cmd->add_option("--batch", select.batch, "batch size");
    select_cmd->add_option("--epochs", select.epochs, "epoch cap per subset");
    select_cmd->add_option("--patience", select.patience, "early stopping patience");
    select_cmd->add_option("--improvement-tol", select.improvement_tol,
                           "minimum F1 gain that justifies more leads");
    select_cmd->add_option("--out", select.out, "also write the sweep as JSON");

    ExportAttentionOptions exp;
    auto* exp_cmd = app.add_subcommand("export-attention", "dump attention weights for a record");
    exp_cmd->add_option("--manifest", exp.manifest, "input manifest")->required();
    exp_cmd->add_option("--models-dir", exp.models_dir, "trained model directory")->required();
    exp_cmd->add_option("--class", exp.cls, "class whose model to inspect")->required();
    exp_cmd->add_option("--record", exp.record, "record id")->required();
    exp_cmd->add_option("--out", exp.out, "output JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(synth_cmd)) return run_synth(synth);
        if (app.got_subcommand(pre_cmd)) return run_preprocess(pre);
        if (app.got_subcommand(train_cmd)) return run_train(train);
        if (app.got_subcommand(predict_cmd)) return run_predict(predict);
        if (app.got_subcommand(eval_cmd)) return run_evaluate(evaluate);
        if (app.got_subcommand(select_cmd)) return run_select_leads(select);
        if (app.got_subcommand(exp_cmd)) return run_export_attention(exp);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
