#include "hwrec/eval.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "hwrec/baselines.hpp"
#include "hwrec/defaults.hpp"
#include "hwrec/features.hpp"

namespace hwrec {

EvalReport evaluate(const std::function<Label(const Character&)>& predict, const Dataset& test) {
    const int n = test.n_classes();
    if (n < 1) throw DataError("evaluate: empty test set");
    EvalReport r;
    r.confusion = Eigen::MatrixXi::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        for (const auto& c : test.classes[static_cast<std::size_t>(k)]) {
            const Label l = predict(c);
            if (l.one_hot.size() != n) {
                throw DataError("evaluate: class index mismatch (predictor emits " +
                                std::to_string(l.one_hot.size()) + " classes, test has " +
                                std::to_string(n) + ")");
            }
            r.confusion(k, l.index - 1) += 1;
            ++r.n_test;
        }
    }
    r.per_class_accuracy = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) {
        const int row_total = r.confusion.row(k).sum();
        if (row_total > 0) {
            r.per_class_accuracy(k) = static_cast<double>(r.confusion(k, k)) / row_total;
        }
    }
    r.overall_accuracy = static_cast<double>(r.confusion.trace()) / r.n_test;
    return r;
}

Dataset preprocess_dataset(const Dataset& ds, const PreprocessConfig& cfg) {
    Dataset out;
    out.role = ds.role;
    out.label_names = ds.label_names;
    out.classes.resize(ds.classes.size());
    for (std::size_t k = 0; k < ds.classes.size(); ++k) {
        out.classes[k].reserve(ds.classes[k].size());
        for (const auto& c : ds.classes[k]) {
            out.classes[k].push_back(c.preprocessed ? c : preprocess_pipeline(c, cfg));
        }
    }
    return out;
}

namespace {

ClassSamples extract_class_features(const Dataset& ds, FeatureKind kind, const HpodConfig& hpod) {
    ClassSamples out(ds.classes.size());
    for (std::size_t k = 0; k < ds.classes.size(); ++k) {
        out[k].reserve(ds.classes[k].size());
        for (const auto& c : ds.classes[k]) {
            out[k].push_back(extract_feature(kind, c, hpod).values);
        }
    }
    return out;
}

} // namespace

FitOutput fit_model(const Dataset& train, const ExperimentSpec& spec) {
    const FeatureKind feature =
        spec.classifier == ClassifierKind::SUB ? FeatureKind::HPOD_G : spec.feature;
    const FeatureDefaults defaults = feature_defaults(feature);
    const Dataset train_pp = preprocess_dataset(train, spec.pre);

    FitOutput out;
    out.model.classifier = spec.classifier;
    out.model.feature = feature;
    out.model.rng_seed = spec.seed;
    out.model.label_names = train_pp.label_names;
    out.model.pre = spec.pre;
    out.model.hpod = spec.hpod;

    if (spec.classifier == ClassifierKind::SUB) {
        EmConfig em = spec.em;
        em.seed = spec.seed;
        SubTrainResult fit =
            fit_sub_classifier(train_pp.classes, spec.hpod, spec.seg, em, spec.ridge, spec.jobs);
        out.em_traces = std::move(fit.traces);
        out.model.model = std::move(fit.model);
        return out;
    }

    const ClassSamples feats = extract_class_features(train_pp, feature, spec.hpod);
    switch (spec.classifier) {
        case ClassifierKind::SOS:
            out.model.model = fit_sos(feats, spec.ridge);
            break;
        case ClassifierKind::SS:
            out.model.model = fit_ss(feats, spec.n_ef > 0 ? spec.n_ef : defaults.n_ef);
            break;
        case ClassifierKind::FD:
            out.model.model = fit_fd(feats, spec.ridge);
            break;
        case ClassifierKind::FNN: {
            const int n_ct = static_cast<int>(feats.size());
            const int n_ftr = static_cast<int>(feats.front().front().size());
            std::vector<LabeledSample> samples;
            for (int k = 0; k < n_ct; ++k) {
                for (const auto& x : feats[static_cast<std::size_t>(k)]) {
                    Eigen::VectorXd target = Eigen::VectorXd::Zero(n_ct);
                    target(k) = 1.0;
                    samples.push_back(LabeledSample{x, std::move(target)});
                }
            }
            FnnTrainConfig cfg = spec.fnn;
            cfg.seed = spec.seed;
            if (cfg.hidden <= 0) cfg.hidden = defaults.fnn_hidden;
            out.model.model = fit_fnn(samples, n_ftr, n_ct, cfg);
            break;
        }
        case ClassifierKind::SVM: {
            KernelSpec kernel;
            kernel.kind = KernelKind::rbf;
            kernel.upsilon = spec.svm_upsilon > 0.0 ? spec.svm_upsilon : defaults.svm_upsilon;
            out.model.model = fit_svm_multiclass(feats, spec.svm_beta, kernel, spec.smo, spec.jobs);
            break;
        }
        case ClassifierKind::SUB:
            break; // handled above
    }
    return out;
}

ExperimentResult run_experiment(const Dataset& train, const Dataset& test,
                                const ExperimentSpec& spec, std::ostream* em_log) {
    FitOutput fit = fit_model(train, spec);
    if (em_log) {
        for (std::size_t k = 0; k < fit.em_traces.size(); ++k) {
            for (std::size_t i = 0; i < fit.em_traces[k].size(); ++i) {
                (*em_log) << fit.model.label_names[k] << '\t' << i << '\t'
                          << std::setprecision(17) << fit.em_traces[k][i] << '\n';
            }
        }
    }
    const Dataset train_pp = preprocess_dataset(train, spec.pre);
    const Dataset test_pp = preprocess_dataset(test, spec.pre);
    const auto predict = [&fit](const Character& c) { return fit.model.predict(c); };

    ExperimentResult res;
    res.classifier = fit.model.classifier;
    res.feature = fit.model.feature;
    res.train_report = evaluate(predict, train_pp);
    res.test_report = evaluate(predict, test_pp);
    return res;
}

std::string render_eval_report(const EvalReport& r, const std::vector<std::string>& label_names) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6);
    os << "n_test " << r.n_test << "\n";
    os << "overall_accuracy " << r.overall_accuracy << "\n";
    os << "per_class_accuracy\n";
    const int n = static_cast<int>(r.per_class_accuracy.size());
    for (int k = 0; k < n; ++k) {
        os << "  " << label_names[static_cast<std::size_t>(k)] << " " << r.per_class_accuracy(k)
           << "\n";
    }
    os << "confusion_matrix (rows true, cols predicted)\n";
    for (int i = 0; i < n; ++i) {
        os << " ";
        for (int j = 0; j < n; ++j) os << " " << std::setw(5) << r.confusion(i, j);
        os << "\n";
    }
    return os.str();
}

std::string render_eval_report_jsonl(const EvalReport& r,
                                     const std::vector<std::string>& label_names) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "{\"n_test\":" << r.n_test << ",\"overall_accuracy\":" << r.overall_accuracy
       << ",\"per_class\":[";
    const int n = static_cast<int>(r.per_class_accuracy.size());
    for (int k = 0; k < n; ++k) {
        os << (k ? "," : "") << "{\"label\":\"" << label_names[static_cast<std::size_t>(k)]
           << "\",\"accuracy\":" << r.per_class_accuracy(k) << "}";
    }
    os << "],\"confusion\":[";
    for (int i = 0; i < n; ++i) {
        os << (i ? "," : "") << "[";
        for (int j = 0; j < n; ++j) os << (j ? "," : "") << r.confusion(i, j);
        os << "]";
    }
    os << "]}\n";
    return os.str();
}

std::string render_comparison(const std::vector<ExperimentResult>& rows) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << std::left << std::setw(12) << "classifier" << std::setw(12) << "features"
       << std::right << std::setw(10) << "train_acc" << std::setw(10) << "test_acc" << "\n";
    for (const auto& row : rows) {
        os << std::left << std::setw(12) << to_string(row.classifier) << std::setw(12)
           << to_string(row.feature) << std::right << std::setw(10)
           << row.train_report.overall_accuracy << std::setw(10)
           << row.test_report.overall_accuracy << "\n";
    }
    return os.str();
}

std::string render_comparison_jsonl(const std::vector<ExperimentResult>& rows) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (const auto& row : rows) {
        os << "{\"classifier\":\"" << to_string(row.classifier) << "\",\"features\":\""
           << to_string(row.feature) << "\",\"train_accuracy\":"
           << row.train_report.overall_accuracy
           << ",\"test_accuracy\":" << row.test_report.overall_accuracy << "}\n";
    }
    return os.str();
}

} // namespace hwrec
