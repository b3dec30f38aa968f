#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hwrec/fnn.hpp"
#include "hwrec/model_io.hpp"
#include "hwrec/preprocess.hpp"
#include "hwrec/sub_model.hpp"
#include "hwrec/svm.hpp"
#include "hwrec/types.hpp"

namespace hwrec {

struct EvalReport {
    double overall_accuracy = 0.0;
    Eigen::VectorXd per_class_accuracy;              // 0 for classes without test samples
    Eigen::MatrixXi confusion;                       // rows true class, cols predicted
    int n_test = 0;
};

// Indicator-sum accuracy and confusion counts. The predictor must emit
// labels in the same class indexing as the test set.
EvalReport evaluate(const std::function<Label(const Character&)>& predict, const Dataset& test);

// Everything needed to reproduce one row of the classifier/feature
// comparison matrix.
struct ExperimentSpec {
    ClassifierKind classifier = ClassifierKind::SOS;
    FeatureKind feature = FeatureKind::ST; // forced to HPOD_G for SUB
    std::uint64_t seed = 42;
    double ridge = 1e-3;
    int n_ef = 0;            // 0 selects the per-feature default
    double svm_beta = 1024.0;
    double svm_upsilon = 0.0; // 0 selects the per-feature default
    SmoConfig smo;
    FnnTrainConfig fnn;      // seed/hidden resolved from `seed` and the feature defaults
    EmConfig em;
    PreprocessConfig pre;
    HpodConfig hpod;
    SegmentationConfig seg;
    int jobs = 1;
};

struct FitOutput {
    TrainedModel model;
    std::vector<std::vector<double>> em_traces; // per class; nonempty only for SUB
};

// Fits the configured classifier on an already-parsed training set.
FitOutput fit_model(const Dataset& train, const ExperimentSpec& spec);

Dataset preprocess_dataset(const Dataset& ds, const PreprocessConfig& cfg);

struct ExperimentResult {
    ClassifierKind classifier;
    FeatureKind feature;
    EvalReport train_report;
    EvalReport test_report;
};

// Fits on the training set only, then reports train and test accuracy.
// Per-iteration SUB log-likelihoods go to `em_log` (tab-separated) when given.
ExperimentResult run_experiment(const Dataset& train, const Dataset& test,
                                const ExperimentSpec& spec, std::ostream* em_log = nullptr);

// Report rendering; all numbers fixed-format so identical runs are
// byte-identical.
std::string render_eval_report(const EvalReport& r, const std::vector<std::string>& label_names);
std::string render_eval_report_jsonl(const EvalReport& r,
                                     const std::vector<std::string>& label_names);
std::string render_comparison(const std::vector<ExperimentResult>& rows);
std::string render_comparison_jsonl(const std::vector<ExperimentResult>& rows);

} // namespace hwrec
