#pragma once

#include <cstdint>
#include <vector>

#include "hwrec/features.hpp"
#include "hwrec/gaussian.hpp"
#include "hwrec/subunits.hpp"
#include "hwrec/types.hpp"

namespace hwrec {

// One character as seen by the SUB classifier: a projected global feature,
// the sub-unit count, and one local feature per sub-unit.
struct SubCharacter {
    Eigen::VectorXd x_global;
    int n_subunits = 0;
    std::vector<Eigen::VectorXd> x_locals;
};

// Per-class joint model over (global feature, sub-unit count, sub-unit
// feature mixture).
struct SubModelParams {
    GaussianParams global;
    Eigen::VectorXd gamma;    // count distribution over {1..n_su}
    double gamma_tail = 0.0;  // smoothed mass for counts outside {1..n_su}
    Eigen::MatrixXd eta;      // n_su x n_h_su mixture weights, rows sum to 1
    std::vector<GaussianParams> components; // n_h_su local Gaussians
    int n_su = 0;
    int n_h_su = 0;
};

// rho[m][m1](k) = posterior that sub-unit m1 of character m came from
// component k; each vector sums to 1.
struct Responsibilities {
    std::vector<std::vector<Eigen::VectorXd>> rho;
};

struct EmConfig {
    int n_h_su = 8;
    int max_iters = 200;
    double rel_tol = 1e-6;
    double ridge = 1e-3;     // relative, applied to the global and component covariances
    double smoothing = 1.0;  // Laplace pseudo-count for gamma and eta
    std::uint64_t seed = 42;

    void validate() const;
};

struct SubFitResult {
    SubModelParams params;
    std::vector<double> loglik_trace; // observed log-likelihood, init + accepted iterations
    int iterations = 0;
};

SubCharacter build_sub_character(const Character& c, const Eigen::MatrixXd& fisher_w,
                                 const HpodConfig& hpod_cfg, const SegmentationConfig& seg_cfg);

// Sum of the four complete-data terms: global densities, count
// log-probabilities, weighted mixture-assignment log-weights, and weighted
// component densities. Assignments may be hard (one-hot) or soft.
double complete_log_likelihood(const std::vector<SubCharacter>& data,
                               const std::vector<std::vector<Eigen::VectorXd>>& z,
                               const SubModelParams& p);

// Log-space posterior over components per sub-unit.
Responsibilities e_step(const std::vector<SubCharacter>& data, const SubModelParams& p);

// Closed-form re-estimation of all parameter blocks from the
// responsibilities, with ridge on the covariances and Laplace smoothing on
// gamma and eta. Components whose responsibility mass falls below 1e-8 are
// reported through empty_components and carry pooled statistics.
SubModelParams m_step(const std::vector<SubCharacter>& data, const Responsibilities& rho,
                      const EmConfig& cfg, std::vector<int>* empty_components = nullptr);

// ASUB fit: global Gaussian and count distribution in closed form, then EM
// over the sub-unit mixture. Stops at relative log-likelihood change below
// rel_tol, at max_iters, or when an iteration fails to improve the observed
// log-likelihood (the last update is then rolled back), so the recorded
// trace is nondecreasing. Deterministic for a fixed seed.
SubFitResult fit_sub(const std::vector<SubCharacter>& train, const EmConfig& cfg);

// log P(x_global, count, x_locals | params); marginalizes the component
// assignments with log-sum-exp.
double sub_log_likelihood(const SubCharacter& c, const SubModelParams& p);

Label sub_predict(const SubCharacter& c, const std::vector<SubModelParams>& all_params);

// Whole-classifier bundle: the Fisher projection fitted on the global
// features plus one SubModelParams per class.
struct SubClassifier {
    Eigen::MatrixXd fisher_w;
    std::vector<SubModelParams> classes;
    HpodConfig hpod;
    SegmentationConfig seg;
};

struct SubTrainResult {
    SubClassifier model;
    std::vector<std::vector<double>> traces; // per-class log-likelihood traces
};

// Characters must be preprocessed. Class k is fitted with seed cfg.seed+k.
SubTrainResult fit_sub_classifier(const std::vector<std::vector<Character>>& train,
                                  const HpodConfig& hpod_cfg, const SegmentationConfig& seg_cfg,
                                  const EmConfig& em_cfg, double fisher_ridge, int jobs = 1);

Label sub_classifier_predict(const Character& preprocessed, const SubClassifier& m);

} // namespace hwrec
