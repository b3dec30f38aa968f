#pragma once

#include <cstdint>
#include <vector>

#include "hwrec/types.hpp"

namespace hwrec {

enum class Activation { logistic, identity };

double activate(Activation a, double v);
double activate_deriv(Activation a, double pre_activation);

// Three-layer network: N_ftr inputs, one hidden layer, N_ct outputs.
struct FnnParams {
    Eigen::MatrixXd w_hidden; // N_hid x N_ftr
    Eigen::VectorXd b_hidden; // N_hid
    Eigen::MatrixXd w_out;    // N_ct x N_hid
    Eigen::VectorXd b_out;    // N_ct
    Activation activation_hidden = Activation::logistic;
    Activation activation_out = Activation::logistic;

    int n_inputs() const { return static_cast<int>(w_hidden.cols()); }
    int n_hidden() const { return static_cast<int>(w_hidden.rows()); }
    int n_outputs() const { return static_cast<int>(w_out.rows()); }
};

struct FnnTrainConfig {
    int hidden = 64;
    double learning_rate = 0.01;
    double momentum = 0.9;
    int epochs = 200;
    std::uint64_t seed = 42;
    // weight init scale; <= 0 selects 1/sqrt(fan_in) per layer
    double init_scale = 0.0;
};

// Gradient of the squared-error loss at one sample, same shapes as FnnParams.
struct FnnGradient {
    Eigen::MatrixXd w_hidden;
    Eigen::VectorXd b_hidden;
    Eigen::MatrixXd w_out;
    Eigen::VectorXd b_out;
};

struct LabeledSample {
    Eigen::VectorXd x;
    Eigen::VectorXd target; // one-hot, length N_ct
};

Eigen::VectorXd fnn_forward(const Eigen::VectorXd& x, const FnnParams& p);

// 0.5 * sum_k (output_k - target_k)^2, summed over the batch.
double fnn_loss(const FnnParams& p, const std::vector<LabeledSample>& batch);

FnnGradient fnn_backprop_gradient(const FnnParams& p, const LabeledSample& sample);

// Per-sample gradient descent with momentum over shuffled epochs;
// deterministic for a fixed seed.
FnnParams fit_fnn(const std::vector<LabeledSample>& train, int n_inputs, int n_outputs,
                  const FnnTrainConfig& cfg);

Label fnn_predict(const Eigen::VectorXd& x, const FnnParams& p);

} // namespace hwrec
