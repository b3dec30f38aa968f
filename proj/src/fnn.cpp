#include "hwrec/fnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace hwrec {

double activate(Activation a, double v) {
    switch (a) {
        case Activation::logistic: return 1.0 / (1.0 + std::exp(-v));
        case Activation::identity: return v;
    }
    return v;
}

double activate_deriv(Activation a, double pre_activation) {
    switch (a) {
        case Activation::logistic: {
            const double s = 1.0 / (1.0 + std::exp(-pre_activation));
            return s * (1.0 - s);
        }
        case Activation::identity: return 1.0;
    }
    return 1.0;
}

namespace {

struct ForwardTrace {
    Eigen::VectorXd hidden_pre;
    Eigen::VectorXd hidden_out;
    Eigen::VectorXd out_pre;
    Eigen::VectorXd out;
};

ForwardTrace forward_trace(const Eigen::VectorXd& x, const FnnParams& p) {
    if (x.size() != p.n_inputs()) {
        throw DataError("fnn_forward: input dimension " + std::to_string(x.size()) +
                        " != " + std::to_string(p.n_inputs()));
    }
    ForwardTrace t;
    t.hidden_pre = p.w_hidden * x + p.b_hidden;
    t.hidden_out = t.hidden_pre.unaryExpr(
        [&](double v) { return activate(p.activation_hidden, v); });
    t.out_pre = p.w_out * t.hidden_out + p.b_out;
    t.out = t.out_pre.unaryExpr([&](double v) { return activate(p.activation_out, v); });
    return t;
}

} // namespace

Eigen::VectorXd fnn_forward(const Eigen::VectorXd& x, const FnnParams& p) {
    return forward_trace(x, p).out;
}

double fnn_loss(const FnnParams& p, const std::vector<LabeledSample>& batch) {
    double loss = 0.0;
    for (const auto& s : batch) {
        loss += 0.5 * (fnn_forward(s.x, p) - s.target).squaredNorm();
    }
    return loss;
}

FnnGradient fnn_backprop_gradient(const FnnParams& p, const LabeledSample& sample) {
    const ForwardTrace t = forward_trace(sample.x, p);

    // delta_out_k = (Y_k^o - Y_k) * sigma_o'(pre_k)
    Eigen::VectorXd delta_out = t.out - sample.target;
    for (Eigen::Index k = 0; k < delta_out.size(); ++k) {
        delta_out(k) *= activate_deriv(p.activation_out, t.out_pre(k));
    }
    Eigen::VectorXd delta_hidden = p.w_out.transpose() * delta_out;
    for (Eigen::Index j = 0; j < delta_hidden.size(); ++j) {
        delta_hidden(j) *= activate_deriv(p.activation_hidden, t.hidden_pre(j));
    }

    FnnGradient g;
    g.w_out = delta_out * t.hidden_out.transpose();
    g.b_out = delta_out;
    g.w_hidden = delta_hidden * sample.x.transpose();
    g.b_hidden = delta_hidden;
    return g;
}

FnnParams fit_fnn(const std::vector<LabeledSample>& train, int n_inputs, int n_outputs,
                  const FnnTrainConfig& cfg) {
    if (train.empty()) throw DataError("fit_fnn: empty training set");
    if (cfg.hidden < 1) throw DataError("fit_fnn: hidden size must be >= 1");
    if (cfg.learning_rate <= 0.0) throw DataError("fit_fnn: learning rate must be > 0");
    if (cfg.epochs < 1) throw DataError("fit_fnn: epochs must be >= 1");

    std::mt19937_64 rng(cfg.seed);
    auto init_matrix = [&](Eigen::MatrixXd& m, int rows, int cols, int fan_in) {
        const double s = cfg.init_scale > 0.0 ? cfg.init_scale : 1.0 / std::sqrt(fan_in);
        std::uniform_real_distribution<double> dist(-s, s);
        m.resize(rows, cols);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
        }
    };

    FnnParams p;
    init_matrix(p.w_hidden, cfg.hidden, n_inputs, n_inputs);
    p.b_hidden = Eigen::VectorXd::Zero(cfg.hidden);
    init_matrix(p.w_out, n_outputs, cfg.hidden, cfg.hidden);
    p.b_out = Eigen::VectorXd::Zero(n_outputs);

    FnnGradient vel;
    vel.w_hidden = Eigen::MatrixXd::Zero(cfg.hidden, n_inputs);
    vel.b_hidden = Eigen::VectorXd::Zero(cfg.hidden);
    vel.w_out = Eigen::MatrixXd::Zero(n_outputs, cfg.hidden);
    vel.b_out = Eigen::VectorXd::Zero(n_outputs);

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            const FnnGradient g = fnn_backprop_gradient(p, train[idx]);
            vel.w_hidden = cfg.momentum * vel.w_hidden - cfg.learning_rate * g.w_hidden;
            vel.b_hidden = cfg.momentum * vel.b_hidden - cfg.learning_rate * g.b_hidden;
            vel.w_out = cfg.momentum * vel.w_out - cfg.learning_rate * g.w_out;
            vel.b_out = cfg.momentum * vel.b_out - cfg.learning_rate * g.b_out;
            p.w_hidden += vel.w_hidden;
            p.b_hidden += vel.b_hidden;
            p.w_out += vel.w_out;
            p.b_out += vel.b_out;
        }
        const double loss = fnn_loss(p, train);
        if (!std::isfinite(loss)) {
            throw NumericError("fit_fnn: training diverged at epoch " + std::to_string(epoch + 1));
        }
    }
    return p;
}

Label fnn_predict(const Eigen::VectorXd& x, const FnnParams& p) {
    const Eigen::VectorXd out = fnn_forward(x, p);
    int best = 0;
    for (Eigen::Index k = 1; k < out.size(); ++k) {
        if (out(k) > out(best)) best = static_cast<int>(k);
    }
    return one_hot(best + 1, static_cast<int>(out.size()));
}

} // namespace hwrec
