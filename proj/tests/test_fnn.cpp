#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hwrec/fnn.hpp"

using namespace hwrec;

namespace {

FnnParams random_net(std::mt19937& rng, int n_in, int n_hid, int n_out) {
    std::normal_distribution<double> gauss(0.0, 0.7);
    FnnParams p;
    p.w_hidden.resize(n_hid, n_in);
    p.b_hidden.resize(n_hid);
    p.w_out.resize(n_out, n_hid);
    p.b_out.resize(n_out);
    for (int i = 0; i < n_hid; ++i) {
        p.b_hidden(i) = gauss(rng);
        for (int j = 0; j < n_in; ++j) p.w_hidden(i, j) = gauss(rng);
    }
    for (int i = 0; i < n_out; ++i) {
        p.b_out(i) = gauss(rng);
        for (int j = 0; j < n_hid; ++j) p.w_out(i, j) = gauss(rng);
    }
    return p;
}

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Element-by-element forward pass, no linear algebra.
Eigen::VectorXd forward_oracle(const Eigen::VectorXd& x, const FnnParams& p) {
    Eigen::VectorXd hidden(p.n_hidden());
    for (int j = 0; j < p.n_hidden(); ++j) {
        double acc = p.b_hidden(j);
        for (int n = 0; n < p.n_inputs(); ++n) acc += p.w_hidden(j, n) * x(n);
        hidden(j) = p.activation_hidden == Activation::logistic ? logistic(acc) : acc;
    }
    Eigen::VectorXd out(p.n_outputs());
    for (int k = 0; k < p.n_outputs(); ++k) {
        double acc = p.b_out(k);
        for (int j = 0; j < p.n_hidden(); ++j) acc += p.w_out(k, j) * hidden(j);
        out(k) = p.activation_out == Activation::logistic ? logistic(acc) : acc;
    }
    return out;
}

std::vector<LabeledSample> xor_dataset() {
    std::vector<LabeledSample> data;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            Eigen::VectorXd x(2);
            x << a, b;
            Eigen::VectorXd t = Eigen::VectorXd::Zero(2);
            t((a ^ b) ? 1 : 0) = 1.0;
            data.push_back({x, t});
        }
    }
    return data;
}

} // namespace

TEST_CASE("forward pass with zero weights gives logistic(0) everywhere") {
    FnnParams p;
    p.w_hidden = Eigen::MatrixXd::Zero(4, 3);
    p.b_hidden = Eigen::VectorXd::Zero(4);
    p.w_out = Eigen::MatrixXd::Zero(2, 4);
    p.b_out = Eigen::VectorXd::Zero(2);
    const Eigen::VectorXd out = fnn_forward(Eigen::VectorXd::Ones(3), p);
    CHECK(out(0) == doctest::Approx(0.5));
    CHECK(out(1) == doctest::Approx(0.5));
}

TEST_CASE("identity single-unit network passes its input through") {
    FnnParams p;
    p.w_hidden = Eigen::MatrixXd::Ones(1, 1);
    p.b_hidden = Eigen::VectorXd::Zero(1);
    p.w_out = Eigen::MatrixXd::Ones(1, 1);
    p.b_out = Eigen::VectorXd::Zero(1);
    p.activation_hidden = Activation::identity;
    p.activation_out = Activation::identity;
    CHECK(fnn_forward(Eigen::VectorXd::Constant(1, 0.37), p)(0) == doctest::Approx(0.37));
}

TEST_CASE("forward pass matches the element-by-element oracle") {
    std::mt19937 rng(1);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 10; ++trial) {
        const FnnParams p = random_net(rng, 5, 4, 3);
        Eigen::VectorXd x(5);
        for (int i = 0; i < 5; ++i) x(i) = gauss(rng);
        CHECK((fnn_forward(x, p) - forward_oracle(x, p)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("loss accumulates half squared error over the batch") {
    std::mt19937 rng(2);
    const FnnParams p = random_net(rng, 3, 3, 2);

    // perfect outputs -> zero loss
    Eigen::VectorXd x = Eigen::VectorXd::Ones(3);
    std::vector<LabeledSample> perfect{{x, fnn_forward(x, p)}};
    CHECK(fnn_loss(p, perfect) == doctest::Approx(0.0));

    // a single output off by one contributes 0.5
    Eigen::VectorXd target = fnn_forward(x, p);
    target(0) += 1.0;
    std::vector<LabeledSample> off{{x, target}};
    CHECK(fnn_loss(p, off) == doctest::Approx(0.5).epsilon(1e-12));

    // random batch vs independent accumulation
    std::normal_distribution<double> gauss;
    std::vector<LabeledSample> batch;
    double expected = 0.0;
    for (int i = 0; i < 7; ++i) {
        Eigen::VectorXd xi(3), ti(2);
        for (int j = 0; j < 3; ++j) xi(j) = gauss(rng);
        for (int j = 0; j < 2; ++j) ti(j) = gauss(rng);
        batch.push_back({xi, ti});
        const Eigen::VectorXd out = forward_oracle(xi, p);
        for (int j = 0; j < 2; ++j) expected += 0.5 * (out(j) - ti(j)) * (out(j) - ti(j));
    }
    CHECK(fnn_loss(p, batch) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("backprop gradient is zero at a perfectly fitted sample") {
    std::mt19937 rng(3);
    const FnnParams p = random_net(rng, 4, 3, 2);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 0.2);
    const FnnGradient g = fnn_backprop_gradient(p, {x, fnn_forward(x, p)});
    CHECK(g.w_hidden.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(g.w_out.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(g.b_hidden.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(g.b_out.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("output bias gradient equals the chain-rule terminal") {
    std::mt19937 rng(4);
    const FnnParams p = random_net(rng, 3, 4, 2);
    Eigen::VectorXd x(3);
    x << 0.1, -0.4, 0.9;
    Eigen::VectorXd target(2);
    target << 1.0, 0.0;

    const FnnGradient g = fnn_backprop_gradient(p, {x, target});
    // recompute (Y^o_k - Y_k) * sigma'(pre_k) by hand
    Eigen::VectorXd hidden(p.n_hidden());
    for (int j = 0; j < 4; ++j) {
        double acc = p.b_hidden(j);
        for (int n = 0; n < 3; ++n) acc += p.w_hidden(j, n) * x(n);
        hidden(j) = logistic(acc);
    }
    for (int k = 0; k < 2; ++k) {
        double pre = p.b_out(k);
        for (int j = 0; j < 4; ++j) pre += p.w_out(k, j) * hidden(j);
        const double out = logistic(pre);
        const double expected = (out - target(k)) * out * (1.0 - out);
        CHECK(g.b_out(k) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("backprop matches central finite differences on random nets") {
    std::mt19937 rng(5);
    std::normal_distribution<double> gauss;
    const double h = 1e-5;
    for (int trial = 0; trial < 10; ++trial) {
        FnnParams p = random_net(rng, 5, 4, 3);
        Eigen::VectorXd x(5);
        for (int i = 0; i < 5; ++i) x(i) = gauss(rng);
        Eigen::VectorXd target = Eigen::VectorXd::Zero(3);
        target(static_cast<Eigen::Index>(rng() % 3)) = 1.0;
        const LabeledSample sample{x, target};
        const FnnGradient g = fnn_backprop_gradient(p, sample);

        double max_rel = 0.0;
        auto probe = [&](double* w, double analytic) {
            const double orig = *w;
            *w = orig + h;
            const double up = fnn_loss(p, {sample});
            *w = orig - h;
            const double down = fnn_loss(p, {sample});
            *w = orig;
            const double numeric = (up - down) / (2.0 * h);
            const double rel = std::abs(analytic - numeric) /
                               std::max(1e-8, std::max(std::abs(analytic), std::abs(numeric)));
            max_rel = std::max(max_rel, rel);
        };
        for (int i = 0; i < p.w_hidden.size(); ++i) probe(p.w_hidden.data() + i, g.w_hidden(i));
        for (int i = 0; i < p.b_hidden.size(); ++i) probe(p.b_hidden.data() + i, g.b_hidden(i));
        for (int i = 0; i < p.w_out.size(); ++i) probe(p.w_out.data() + i, g.w_out(i));
        for (int i = 0; i < p.b_out.size(); ++i) probe(p.b_out.data() + i, g.b_out(i));
        CHECK(max_rel <= 1e-4);
    }
}

TEST_CASE("fit_fnn learns XOR") {
    FnnTrainConfig cfg;
    cfg.hidden = 4;
    cfg.learning_rate = 0.5;
    cfg.momentum = 0.9;
    cfg.epochs = 2000;
    cfg.seed = 7;
    const auto data = xor_dataset();
    const FnnParams p = fit_fnn(data, 2, 2, cfg);
    for (const auto& s : data) {
        const Label l = fnn_predict(s.x, p);
        int truth = s.target(1) > 0.5 ? 2 : 1;
        CHECK(l.index == truth);
    }
    CHECK(fnn_loss(p, data) < fnn_loss(fit_fnn(data, 2, 2, FnnTrainConfig{4, 0.5, 0.9, 1, 7, 0.0}),
                                       data)); // final loss below the 1-epoch loss
}

TEST_CASE("fit_fnn separates linear blobs") {
    std::mt19937 rng(6);
    std::normal_distribution<double> gauss(0.0, 0.3);
    std::vector<LabeledSample> data;
    for (int i = 0; i < 60; ++i) {
        Eigen::VectorXd a(2), b(2);
        a << gauss(rng) - 1.5, gauss(rng);
        b << gauss(rng) + 1.5, gauss(rng);
        Eigen::VectorXd ta = Eigen::VectorXd::Zero(2), tb = Eigen::VectorXd::Zero(2);
        ta(0) = 1;
        tb(1) = 1;
        data.push_back({a, ta});
        data.push_back({b, tb});
    }
    FnnTrainConfig cfg;
    cfg.hidden = 6;
    cfg.learning_rate = 0.1;
    cfg.epochs = 100;
    cfg.seed = 11;
    const FnnParams p = fit_fnn(data, 2, 2, cfg);
    int correct = 0;
    for (const auto& s : data) {
        const Label l = fnn_predict(s.x, p);
        if (s.target(l.index - 1) == 1.0) ++correct;
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(data.size()) >= 0.99);
}

TEST_CASE("training is bit-deterministic for a fixed seed") {
    const auto data = xor_dataset();
    FnnTrainConfig cfg;
    cfg.hidden = 4;
    cfg.learning_rate = 0.5;
    cfg.epochs = 50;
    cfg.seed = 123;
    const FnnParams a = fit_fnn(data, 2, 2, cfg);
    const FnnParams b = fit_fnn(data, 2, 2, cfg);
    CHECK((a.w_hidden.array() == b.w_hidden.array()).all());
    CHECK((a.b_hidden.array() == b.b_hidden.array()).all());
    CHECK((a.w_out.array() == b.w_out.array()).all());
    CHECK((a.b_out.array() == b.b_out.array()).all());
    CHECK(fnn_loss(a, data) == fnn_loss(b, data));
}

TEST_CASE("fnn_predict takes the argmax with low tie index") {
    FnnParams p;
    p.w_hidden = Eigen::MatrixXd::Zero(2, 2);
    p.b_hidden = Eigen::VectorXd::Zero(2);
    p.w_out = Eigen::MatrixXd::Zero(3, 2);
    p.b_out = Eigen::VectorXd::Zero(3);
    // constant network: every output equals 0.5 -> class 1 by tie rule
    CHECK(fnn_predict(Eigen::VectorXd::Ones(2), p).index == 1);

    std::mt19937 rng(8);
    std::normal_distribution<double> gauss;
    const FnnParams q = random_net(rng, 3, 4, 5);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd x(3);
        for (int i = 0; i < 3; ++i) x(i) = gauss(rng);
        const Eigen::VectorXd out = forward_oracle(x, q);
        int best = 0;
        for (int k = 1; k < 5; ++k) {
            if (out(k) > out(best)) best = k;
        }
        CHECK(fnn_predict(x, q).index == best + 1);
    }
}
