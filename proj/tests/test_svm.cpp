#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "hwrec/svm.hpp"

using namespace hwrec;

namespace {

Eigen::VectorXd vec1(double x) { return Eigen::VectorXd::Constant(1, x); }

Eigen::VectorXd random_vec(std::mt19937& rng, int d, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = gauss(rng);
    return v;
}

// KKT margin conditions at tolerance tau for every training sample.
void check_kkt(const BinarySvmModel& m, const std::vector<Eigen::VectorXd>& pos,
               const std::vector<Eigen::VectorXd>& neg, double tau) {
    // reconstruct alpha per sample: anything not retained has alpha 0
    auto alpha_of = [&](const Eigen::VectorXd& x, int y) {
        for (std::size_t s = 0; s < m.support_x.size(); ++s) {
            if (m.support_y[s] == y && (m.support_x[s] - x).norm() == 0.0) {
                return m.support_alphas[s];
            }
        }
        return 0.0;
    };
    auto check_one = [&](const Eigen::VectorXd& x, int y) {
        const double a = alpha_of(x, y);
        CHECK(a >= 0.0);
        CHECK(a <= m.beta);
        const double margin = y * svm_decision_binary(m, x);
        if (a == 0.0) {
            CHECK(margin >= 1.0 - tau);
        } else if (a < m.beta) {
            CHECK(std::abs(margin - 1.0) <= tau);
        } else {
            CHECK(margin <= 1.0 + tau);
        }
    };
    for (const auto& x : pos) check_one(x, 1);
    for (const auto& x : neg) check_one(x, -1);
}

} // namespace

TEST_CASE("kernel_eval closed forms") {
    KernelSpec rbf{KernelKind::rbf, 2.0};
    const Eigen::VectorXd a = vec1(0.5);
    CHECK(kernel_eval(rbf, a, a) == doctest::Approx(1.0));
    CHECK(kernel_eval(rbf, vec1(0.0), vec1(2.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    std::mt19937 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd u = random_vec(rng, 4);
        const Eigen::VectorXd v = random_vec(rng, 4);
        const double expected = std::exp(-(u - v).squaredNorm() / 4.0);
        CHECK(kernel_eval(rbf, u, v) == doctest::Approx(expected).epsilon(1e-12));
        KernelSpec lin{KernelKind::linear, 0.0};
        CHECK(kernel_eval(lin, u, v) == doctest::Approx(u.dot(v)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(kernel_eval(rbf, vec1(0.0), Eigen::VectorXd::Zero(2)), DataError);
}

TEST_CASE("two separable points: analytic dual solution") {
    // dual maximum at alpha = (0.5, 0.5); boundary at 0 with margin 1
    const std::vector<Eigen::VectorXd> pos{vec1(1.0)};
    const std::vector<Eigen::VectorXd> neg{vec1(-1.0)};
    KernelSpec lin{KernelKind::linear, 0.0};
    const SmoResult r = fit_svm_binary(pos, neg, 1000.0, lin);
    REQUIRE(r.model.support_alphas.size() == 2);
    CHECK(r.model.support_alphas[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.model.support_alphas[1] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.model.bias == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(svm_decision_binary(r.model, vec1(0.0)) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(svm_decision_binary(r.model, vec1(1.0)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(svm_decision_binary(r.model, vec1(-1.0)) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("conflicting labels at one point drive alpha to the box bound") {
    // with identical positive and negative samples the dual grows linearly
    // along alpha1 = alpha2 until the box stops it; grid-search oracle
    const std::vector<Eigen::VectorXd> pos{vec1(1.0)};
    const std::vector<Eigen::VectorXd> neg{vec1(1.0)};
    KernelSpec lin{KernelKind::linear, 0.0};
    const double beta = 8.0;
    const SmoResult r = fit_svm_binary(pos, neg, beta, lin);

    double best_t = 0.0, best_val = -1e300;
    for (int i = 0; i <= 1000; ++i) {
        const double t = beta * i / 1000.0;
        const double val = 2.0 * t - 0.5 * (t * t * 1.0 - 2.0 * t * t * 1.0 + t * t * 1.0);
        if (val > best_val) {
            best_val = val;
            best_t = t;
        }
    }
    CHECK(best_t == doctest::Approx(beta)); // oracle confirms the bound
    REQUIRE(r.model.support_alphas.size() == 2);
    CHECK(r.model.support_alphas[0] == doctest::Approx(beta));
    CHECK(r.model.support_alphas[1] == doctest::Approx(beta));
}

TEST_CASE("the equality constraint holds on random fits") {
    std::mt19937 rng(2);
    KernelSpec rbf{KernelKind::rbf, 1.5};
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Eigen::VectorXd> pos, neg;
        for (int i = 0; i < 15; ++i) {
            pos.push_back(random_vec(rng, 3) + Eigen::VectorXd::Constant(3, 1.0));
            neg.push_back(random_vec(rng, 3) - Eigen::VectorXd::Constant(3, 1.0));
        }
        const SmoResult r = fit_svm_binary(pos, neg, 10.0, rbf);
        double sum = 0.0;
        for (std::size_t s = 0; s < r.model.support_alphas.size(); ++s) {
            sum += r.model.support_alphas[s] * r.model.support_y[s];
        }
        CHECK(std::abs(sum) <= 1e-8);
    }
}

TEST_CASE("decision function matches the brute-force kernel expansion") {
    std::mt19937 rng(3);
    KernelSpec rbf{KernelKind::rbf, 2.0};
    std::vector<Eigen::VectorXd> pos, neg;
    for (int i = 0; i < 10; ++i) {
        pos.push_back(random_vec(rng, 2) + Eigen::VectorXd::Constant(2, 1.5));
        neg.push_back(random_vec(rng, 2) - Eigen::VectorXd::Constant(2, 1.5));
    }
    const SmoResult r = fit_svm_binary(pos, neg, 50.0, rbf);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd x = random_vec(rng, 2, 2.0);
        double expected = r.model.bias;
        for (std::size_t s = 0; s < r.model.support_x.size(); ++s) {
            expected += r.model.support_alphas[s] * r.model.support_y[s] *
                        std::exp(-(r.model.support_x[s] - x).squaredNorm() / 4.0);
        }
        CHECK(svm_decision_binary(r.model, x) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("free support vectors sit on the margin") {
    std::mt19937 rng(4);
    KernelSpec rbf{KernelKind::rbf, 2.5};
    std::vector<Eigen::VectorXd> pos, neg;
    for (int i = 0; i < 20; ++i) {
        pos.push_back(random_vec(rng, 2) + Eigen::VectorXd::Constant(2, 1.2));
        neg.push_back(random_vec(rng, 2) - Eigen::VectorXd::Constant(2, 1.2));
    }
    const SmoResult r = fit_svm_binary(pos, neg, 10.0, rbf);
    bool any_free = false;
    for (std::size_t s = 0; s < r.model.support_alphas.size(); ++s) {
        if (r.model.support_alphas[s] > 1e-9 && r.model.support_alphas[s] < 10.0 - 1e-9) {
            any_free = true;
            const double margin = r.model.support_y[s] * svm_decision_binary(r.model, r.model.support_x[s]);
            CHECK(std::abs(margin - 1.0) <= 1e-3);
        }
    }
    CHECK(any_free);
    check_kkt(r.model, pos, neg, 1e-3);
}

TEST_CASE("the dual objective never decreases across solver steps") {
    std::mt19937 rng(5);
    KernelSpec rbf{KernelKind::rbf, 1.0};
    std::vector<Eigen::VectorXd> pos, neg;
    for (int i = 0; i < 25; ++i) {
        pos.push_back(random_vec(rng, 3) + Eigen::VectorXd::Constant(3, 0.6));
        neg.push_back(random_vec(rng, 3) - Eigen::VectorXd::Constant(3, 0.6));
    }
    SmoConfig cfg;
    cfg.record_dual_trace = true;
    const SmoResult r = fit_svm_binary(pos, neg, 5.0, rbf, cfg);
    REQUIRE(r.dual_trace.size() >= 2);
    for (std::size_t i = 1; i < r.dual_trace.size(); ++i) {
        CHECK(r.dual_trace[i] >= r.dual_trace[i - 1] - 1e-10);
    }
}

TEST_CASE("rbf kernel matrices are positive semidefinite") {
    std::mt19937 rng(6);
    KernelSpec rbf{KernelKind::rbf, 1.7};
    const int n = 30;
    std::vector<Eigen::VectorXd> xs;
    for (int i = 0; i < n; ++i) xs.push_back(random_vec(rng, 4));
    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            k(i, j) = kernel_eval(rbf, xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)]);
        }
    }
    const Eigen::MatrixXd sym = 0.5 * (k + k.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
}

namespace {

ClassSamples three_clusters(std::mt19937& rng) {
    ClassSamples train(3);
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 12; ++i) {
            Eigen::VectorXd center = Eigen::VectorXd::Zero(2);
            center(0) = 4.0 * k;
            train[static_cast<std::size_t>(k)].push_back(center + random_vec(rng, 2, 0.3));
        }
    }
    return train;
}

} // namespace

TEST_CASE("multiclass elimination follows the pairwise decision chain") {
    std::mt19937 rng(7);
    const ClassSamples train = three_clusters(rng);
    KernelSpec rbf{KernelKind::rbf, 2.0};
    const MulticlassSvmModel m = fit_svm_multiclass(train, 100.0, rbf);
    REQUIRE(m.pairwise.size() == 3);

    const Eigen::VectorXd probe = Eigen::Vector2d(4.0, 0.0); // cluster 2
    // hand-traced elimination: (1,2) then the winner against 3
    const double f12 = svm_decision_binary(m.pairwise[static_cast<std::size_t>(m.pair_index(0, 1))], probe);
    CHECK(f12 <= 0.0); // class 2 wins the first duel
    const double f23 = svm_decision_binary(m.pairwise[static_cast<std::size_t>(m.pair_index(1, 2))], probe);
    CHECK(f23 > 0.0); // class 2 survives against class 3
    CHECK(svm_predict_multiclass(m, probe).index == 2);

    // correctness over held-out draws
    int correct = 0, total = 0;
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 20; ++i) {
            Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
            x(0) = 4.0 * k;
            x += random_vec(rng, 2, 0.3);
            if (svm_predict_multiclass(m, x).index == k + 1) ++correct;
            ++total;
        }
    }
    CHECK(static_cast<double>(correct) / total >= 0.95);
}

TEST_CASE("two-class elimination reduces to the binary rule") {
    std::mt19937 rng(8);
    ClassSamples train(2);
    for (int i = 0; i < 10; ++i) {
        train[0].push_back(random_vec(rng, 2) + Eigen::VectorXd::Constant(2, 1.0));
        train[1].push_back(random_vec(rng, 2) - Eigen::VectorXd::Constant(2, 1.0));
    }
    KernelSpec rbf{KernelKind::rbf, 2.0};
    const MulticlassSvmModel m = fit_svm_multiclass(train, 10.0, rbf);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::VectorXd x = random_vec(rng, 2, 1.5);
        const double f = svm_decision_binary(m.pairwise[0], x);
        const int expected = f > 0.0 ? 1 : 2;
        CHECK(svm_predict_multiclass(m, x).index == expected);
    }
}

TEST_CASE("a zero decision eliminates the current holder") {
    // hand-built model: f identically 0 -> every duel drops the holder
    MulticlassSvmModel m;
    m.n_classes = 3;
    m.pairwise.resize(3);
    for (auto& b : m.pairwise) {
        b.kernel = KernelSpec{KernelKind::linear, 0.0};
        b.bias = 0.0;
        b.beta = 1.0;
    }
    CHECK(svm_predict_multiclass(m, vec1(0.3)).index == 3);
}

TEST_CASE("elimination depends only on the signs of the binary decisions") {
    std::mt19937 rng(9);
    const ClassSamples train = three_clusters(rng);
    KernelSpec rbf{KernelKind::rbf, 2.0};
    const MulticlassSvmModel m = fit_svm_multiclass(train, 100.0, rbf);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::VectorXd x = random_vec(rng, 2, 3.0) + Eigen::Vector2d(4.0, 0.0);
        // replicate the chain using only signs
        int k = 0;
        for (int j = 1; j < 3; ++j) {
            const double f =
                svm_decision_binary(m.pairwise[static_cast<std::size_t>(m.pair_index(std::min(k, j), std::max(k, j)))], x);
            if (!(f > 0.0)) k = j;
        }
        CHECK(svm_predict_multiclass(m, x).index == k + 1);
    }
}
