#include "hwrec/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

namespace hwrec {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

void add_relative_ridge(Eigen::MatrixXd& sigma, double eps) {
    if (eps <= 0.0) return;
    const int d = static_cast<int>(sigma.rows());
    double scale = sigma.trace() / static_cast<double>(d);
    if (!(scale > 1e-12)) scale = 1.0;
    sigma.diagonal().array() += eps * scale;
}

void refresh_cholesky(GaussianParams& p, const std::string& context) {
    Eigen::LLT<Eigen::MatrixXd> llt(p.sigma);
    if (llt.info() != Eigen::Success) {
        throw NumericError(context + ": covariance is not positive definite");
    }
    p.chol = llt.matrixL();
    p.logdet = 2.0 * p.chol.diagonal().array().log().sum();
    if (!std::isfinite(p.logdet)) {
        throw NumericError(context + ": covariance log-determinant is not finite");
    }
}

GaussianParams fit_gaussian(const std::vector<Eigen::VectorXd>& samples, double ridge_eps,
                            const std::string& context) {
    if (samples.size() < 2) {
        throw DataError(context + ": need at least 2 samples, got " +
                        std::to_string(samples.size()));
    }
    const int d = static_cast<int>(samples.front().size());
    GaussianParams p;
    p.mu = Eigen::VectorXd::Zero(d);
    for (const auto& x : samples) {
        if (x.size() != d) throw DataError(context + ": inconsistent sample dimensions");
        p.mu += x;
    }
    p.mu /= static_cast<double>(samples.size());

    p.sigma = Eigen::MatrixXd::Zero(d, d);
    for (const auto& x : samples) {
        const Eigen::VectorXd dx = x - p.mu;
        p.sigma.noalias() += dx * dx.transpose();
    }
    p.sigma /= static_cast<double>(samples.size());
    add_relative_ridge(p.sigma, ridge_eps);
    refresh_cholesky(p, context);
    return p;
}

double gaussian_log_density(const Eigen::VectorXd& x, const GaussianParams& p) {
    if (x.size() != p.mu.size()) {
        throw DataError("gaussian_log_density: dimension mismatch (" + std::to_string(x.size()) +
                        " vs " + std::to_string(p.mu.size()) + ")");
    }
    const Eigen::VectorXd z =
        p.chol.triangularView<Eigen::Lower>().solve(x - p.mu);
    const double d = static_cast<double>(p.mu.size());
    return -0.5 * d * kLog2Pi - 0.5 * p.logdet - 0.5 * z.squaredNorm();
}

double log_sum_exp(std::span<const double> vals) {
    if (vals.empty()) throw NumericError("log_sum_exp: empty input");
    const double m = *std::max_element(vals.begin(), vals.end());
    if (!std::isfinite(m)) return m; // all -inf (or a NaN/inf poisoning the max)
    double acc = 0.0;
    for (double v : vals) acc += std::exp(v - m);
    return m + std::log(acc);
}

} // namespace hwrec
