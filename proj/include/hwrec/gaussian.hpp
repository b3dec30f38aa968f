#pragma once

#include <span>
#include <vector>

#include "hwrec/types.hpp"

namespace hwrec {

// Multivariate Gaussian with cached Cholesky factor. The covariance kept
// here already includes the ridge term used at fit time.
struct GaussianParams {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
    Eigen::MatrixXd chol;   // lower-triangular L with L*L^T = sigma
    double logdet = 0.0;

    int dim() const { return static_cast<int>(mu.size()); }
};

// sigma += eps * mean(diag scale) * I. A zero-trace covariance (identical
// samples) falls back to unit scale so the result stays invertible.
void add_relative_ridge(Eigen::MatrixXd& sigma, double eps);

// Recomputes chol/logdet from p.sigma. Throws NumericError if the factorization fails.
void refresh_cholesky(GaussianParams& p, const std::string& context);

// Biased (1/n) moment estimates plus relative ridge.
GaussianParams fit_gaussian(const std::vector<Eigen::VectorXd>& samples, double ridge_eps,
                            const std::string& context = "gaussian");

// log N(x; mu, sigma) evaluated through the cached factor; no explicit inverse.
double gaussian_log_density(const Eigen::VectorXd& x, const GaussianParams& p);

double log_sum_exp(std::span<const double> vals);

} // namespace hwrec
