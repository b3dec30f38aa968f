#pragma once

#include <vector>

#include "hwrec/gaussian.hpp"
#include "hwrec/types.hpp"

namespace hwrec {

inline constexpr double kDefaultRidge = 1e-3;

// ---------------------------------------------------------------------------
// Per-class Gaussian classifier (maximum likelihood over class densities).

struct SosModel {
    std::vector<GaussianParams> classes;

    int n_classes() const { return static_cast<int>(classes.size()); }
};

SosModel fit_sos(const ClassSamples& train, double ridge_eps = kDefaultRidge);
Label sos_predict(const Eigen::VectorXd& x, const SosModel& m);

// ---------------------------------------------------------------------------
// Subspace classifier: per-class principal basis, decision by minimum
// reconstruction residual of the class-mean-centered vector.

struct SubspaceParams {
    Eigen::VectorXd mu;
    Eigen::MatrixXd basis; // n_ef orthonormal columns, descending eigenvalue
    Eigen::VectorXd eigenvalues;
};

struct SubspaceModel {
    std::vector<SubspaceParams> classes;
    int n_ef = 0;
};

SubspaceModel fit_ss(const ClassSamples& train, int n_ef);
Label ss_predict(const Eigen::VectorXd& x, const SubspaceModel& m);
double ss_residual(const Eigen::VectorXd& x, const SubspaceParams& p);

// ---------------------------------------------------------------------------
// Fisher discriminant: projection maximizing the between/within scatter
// ratio via the generalized eigenproblem, then Gaussians in the projected
// space.

struct FisherParams {
    Eigen::MatrixXd w_matrix;        // N_ftr x (N_ct-1), Gram-Schmidt orthonormal columns
    Eigen::MatrixXd raw_eigvecs;     // pre-orthonormalization generalized eigenvectors
    Eigen::VectorXd eigenvalues;     // descending
    std::vector<GaussianParams> projected_classes;
};

FisherParams fit_fd(const ClassSamples& train, double ridge_eps = kDefaultRidge);
Label fd_predict(const Eigen::VectorXd& x, const FisherParams& m);

// Scatter matrices of the Fisher criterion; exposed for validation.
struct FisherScatters {
    Eigen::MatrixXd within;  // sum of class scatters (unnormalized)
    Eigen::MatrixXd between; // weighted scatter of class means about the overall mean
};
FisherScatters fisher_scatters(const ClassSamples& train);

// J(W) = det(W^T C_bt W) / det(W^T C_wi W).
double fisher_criterion(const Eigen::MatrixXd& w, const FisherScatters& s);

} // namespace hwrec
