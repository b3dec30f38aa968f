#pragma once

#include <cstdint>
#include <vector>

#include "hwrec/types.hpp"

namespace hwrec {

enum class KernelKind { rbf, linear };

struct KernelSpec {
    KernelKind kind = KernelKind::rbf;
    double upsilon = 10.0; // rbf width: k(a,b) = exp(-||a-b||^2 / upsilon^2)

    void validate() const;
};

double kernel_eval(const KernelSpec& k, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Soft-margin binary SVM in dual form. Only vectors with positive
// multipliers are retained.
struct BinarySvmModel {
    KernelSpec kernel;
    std::vector<Eigen::VectorXd> support_x;
    std::vector<int> support_y; // +1 / -1
    std::vector<double> support_alphas;
    double bias = 0.0;
    double beta = 0.0;
};

struct SmoConfig {
    double tolerance = 1e-4;       // max violating-pair gap at convergence
    std::uint64_t max_iterations = 1000000;
    bool record_dual_trace = false;
};

struct SmoResult {
    BinarySvmModel model;
    std::vector<double> dual_trace; // dual objective after each pair update (if recorded)
    std::uint64_t iterations = 0;
};

// Maximizes the box-constrained dual by SMO-style two-variable ascent with
// maximal-violating-pair selection.
SmoResult fit_svm_binary(const std::vector<Eigen::VectorXd>& pos,
                         const std::vector<Eigen::VectorXd>& neg, double beta,
                         const KernelSpec& kernel, const SmoConfig& cfg = {});

// f(x) = sum_m alpha_m y_m k(x_m, x) + bias
double svm_decision_binary(const BinarySvmModel& m, const Eigen::VectorXd& x);

// All N_ct(N_ct-1)/2 pairwise models; pair (i,j), i<j, is trained with
// class i as the positive side.
struct MulticlassSvmModel {
    int n_classes = 0;
    std::vector<BinarySvmModel> pairwise; // index = pair_index(i, j)

    int pair_index(int i, int j) const; // 0-based i < j
};

MulticlassSvmModel fit_svm_multiclass(const ClassSamples& train, double beta,
                                      const KernelSpec& kernel, const SmoConfig& cfg = {},
                                      int jobs = 1);

// Sequential one-versus-one elimination: start with (1,2); the winner of
// each step meets the next class; f <= 0 eliminates the current holder.
Label svm_predict_multiclass(const MulticlassSvmModel& m, const Eigen::VectorXd& x);

} // namespace hwrec
