#include "hwrec/svm.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include "hwrec/parallel.hpp"

namespace hwrec {

void KernelSpec::validate() const {
    if (kind == KernelKind::rbf && !(upsilon > 0.0)) {
        throw DataError("kernel: rbf width must be > 0");
    }
}

double kernel_eval(const KernelSpec& k, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) {
        throw DataError("kernel_eval: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
    }
    switch (k.kind) {
        case KernelKind::rbf: return std::exp(-(a - b).squaredNorm() / (k.upsilon * k.upsilon));
        case KernelKind::linear: return a.dot(b);
    }
    throw DataError("kernel_eval: unknown kernel");
}

SmoResult fit_svm_binary(const std::vector<Eigen::VectorXd>& pos,
                         const std::vector<Eigen::VectorXd>& neg, double beta,
                         const KernelSpec& kernel, const SmoConfig& cfg) {
    kernel.validate();
    if (pos.empty() || neg.empty()) throw DataError("fit_svm_binary: both classes must be nonempty");
    if (!(beta > 0.0)) throw DataError("fit_svm_binary: beta must be > 0");

    const int n = static_cast<int>(pos.size() + neg.size());
    std::vector<const Eigen::VectorXd*> x(static_cast<std::size_t>(n));
    std::vector<double> y(static_cast<std::size_t>(n));
    for (std::size_t m = 0; m < pos.size(); ++m) {
        x[m] = &pos[m];
        y[m] = 1.0;
    }
    for (std::size_t m = 0; m < neg.size(); ++m) {
        x[pos.size() + m] = &neg[m];
        y[pos.size() + m] = -1.0;
    }

    Eigen::MatrixXd k_mat(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            const double v = kernel_eval(kernel, *x[static_cast<std::size_t>(a)],
                                         *x[static_cast<std::size_t>(b)]);
            k_mat(a, b) = v;
            k_mat(b, a) = v;
        }
    }

    std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
    // E_m = f0(x_m) - y_m with f0 the bias-free expansion; starts at -y_m.
    std::vector<double> err(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) err[static_cast<std::size_t>(m)] = -y[static_cast<std::size_t>(m)];

    SmoResult res;
    double dual = 0.0;
    if (cfg.record_dual_trace) res.dual_trace.push_back(dual);

    auto in_i_up = [&](int m) {
        return (y[static_cast<std::size_t>(m)] > 0.0 && alpha[static_cast<std::size_t>(m)] < beta) ||
               (y[static_cast<std::size_t>(m)] < 0.0 && alpha[static_cast<std::size_t>(m)] > 0.0);
    };
    auto in_i_low = [&](int m) {
        return (y[static_cast<std::size_t>(m)] > 0.0 && alpha[static_cast<std::size_t>(m)] > 0.0) ||
               (y[static_cast<std::size_t>(m)] < 0.0 && alpha[static_cast<std::size_t>(m)] < beta);
    };

    double gap = std::numeric_limits<double>::infinity();
    std::uint64_t iter = 0;
    for (; iter < cfg.max_iterations; ++iter) {
        int i = -1, j = -1;
        double e_min = std::numeric_limits<double>::infinity();
        double e_max = -std::numeric_limits<double>::infinity();
        for (int m = 0; m < n; ++m) {
            const double e = err[static_cast<std::size_t>(m)];
            if (in_i_up(m) && e < e_min) {
                e_min = e;
                i = m;
            }
            if (in_i_low(m) && e > e_max) {
                e_max = e;
                j = m;
            }
        }
        if (i < 0 || j < 0) break;
        gap = e_max - e_min;
        if (gap < cfg.tolerance) break;

        const double yi = y[static_cast<std::size_t>(i)];
        const double yj = y[static_cast<std::size_t>(j)];
        const double ai = alpha[static_cast<std::size_t>(i)];
        const double aj = alpha[static_cast<std::size_t>(j)];
        double c = k_mat(i, i) + k_mat(j, j) - 2.0 * k_mat(i, j);
        if (c < 1e-12) c = 1e-12;

        double lo, hi;
        if (yi != yj) {
            lo = std::max(0.0, aj - ai);
            hi = std::min(beta, beta + aj - ai);
        } else {
            lo = std::max(0.0, ai + aj - beta);
            hi = std::min(beta, ai + aj);
        }
        double aj_new = aj + yj * (err[static_cast<std::size_t>(i)] -
                                   err[static_cast<std::size_t>(j)]) / c;
        aj_new = std::clamp(aj_new, lo, hi);
        double ai_new = ai + yi * yj * (aj - aj_new);
        ai_new = std::clamp(ai_new, 0.0, beta); // fp safety; conservation fixed at the end

        const double d_ai = ai_new - ai;
        const double d_aj = aj_new - aj;
        if (d_ai == 0.0 && d_aj == 0.0) break; // pinned pair; gap is within clip resolution

        // G_m = y_m * E_m; dual gain of the two-variable step.
        const double gi = yi * err[static_cast<std::size_t>(i)];
        const double gj = yj * err[static_cast<std::size_t>(j)];
        dual += -(d_ai * gi + d_aj * gj) -
                0.5 * (k_mat(i, i) * d_ai * d_ai + k_mat(j, j) * d_aj * d_aj +
                       2.0 * k_mat(i, j) * yi * yj * d_ai * d_aj);

        alpha[static_cast<std::size_t>(i)] = ai_new;
        alpha[static_cast<std::size_t>(j)] = aj_new;
        for (int m = 0; m < n; ++m) {
            err[static_cast<std::size_t>(m)] +=
                yi * d_ai * k_mat(m, i) + yj * d_aj * k_mat(m, j);
        }
        if (cfg.record_dual_trace) res.dual_trace.push_back(dual);
    }
    if (iter >= cfg.max_iterations) {
        throw NumericError("fit_svm_binary: no convergence in " + std::to_string(cfg.max_iterations) +
                           " iterations (violating-pair gap " + std::to_string(gap) + ")");
    }

    // Remove the accumulated fp drift of sum(alpha*y) through a free vector.
    double drift = 0.0;
    for (int m = 0; m < n; ++m) drift += alpha[static_cast<std::size_t>(m)] * y[static_cast<std::size_t>(m)];
    if (drift != 0.0) {
        for (int m = 0; m < n; ++m) {
            const double a = alpha[static_cast<std::size_t>(m)];
            if (a > 0.0 && a < beta) {
                const double adjusted = a - drift * y[static_cast<std::size_t>(m)];
                if (adjusted > 0.0 && adjusted < beta) {
                    alpha[static_cast<std::size_t>(m)] = adjusted;
                    break;
                }
            }
        }
    }

    // Bias from free support vectors; midpoint of the active bounds otherwise.
    double bias_acc = 0.0;
    int bias_cnt = 0;
    for (int m = 0; m < n; ++m) {
        const double a = alpha[static_cast<std::size_t>(m)];
        if (a > 0.0 && a < beta) {
            bias_acc += -err[static_cast<std::size_t>(m)];
            ++bias_cnt;
        }
    }
    double bias;
    if (bias_cnt > 0) {
        bias = bias_acc / static_cast<double>(bias_cnt);
    } else {
        double e_min = std::numeric_limits<double>::infinity();
        double e_max = -std::numeric_limits<double>::infinity();
        for (int m = 0; m < n; ++m) {
            if (in_i_up(m)) e_min = std::min(e_min, err[static_cast<std::size_t>(m)]);
            if (in_i_low(m)) e_max = std::max(e_max, err[static_cast<std::size_t>(m)]);
        }
        bias = -(e_min + e_max) / 2.0;
    }

    res.model.kernel = kernel;
    res.model.beta = beta;
    res.model.bias = bias;
    for (int m = 0; m < n; ++m) {
        if (alpha[static_cast<std::size_t>(m)] > 0.0) {
            res.model.support_x.push_back(*x[static_cast<std::size_t>(m)]);
            res.model.support_y.push_back(y[static_cast<std::size_t>(m)] > 0.0 ? 1 : -1);
            res.model.support_alphas.push_back(alpha[static_cast<std::size_t>(m)]);
        }
    }
    res.iterations = iter;
    return res;
}

double svm_decision_binary(const BinarySvmModel& m, const Eigen::VectorXd& x) {
    double f = m.bias;
    for (std::size_t s = 0; s < m.support_x.size(); ++s) {
        f += m.support_alphas[s] * static_cast<double>(m.support_y[s]) *
             kernel_eval(m.kernel, m.support_x[s], x);
    }
    return f;
}

int MulticlassSvmModel::pair_index(int i, int j) const {
    if (i < 0 || j <= i || j >= n_classes) throw DataError("svm: bad pair index");
    // pairs (0,1),(0,2),...,(0,n-1),(1,2),... in row-major order
    return i * n_classes - i * (i + 1) / 2 + (j - i - 1);
}

MulticlassSvmModel fit_svm_multiclass(const ClassSamples& train, double beta,
                                      const KernelSpec& kernel, const SmoConfig& cfg, int jobs) {
    const int n_ct = static_cast<int>(train.size());
    if (n_ct < 2) throw DataError("fit_svm_multiclass: need at least 2 classes");
    MulticlassSvmModel m;
    m.n_classes = n_ct;
    m.pairwise.resize(static_cast<std::size_t>(n_ct * (n_ct - 1) / 2));

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(m.pairwise.size());
    for (int i = 0; i < n_ct; ++i) {
        for (int j = i + 1; j < n_ct; ++j) pairs.emplace_back(i, j);
    }
    parallel_for(pairs.size(), jobs, [&](std::size_t pi) {
        const auto [i, j] = pairs[pi];
        m.pairwise[static_cast<std::size_t>(m.pair_index(i, j))] =
            fit_svm_binary(train[static_cast<std::size_t>(i)], train[static_cast<std::size_t>(j)],
                           beta, kernel, cfg)
                .model;
    });
    return m;
}

Label svm_predict_multiclass(const MulticlassSvmModel& m, const Eigen::VectorXd& x) {
    if (m.n_classes < 2) throw DataError("svm_predict_multiclass: model has < 2 classes");
    int k = 0; // current holder, 0-based
    for (int j = 1; j < m.n_classes; ++j) {
        const auto& bin = m.pairwise[static_cast<std::size_t>(m.pair_index(std::min(k, j), std::max(k, j)))];
        // Class min(k,j) is the positive side; pairs always have k < j here.
        const double f = svm_decision_binary(bin, x);
        if (!(f > 0.0)) k = j; // f <= 0 eliminates the holder
    }
    return one_hot(k + 1, m.n_classes);
}

} // namespace hwrec
