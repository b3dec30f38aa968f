#include "hwrec/baselines.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace hwrec {

namespace {

int argmax_lowest_tie(const std::vector<double>& scores) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(scores.size()); ++k) {
        if (scores[static_cast<std::size_t>(k)] > scores[static_cast<std::size_t>(best)]) best = k;
    }
    return best;
}

void check_nonempty(const ClassSamples& train, const char* op) {
    if (train.empty()) throw DataError(std::string(op) + ": no classes");
    for (std::size_t k = 0; k < train.size(); ++k) {
        if (train[k].empty()) {
            throw DataError(std::string(op) + ": class " + std::to_string(k + 1) + " is empty");
        }
    }
}

} // namespace

SosModel fit_sos(const ClassSamples& train, double ridge_eps) {
    check_nonempty(train, "fit_sos");
    SosModel m;
    m.classes.reserve(train.size());
    for (std::size_t k = 0; k < train.size(); ++k) {
        m.classes.push_back(
            fit_gaussian(train[k], ridge_eps, "fit_sos class " + std::to_string(k + 1)));
    }
    return m;
}

Label sos_predict(const Eigen::VectorXd& x, const SosModel& m) {
    std::vector<double> scores(static_cast<std::size_t>(m.n_classes()));
    for (int k = 0; k < m.n_classes(); ++k) {
        scores[static_cast<std::size_t>(k)] =
            gaussian_log_density(x, m.classes[static_cast<std::size_t>(k)]);
    }
    return one_hot(argmax_lowest_tie(scores) + 1, m.n_classes());
}

SubspaceModel fit_ss(const ClassSamples& train, int n_ef) {
    check_nonempty(train, "fit_ss");
    const int d = static_cast<int>(train.front().front().size());
    if (n_ef < 1 || n_ef > d) {
        throw DataError("fit_ss: n_ef must be in [1," + std::to_string(d) + "]");
    }
    SubspaceModel m;
    m.n_ef = n_ef;
    m.classes.reserve(train.size());
    for (std::size_t k = 0; k < train.size(); ++k) {
        // Moments without ridge: the basis comes from the eigenvectors of
        // the plain sample covariance, which never has to be inverted.
        const auto& samples = train[k];
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
        for (const auto& x : samples) mu += x;
        mu /= static_cast<double>(samples.size());
        Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
        for (const auto& x : samples) {
            const Eigen::VectorXd dx = x - mu;
            sigma.noalias() += dx * dx.transpose();
        }
        sigma /= static_cast<double>(samples.size());

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
        if (es.info() != Eigen::Success) {
            throw NumericError("fit_ss: eigensolver failed for class " + std::to_string(k + 1));
        }
        SubspaceParams p;
        p.mu = std::move(mu);
        p.basis.resize(d, n_ef);
        p.eigenvalues.resize(n_ef);
        for (int j = 0; j < n_ef; ++j) { // Eigen sorts ascending; take the top slice reversed
            p.basis.col(j) = es.eigenvectors().col(d - 1 - j);
            p.eigenvalues(j) = es.eigenvalues()(d - 1 - j);
        }
        m.classes.push_back(std::move(p));
    }
    return m;
}

double ss_residual(const Eigen::VectorXd& x, const SubspaceParams& p) {
    const Eigen::VectorXd centered = x - p.mu;
    const Eigen::VectorXd coeffs = p.basis.transpose() * centered;
    return (centered - p.basis * coeffs).norm();
}

Label ss_predict(const Eigen::VectorXd& x, const SubspaceModel& m) {
    std::vector<double> scores(m.classes.size());
    for (std::size_t k = 0; k < m.classes.size(); ++k) {
        scores[k] = -ss_residual(x, m.classes[k]); // argmin residual == argmax negative
    }
    return one_hot(argmax_lowest_tie(scores) + 1, static_cast<int>(m.classes.size()));
}

FisherScatters fisher_scatters(const ClassSamples& train) {
    check_nonempty(train, "fisher_scatters");
    const int d = static_cast<int>(train.front().front().size());
    const int n_ct = static_cast<int>(train.size());

    std::vector<Eigen::VectorXd> means;
    means.reserve(train.size());
    Eigen::VectorXd mu_total = Eigen::VectorXd::Zero(d);
    double n_total = 0.0;
    for (const auto& cls : train) {
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
        for (const auto& x : cls) mu += x;
        mu /= static_cast<double>(cls.size());
        mu_total += mu * static_cast<double>(cls.size());
        n_total += static_cast<double>(cls.size());
        means.push_back(std::move(mu));
    }
    mu_total /= n_total;

    FisherScatters s;
    s.within = Eigen::MatrixXd::Zero(d, d);
    s.between = Eigen::MatrixXd::Zero(d, d);
    for (int k = 0; k < n_ct; ++k) {
        for (const auto& x : train[static_cast<std::size_t>(k)]) {
            const Eigen::VectorXd dx = x - means[static_cast<std::size_t>(k)];
            s.within.noalias() += dx * dx.transpose();
        }
        const Eigen::VectorXd dm = means[static_cast<std::size_t>(k)] - mu_total;
        s.between.noalias() +=
            static_cast<double>(train[static_cast<std::size_t>(k)].size()) * dm * dm.transpose();
    }
    return s;
}

double fisher_criterion(const Eigen::MatrixXd& w, const FisherScatters& s) {
    const Eigen::MatrixXd bt = w.transpose() * s.between * w;
    const Eigen::MatrixXd wi = w.transpose() * s.within * w;
    return bt.determinant() / wi.determinant();
}

FisherParams fit_fd(const ClassSamples& train, double ridge_eps) {
    check_nonempty(train, "fit_fd");
    const int n_ct = static_cast<int>(train.size());
    if (n_ct < 2) throw DataError("fit_fd: need at least 2 classes");
    const int d = static_cast<int>(train.front().front().size());
    const int n_proj = n_ct - 1;
    if (n_proj > d) throw DataError("fit_fd: N_ct-1 exceeds the feature dimension");

    FisherScatters s = fisher_scatters(train);
    add_relative_ridge(s.within, ridge_eps);

    // Reduce C_bt phi = lambda C_wi phi to a symmetric problem through the
    // Cholesky factor of the ridged within-class scatter.
    Eigen::LLT<Eigen::MatrixXd> llt(s.within);
    if (llt.info() != Eigen::Success) {
        throw NumericError("fit_fd: within-class scatter not positive definite after ridge");
    }
    const Eigen::MatrixXd l = llt.matrixL();
    Eigen::MatrixXd reduced =
        l.triangularView<Eigen::Lower>().solve(s.between).transpose();
    reduced = l.triangularView<Eigen::Lower>().solve(reduced);
    reduced = 0.5 * (reduced + reduced.transpose()); // symmetrize fp noise

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reduced);
    if (es.info() != Eigen::Success) throw NumericError("fit_fd: eigensolver failed");

    FisherParams p;
    p.raw_eigvecs.resize(d, n_proj);
    p.eigenvalues.resize(n_proj);
    for (int j = 0; j < n_proj; ++j) {
        const Eigen::VectorXd psi = es.eigenvectors().col(d - 1 - j);
        p.raw_eigvecs.col(j) = l.transpose().triangularView<Eigen::Upper>().solve(psi);
        p.eigenvalues(j) = es.eigenvalues()(d - 1 - j);
    }

    // Modified Gram-Schmidt over the retained eigenvectors.
    p.w_matrix = p.raw_eigvecs;
    for (int j = 0; j < n_proj; ++j) {
        for (int i = 0; i < j; ++i) {
            p.w_matrix.col(j) -= p.w_matrix.col(i).dot(p.w_matrix.col(j)) * p.w_matrix.col(i);
        }
        const double norm = p.w_matrix.col(j).norm();
        if (norm < 1e-12) {
            throw NumericError("fit_fd: Fisher directions are linearly dependent");
        }
        p.w_matrix.col(j) /= norm;
    }

    ClassSamples projected(train.size());
    for (std::size_t k = 0; k < train.size(); ++k) {
        projected[k].reserve(train[k].size());
        for (const auto& x : train[k]) projected[k].push_back(p.w_matrix.transpose() * x);
    }
    for (std::size_t k = 0; k < projected.size(); ++k) {
        p.projected_classes.push_back(
            fit_gaussian(projected[k], ridge_eps, "fit_fd class " + std::to_string(k + 1)));
    }
    return p;
}

Label fd_predict(const Eigen::VectorXd& x, const FisherParams& m) {
    const Eigen::VectorXd proj = m.w_matrix.transpose() * x;
    std::vector<double> scores(m.projected_classes.size());
    for (std::size_t k = 0; k < m.projected_classes.size(); ++k) {
        scores[k] = gaussian_log_density(proj, m.projected_classes[k]);
    }
    return one_hot(argmax_lowest_tie(scores) + 1, static_cast<int>(m.projected_classes.size()));
}

} // namespace hwrec
