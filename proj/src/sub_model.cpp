#include "hwrec/sub_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hwrec/baselines.hpp"
#include "hwrec/parallel.hpp"

namespace hwrec {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kEmptyComponentMass = 1e-8;
}

void EmConfig::validate() const {
    if (n_h_su < 1) throw DataError("em: n_h_su must be >= 1");
    if (max_iters < 1) throw DataError("em: max_iters must be >= 1");
    if (!(rel_tol > 0.0)) throw DataError("em: rel_tol must be > 0");
    if (ridge < 0.0 || smoothing < 0.0) throw DataError("em: ridge and smoothing must be >= 0");
}

SubCharacter build_sub_character(const Character& c, const Eigen::MatrixXd& fisher_w,
                                 const HpodConfig& hpod_cfg, const SegmentationConfig& seg_cfg) {
    const FeatureVector global = extract_hpod_global(c, hpod_cfg);
    if (fisher_w.rows() != global.values.size()) {
        throw DataError("build_sub_character: Fisher matrix rows " +
                        std::to_string(fisher_w.rows()) + " != global feature dim " +
                        std::to_string(global.values.size()));
    }
    SubCharacter sc;
    sc.x_global = fisher_w.transpose() * global.values;
    const auto subunits = extract_subunits(c, seg_cfg);
    sc.n_subunits = static_cast<int>(subunits.size());
    sc.x_locals.reserve(subunits.size());
    for (const auto& su : subunits) {
        sc.x_locals.push_back(extract_hpod_local(su, hpod_cfg).values);
    }
    return sc;
}

namespace {

double log_gamma_of_count(const SubModelParams& p, int count) {
    if (count >= 1 && count <= p.n_su) {
        const double g = p.gamma(count - 1);
        return g > 0.0 ? std::log(g) : kNegInf;
    }
    return p.gamma_tail > 0.0 ? std::log(p.gamma_tail) : kNegInf;
}

// eta row for a character with the given sub-unit count; counts beyond the
// training support fall back to uniform weights.
Eigen::VectorXd log_eta_row(const SubModelParams& p, int count) {
    Eigen::VectorXd row(p.n_h_su);
    if (count >= 1 && count <= p.n_su) {
        for (int k = 0; k < p.n_h_su; ++k) {
            const double e = p.eta(count - 1, k);
            row(k) = e > 0.0 ? std::log(e) : kNegInf;
        }
    } else {
        row.setConstant(-std::log(static_cast<double>(p.n_h_su)));
    }
    return row;
}

} // namespace

double complete_log_likelihood(const std::vector<SubCharacter>& data,
                               const std::vector<std::vector<Eigen::VectorXd>>& z,
                               const SubModelParams& p) {
    if (z.size() != data.size()) {
        throw DataError("complete_log_likelihood: assignment shape mismatch");
    }
    double ll = 0.0;
    for (std::size_t m = 0; m < data.size(); ++m) {
        const SubCharacter& c = data[m];
        if (z[m].size() != c.x_locals.size()) {
            throw DataError("complete_log_likelihood: assignment shape mismatch at character " +
                            std::to_string(m + 1));
        }
        ll += gaussian_log_density(c.x_global, p.global);

        const double lg = log_gamma_of_count(p, c.n_subunits);
        if (lg == kNegInf) {
            throw NumericError("complete_log_likelihood: zero count probability for count " +
                               std::to_string(c.n_subunits));
        }
        ll += lg;

        const Eigen::VectorXd log_eta = log_eta_row(p, c.n_subunits);
        for (std::size_t m1 = 0; m1 < c.x_locals.size(); ++m1) {
            const Eigen::VectorXd& zv = z[m][m1];
            if (zv.size() != p.n_h_su) {
                throw DataError("complete_log_likelihood: assignment width mismatch");
            }
            for (int k = 0; k < p.n_h_su; ++k) {
                const double weight = zv(k);
                if (weight == 0.0) continue;
                if (log_eta(k) == kNegInf) {
                    throw NumericError(
                        "complete_log_likelihood: zero mixture weight with nonzero assignment");
                }
                ll += weight * (log_eta(k) +
                                gaussian_log_density(c.x_locals[m1], p.components[static_cast<std::size_t>(k)]));
            }
        }
    }
    return ll;
}

Responsibilities e_step(const std::vector<SubCharacter>& data, const SubModelParams& p) {
    Responsibilities r;
    r.rho.resize(data.size());
    for (std::size_t m = 0; m < data.size(); ++m) {
        const SubCharacter& c = data[m];
        const Eigen::VectorXd log_eta = log_eta_row(p, c.n_subunits);
        r.rho[m].reserve(c.x_locals.size());
        for (const auto& xl : c.x_locals) {
            Eigen::VectorXd t(p.n_h_su);
            for (int k = 0; k < p.n_h_su; ++k) {
                t(k) = log_eta(k) +
                       gaussian_log_density(xl, p.components[static_cast<std::size_t>(k)]);
            }
            const double denom = log_sum_exp(std::span<const double>(t.data(), static_cast<std::size_t>(t.size())));
            Eigen::VectorXd rho_v = (t.array() - denom).exp();
            rho_v /= rho_v.sum(); // exact row normalization after exponentiation
            r.rho[m].push_back(std::move(rho_v));
        }
    }
    return r;
}

SubModelParams m_step(const std::vector<SubCharacter>& data, const Responsibilities& rho,
                      const EmConfig& cfg, std::vector<int>* empty_components) {
    cfg.validate();
    if (data.empty()) throw DataError("m_step: empty dataset");
    if (rho.rho.size() != data.size()) throw DataError("m_step: responsibilities shape mismatch");

    SubModelParams p;
    p.n_h_su = 0;
    for (std::size_t m = 0; m < data.size(); ++m) {
        if (data[m].n_subunits < 1 ||
            data[m].n_subunits != static_cast<int>(data[m].x_locals.size()) ||
            rho.rho[m].size() != data[m].x_locals.size()) {
            throw DataError("m_step: sub-unit/responsibility shape mismatch at character " +
                            std::to_string(m + 1));
        }
        for (const auto& v : rho.rho[m]) {
            if (p.n_h_su == 0) p.n_h_su = static_cast<int>(v.size());
            if (static_cast<int>(v.size()) != p.n_h_su) {
                throw DataError("m_step: responsibilities have inconsistent component counts");
            }
        }
    }
    if (p.n_h_su < 1) throw DataError("m_step: responsibilities carry no components");

    // Global Gaussian over the projected character features.
    std::vector<Eigen::VectorXd> globals;
    globals.reserve(data.size());
    int max_count = 0;
    for (const auto& c : data) {
        globals.push_back(c.x_global);
        max_count = std::max(max_count, c.n_subunits);
    }
    p.global = fit_gaussian(globals, cfg.ridge, "m_step global");

    // Count distribution with Laplace smoothing.
    p.n_su = max_count;
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(p.n_su);
    for (const auto& c : data) counts(c.n_subunits - 1) += 1.0;
    const double denom = static_cast<double>(data.size()) + cfg.smoothing * p.n_su;
    p.gamma = (counts.array() + cfg.smoothing) / denom;
    p.gamma_tail = cfg.smoothing / denom;

    // Mixture weights per count value.
    Eigen::MatrixXd eta_raw = Eigen::MatrixXd::Zero(p.n_su, p.n_h_su);
    for (std::size_t m = 0; m < data.size(); ++m) {
        const int row = data[m].n_subunits - 1;
        for (const auto& rv : rho.rho[m]) eta_raw.row(row) += rv.transpose();
    }
    p.eta.resize(p.n_su, p.n_h_su);
    for (int r = 0; r < p.n_su; ++r) {
        const double row_sum = eta_raw.row(r).sum() + cfg.smoothing * p.n_h_su;
        if (row_sum > 0.0) {
            p.eta.row(r) = (eta_raw.row(r).array() + cfg.smoothing) / row_sum;
        } else {
            p.eta.row(r).setConstant(1.0 / p.n_h_su);
        }
    }

    // Component Gaussians from responsibility-weighted moments.
    const int dim_local = static_cast<int>(data.front().x_locals.empty()
                                               ? 0
                                               : data.front().x_locals.front().size());
    std::vector<Eigen::VectorXd> all_locals;
    for (const auto& c : data) {
        for (const auto& xl : c.x_locals) all_locals.push_back(xl);
    }
    if (all_locals.empty()) throw DataError("m_step: dataset has no sub-unit vectors");

    if (empty_components) empty_components->clear();
    p.components.resize(static_cast<std::size_t>(p.n_h_su));
    for (int k = 0; k < p.n_h_su; ++k) {
        double wsum = 0.0;
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim_local);
        for (std::size_t m = 0; m < data.size(); ++m) {
            for (std::size_t m1 = 0; m1 < data[m].x_locals.size(); ++m1) {
                const double w = rho.rho[m][m1](k);
                wsum += w;
                mean += w * data[m].x_locals[m1];
            }
        }
        GaussianParams comp;
        if (wsum < kEmptyComponentMass) {
            if (empty_components) empty_components->push_back(k);
            comp = fit_gaussian(all_locals, cfg.ridge, "m_step pooled component");
        } else {
            comp.mu = mean / wsum;
            comp.sigma = Eigen::MatrixXd::Zero(dim_local, dim_local);
            for (std::size_t m = 0; m < data.size(); ++m) {
                for (std::size_t m1 = 0; m1 < data[m].x_locals.size(); ++m1) {
                    const double w = rho.rho[m][m1](k);
                    if (w == 0.0) continue;
                    const Eigen::VectorXd dx = data[m].x_locals[m1] - comp.mu;
                    comp.sigma.noalias() += w * dx * dx.transpose();
                }
            }
            comp.sigma /= wsum;
            add_relative_ridge(comp.sigma, cfg.ridge);
            refresh_cholesky(comp, "m_step component " + std::to_string(k + 1));
        }
        p.components[static_cast<std::size_t>(k)] = std::move(comp);
    }
    return p;
}

double sub_log_likelihood(const SubCharacter& c, const SubModelParams& p) {
    double ll = gaussian_log_density(c.x_global, p.global);
    ll += log_gamma_of_count(p, c.n_subunits);
    if (ll == kNegInf) return kNegInf;
    const Eigen::VectorXd log_eta = log_eta_row(p, c.n_subunits);
    for (const auto& xl : c.x_locals) {
        Eigen::VectorXd t(p.n_h_su);
        for (int k = 0; k < p.n_h_su; ++k) {
            t(k) = log_eta(k) + gaussian_log_density(xl, p.components[static_cast<std::size_t>(k)]);
        }
        ll += log_sum_exp(std::span<const double>(t.data(), static_cast<std::size_t>(t.size())));
    }
    return ll;
}

namespace {

double dataset_log_likelihood(const std::vector<SubCharacter>& data, const SubModelParams& p) {
    double ll = 0.0;
    for (const auto& c : data) ll += sub_log_likelihood(c, p);
    return ll;
}

// Farthest-point seeds over the pooled sub-unit vectors; the first pick is
// drawn from the seeded RNG, later picks maximize the distance to the
// closest seed so far (ties to the lowest index).
std::vector<std::size_t> farthest_point_seeds(const std::vector<Eigen::VectorXd>& vecs,
                                              int n_seeds, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, vecs.size() - 1);
    std::vector<std::size_t> seeds{pick(rng)};
    std::vector<double> min_dist(vecs.size(), std::numeric_limits<double>::infinity());
    while (static_cast<int>(seeds.size()) < n_seeds) {
        const Eigen::VectorXd& last = vecs[seeds.back()];
        std::size_t best = 0;
        double best_dist = -1.0;
        for (std::size_t i = 0; i < vecs.size(); ++i) {
            min_dist[i] = std::min(min_dist[i], (vecs[i] - last).squaredNorm());
            if (min_dist[i] > best_dist) {
                best_dist = min_dist[i];
                best = i;
            }
        }
        seeds.push_back(best);
    }
    return seeds;
}

} // namespace

SubFitResult fit_sub(const std::vector<SubCharacter>& train, const EmConfig& cfg) {
    cfg.validate();
    if (train.size() < 2) throw DataError("fit_sub: need at least 2 characters");

    std::vector<Eigen::VectorXd> all_locals;
    for (const auto& c : train) {
        if (c.n_subunits != static_cast<int>(c.x_locals.size()) || c.n_subunits < 1) {
            throw DataError("fit_sub: inconsistent sub-unit data");
        }
        for (const auto& xl : c.x_locals) all_locals.push_back(xl);
    }
    const int n_h = std::min<int>(cfg.n_h_su, static_cast<int>(all_locals.size()));
    EmConfig eff = cfg;
    eff.n_h_su = n_h;

    // Initial model: exact global/count blocks, farthest-point component
    // means over a pooled covariance, uniform eta.
    SubModelParams p;
    {
        Responsibilities uniform;
        uniform.rho.resize(train.size());
        for (std::size_t m = 0; m < train.size(); ++m) {
            uniform.rho[m].assign(train[m].x_locals.size(),
                                  Eigen::VectorXd::Constant(n_h, 1.0 / n_h));
        }
        p = m_step(train, uniform, eff);

        const GaussianParams pooled = fit_gaussian(all_locals, eff.ridge, "fit_sub pooled");
        const auto seeds = farthest_point_seeds(all_locals, n_h, eff.seed);
        for (int k = 0; k < n_h; ++k) {
            p.components[static_cast<std::size_t>(k)].mu = all_locals[seeds[static_cast<std::size_t>(k)]];
            p.components[static_cast<std::size_t>(k)].sigma = pooled.sigma;
            p.components[static_cast<std::size_t>(k)].chol = pooled.chol;
            p.components[static_cast<std::size_t>(k)].logdet = pooled.logdet;
        }
        p.eta.setConstant(1.0 / n_h);
    }

    SubFitResult res;
    double ll = dataset_log_likelihood(train, p);
    if (!std::isfinite(ll)) throw NumericError("fit_sub: non-finite likelihood at initialization");
    res.loglik_trace.push_back(ll);

    for (int iter = 1; iter <= eff.max_iters; ++iter) {
        const Responsibilities rho = e_step(train, p);
        std::vector<int> empties;
        SubModelParams next = m_step(train, rho, eff, &empties);
        for (int k : empties) {
            // Reseed a dead component at the sub-unit the current model
            // explains worst.
            std::size_t worst = 0;
            double worst_ll = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < all_locals.size(); ++i) {
                Eigen::VectorXd t(n_h);
                for (int kk = 0; kk < n_h; ++kk) {
                    t(kk) = gaussian_log_density(all_locals[i],
                                                 next.components[static_cast<std::size_t>(kk)]);
                }
                const double v = t.maxCoeff();
                if (v < worst_ll) {
                    worst_ll = v;
                    worst = i;
                }
            }
            next.components[static_cast<std::size_t>(k)].mu = all_locals[worst];
        }

        const double next_ll = dataset_log_likelihood(train, next);
        if (!std::isfinite(next_ll)) {
            throw NumericError("fit_sub: non-finite likelihood at iteration " +
                               std::to_string(iter));
        }
        if (next_ll < ll) break; // perturbation floor reached; keep the better model

        p = std::move(next);
        res.loglik_trace.push_back(next_ll);
        res.iterations = iter;
        const double change = std::abs(next_ll - ll);
        ll = next_ll;
        if (change <= eff.rel_tol * std::abs(ll)) break;
    }

    res.params = std::move(p);
    return res;
}

SubTrainResult fit_sub_classifier(const std::vector<std::vector<Character>>& train,
                                  const HpodConfig& hpod_cfg, const SegmentationConfig& seg_cfg,
                                  const EmConfig& em_cfg, double fisher_ridge, int jobs) {
    if (train.size() < 2) throw DataError("fit_sub_classifier: need at least 2 classes");

    ClassSamples hpod_globals(train.size());
    for (std::size_t k = 0; k < train.size(); ++k) {
        hpod_globals[k].reserve(train[k].size());
        for (const auto& c : train[k]) {
            hpod_globals[k].push_back(extract_hpod_global(c, hpod_cfg).values);
        }
    }
    const FisherParams fisher = fit_fd(hpod_globals, fisher_ridge);

    SubTrainResult res;
    res.model.fisher_w = fisher.w_matrix;
    res.model.hpod = hpod_cfg;
    res.model.seg = seg_cfg;
    res.model.classes.resize(train.size());
    res.traces.resize(train.size());

    parallel_for(train.size(), jobs, [&](std::size_t k) {
        std::vector<SubCharacter> chars;
        chars.reserve(train[k].size());
        for (const auto& c : train[k]) {
            chars.push_back(build_sub_character(c, res.model.fisher_w, hpod_cfg, seg_cfg));
        }
        EmConfig cfg_k = em_cfg;
        cfg_k.seed = em_cfg.seed + k;
        SubFitResult fit = fit_sub(chars, cfg_k);
        res.model.classes[k] = std::move(fit.params);
        res.traces[k] = std::move(fit.loglik_trace);
    });
    return res;
}

Label sub_classifier_predict(const Character& preprocessed, const SubClassifier& m) {
    const SubCharacter sc = build_sub_character(preprocessed, m.fisher_w, m.hpod, m.seg);
    return sub_predict(sc, m.classes);
}

Label sub_predict(const SubCharacter& c, const std::vector<SubModelParams>& all_params) {
    if (all_params.empty()) throw DataError("sub_predict: no fitted classes");
    int best = 0;
    double best_ll = kNegInf;
    for (std::size_t k = 0; k < all_params.size(); ++k) {
        const double ll = sub_log_likelihood(c, all_params[k]);
        if (ll > best_ll) {
            best_ll = ll;
            best = static_cast<int>(k);
        }
    }
    return one_hot(best + 1, static_cast<int>(all_params.size()));
}

} // namespace hwrec
