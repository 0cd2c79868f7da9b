#include "msfilter/enkf.hpp"

#include <cmath>
#include <stdexcept>

#include "msfilter/linalg.hpp"
#include "msfilter/models.hpp"
#include "msfilter/rng.hpp"

namespace msf {

namespace {
MatrixXd selection_matrix(const std::vector<int>& obs_indices, int n) {
    MatrixXd h = MatrixXd::Zero(static_cast<int>(obs_indices.size()), n);
    for (size_t i = 0; i < obs_indices.size(); ++i) {
        if (obs_indices[i] < 0 || obs_indices[i] >= n)
            throw std::invalid_argument("selection_matrix: observation index out of range");
        h(static_cast<int>(i), obs_indices[i]) = 1.0;
    }
    return h;
}
}  // namespace

EtkfResult etkf_analysis(const Ensemble& forecast, const VectorXd& z,
                         const std::vector<int>& obs_indices, const MatrixXd& r_used,
                         const MatrixXd& q_inflate) {
    const int n = forecast.dim();
    const int e = forecast.size();
    if (e < 2) throw std::invalid_argument("etkf_analysis: need at least 2 members");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < e; ++j)
            if (!std::isfinite(forecast.members(i, j)))
                throw std::invalid_argument("etkf_analysis: non-finite forecast member");

    VectorXd m_f = forecast.mean();
    MatrixXd a = forecast.perturbations();
    if (a.norm() == 0.0) throw std::runtime_error("etkf_analysis: collapsed ensemble (zero spread)");

    MatrixXd a_infl = a;
    if (q_inflate.size() > 0 && q_inflate.norm() > 0.0) {
        // Transform the perturbations so their sample covariance becomes
        // P_f + Q (exact for E > n; low-rank bias otherwise).
        MatrixXd p_f_sample = a * a.transpose() / (e - 1);
        MatrixXd root = sym_sqrt(spd_project(p_f_sample + q_inflate));
        a_infl = root * pinv(sym_sqrt(p_f_sample)) * a;
        a_infl.colwise() -= a_infl.rowwise().mean().eval();
    }

    MatrixXd h = selection_matrix(obs_indices, n);
    MatrixXd zf = h * a_infl;
    VectorXd innovation = z - h * m_f;

    MatrixXd p_f = a_infl * a_infl.transpose() / (e - 1);
    MatrixXd s = h * p_f * h.transpose() + r_used;
    MatrixXd gain = p_f * h.transpose() * s.ldlt().solve(MatrixXd::Identity(s.rows(), s.cols()));
    VectorXd m_a = m_f + gain * innovation;

    // Deterministic transform: T = (I + Z^T R^-1 Z/(E-1))^{-1/2}; T 1 = 1, so
    // the analysis perturbations stay centered.
    MatrixXd r_inv_z = r_used.ldlt().solve(zf);
    MatrixXd me = MatrixXd::Identity(e, e) + zf.transpose() * r_inv_z / (e - 1);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(me);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::runtime_error("etkf_analysis: rank-deficient transform (ensemble too small)");
    MatrixXd t = es.eigenvectors() *
                 es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                 es.eigenvectors().transpose();
    MatrixXd a_a = a_infl * t;

    EtkfResult out;
    out.analysis.time = forecast.time;
    out.analysis.members = a_a.colwise() + m_a;
    out.gain = gain;
    out.p_f = p_f;
    out.p_a = a_a * a_a.transpose() / (e - 1);
    out.innovation = innovation;
    out.x_f_inflated = a_infl;
    out.z_f = zf;
    return out;
}

std::pair<MatrixXd, MatrixXd> estimate_linearizations(const MatrixXd& x_a_prev,
                                                      const MatrixXd& x_f,
                                                      const MatrixXd& x_f_inflated,
                                                      const MatrixXd& z_f) {
    if (x_a_prev.norm() == 0.0 || x_f_inflated.norm() == 0.0)
        throw std::runtime_error("estimate_linearizations: collapsed ensemble perturbations");
    MatrixXd f_k = x_f * pinv(x_a_prev);
    MatrixXd h_k = z_f * pinv(x_f_inflated);
    return {f_k, h_k};
}

void advance_lag_store(NoiseEstimatorState& st, const MatrixXd& f_k, const MatrixXd& h_k,
                       const VectorXd& eps_k, const MatrixXd& k_k, const MatrixXd& p_f_k,
                       const MatrixXd& p_a_k) {
    st.f_km2 = st.f_km1;
    st.f_km1 = f_k;
    st.h_km1 = st.h_k;
    st.h_k = h_k;
    st.eps_km1 = st.eps_k;
    st.eps_k = eps_k;
    st.p_a_km2 = st.p_a_km1_;
    st.p_a_km1_ = p_a_k;
    st.k_km1 = st.k_k_;
    st.k_k_ = k_k;
    st.p_f_km1 = st.p_f_k_;
    st.p_f_k_ = p_f_k;
    ++st.filled;
}

std::pair<MatrixXd, MatrixXd> empirical_noise_estimates(const NoiseEstimatorState& st) {
    if (st.filled < 3)
        throw std::runtime_error("empirical_noise_estimates: lag store not yet populated");
    MatrixXd f_inv = pinv(st.f_km1);
    MatrixXd h_k_inv = pinv(st.h_k);
    MatrixXd h_km1_inv_t = pinv(st.h_km1).transpose();
    MatrixXd cross = st.eps_k * st.eps_km1.transpose();
    MatrixXd self = st.eps_km1 * st.eps_km1.transpose();
    MatrixXd p_e = f_inv * h_k_inv * cross * h_km1_inv_t + st.k_km1 * self * h_km1_inv_t;
    MatrixXd q_e = p_e - st.f_km2 * st.p_a_km2 * st.f_km2.transpose();
    MatrixXd r_e = self - st.h_km1 * st.p_f_km1 * st.h_km1.transpose();
    return {q_e, r_e};
}

std::vector<MatrixXd> cyclic_basis(int n) {
    if (n < 1) throw std::invalid_argument("cyclic_basis: n must be positive");
    const int m = (n + 1) / 2;  // ceil(n/2)
    std::vector<MatrixXd> basis;
    basis.reserve(m);
    for (int r = 0; r < m; ++r) {
        MatrixXd b = MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            b(i, (i + r) % n) = 1.0;
            b((i + r) % n, i) = 1.0;
        }
        basis.push_back(b);
    }
    return basis;
}

VectorXd cyclic_q_fit(const MatrixXd& c_k, const MatrixXd& f_km1, const MatrixXd& h_km1,
                      const MatrixXd& h_k, const std::vector<MatrixXd>& basis) {
    const int m = static_cast<int>(c_k.rows());
    const int p = static_cast<int>(basis.size());
    if (c_k.cols() != m) throw std::invalid_argument("cyclic_q_fit: C_k must be square");
    if (p > m * m) throw std::invalid_argument("cyclic_q_fit: more parameters than equations");
    MatrixXd design(m * m, p);
    for (int r = 0; r < p; ++r) {
        MatrixXd col = h_k * f_km1 * basis[r] * h_km1.transpose();
        design.col(r) = Eigen::Map<const VectorXd>(col.data(), col.size());
    }
    Eigen::JacobiSVD<MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()(p - 1) < 1e-10 * svd.singularValues()(0))
        throw std::runtime_error("cyclic_q_fit: design rank deficient (observability violated)");
    VectorXd rhs = Eigen::Map<const VectorXd>(c_k.data(), c_k.size());
    return svd.solve(rhs);
}

MatrixXd cyclic_c_matrix(const NoiseEstimatorState& st) {
    if (st.filled < 3) throw std::runtime_error("cyclic_c_matrix: lag store not yet populated");
    MatrixXd self = st.eps_km1 * st.eps_km1.transpose();
    return st.eps_k * st.eps_km1.transpose() + st.h_k * st.f_km1 * st.k_km1 * self -
           st.h_k * st.f_km1 * st.f_km2 * st.p_a_km2 * st.f_km2.transpose() *
               st.h_km1.transpose();
}

void update_noise_running(NoiseEstimatorState& st, const MatrixXd& q_e, const MatrixXd& r_e) {
    if (st.window_tau < 1) throw std::invalid_argument("update_noise_running: window_tau >= 1");
    const double w = 1.0 / static_cast<double>(st.window_tau);
    st.q_est += w * (q_e - st.q_est);
    st.r_est += w * (r_e - st.r_est);
}

MatrixXd noise_q_used(const NoiseEstimatorState& st) { return spd_project(st.q_est); }

MatrixXd noise_r_used(const NoiseEstimatorState& st) {
    MatrixXd r = spd_project(st.r_est);
    // Floor keeps the gain computation well posed early in a run.
    const int m = static_cast<int>(r.rows());
    double floor = 1e-10 * (r.trace() / m + 1.0);
    return r + floor * MatrixXd::Identity(m, m);
}

AdaptiveEnkfResult run_adaptive_enkf(const AdaptiveEnkfConfig& cfg,
                                     const std::vector<VectorXd>& truth_slow,
                                     const ObservationSeries& obs,
                                     const VectorXd& init_mean) {
    const int n_slow = static_cast<int>(init_mean.size());
    const int n_obs = static_cast<int>(cfg.obs_indices.size());
    const bool augmented =
        cfg.scheme == AdaptiveScheme::RDFD || cfg.scheme == AdaptiveScheme::RSFAD;
    const bool estimating =
        cfg.scheme == AdaptiveScheme::RSFA || cfg.scheme == AdaptiveScheme::RSFAD;
    const int n = n_slow + (augmented ? 1 : 0);
    const int e = cfg.ensemble_size > 0 ? cfg.ensemble_size : 2 * n_slow + (augmented ? 2 : 0);
    if (truth_slow.size() != obs.size())
        throw std::invalid_argument("run_adaptive_enkf: truth/observation length mismatch");
    if (estimating && !cfg.cyclic && n_obs < n_slow)
        throw std::invalid_argument("run_adaptive_enkf: full-Q estimation needs every slow variable observed; use the cyclic path");
    if (estimating && cfg.cyclic && (n_slow + 1) / 2 > n_obs * n_obs)
        throw std::invalid_argument("run_adaptive_enkf: cyclic parameter count exceeds observation capacity");

    RngStream rng(cfg.seed, "enkf-init");
    Ensemble ens;
    ens.members.resize(n, e);
    for (int j = 0; j < e; ++j) {
        for (int i = 0; i < n_slow; ++i)
            ens.members(i, j) = init_mean(i) + cfg.init_spread * rng.normal();
        if (augmented) ens.members(n_slow, j) = cfg.alpha_init + cfg.alpha_spread * rng.normal();
    }

    NoiseEstimatorState est;
    est.window_tau = cfg.window_tau;
    est.q_est = MatrixXd::Zero(n, n);
    est.r_est = cfg.r_init;
    std::vector<MatrixXd> basis_aug;
    if (cfg.cyclic) {
        for (const MatrixXd& b : cyclic_basis(n_slow)) {
            MatrixXd ba = MatrixXd::Zero(n, n);
            ba.topLeftCorner(n_slow, n_slow) = b;
            basis_aug.push_back(ba);
        }
        est.cyclic_basis_set = basis_aug;
    }

    const double dt_obs = cfg.dt * cfg.steps_per_obs;
    const double obs_noise_scale =
        std::sqrt(cfg.r_init.trace() / static_cast<double>(cfg.r_init.rows()));

    AdaptiveEnkfResult out;
    MatrixXd x_a_prev = ens.perturbations();
    int consecutive_bad = 0;

    for (size_t k = 0; k < obs.size(); ++k) {
        // Forecast: deterministic reduced drift per member, damping parameter
        // held constant (persistence dynamics for the augmented entry).
        for (int j = 0; j < e; ++j) {
            VectorXd x = ens.members.col(j).head(n_slow);
            const double alpha = augmented ? ens.members(n_slow, j) : cfg.fixed_alpha;
            auto drift = [&](const VectorXd& s) -> VectorXd {
                return l96_slow_drift(s, cfg.forcing) - alpha * s;
            };
            for (int step = 0; step < cfg.steps_per_obs; ++step) x = rk4_step(drift, x, cfg.dt);
            ens.members.col(j).head(n_slow) = x;
        }
        MatrixXd x_f_pert = ens.perturbations();
        VectorXd x_f_mean = ens.mean();

        MatrixXd q_used;
        if (estimating) {
            q_used = MatrixXd::Zero(n, n);
            // Project only the slow block; the augmented parameter gets no noise.
            MatrixXd qs = est.q_est.topLeftCorner(n_slow, n_slow);
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (qs + qs.transpose()));
            VectorXd ev = es.eigenvalues().cwiseMax(0.0);
            ev = ev.cwiseMax(cfg.q_floor * ev.sum() / n_slow);
            q_used.topLeftCorner(n_slow, n_slow) =
                es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        } else if (cfg.fixed_q.size() > 0) {
            q_used = MatrixXd::Zero(n, n);
            q_used.topLeftCorner(n_slow, n_slow) = cfg.fixed_q;
        } else {
            q_used = MatrixXd::Zero(n, n);
        }
        MatrixXd r_used = estimating ? noise_r_used(est) : cfg.r_init;

        EtkfResult res = etkf_analysis(ens, obs.values[k], cfg.obs_indices, r_used, q_used);

        VectorXd err = res.analysis.mean().head(n_slow) - truth_slow[k];
        double step_rmse = std::sqrt(err.squaredNorm() / n_slow);
        MatrixXd p_a_slow = res.p_a.topLeftCorner(n_slow, n_slow);
        double step_consistency = err.dot(pinv(p_a_slow) * err) / n_slow;
        // Prior consistency scores the forecast against the Q-inflated forecast
        // covariance; this is the statistic the innovation-based noise
        // estimator actually calibrates.
        VectorXd err_f = x_f_mean.head(n_slow) - truth_slow[k];
        MatrixXd p_f_slow = res.p_f.topLeftCorner(n_slow, n_slow);
        double step_consistency_prior = err_f.dot(pinv(p_f_slow) * err_f) / n_slow;

        out.times.push_back(obs.times[k]);
        out.rmse_series.push_back(step_rmse);
        out.consistency_series.push_back(step_consistency);
        out.consistency_prior_series.push_back(step_consistency_prior);
        out.alpha_series.push_back(augmented ? res.analysis.mean()(n_slow) : cfg.fixed_alpha);
        out.tr_q_series.push_back(q_used.trace());
        out.tr_r_series.push_back(r_used.trace());

        if (estimating) {
            try {
                auto [f_k, h_k] =
                    estimate_linearizations(x_a_prev, x_f_pert, res.x_f_inflated, res.z_f);
                advance_lag_store(est, f_k, h_k, res.innovation, res.gain, res.p_f, res.p_a);
                if (est.filled >= 3) {
                    MatrixXd q_e, r_e;
                    if (cfg.cyclic) {
                        VectorXd q_coef = cyclic_q_fit(cyclic_c_matrix(est), est.f_km1,
                                                       est.h_km1, est.h_k, basis_aug);
                        q_e = MatrixXd::Zero(n, n);
                        for (int r = 0; r < q_coef.size(); ++r) q_e += q_coef(r) * basis_aug[r];
                        r_e = est.eps_km1 * est.eps_km1.transpose() -
                              est.h_km1 * est.p_f_km1 * est.h_km1.transpose();
                    } else {
                        std::tie(q_e, r_e) = empirical_noise_estimates(est);
                    }
                    update_noise_running(est, q_e, r_e);
                }
            } catch (const std::runtime_error&) {
                // Ill-conditioned linearization this step; skip the noise update.
            }
        }

        ens = res.analysis;
        x_a_prev = ens.perturbations();

        if (!std::isfinite(step_rmse) || step_rmse > 1e3 * obs_noise_scale) {
            if (++consecutive_bad >= 100 || !std::isfinite(step_rmse)) {
                out.diverged = true;
                out.divergence_step = static_cast<long>(k);
                break;
            }
        } else {
            consecutive_bad = 0;
        }
    }

    out.q_final = est.q_est;
    out.r_final = est.r_est;
    out.alpha_final = out.alpha_series.empty() ? cfg.fixed_alpha : out.alpha_series.back();
    MatrixXd q_slow = estimating ? spd_project(est.q_est.topLeftCorner(n_slow, n_slow))
                                 : MatrixXd(MatrixXd::Zero(n_slow, n_slow));
    double acc = 0.0;
    for (int i = 0; i < n_slow; ++i) acc += std::sqrt(std::max(0.0, q_slow(i, i)) / dt_obs);
    out.sigma_hat = acc / n_slow;
    return out;
}

}  // namespace msf
