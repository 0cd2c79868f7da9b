#pragma once

#include "msfilter/trajectory.hpp"

namespace msf {

struct Ensemble {
    MatrixXd members;  // n x E, columns are members (possibly alpha-augmented)
    double time = 0.0;

    int dim() const { return static_cast<int>(members.rows()); }
    int size() const { return static_cast<int>(members.cols()); }
    VectorXd mean() const { return members.rowwise().mean(); }
    MatrixXd perturbations() const { return members.colwise() - mean(); }
};

struct EtkfResult {
    Ensemble analysis;
    MatrixXd gain;             // Kalman gain from the inflated prior
    MatrixXd p_f;              // inflated forecast sample covariance
    MatrixXd p_a;              // analysis sample covariance
    VectorXd innovation;       // z - H (inflated forecast mean)
    MatrixXd x_f_inflated;     // inflated forecast perturbations
    MatrixXd z_f;              // observation-space inflated perturbations
};

// Deterministic square-root analysis step. Forecast perturbations are
// inflated additively so the inflated sample covariance equals P_f + Q̃
// (Q̃ must be PSD; pass zero for no inflation), then the full ensemble
// transform produces analysis perturbations whose sample covariance equals
// the Kalman update of P_f + Q̃.
EtkfResult etkf_analysis(const Ensemble& forecast, const VectorXd& z,
                         const std::vector<int>& obs_indices, const MatrixXd& r_used,
                         const MatrixXd& q_inflate);

// Least-squares linearizations of the forward and observation operators:
// F_k = X_f pinv(X_a_prev), H_k = Z_f pinv(X_f_inflated).
std::pair<MatrixXd, MatrixXd> estimate_linearizations(const MatrixXd& x_a_prev,
                                                      const MatrixXd& x_f,
                                                      const MatrixXd& x_f_inflated,
                                                      const MatrixXd& z_f);

// Two-lag innovation statistics feeding the Q/R estimates.
struct NoiseEstimatorState {
    MatrixXd q_est, r_est;  // running (unprojected) estimates
    long window_tau = 1;
    std::vector<MatrixXd> cyclic_basis_set;  // empty selects the full-Q path

    // lag store: quantities from the two most recent analysis steps
    MatrixXd f_km2, f_km1;  // linearized forward operators
    MatrixXd h_km1, h_k;    // linearized observation operators
    VectorXd eps_km1, eps_k;
    MatrixXd p_a_km2, k_km1, p_f_km1;
    int filled = 0;  // completed shifts; estimates need filled >= 3

    MatrixXd p_a_km1_, k_k_, p_f_k_;  // staging for the next shift
};

// Shifts the lag store by one analysis step.
void advance_lag_store(NoiseEstimatorState& st, const MatrixXd& f_k, const MatrixXd& h_k,
                       const VectorXd& eps_k, const MatrixXd& k_k, const MatrixXd& p_f_k,
                       const MatrixXd& p_a_k);

// Raw one-shot estimates (may be asymmetric/indefinite by design):
// P^e_{k-1} = F^-1_{k-1} H^-1_k eps_k eps_{k-1}^T H^-T_{k-1}
//           + K_{k-1} eps_{k-1} eps_{k-1}^T H^-T_{k-1},
// Q^e = P^e - F_{k-2} P^a_{k-2} F_{k-2}^T,
// R^e = eps_{k-1} eps_{k-1}^T - H_{k-1} P^f_{k-1} H_{k-1}^T.
// Inverses are truncated pseudo-inverses.
std::pair<MatrixXd, MatrixXd> empirical_noise_estimates(const NoiseEstimatorState& st);

// 0/1 circulant basis: Q̂_r(i,j) = 1 iff i = j+r or j = i+r (mod n),
// r = 0..ceil(n/2)-1 (r = 0 is the identity).
std::vector<MatrixXd> cyclic_basis(int n);

// Least-squares coefficients of vec(C_k) = A_k q, column r of A_k being
// vec(H_k F_{k-1} Q̂_r H_{k-1}^T). Throws when A_k is rank deficient.
VectorXd cyclic_q_fit(const MatrixXd& c_k, const MatrixXd& f_km1, const MatrixXd& h_km1,
                      const MatrixXd& h_k, const std::vector<MatrixXd>& basis);

// Innovation cross-statistic driving the cyclic fit.
MatrixXd cyclic_c_matrix(const NoiseEstimatorState& st);

// Exponential moving average Q_k += (Q^e - Q_k)/tau (same for R). The
// running estimates are stored unmodified; callers obtain the SPD copy used
// in the next step via noise_q_used / noise_r_used.
void update_noise_running(NoiseEstimatorState& st, const MatrixXd& q_e, const MatrixXd& r_e);
MatrixXd noise_q_used(const NoiseEstimatorState& st);
MatrixXd noise_r_used(const NoiseEstimatorState& st);

enum class AdaptiveScheme {
    RDF,    // reduced deterministic filter: no augmentation, no noise estimation
    RDFD,   // + damping augmentation
    RSFA,   // + adaptive Q/R estimation, no augmentation
    RSFAD,  // both
};

struct AdaptiveEnkfConfig {
    AdaptiveScheme scheme = AdaptiveScheme::RSFAD;
    int ensemble_size = 0;  // 0 selects 2N (+2 with augmentation)
    std::vector<int> obs_indices;
    MatrixXd r_init;  // R_1; also the fixed R when estimation is off
    long window_tau = 5000;
    bool cyclic = false;  // circulant Q parameterization for sparse observations
    double forcing = 10.0;
    double alpha_init = 0.0;
    double alpha_spread = 0.1;
    double fixed_alpha = 0.0;     // damping used when not augmented
    MatrixXd fixed_q;             // inflation when estimation is off (empty = 0)
    double dt = 0.01;             // forecast integration step
    int steps_per_obs = 1;
    double init_spread = 0.1;
    // Relative eigenvalue floor on the estimated Q: eigenvalues are lifted to
    // q_floor * (trace / n). The raw innovation-based estimate is noisy at low
    // model-error signal and its weak directions can project to zero, starving
    // the ensemble of inflation there; the floor keeps every direction inflated
    // at the estimate's own scale. 0 disables.
    double q_floor = 0.1;
    std::uint64_t seed = 0;
};

struct AdaptiveEnkfResult {
    std::vector<double> times;
    std::vector<double> rmse_series, consistency_series, consistency_prior_series;
    std::vector<double> alpha_series, tr_q_series, tr_r_series;
    MatrixXd q_final, r_final;
    double alpha_final = 0.0;
    double sigma_hat = 0.0;  // mean sqrt(diag Q / obs interval) over slow sites
    bool diverged = false;
    long divergence_step = -1;
};

// Twin-experiment driver: deterministic reduced forecasts (one-layer drift
// with damping -alpha x, alpha per member when augmented), ETKF analysis with
// additive inflation, and the innovation-based adaptive Q/R update. truth_slow
// holds the slow truth state at every observation time for scoring.
AdaptiveEnkfResult run_adaptive_enkf(const AdaptiveEnkfConfig& cfg,
                                     const std::vector<VectorXd>& truth_slow,
                                     const ObservationSeries& obs,
                                     const VectorXd& init_mean);

}  // namespace msf
