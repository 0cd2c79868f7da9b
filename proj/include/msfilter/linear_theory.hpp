#pragma once

#include "msfilter/models.hpp"

namespace msf {

struct ReducedOUParams {
    double a;           // drift, a < 0
    double sigma_x_sq;  // noise variance rate
};

struct SteadyCovariance2x2 {
    double s11, s12, s22;
};

struct DerivedCoefficients {
    double a_tilde;  // a11 - a12 a21 / a22
    double a_hat;    // a12 a21 / a22^2
};

enum class LinearVariantTag { FULL, RSF, RSFA, OPTIMAL, CUSTOM };

struct LinearFilterVariant {
    LinearVariantTag tag = LinearVariantTag::FULL;
    ReducedOUParams reduced{0.0, 0.0};  // used when tag != FULL
};

DerivedCoefficients derived_coefficients(const LinearTwoScaleParams& p);

// Steady posterior covariance of the 2-D Kalman-Bucy filter; Riccati residual
// below 1e-10 guaranteed.
SteadyCovariance2x2 solve_riccati_full(const LinearTwoScaleParams& p);

// Positive root of -s^2/R + 2 a_tilde (1 - eps a_hat) s
// + sigma_x^2 (1 - 2 eps a_hat) + eps sigma_y^2 a12^2/a22^2 = 0.
double s11_expanded(const LinearTwoScaleParams& p);

// Noise rate putting (a, sigma_X^2) on the covariance-matching manifold.
double manifold_sigma_sq(const LinearTwoScaleParams& p, double a);

// Positive root of -s^2/R + 2 a s + sigma_x_sq = 0.
double solve_riccati_reduced(double a, double sigma_x_sq, double r_obs);

// a = a_tilde (1 - eps a_hat), sigma_X^2 = sigma_x^2 (1 - 2 eps a_hat)
// + eps sigma_y^2 a12^2 / a22^2.
ReducedOUParams optimal_reduced_params(const LinearTwoScaleParams& p);

// OU parameters matching a given equilibrium variance and correlation time:
// a = -1/T_c, sigma_X^2 = 2 var / T_c.
ReducedOUParams msm_fit(double variance, double corr_time);

struct EquilibriumStats {
    double c11;        // slow-variable equilibrium variance
    double corr_time;  // slow-variable correlation time
};
enum class StatsMode { Exact, Expanded };
EquilibriumStats equilibrium_stats_linear(const LinearTwoScaleParams& p, StatsMode mode);

// Reduced parameters for the named variant (FULL is invalid here).
ReducedOUParams reduced_params_for(const LinearTwoScaleParams& p, LinearVariantTag tag);

struct LinearFilterResult {
    std::vector<double> times;
    std::vector<double> mean;       // posterior slow-component mean at obs times
    std::vector<double> variance;   // posterior slow-component variance
    double mse = 0.0;               // temporal mean square error vs truth
    double steady_variance = 0.0;   // posterior variance averaged over the last half
    double consistency = 0.0;       // mse / steady posterior variance
};

// Discrete-observation Kalman filter: exact moment propagation over the
// observation interval, Gaussian update with H = (1, 0) (or H = 1 reduced).
// Truth must contain the trajectory from which obs was generated.
LinearFilterResult run_linear_filter(const LinearFilterVariant& variant,
                                     const LinearTwoScaleParams& p,
                                     const Trajectory& truth, const ObservationSeries& obs);

struct JointErrorStats {
    double e11;                  // steady actual error covariance E[(x - xt)^2]
    double optimality_residual;  // E[(x - xt) xt]
    double s_tilde;              // reduced filter steady covariance estimate
};

// Steady statistics of the joint (x, y, xt) system where xt is the
// continuous-time reduced filter estimate with steady gain K = s_tilde / R.
JointErrorStats joint_error_stats(const LinearTwoScaleParams& p, const ReducedOUParams& rp);

enum class ManifoldChoice { OptimalDamping, AveragedDamping };

struct PathwiseStudyResult {
    std::vector<double> eps_values;
    std::vector<double> mse;  // time-averaged (xhat - xt)^2 per eps
    double slope = 0.0;
    double slope_ci_halfwidth = 0.0;  // 95% CI from the regression residuals
    bool conclusive = true;
};

// Runs the FULL filter and a reduced filter with on-manifold parameters on
// identical observation streams and fits the log-log decay of the mean square
// mean difference against eps.
PathwiseStudyResult pathwise_convergence_study(const LinearTwoScaleParams& base,
                                               const std::vector<double>& eps_values,
                                               ManifoldChoice choice, long n_cycles,
                                               double obs_dt, std::uint64_t seed);

}  // namespace msf
