#pragma once

#include "msfilter/models.hpp"

namespace msf {

enum class SchemeTag { RSF, RSFA, RSFC, RSPEKF };

// Named parameter presets; r_obs is pinned to half the system's equilibrium
// variance of the observed mode.
SpekfParams spekf_regime1();
SpekfParams spekf_regime2();

// Reduced-model coefficients for the given scheme. Complex rates enter the
// real-valued variance formulas through their real parts; the mean dynamics
// keep the full complex damping.
ReducedSpekfParams reduced_params(const SpekfParams& sp, SchemeTag scheme);

// Growth rate of the prior second moment; negative means the prior variance
// stays bounded.
double stability_exponent(const SpekfParams& sp, SchemeTag scheme);

struct MomentState {
    cplx mean{0.0, 0.0};
    double var = 0.0;
};

enum class FilterMode { Continuous, Discrete };

struct MomentFilterResult {
    std::vector<double> times;
    std::vector<MomentState> states;  // posterior at observation times
    long var_clip_count = 0;
    bool diverged = false;
    long divergence_step = -1;
};

// Gaussian-closure moment filter for the one-mode reduced model
// dU = -alpha U dt + beta U o dW + additive noise, observing U with total
// noise variance r_obs (split evenly across real/imaginary parts).
// Discrete mode: RK4 prior propagation (100 sub-steps per interval) plus a
// scalar Kalman update with gain S/(S+R). Continuous mode: the innovation
// form with dz taken as piecewise-linear increments of the observed values.
MomentFilterResult rspekf_moment_filter(const ReducedSpekfParams& rp,
                                        const ObservationSeries& obs, FilterMode mode,
                                        double r_obs, const MomentState& init);

// Moment filter for the full three-variable system under the Gaussian
// closure; identical in form to the reduced filter with order-eps-matched
// coefficients.
MomentFilterResult spekf_moment_filter(const SpekfParams& sp, const ObservationSeries& obs,
                                       FilterMode mode, const MomentState& init);

struct VarianceSeries {
    std::vector<double> times;
    std::vector<double> variance;
    std::vector<double> stderr_band;  // empty for deterministic series
    bool unstable = false;
};

// Prior (no-observation) variance of the reduced model from the equilibrium
// product initial condition: mean 0, Var(u)(0) = sigma_u^2 / (2 Re lambda_u).
// Closed scalar ODE integrated with RK4.
VarianceSeries prior_variance_evolution(const SpekfParams& sp, SchemeTag scheme,
                                        double horizon, double dt);

// Monte-Carlo estimate of the true prior variance E|u - mean(u)|^2(t) from an
// ensemble of Euler-Maruyama paths started at the equilibrium product law.
VarianceSeries mc_variance_oracle(const SpekfParams& sp, double horizon, double out_dt,
                                  int n_samples, std::uint64_t seed, int n_threads = 0);

}  // namespace msf
