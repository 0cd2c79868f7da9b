#pragma once

#include "msfilter/trajectory.hpp"

namespace msf {

struct ModelErrorSeries {
    std::vector<double> u_values;  // model-error samples, pooled over sites
    std::vector<double> x_values;  // matching slow-state samples
    double dt = 0.0;
};

// Residual forcing the truncated one-layer model misses:
// U(x_i,t) = x_{i-1}(x_{i+1} - x_{i-2}) - x_i + F - (x_i(t+dt) - x_i(t))/dt,
// forward difference, cyclic indices, pooled over all sites.
ModelErrorSeries model_error_series(const Trajectory& slow_traj, double forcing, double dt);

struct CubicFit {
    double b0, b1, b2, b3;
};

// Ordinary least squares on the (1, x, x^2, x^3) design.
CubicFit fit_cubic(const ModelErrorSeries& series);

struct Ar1Fit {
    double phi;
    double sigma_hat;
};

// phi = lag-1 sample autocorrelation; sigma_hat scales the recursion
// e(t) = phi e(t-dt) + sigma_hat (1 - phi^2) z(t) to the residual variance
// (literal (1-phi^2) factor; set sqrt_convention for the standard one).
Ar1Fit fit_ar1(const std::vector<double>& residuals, bool sqrt_convention = false);

struct TwoParamFit {
    double b1;
    double sigma_hat;
};

// No-intercept least-squares slope of U against x plus residual standard
// deviation (phi = 0, so both noise conventions coincide).
TwoParamFit offline_two_param_fit(const Trajectory& slow_traj, double forcing, double dt);

// Residuals of a cubic fit, in sample order (input to fit_ar1).
std::vector<double> cubic_fit_residuals(const ModelErrorSeries& series, const CubicFit& fit);

}  // namespace msf
