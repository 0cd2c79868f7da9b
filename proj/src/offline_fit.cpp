#include "msfilter/offline_fit.hpp"

#include <cmath>
#include <stdexcept>

#include "msfilter/linalg.hpp"

namespace msf {

ModelErrorSeries model_error_series(const Trajectory& slow_traj, double forcing, double dt) {
    const long t = static_cast<long>(slow_traj.size());
    if (t < 2) throw std::invalid_argument("model_error_series: need at least 2 samples");
    if (dt <= 0.0) throw std::invalid_argument("model_error_series: dt must be positive");
    const int n = static_cast<int>(slow_traj.states[0].size());
    if (n < 4) throw std::invalid_argument("model_error_series: need at least 4 sites");

    ModelErrorSeries out;
    out.dt = dt;
    out.u_values.reserve(static_cast<size_t>(n) * (t - 1));
    out.x_values.reserve(static_cast<size_t>(n) * (t - 1));
    // Site-major pooling keeps each site's samples consecutive in time so the
    // lag-1 statistics of the pooled residuals stay meaningful.
    for (int i = 0; i < n; ++i) {
        const int im1 = (i + n - 1) % n, im2 = (i + n - 2) % n, ip1 = (i + 1) % n;
        for (long k = 0; k + 1 < t; ++k) {
            const VectorXd& x = slow_traj.states[k];
            double truncated = x(im1) * (x(ip1) - x(im2)) - x(i) + forcing;
            double tendency = (slow_traj.states[k + 1](i) - x(i)) / dt;
            out.u_values.push_back(truncated - tendency);
            out.x_values.push_back(x(i));
        }
    }
    return out;
}

CubicFit fit_cubic(const ModelErrorSeries& series) {
    const long m = static_cast<long>(series.u_values.size());
    if (m < 4) throw std::invalid_argument("fit_cubic: need at least 4 samples");
    MatrixXd design(m, 4);
    VectorXd y(m);
    for (long k = 0; k < m; ++k) {
        double x = series.x_values[k];
        design(k, 0) = 1.0;
        design(k, 1) = x;
        design(k, 2) = x * x;
        design(k, 3) = x * x * x;
        y(k) = series.u_values[k];
    }
    VectorXd b = lstsq(design, y);
    return {b(0), b(1), b(2), b(3)};
}

std::vector<double> cubic_fit_residuals(const ModelErrorSeries& series, const CubicFit& fit) {
    std::vector<double> res(series.u_values.size());
    for (size_t k = 0; k < res.size(); ++k) {
        double x = series.x_values[k];
        res[k] = series.u_values[k] - (fit.b0 + fit.b1 * x + fit.b2 * x * x + fit.b3 * x * x * x);
    }
    return res;
}

Ar1Fit fit_ar1(const std::vector<double>& residuals, bool sqrt_convention) {
    const long n = static_cast<long>(residuals.size());
    if (n < 100) throw std::invalid_argument("fit_ar1: need at least 100 samples");
    double mean = 0.0;
    for (double v : residuals) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0, lag1 = 0.0;
    for (long k = 0; k < n; ++k) {
        double d = residuals[k] - mean;
        var += d * d;
        if (k + 1 < n) lag1 += d * (residuals[k + 1] - mean);
    }
    var /= static_cast<double>(n);
    double phi = lag1 / (var * static_cast<double>(n));
    if (!(std::abs(phi) < 1.0)) throw std::runtime_error("fit_ar1: nonstationary residuals (|phi| >= 1)");
    // Stationary variance of e = phi e' + g z is g^2/(1-phi^2); invert for the
    // chosen gain convention g = sigma_hat (1-phi^2) or sigma_hat sqrt(1-phi^2).
    double gain_sq = var * (1.0 - phi * phi);
    double sigma_hat =
        sqrt_convention ? std::sqrt(gain_sq / (1.0 - phi * phi)) : std::sqrt(gain_sq) / (1.0 - phi * phi);
    return {phi, sigma_hat};
}

TwoParamFit offline_two_param_fit(const Trajectory& slow_traj, double forcing, double dt) {
    ModelErrorSeries series = model_error_series(slow_traj, forcing, dt);
    const long m = static_cast<long>(series.u_values.size());
    double sxx = 0.0, sxy = 0.0;
    for (long k = 0; k < m; ++k) {
        sxx += series.x_values[k] * series.x_values[k];
        sxy += series.x_values[k] * series.u_values[k];
    }
    if (sxx <= 0.0) throw std::invalid_argument("offline_two_param_fit: degenerate slow states");
    double b1 = sxy / sxx;
    double ss = 0.0;
    for (long k = 0; k < m; ++k) {
        double r = series.u_values[k] - b1 * series.x_values[k];
        ss += r * r;
    }
    return {b1, std::sqrt(ss / static_cast<double>(m))};
}

}  // namespace msf
