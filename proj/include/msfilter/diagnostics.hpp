#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace msf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// sqrt of the time-averaged squared error per state dimension.
double rmse(const std::vector<VectorXd>& truth, const std::vector<VectorXd>& estimates);

struct ConsistencyInput {
    std::vector<VectorXd> truth;
    std::vector<VectorXd> means;
    std::vector<MatrixXd> covs;
};

// Time-averaged Mahalanobis-normalized squared error
// C = <(1/n)(x - m)^T S^{-1} (x - m)>; 1 means the covariance estimate
// matches the actual error. Steps with a covariance eigenvalue below 1e-12
// are excluded; more than 1% excluded is an error.
double consistency(const ConsistencyInput& input);

// Biased sample autocorrelation, normalized so acf[0] = 1.
std::vector<double> autocorrelation(const std::vector<double>& series, int max_lag);

// dt times the running sum of the ACF, truncated at the first lag where
// |acf| < e^-4 (tail noise otherwise dominates the integral).
double correlation_time(const std::vector<double>& acf, double dt);

struct DensityTable {
    std::vector<double> centers;
    std::vector<double> density;
    double bin_width = 0.0;
};

// Normalized histogram estimate of the stationary density.
DensityTable equilibrium_pdf(const std::vector<double>& series, int n_bins);

// L1 distance between two density tables on a shared grid (used for
// equilibrium comparisons); both are re-binned onto the union support.
double density_l1_distance(const DensityTable& a, const DensityTable& b);

}  // namespace msf
