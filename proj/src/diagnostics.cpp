#include "msfilter/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace msf {

double rmse(const std::vector<VectorXd>& truth, const std::vector<VectorXd>& estimates) {
    if (truth.empty() || truth.size() != estimates.size())
        throw std::invalid_argument("rmse: empty input or length mismatch");
    const double n = static_cast<double>(truth[0].size());
    double acc = 0.0;
    for (size_t k = 0; k < truth.size(); ++k) {
        if (truth[k].size() != estimates[k].size())
            throw std::invalid_argument("rmse: dimension mismatch");
        acc += (truth[k] - estimates[k]).squaredNorm() / n;
    }
    return std::sqrt(acc / static_cast<double>(truth.size()));
}

double consistency(const ConsistencyInput& input) {
    const size_t t = input.truth.size();
    if (t == 0 || input.means.size() != t || input.covs.size() != t)
        throw std::invalid_argument("consistency: empty input or length mismatch");
    const double n = static_cast<double>(input.truth[0].size());
    double acc = 0.0;
    size_t skipped = 0;
    for (size_t k = 0; k < t; ++k) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(input.covs[k]);
        if (es.eigenvalues().minCoeff() <= 1e-12) {
            ++skipped;
            continue;
        }
        VectorXd e = input.truth[k] - input.means[k];
        acc += e.dot(es.operatorInverseSqrt() * es.operatorInverseSqrt() * e) / n;
    }
    if (skipped > t / 100)
        throw std::runtime_error("consistency: singular covariance at more than 1% of steps");
    return acc / static_cast<double>(t - skipped);
}

std::vector<double> autocorrelation(const std::vector<double>& series, int max_lag) {
    const long n = static_cast<long>(series.size());
    if (n < 2 || max_lag < 0 || max_lag >= n)
        throw std::invalid_argument("autocorrelation: series too short for max_lag");
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    if (var <= 0.0) throw std::invalid_argument("autocorrelation: zero-variance series");
    std::vector<double> acf(max_lag + 1);
    for (int lag = 0; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (long k = 0; k + lag < n; ++k) acc += (series[k] - mean) * (series[k + lag] - mean);
        acf[lag] = acc / var;  // biased normalization: divides by the full-sum variance
    }
    return acf;
}

double correlation_time(const std::vector<double>& acf, double dt) {
    if (acf.empty() || dt <= 0.0)
        throw std::invalid_argument("correlation_time: empty acf or non-positive dt");
    const double cutoff = std::exp(-4.0);
    double acc = 0.0;
    for (double v : acf) {
        if (std::abs(v) < cutoff) break;
        acc += v;
    }
    return dt * acc;
}

DensityTable equilibrium_pdf(const std::vector<double>& series, int n_bins) {
    if (series.size() < 2 || n_bins < 1)
        throw std::invalid_argument("equilibrium_pdf: need data and at least one bin");
    double lo = series[0], hi = series[0];
    for (double v : series) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi <= lo) hi = lo + 1.0;
    const double w = (hi - lo) / n_bins;
    DensityTable out;
    out.bin_width = w;
    out.centers.resize(n_bins);
    out.density.assign(n_bins, 0.0);
    for (int b = 0; b < n_bins; ++b) out.centers[b] = lo + (b + 0.5) * w;
    for (double v : series) {
        int b = std::min(n_bins - 1, static_cast<int>((v - lo) / w));
        out.density[b] += 1.0;
    }
    const double norm = 1.0 / (static_cast<double>(series.size()) * w);
    for (double& d : out.density) d *= norm;
    return out;
}

double density_l1_distance(const DensityTable& a, const DensityTable& b) {
    // Re-bin both tables onto a common uniform grid covering the union support.
    auto lo_of = [](const DensityTable& t) { return t.centers.front() - 0.5 * t.bin_width; };
    auto hi_of = [](const DensityTable& t) { return t.centers.back() + 0.5 * t.bin_width; };
    double lo = std::min(lo_of(a), lo_of(b));
    double hi = std::max(hi_of(a), hi_of(b));
    const int n = 2000;
    const double w = (hi - lo) / n;
    auto eval = [](const DensityTable& t, double x) {
        double lo_t = t.centers.front() - 0.5 * t.bin_width;
        int b = static_cast<int>((x - lo_t) / t.bin_width);
        if (b < 0 || b >= static_cast<int>(t.density.size())) return 0.0;
        return t.density[b];
    };
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = lo + (i + 0.5) * w;
        acc += std::abs(eval(a, x) - eval(b, x)) * w;
    }
    return acc;
}

}  // namespace msf
