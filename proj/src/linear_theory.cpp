#include "msfilter/linear_theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "msfilter/linalg.hpp"
#include "msfilter/rng.hpp"

namespace msf {

DerivedCoefficients derived_coefficients(const LinearTwoScaleParams& p) {
    p.validate();
    DerivedCoefficients d;
    d.a_tilde = p.a11 - p.a12 * p.a21 / p.a22;
    d.a_hat = p.a12 * p.a21 / (p.a22 * p.a22);
    return d;
}

SteadyCovariance2x2 solve_riccati_full(const LinearTwoScaleParams& p) {
    MatrixXd c = MatrixXd::Zero(2, 2);
    c(0, 0) = 1.0 / p.r_obs;
    MatrixXd s = solve_riccati_care(p.drift(), p.noise_cov(), c);
    return {s(0, 0), s(0, 1), s(1, 1)};
}

namespace {
// Forcing term of the expanded slow-scale Riccati equation.
double expanded_forcing(const LinearTwoScaleParams& p, const DerivedCoefficients& d) {
    double ratio = p.a12 / p.a22;
    return p.sigma_x * p.sigma_x * (1.0 - 2.0 * p.eps * d.a_hat) +
           p.eps * p.sigma_y * p.sigma_y * ratio * ratio;
}
}  // namespace

double s11_expanded(const LinearTwoScaleParams& p) {
    DerivedCoefficients d = derived_coefficients(p);
    double a_eff = d.a_tilde * (1.0 - p.eps * d.a_hat);
    return solve_riccati_reduced(a_eff, expanded_forcing(p, d), p.r_obs);
}

double manifold_sigma_sq(const LinearTwoScaleParams& p, double a) {
    DerivedCoefficients d = derived_coefficients(p);
    double a_eff = d.a_tilde * (1.0 - p.eps * d.a_hat);
    return -2.0 * (a - a_eff) * s11_expanded(p) + expanded_forcing(p, d);
}

double solve_riccati_reduced(double a, double sigma_x_sq, double r_obs) {
    if (r_obs <= 0.0) throw std::invalid_argument("solve_riccati_reduced: r_obs must be positive");
    double disc = a * a + sigma_x_sq / r_obs;
    if (disc < 0.0) throw std::invalid_argument("solve_riccati_reduced: negative discriminant");
    return r_obs * (a + std::sqrt(disc));
}

ReducedOUParams optimal_reduced_params(const LinearTwoScaleParams& p) {
    DerivedCoefficients d = derived_coefficients(p);
    ReducedOUParams rp;
    rp.a = d.a_tilde * (1.0 - p.eps * d.a_hat);
    rp.sigma_x_sq = expanded_forcing(p, d);
    return rp;
}

ReducedOUParams msm_fit(double variance, double corr_time) {
    if (variance <= 0.0 || corr_time <= 0.0)
        throw std::invalid_argument("msm_fit: variance and corr_time must be positive");
    return {-1.0 / corr_time, 2.0 * variance / corr_time};
}

EquilibriumStats equilibrium_stats_linear(const LinearTwoScaleParams& p, StatsMode mode) {
    DerivedCoefficients d = derived_coefficients(p);
    if (mode == StatsMode::Expanded) {
        double a_eff = d.a_tilde * (1.0 - p.eps * d.a_hat);
        EquilibriumStats st;
        st.c11 = -expanded_forcing(p, d) / (2.0 * a_eff);
        st.corr_time = -1.0 / a_eff;
        return st;
    }
    MatrixXd a = p.drift();
    MatrixXd c = solve_lyapunov(a, p.noise_cov());
    // Integrated lag covariance: int_0^inf e^{A t} C dt = -A^{-1} C, and the
    // correlation time is the (1,1) entry normalized by the variance.
    MatrixXd t = -a.inverse() * c;
    EquilibriumStats st;
    st.c11 = c(0, 0);
    st.corr_time = t(0, 0) / c(0, 0);
    return st;
}

ReducedOUParams reduced_params_for(const LinearTwoScaleParams& p, LinearVariantTag tag) {
    DerivedCoefficients d = derived_coefficients(p);
    double ratio = p.a12 / p.a22;
    switch (tag) {
        case LinearVariantTag::RSF:
            return {d.a_tilde, p.sigma_x * p.sigma_x};
        case LinearVariantTag::RSFA:
            return {d.a_tilde,
                    p.sigma_x * p.sigma_x + p.eps * p.sigma_y * p.sigma_y * ratio * ratio};
        case LinearVariantTag::OPTIMAL:
            return optimal_reduced_params(p);
        default:
            throw std::invalid_argument("reduced_params_for: variant has no canonical parameters");
    }
}

LinearFilterResult run_linear_filter(const LinearFilterVariant& variant,
                                     const LinearTwoScaleParams& p,
                                     const Trajectory& truth, const ObservationSeries& obs) {
    p.validate();
    if (obs.size() == 0) throw std::invalid_argument("run_linear_filter: no observations");
    if ((truth.size() - 1) % obs.size() != 0)
        throw std::invalid_argument("run_linear_filter: observation count does not divide trajectory");
    const size_t stride = (truth.size() - 1) / obs.size();
    const double obs_dt = obs.times[0] - truth.times[0];
    const double r = p.r_obs;

    LinearFilterResult out;
    out.times = obs.times;
    out.mean.reserve(obs.size());
    out.variance.reserve(obs.size());

    double mse_sum = 0.0;
    double var_sum_tail = 0.0;
    size_t tail_count = 0;
    const size_t tail_start = obs.size() / 2;

    if (variant.tag == LinearVariantTag::FULL) {
        auto [phi, q] = ou_discretize(p.drift(), p.noise_cov(), obs_dt);
        VectorXd mean = truth.states[0];
        MatrixXd cov = solve_lyapunov(p.drift(), p.noise_cov());
        for (size_t k = 0; k < obs.size(); ++k) {
            mean = phi * mean;
            cov = phi * cov * phi.transpose() + q;
            double s11 = cov(0, 0);
            double innov = obs.values[k](0) - mean(0);
            VectorXd gain = cov.col(0) / (s11 + r);
            mean += gain * innov;
            cov -= gain * cov.row(0);
            cov = symmetrize(cov);
            out.mean.push_back(mean(0));
            out.variance.push_back(cov(0, 0));
        }
    } else {
        const double a = variant.reduced.a;
        const double s2 = variant.reduced.sigma_x_sq;
        const double phi = std::exp(a * obs_dt);
        const double q = s2 * (std::exp(2.0 * a * obs_dt) - 1.0) / (2.0 * a);
        double mean = truth.states[0](0);
        double cov = -s2 / (2.0 * a);
        for (size_t k = 0; k < obs.size(); ++k) {
            mean = phi * mean;
            cov = phi * phi * cov + q;
            double gain = cov / (cov + r);
            mean += gain * (obs.values[k](0) - mean);
            cov = (1.0 - gain) * cov;
            out.mean.push_back(mean);
            out.variance.push_back(cov);
        }
    }

    for (size_t k = 0; k < obs.size(); ++k) {
        double x_true = truth.states[(k + 1) * stride](0);
        double e = out.mean[k] - x_true;
        mse_sum += e * e;
        if (k >= tail_start) {
            var_sum_tail += out.variance[k];
            ++tail_count;
        }
    }
    out.mse = mse_sum / static_cast<double>(obs.size());
    out.steady_variance = var_sum_tail / static_cast<double>(tail_count);
    out.consistency = out.mse / out.steady_variance;
    return out;
}

JointErrorStats joint_error_stats(const LinearTwoScaleParams& p, const ReducedOUParams& rp) {
    p.validate();
    double s_tilde = solve_riccati_reduced(rp.a, rp.sigma_x_sq, p.r_obs);
    double gain = s_tilde / p.r_obs;
    MatrixXd f = MatrixXd::Zero(3, 3);
    f.topLeftCorner(2, 2) = p.drift();
    f(2, 0) = gain;
    f(2, 2) = rp.a - gain;
    MatrixXd q = MatrixXd::Zero(3, 3);
    q.topLeftCorner(2, 2) = p.noise_cov();
    q(2, 2) = gain * gain * p.r_obs;
    MatrixXd e = solve_lyapunov(f, q);
    JointErrorStats st;
    st.e11 = e(0, 0) + e(2, 2) - 2.0 * e(0, 2);
    st.optimality_residual = e(0, 2) - e(2, 2);
    st.s_tilde = s_tilde;
    return st;
}

namespace {
double t_quantile_975(int df) {
    static const double table[] = {12.71, 4.30, 3.18, 2.78, 2.57,
                                   2.45,  2.36, 2.31, 2.26, 2.23};
    if (df < 1) return 12.71;
    if (df <= 10) return table[df - 1];
    return 2.0;
}
}  // namespace

PathwiseStudyResult pathwise_convergence_study(const LinearTwoScaleParams& base,
                                               const std::vector<double>& eps_values,
                                               ManifoldChoice choice, long n_cycles,
                                               double obs_dt, std::uint64_t seed) {
    if (eps_values.size() < 2)
        throw std::invalid_argument("pathwise_convergence_study: need at least two eps values");
    PathwiseStudyResult out;
    out.eps_values = eps_values;
    const long burn = n_cycles / 10;
    for (size_t i = 0; i < eps_values.size(); ++i) {
        LinearTwoScaleParams p = base;
        p.eps = eps_values[i];
        p.validate();
        std::uint64_t eps_seed = derive_seed(seed, "pathwise-eps-" + std::to_string(i));

        // Equilibrium initial condition shared by truth and both filters.
        MatrixXd c_eq = solve_lyapunov(p.drift(), p.noise_cov());
        RngStream ic_rng(eps_seed, "initial-condition");
        VectorXd xi(2);
        xi << ic_rng.normal(), ic_rng.normal();
        VectorXd x0 = sym_sqrt(c_eq) * xi;

        Trajectory truth = integrate_linear_exact(p, x0, obs_dt, n_cycles, eps_seed);
        MatrixXd r_obs(1, 1);
        r_obs(0, 0) = p.r_obs;
        ObservationSeries obs = generate_observations(truth, {0}, r_obs, 1, eps_seed);

        LinearFilterVariant full;
        full.tag = LinearVariantTag::FULL;
        LinearFilterResult res_full = run_linear_filter(full, p, truth, obs);

        DerivedCoefficients d = derived_coefficients(p);
        LinearFilterVariant red;
        red.tag = LinearVariantTag::CUSTOM;
        red.reduced.a = (choice == ManifoldChoice::OptimalDamping)
                            ? d.a_tilde * (1.0 - p.eps * d.a_hat)
                            : d.a_tilde;
        red.reduced.sigma_x_sq = manifold_sigma_sq(p, red.reduced.a);
        LinearFilterResult res_red = run_linear_filter(red, p, truth, obs);

        double acc = 0.0;
        long count = 0;
        for (size_t k = static_cast<size_t>(burn); k < res_full.mean.size(); ++k) {
            double diff = res_full.mean[k] - res_red.mean[k];
            acc += diff * diff;
            ++count;
        }
        out.mse.push_back(acc / static_cast<double>(count));
    }

    // Log-log regression with a residual-based confidence interval.
    const int n = static_cast<int>(eps_values.size());
    VectorXd lx(n), ly(n);
    for (int i = 0; i < n; ++i) {
        lx(i) = std::log(eps_values[i]);
        ly(i) = std::log(out.mse[i]);
    }
    double mx = lx.mean(), my = ly.mean();
    double sxx = (lx.array() - mx).square().sum();
    double sxy = ((lx.array() - mx) * (ly.array() - my)).sum();
    out.slope = sxy / sxx;
    if (n > 2) {
        double ss_res = (ly.array() - my - out.slope * (lx.array() - mx)).square().sum();
        double se = std::sqrt(ss_res / (n - 2) / sxx);
        out.slope_ci_halfwidth = t_quantile_975(n - 2) * se;
    } else {
        out.slope_ci_halfwidth = std::numeric_limits<double>::infinity();
    }
    out.conclusive = std::isfinite(out.slope) && out.slope_ci_halfwidth < 0.75;
    return out;
}

}  // namespace msf
