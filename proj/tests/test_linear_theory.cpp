#include <cmath>

#include "doctest.h"
#include "msfilter/linalg.hpp"
#include "msfilter/linear_theory.hpp"

using namespace msf;

namespace {
LinearTwoScaleParams params_a(double eps) {
    LinearTwoScaleParams p;
    p.a11 = -1.0;
    p.a12 = 1.0;
    p.a21 = -1.0;
    p.a22 = -1.0;
    p.sigma_x = std::sqrt(2.0);
    p.sigma_y = std::sqrt(2.0);
    p.eps = eps;
    p.r_obs = 0.5;
    return p;
}

LinearTwoScaleParams params_b(double eps) {
    LinearTwoScaleParams p;
    p.a11 = -1.0;
    p.a12 = -1.0;
    p.a21 = 1.0;
    p.a22 = -1.0;
    p.sigma_x = 1.0;
    p.sigma_y = 1.0;
    p.eps = eps;
    p.r_obs = 1.0;
    return p;
}
}  // namespace

TEST_CASE("derived coefficients for both parameter presets") {
    DerivedCoefficients d = derived_coefficients(params_a(0.5));
    CHECK(d.a_tilde == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(d.a_hat == doctest::Approx(-1.0).epsilon(1e-14));
    d = derived_coefficients(params_b(0.5));
    CHECK(d.a_tilde == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(d.a_hat == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("full Riccati solution satisfies the algebraic equation") {
    LinearTwoScaleParams p = params_a(0.25);
    SteadyCovariance2x2 s = solve_riccati_full(p);
    MatrixXd sm(2, 2), c = MatrixXd::Zero(2, 2);
    sm << s.s11, s.s12, s.s12, s.s22;
    c(0, 0) = 1.0 / p.r_obs;
    CHECK(riccati_residual(sm, p.drift(), p.noise_cov(), c) < 1e-9);
    CHECK(s.s11 > 0.0);
}

TEST_CASE("expanded root satisfies its defining quadratic") {
    LinearTwoScaleParams p = params_a(0.125);
    DerivedCoefficients d = derived_coefficients(p);
    double s = s11_expanded(p);
    double forcing = p.sigma_x * p.sigma_x * (1.0 - 2.0 * p.eps * d.a_hat) +
                     p.eps * p.sigma_y * p.sigma_y * p.a12 * p.a12 / (p.a22 * p.a22);
    double res = -s * s / p.r_obs + 2.0 * d.a_tilde * (1.0 - p.eps * d.a_hat) * s + forcing;
    CHECK(std::abs(res) < 1e-12);
    CHECK(s > 0.0);
}

TEST_CASE("reduced Riccati root matches its closed form") {
    double s = solve_riccati_reduced(-1.0, 2.0, 1.0);
    CHECK(s == doctest::Approx(std::sqrt(3.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("optimal parameters sit on the covariance-matching manifold") {
    LinearTwoScaleParams p = params_a(0.25);
    ReducedOUParams opt = optimal_reduced_params(p);
    CHECK(manifold_sigma_sq(p, opt.a) == doctest::Approx(opt.sigma_x_sq).epsilon(1e-12));
    // their reduced steady covariance equals the expanded slow covariance
    double s = solve_riccati_reduced(opt.a, opt.sigma_x_sq, p.r_obs);
    CHECK(s == doctest::Approx(s11_expanded(p)).epsilon(1e-12));
}

TEST_CASE("expanded root converges to the full slow covariance at rate eps^2") {
    VectorXd eps(5), gap(5);
    for (int i = 0; i < 5; ++i) {
        double e = std::pow(2.0, -(i + 1));
        LinearTwoScaleParams p = params_a(e);
        eps(i) = e;
        gap(i) = std::abs(solve_riccati_full(p).s11 - s11_expanded(p));
    }
    CHECK(loglog_slope(eps, gap) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("equilibrium statistics: expanded agrees with exact to first order") {
    for (double e : {0.1, 0.05, 0.025}) {
        LinearTwoScaleParams p = params_a(e);
        EquilibriumStats exact = equilibrium_stats_linear(p, StatsMode::Exact);
        EquilibriumStats expanded = equilibrium_stats_linear(p, StatsMode::Expanded);
        CHECK(std::abs(exact.c11 - expanded.c11) < 5.0 * e * e);
        CHECK(std::abs(exact.corr_time - expanded.corr_time) < 5.0 * e * e);
    }
}

TEST_CASE("fitting the expanded equilibrium statistics returns the optimal parameters") {
    // algebraic identity, must hold to machine precision
    for (double e : {0.5, 0.25, 0.1}) {
        LinearTwoScaleParams p = params_a(e);
        EquilibriumStats st = equilibrium_stats_linear(p, StatsMode::Expanded);
        ReducedOUParams fit = msm_fit(st.c11, st.corr_time);
        ReducedOUParams opt = optimal_reduced_params(p);
        CHECK(fit.a == doctest::Approx(opt.a).epsilon(1e-13));
        CHECK(fit.sigma_x_sq == doctest::Approx(opt.sigma_x_sq).epsilon(1e-13));
    }
}

TEST_CASE("reduced_params_for rejects FULL and returns scheme formulas") {
    LinearTwoScaleParams p = params_a(0.25);
    CHECK_THROWS_AS(reduced_params_for(p, LinearVariantTag::FULL), std::invalid_argument);
    DerivedCoefficients d = derived_coefficients(p);
    ReducedOUParams rsf = reduced_params_for(p, LinearVariantTag::RSF);
    CHECK(rsf.a == doctest::Approx(d.a_tilde).epsilon(1e-14));
    CHECK(rsf.sigma_x_sq == doctest::Approx(p.sigma_x * p.sigma_x).epsilon(1e-14));
    ReducedOUParams rsfa = reduced_params_for(p, LinearVariantTag::RSFA);
    CHECK(rsfa.a == doctest::Approx(d.a_tilde).epsilon(1e-14));
    double extra = p.eps * p.sigma_y * p.sigma_y * p.a12 * p.a12 / (p.a22 * p.a22);
    CHECK(rsfa.sigma_x_sq == doctest::Approx(p.sigma_x * p.sigma_x + extra).epsilon(1e-14));
}

TEST_CASE("joint error statistics: optimal parameters give near-optimal estimates") {
    LinearTwoScaleParams p = params_a(0.0625);
    JointErrorStats opt = joint_error_stats(p, optimal_reduced_params(p));
    JointErrorStats rsf = joint_error_stats(p, reduced_params_for(p, LinearVariantTag::RSF));
    // actual error concentrates near the covariance estimate only when matched
    CHECK(std::abs(opt.e11 - opt.s_tilde) < std::abs(rsf.e11 - rsf.s_tilde));
    CHECK(std::abs(opt.optimality_residual) < 0.01);
}

TEST_CASE("linear filter is seed reproducible and consistent for the full model") {
    LinearTwoScaleParams p = params_a(0.25);
    VectorXd x0 = VectorXd::Zero(2);
    Trajectory truth = integrate_linear_exact(p, x0, 1.0, 20000, 21);
    MatrixXd r(1, 1);
    r(0, 0) = p.r_obs;
    ObservationSeries obs = generate_observations(truth, {0}, r, 1, 21);
    LinearFilterVariant v;
    v.tag = LinearVariantTag::FULL;
    LinearFilterResult res1 = run_linear_filter(v, p, truth, obs);
    LinearFilterResult res2 = run_linear_filter(v, p, truth, obs);
    CHECK(res1.mean.back() == res2.mean.back());
    CHECK(res1.consistency == doctest::Approx(1.0).epsilon(0.1));
}
