#include <cmath>

#include "doctest.h"
#include "msfilter/diagnostics.hpp"
#include "msfilter/models.hpp"
#include "msfilter/offline_fit.hpp"
#include "msfilter/rng.hpp"

using namespace msf;

TEST_CASE("model error of a constant trajectory is F - c") {
    Trajectory t;
    const int n = 6;
    for (int k = 0; k < 10; ++k) {
        t.times.push_back(0.01 * k);
        t.states.push_back(VectorXd::Constant(n, 3.0));
    }
    ModelErrorSeries s = model_error_series(t, 8.0, 0.01);
    REQUIRE(s.u_values.size() == 9 * n);
    for (double u : s.u_values) CHECK(u == doctest::Approx(8.0 - 3.0).epsilon(1e-12));
    for (double x : s.x_values) CHECK(x == 3.0);
}

TEST_CASE("cubic fit round trip is exact and residuals vanish") {
    ModelErrorSeries s;
    s.dt = 0.01;
    RngStream rng(3, "x");
    for (int k = 0; k < 500; ++k) {
        double x = 3.0 * rng.normal();
        s.x_values.push_back(x);
        s.u_values.push_back(-0.2 + 0.6 * x - 0.01 * x * x + 0.002 * x * x * x);
    }
    CubicFit f = fit_cubic(s);
    CHECK(f.b0 == doctest::Approx(-0.2).epsilon(1e-9));
    CHECK(f.b1 == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(f.b2 == doctest::Approx(-0.01).epsilon(1e-8));
    CHECK(f.b3 == doctest::Approx(0.002).epsilon(1e-8));
    for (double r : cubic_fit_residuals(s, f)) CHECK(std::abs(r) < 1e-9);
}

TEST_CASE("AR(1) fit recovers the autocorrelation and both noise conventions") {
    RngStream rng(5, "ar1");
    std::vector<double> e;
    double phi = 0.9, sig = 0.7;  // innovation std
    double x = 0.0;
    for (int k = 0; k < 200000; ++k) {
        x = phi * x + sig * rng.normal();
        e.push_back(x);
    }
    Ar1Fit sqrt_fit = fit_ar1(e, true);
    CHECK(sqrt_fit.phi == doctest::Approx(phi).epsilon(0.01));
    // sqrt convention: sigma_hat is the stationary std
    CHECK(sqrt_fit.sigma_hat ==
          doctest::Approx(sig / std::sqrt(1.0 - phi * phi)).epsilon(0.02));
    Ar1Fit lit_fit = fit_ar1(e, false);
    // literal convention scales by an extra 1/sqrt(1-phi^2)
    CHECK(lit_fit.sigma_hat ==
          doctest::Approx(sqrt_fit.sigma_hat / std::sqrt(1.0 - lit_fit.phi * lit_fit.phi))
              .epsilon(0.02));
    std::vector<double> unit = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS(fit_ar1(unit), std::invalid_argument);
}

TEST_CASE("two-parameter fit recovers a pure linear relation") {
    // Build a slow trajectory whose forward difference encodes U = b1 x:
    // x(t+dt) = x + dt*(slow drift + b1 x) makes the residual exactly b1 x.
    const int n = 5;
    const double dt = 0.01, b1 = 0.45, forcing = 6.0;
    Trajectory t;
    RngStream rng(9, "x");
    VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = rng.normal();
    t.times.push_back(0.0);
    t.states.push_back(x);
    for (int k = 1; k < 2000; ++k) {
        VectorXd next = x + dt * (l96_slow_drift(x, forcing) + b1 * x);
        t.times.push_back(k * dt);
        t.states.push_back(next);
        x = next;
        if (x.lpNorm<Eigen::Infinity>() > 20.0) break;
    }
    TwoParamFit f = offline_two_param_fit(t, forcing, dt);
    CHECK(f.b1 == doctest::Approx(-b1).epsilon(1e-9));
    CHECK(f.sigma_hat < 1e-9);
}

TEST_CASE("rmse on known vectors") {
    std::vector<VectorXd> a, b;
    VectorXd v(2);
    v << 0.0, 0.0;
    a.push_back(v);
    a.push_back(v);
    v << 1.0, 1.0;
    b.push_back(v);
    v << 3.0, 1.0;
    b.push_back(v);
    // squared errors per dim: (2)/2=1 and (10)/2=5; mean 3
    CHECK(rmse(a, b) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("consistency equals the Mahalanobis average on a hand case") {
    ConsistencyInput in;
    VectorXd zero = VectorXd::Zero(1), e(1);
    e << 2.0;
    MatrixXd s(1, 1);
    s << 4.0;
    in.truth = {zero, zero};
    in.means = {e, e};
    in.covs = {s, s};
    CHECK(consistency(in) == doctest::Approx(1.0).epsilon(1e-12));
    in.covs[0](0, 0) = 1.0;  // one step with 4/1
    CHECK(consistency(in) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("autocorrelation and correlation time of an exponential ACF") {
    std::vector<double> acf;
    const double dt = 0.1, tc = 2.0;
    for (int k = 0; k <= 200; ++k) acf.push_back(std::exp(-k * dt / tc));
    // truncated integral of exp(-t/tc) is close to tc for a small cut
    CHECK(correlation_time(acf, dt) == doctest::Approx(tc).epsilon(0.05));

    RngStream rng(13, "ar");
    std::vector<double> series;
    double x = 0.0, phi = 0.8;
    for (int k = 0; k < 400000; ++k) {
        x = phi * x + rng.normal();
        series.push_back(x);
    }
    std::vector<double> a = autocorrelation(series, 5);
    CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(phi).epsilon(0.02));
    CHECK(a[2] == doctest::Approx(phi * phi).epsilon(0.03));
}

TEST_CASE("equilibrium pdf normalizes and the L1 distance is a metric-like score") {
    RngStream rng(21, "samples");
    std::vector<double> s1, s2;
    for (int k = 0; k < 100000; ++k) {
        s1.push_back(rng.normal());
        s2.push_back(0.5 + rng.normal());
    }
    DensityTable p1 = equilibrium_pdf(s1, 50);
    DensityTable p2 = equilibrium_pdf(s2, 50);
    double mass = 0.0;
    for (double d : p1.density) mass += d * p1.bin_width;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(density_l1_distance(p1, p1) == doctest::Approx(0.0).epsilon(1e-12));
    double d12 = density_l1_distance(p1, p2);
    CHECK(d12 == doctest::Approx(density_l1_distance(p2, p1)).epsilon(1e-9));
    CHECK(d12 > 0.1);
    CHECK(d12 < 2.0);
}
