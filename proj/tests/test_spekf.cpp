#include <cmath>

#include "doctest.h"
#include "msfilter/rng.hpp"
#include "msfilter/spekf.hpp"

using namespace msf;

TEST_CASE("scheme coefficient formulas on a hand-checkable preset") {
    SpekfParams sp;
    sp.lambda_u = {1.0, 0.0};
    sp.lambda_b = {1.0, 0.0};
    sp.lambda_gamma = 1.0;
    sp.sigma_u = 1.0;
    sp.sigma_b = std::sqrt(2.0);
    sp.sigma_gamma = std::sqrt(2.0);
    sp.eps = 0.5;
    sp.r_obs = 1.0;

    ReducedSpekfParams r = reduced_params(sp, SchemeTag::RSPEKF);
    // eps sigma_b^2/(lb(lb+eps lu)) = 0.5*2/(1*1.5) = 2/3, same for beta^2
    CHECK(r.sigma1_sq == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.sigma2_sq == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(r.beta_sq == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(r.alpha == cplx(1.0, 0.0));

    r = reduced_params(sp, SchemeTag::RSFC);
    // white-noise limit drops the eps lu shift: 0.5*2/1 = 1
    CHECK(r.sigma2_sq == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.beta_sq == doctest::Approx(1.0).epsilon(1e-14));

    r = reduced_params(sp, SchemeTag::RSFA);
    CHECK(r.sigma2_sq == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.beta_sq == 0.0);

    r = reduced_params(sp, SchemeTag::RSF);
    CHECK(r.sigma2_sq == 0.0);
    CHECK(r.beta_sq == 0.0);
    CHECK(r.sigma1_sq == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("stability exponents of the second preset match hand substitution") {
    SpekfParams sp = spekf_regime2();
    // -2*0.55 + 2*(1*0.25)/(0.5*0.5) = 0.9
    CHECK(stability_exponent(sp, SchemeTag::RSFC) == doctest::Approx(0.9).epsilon(1e-12));
    // beta^2 = 0.25/(0.5*(0.5+0.55)) = 10/21; exponent = -1.1 + 20/21
    CHECK(stability_exponent(sp, SchemeTag::RSPEKF) ==
          doctest::Approx(-1.1 + 20.0 / 21.0).epsilon(1e-12));
    CHECK(stability_exponent(sp, SchemeTag::RSF) == doctest::Approx(-1.1).epsilon(1e-12));
    CHECK(stability_exponent(sp, SchemeTag::RSFA) == doctest::Approx(-1.1).epsilon(1e-12));
}

TEST_CASE("prior variance flags instability exactly when the exponent is positive") {
    RngStream rng(99, "sweep");
    int checked = 0;
    while (checked < 20) {
        SpekfParams sp;
        sp.lambda_u = {0.3 + rng.uniform(), -rng.uniform()};
        sp.lambda_b = {0.3 + rng.uniform(), -rng.uniform()};
        sp.lambda_gamma = 0.3 + rng.uniform();
        sp.sigma_u = 0.2 + rng.uniform();
        sp.sigma_b = 0.2 + rng.uniform();
        sp.sigma_gamma = 0.2 + 2.0 * rng.uniform();
        sp.eps = 0.2 + rng.uniform();
        sp.r_obs = 1.0;
        for (SchemeTag tag : {SchemeTag::RSFC, SchemeTag::RSPEKF}) {
            double expo = stability_exponent(sp, tag);
            if (std::abs(expo) < 0.05) continue;  // skip marginal cases
            VarianceSeries vs = prior_variance_evolution(sp, tag, 60.0, 0.05);
            CHECK(vs.unstable == (expo > 0.0));
            ++checked;
        }
    }
}

TEST_CASE("additive-only prior variance relaxes to its fixed point") {
    SpekfParams sp = spekf_regime1();
    ReducedSpekfParams rp = reduced_params(sp, SchemeTag::RSFA);
    REQUIRE(rp.beta_sq == 0.0);
    VarianceSeries vs = prior_variance_evolution(sp, SchemeTag::RSFA, 30.0, 0.01);
    double fixed_point = (rp.sigma1_sq + rp.sigma2_sq) / (2.0 * rp.alpha.real());
    CHECK(vs.variance.back() == doctest::Approx(fixed_point).epsilon(1e-3));
    CHECK_FALSE(vs.unstable);
}

TEST_CASE("huge observation noise leaves the moment filter on its prior") {
    SpekfParams sp = spekf_regime1();
    ReducedSpekfParams rp = reduced_params(sp, SchemeTag::RSPEKF);
    ObservationSeries obs;
    obs.obs_indices = {0, 1};
    obs.r_obs = 1e12 * MatrixXd::Identity(2, 2);
    for (int k = 1; k <= 200; ++k) {
        obs.times.push_back(0.1 * k);
        obs.values.push_back(VectorXd::Zero(2));
    }
    MomentState init;
    init.var = sp.var_u0();
    MomentFilterResult res = rspekf_moment_filter(rp, obs, FilterMode::Discrete, 1e12, init);
    VarianceSeries prior = prior_variance_evolution(sp, SchemeTag::RSPEKF, 20.0, 0.1);
    CHECK(res.states.back().var ==
          doctest::Approx(prior.variance.back()).epsilon(1e-4));
}

TEST_CASE("moment filter is deterministic given identical observations") {
    SpekfParams sp = spekf_regime1();
    ObservationSeries obs;
    obs.obs_indices = {0, 1};
    obs.r_obs = sp.r_obs * 0.5 * MatrixXd::Identity(2, 2);
    RngStream rng(7, "obs");
    for (int k = 1; k <= 100; ++k) {
        obs.times.push_back(0.5 * k);
        VectorXd z(2);
        z << rng.normal(), rng.normal();
        obs.values.push_back(z);
    }
    MomentState init;
    init.var = sp.var_u0();
    ReducedSpekfParams rp = reduced_params(sp, SchemeTag::RSPEKF);
    MomentFilterResult a = rspekf_moment_filter(rp, obs, FilterMode::Discrete, sp.r_obs, init);
    MomentFilterResult b = rspekf_moment_filter(rp, obs, FilterMode::Discrete, sp.r_obs, init);
    CHECK(a.states.back().mean == b.states.back().mean);
    CHECK(a.states.back().var == b.states.back().var);
    // full-system surrogate equals the reduced filter with matched coefficients
    MomentFilterResult c = spekf_moment_filter(sp, obs, FilterMode::Discrete, init);
    CHECK(std::abs(c.states.back().mean - a.states.back().mean) < 1e-14);
    CHECK(c.states.back().var == doctest::Approx(a.states.back().var).epsilon(1e-14));
}

TEST_CASE("Monte-Carlo variance starts at the equilibrium product variance") {
    SpekfParams sp = spekf_regime1();
    VarianceSeries vs = mc_variance_oracle(sp, 0.1, 0.05, 20000, 31, 2);
    CHECK(vs.variance.front() == doctest::Approx(sp.var_u0()).epsilon(0.05));
    CHECK(vs.stderr_band.front() > 0.0);
    // threading must not change the estimate stream
    VarianceSeries vs2 = mc_variance_oracle(sp, 0.1, 0.05, 20000, 31, 4);
    CHECK(vs.variance.back() == doctest::Approx(vs2.variance.back()).epsilon(1e-9));
}
