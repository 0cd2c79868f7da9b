#include "msfilter/spekf.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "msfilter/rng.hpp"

namespace msf {

SpekfParams spekf_regime1() {
    SpekfParams p;
    p.lambda_u = cplx(1.2, -1.78);
    p.lambda_b = cplx(0.5, -1.0);
    p.lambda_gamma = 20.0;
    p.sigma_u = 0.5;
    p.sigma_b = 0.5;
    p.sigma_gamma = 20.0;
    p.eps = 1.0;
    p.r_obs = 0.5866 * 0.5866;  // half the observed mode's equilibrium variance
    return p;
}

SpekfParams spekf_regime2() {
    SpekfParams p;
    p.lambda_u = cplx(0.55, -1.78);
    p.lambda_b = cplx(0.4, -1.0);
    p.lambda_gamma = 0.5;
    p.sigma_u = 0.1;
    p.sigma_b = 0.4;
    p.sigma_gamma = 0.5;
    p.eps = 1.0;
    p.r_obs = 5.2592 * 5.2592;
    return p;
}

ReducedSpekfParams reduced_params(const SpekfParams& sp, SchemeTag scheme) {
    sp.validate();
    const double lu = sp.lambda_u.real();
    const double lb = sp.lambda_b.real();
    const double lg = sp.lambda_gamma;
    const double eps = sp.eps;
    ReducedSpekfParams rp;
    rp.alpha = sp.lambda_u;
    rp.sigma1_sq = sp.sigma_u * sp.sigma_u;
    switch (scheme) {
        case SchemeTag::RSF:
            break;
        case SchemeTag::RSFA:
            rp.sigma2_sq = eps * sp.sigma_b * sp.sigma_b / (lb * lb);
            break;
        case SchemeTag::RSFC:
            rp.sigma2_sq = eps * sp.sigma_b * sp.sigma_b / (lb * lb);
            rp.beta_sq = eps * sp.sigma_gamma * sp.sigma_gamma / (lg * lg);
            break;
        case SchemeTag::RSPEKF:
            rp.sigma2_sq = eps * sp.sigma_b * sp.sigma_b / (lb * (lb + eps * lu));
            rp.beta_sq = eps * sp.sigma_gamma * sp.sigma_gamma / (lg * (lg + eps * lu));
            break;
    }
    rp.validate();
    return rp;
}

double stability_exponent(const SpekfParams& sp, SchemeTag scheme) {
    ReducedSpekfParams rp = reduced_params(sp, scheme);
    return -2.0 * sp.lambda_u.real() + 2.0 * rp.beta_sq;
}

namespace {
constexpr double kDivergenceVar = 1e12;
constexpr int kSubSteps = 100;

struct MomentOde {
    cplx mean_drift_coeff;  // -(alpha - beta^2/2)
    double decay;           // 2 (Re(alpha) - beta^2)
    double beta_sq;
    double forcing;  // sigma1^2 + sigma2^2
};

MomentOde make_ode(const ReducedSpekfParams& rp) {
    MomentOde o;
    o.mean_drift_coeff = -(rp.alpha - 0.5 * rp.beta_sq);
    o.decay = 2.0 * (rp.alpha.real() - rp.beta_sq);
    o.beta_sq = rp.beta_sq;
    o.forcing = rp.sigma1_sq + rp.sigma2_sq;
    return o;
}

// One RK4 step of the prior moment ODE (no observation terms).
void prior_rk4_step(const MomentOde& o, double h, cplx& u, double& s) {
    auto fu = [&](const cplx& uu) { return o.mean_drift_coeff * uu; };
    auto fs = [&](const cplx& uu, double ss) {
        return -o.decay * ss + o.beta_sq * std::norm(uu) + o.forcing;
    };
    cplx k1u = fu(u);
    double k1s = fs(u, s);
    cplx k2u = fu(u + 0.5 * h * k1u);
    double k2s = fs(u + 0.5 * h * k1u, s + 0.5 * h * k1s);
    cplx k3u = fu(u + 0.5 * h * k2u);
    double k3s = fs(u + 0.5 * h * k2u, s + 0.5 * h * k2s);
    cplx k4u = fu(u + h * k3u);
    double k4s = fs(u + h * k3u, s + h * k3s);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
}
}  // namespace

MomentFilterResult rspekf_moment_filter(const ReducedSpekfParams& rp,
                                        const ObservationSeries& obs, FilterMode mode,
                                        double r_obs, const MomentState& init) {
    rp.validate();
    if (r_obs <= 0.0) throw std::invalid_argument("rspekf_moment_filter: r_obs must be positive");
    if (obs.size() == 0) throw std::invalid_argument("rspekf_moment_filter: no observations");
    if (obs.values[0].size() != 2)
        throw std::invalid_argument("rspekf_moment_filter: expected 2-component (Re, Im) observations");
    if (!(init.var > 0.0)) throw std::invalid_argument("rspekf_moment_filter: init.var must be positive");

    MomentOde ode = make_ode(rp);
    MomentFilterResult out;
    out.times = obs.times;
    out.states.reserve(obs.size());

    cplx u = init.mean;
    double s = init.var;
    double t_prev = 0.0;
    cplx z_prev(obs.values[0](0), obs.values[0](1));  // first interval sees zero increment

    for (size_t k = 0; k < obs.size(); ++k) {
        const double dt = obs.times[k] - t_prev;
        const double h = dt / kSubSteps;
        const cplx z(obs.values[k](0), obs.values[k](1));

        if (mode == FilterMode::Discrete) {
            for (int j = 0; j < kSubSteps; ++j) {
                prior_rk4_step(ode, h, u, s);
                if (s < 0.0) {
                    s = 0.0;
                    ++out.var_clip_count;
                }
            }
            double gain = s / (s + r_obs);
            u += gain * (z - u);
            s *= (1.0 - gain);
        } else {
            // Innovation form; the data path is taken piecewise linear so each
            // sub-step receives an increment dz = (z_k - z_{k-1}) / substeps.
            const cplx dz = (z - z_prev) / static_cast<double>(kSubSteps);
            for (int j = 0; j < kSubSteps; ++j) {
                cplx du = (ode.mean_drift_coeff * u - (s / r_obs) * u) * h + (s / r_obs) * dz;
                double ds = (-ode.decay * s + ode.beta_sq * std::norm(u) + ode.forcing -
                             s * s / r_obs) * h;
                u += du;
                s += ds;
                if (s < 0.0) {
                    s = 0.0;
                    ++out.var_clip_count;
                }
            }
        }

        if (!std::isfinite(s) || !std::isfinite(u.real()) || !std::isfinite(u.imag()) ||
            s > kDivergenceVar) {
            out.diverged = true;
            out.divergence_step = static_cast<long>(k);
            out.times.resize(out.states.size());
            return out;
        }
        out.states.push_back({u, s});
        t_prev = obs.times[k];
        z_prev = z;
    }
    return out;
}

MomentFilterResult spekf_moment_filter(const SpekfParams& sp, const ObservationSeries& obs,
                                       FilterMode mode, const MomentState& init) {
    return rspekf_moment_filter(reduced_params(sp, SchemeTag::RSPEKF), obs, mode, sp.r_obs,
                                init);
}

VarianceSeries prior_variance_evolution(const SpekfParams& sp, SchemeTag scheme,
                                        double horizon, double dt) {
    if (horizon <= 0.0 || dt <= 0.0)
        throw std::invalid_argument("prior_variance_evolution: horizon and dt must be positive");
    MomentOde ode = make_ode(reduced_params(sp, scheme));
    VarianceSeries out;
    out.unstable = stability_exponent(sp, scheme) > 0.0;
    cplx u(0.0, 0.0);  // equilibrium product law has zero mean
    double s = sp.var_u0();
    const long n = static_cast<long>(std::ceil(horizon / dt));
    out.times.push_back(0.0);
    out.variance.push_back(s);
    for (long k = 0; k < n; ++k) {
        prior_rk4_step(ode, dt, u, s);
        out.times.push_back((k + 1) * dt);
        out.variance.push_back(s);
        if (!std::isfinite(s) || s > kDivergenceVar) {
            out.unstable = true;
            break;
        }
    }
    return out;
}

VarianceSeries mc_variance_oracle(const SpekfParams& sp, double horizon, double out_dt,
                                  int n_samples, std::uint64_t seed, int n_threads) {
    sp.validate();
    if (n_samples < 2) throw std::invalid_argument("mc_variance_oracle: need n_samples >= 2");
    if (horizon <= 0.0 || out_dt <= 0.0)
        throw std::invalid_argument("mc_variance_oracle: horizon and out_dt must be positive");

    const double max_rate =
        std::max({std::abs(sp.lambda_u.real()), sp.lambda_b.real() / sp.eps,
                  sp.lambda_gamma / sp.eps});
    const int substeps =
        std::max(1, static_cast<int>(std::ceil(out_dt / std::min(0.1 / max_rate, 0.005))));
    const double h = out_dt / substeps;
    const long n_out = static_cast<long>(std::ceil(horizon / out_dt));

    const double lur = sp.lambda_u.real(), lui = sp.lambda_u.imag();
    const double lbr = sp.lambda_b.real() / sp.eps, lbi = sp.lambda_b.imag() / sp.eps;
    const double lg = sp.lambda_gamma / sp.eps;
    const double su = sp.sigma_u / std::sqrt(2.0);
    const double sb = sp.sigma_b / std::sqrt(2.0 * sp.eps);
    const double sg = sp.sigma_gamma / std::sqrt(sp.eps);
    const double sqh = std::sqrt(h);

    if (n_threads <= 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, n_samples);

    struct Accum {
        std::vector<double> sum_re, sum_im, sum_sq, sum_quad;
    };
    std::vector<Accum> acc(n_threads);
    std::vector<std::thread> workers;
    bool blowup = false;

    auto run_block = [&](int tid, int lo, int hi) {
        Accum& a = acc[tid];
        a.sum_re.assign(n_out + 1, 0.0);
        a.sum_im.assign(n_out + 1, 0.0);
        a.sum_sq.assign(n_out + 1, 0.0);
        a.sum_quad.assign(n_out + 1, 0.0);
        for (int i = lo; i < hi; ++i) {
            RngStream rng(seed, "mc-sample-" + std::to_string(i));
            double ur = std::sqrt(sp.var_u0() / 2.0) * rng.normal();
            double ui = std::sqrt(sp.var_u0() / 2.0) * rng.normal();
            double br = std::sqrt(sp.var_b0() / 2.0) * rng.normal();
            double bi = std::sqrt(sp.var_b0() / 2.0) * rng.normal();
            double g = std::sqrt(sp.var_gamma0()) * rng.normal();
            auto record = [&](long k) {
                double sq = ur * ur + ui * ui;
                a.sum_re[k] += ur;
                a.sum_im[k] += ui;
                a.sum_sq[k] += sq;
                a.sum_quad[k] += sq * sq;
            };
            record(0);
            for (long k = 0; k < n_out; ++k) {
                for (int j = 0; j < substeps; ++j) {
                    double dur = (-(g + lur) * ur + lui * ui + br) * h + su * sqh * rng.normal();
                    double dui = (-(g + lur) * ui - lui * ur + bi) * h + su * sqh * rng.normal();
                    double dbr = (-lbr * br + lbi * bi) * h + sb * sqh * rng.normal();
                    double dbi = (-lbr * bi - lbi * br) * h + sb * sqh * rng.normal();
                    double dg = -lg * g * h + sg * sqh * rng.normal();
                    ur += dur;
                    ui += dui;
                    br += dbr;
                    bi += dbi;
                    g += dg;
                }
                if (!std::isfinite(ur) || !std::isfinite(ui)) {
                    blowup = true;
                    return;
                }
                record(k + 1);
            }
        }
    };

    int block = (n_samples + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
        int lo = t * block, hi = std::min(n_samples, (t + 1) * block);
        workers.emplace_back(run_block, t, lo, hi);
    }
    for (auto& w : workers) w.join();
    if (blowup) throw DivergenceError("mc_variance_oracle: sample blow-up", -1, 0.0);

    VarianceSeries out;
    const double n = static_cast<double>(n_samples);
    for (long k = 0; k <= n_out; ++k) {
        double sre = 0.0, sim = 0.0, ssq = 0.0, squad = 0.0;
        for (const auto& a : acc) {
            sre += a.sum_re[k];
            sim += a.sum_im[k];
            ssq += a.sum_sq[k];
            squad += a.sum_quad[k];
        }
        double mre = sre / n, mim = sim / n;
        double m2 = ssq / n;
        double var = m2 - mre * mre - mim * mim;
        // Standard error of the mean of |u|^2; mean subtraction is a lower
        // order correction with the zero-mean initial law.
        double se = std::sqrt(std::max(0.0, squad / n - m2 * m2) / n);
        out.times.push_back(k * out_dt);
        out.variance.push_back(var);
        out.stderr_band.push_back(se);
    }
    return out;
}

}  // namespace msf
