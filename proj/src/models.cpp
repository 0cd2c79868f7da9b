#include "msfilter/models.hpp"

#include <cmath>

#include "msfilter/linalg.hpp"
#include "msfilter/rng.hpp"

namespace msf {

namespace {

void check_finite(const VectorXd& x, long step, const char* who) {
    if (!x.allFinite()) throw DivergenceError(std::string(who) + ": non-finite state", step, x.norm());
}

}  // namespace

MatrixXd LinearTwoScaleParams::drift() const {
    MatrixXd a(2, 2);
    a << a11, a12, a21 / eps, a22 / eps;
    return a;
}

MatrixXd LinearTwoScaleParams::noise_cov() const {
    MatrixXd q = MatrixXd::Zero(2, 2);
    q(0, 0) = sigma_x * sigma_x;
    q(1, 1) = sigma_y * sigma_y / eps;
    return q;
}

void LinearTwoScaleParams::validate() const {
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    if (sigma_x <= 0.0 || sigma_y <= 0.0) throw std::invalid_argument("noise amplitudes must be positive");
    if (r_obs <= 0.0) throw std::invalid_argument("r_obs must be positive");
    if (a22 >= 0.0) throw std::invalid_argument("a22 must be negative");
    if (a11 - a12 * a21 / a22 >= 0.0) throw std::invalid_argument("averaged drift must be negative");
    Eigen::EigenSolver<MatrixXd> es(drift());
    if (es.eigenvalues().real().maxCoeff() >= 0.0)
        throw std::invalid_argument("drift matrix is not Hurwitz");
}

void SpekfParams::validate() const {
    if (lambda_u.real() <= 0.0 || lambda_b.real() <= 0.0 || lambda_gamma <= 0.0)
        throw std::invalid_argument("damping rates must have positive real part");
    if (sigma_u <= 0.0 || sigma_b <= 0.0 || sigma_gamma <= 0.0)
        throw std::invalid_argument("noise amplitudes must be positive");
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
}

void ReducedSpekfParams::validate() const {
    if (alpha.real() <= 0.0) throw std::invalid_argument("Re(alpha) must be positive");
    if (beta_sq < 0.0 || sigma1_sq < 0.0 || sigma2_sq < 0.0)
        throw std::invalid_argument("variance rates must be nonnegative");
}

void L96Params::validate() const {
    if (n_slow < 4) throw std::invalid_argument("need at least 4 slow variables");
    if (n_fast_per_slow < 1) throw std::invalid_argument("need at least 1 fast variable per slow");
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    const int m = static_cast<int>(obs_indices.size());
    if (r_obs.rows() != m || r_obs.cols() != m)
        throw std::invalid_argument("r_obs dimension mismatch");
    int prev = -1;
    for (int idx : obs_indices) {
        if (idx <= prev || idx >= n_slow)
            throw std::invalid_argument("obs_indices must be strictly increasing within [0, N)");
        prev = idx;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(r_obs));
    if (m > 0 && es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("r_obs must be positive definite");
}

void ReducedL96Params::validate() const {
    if (q_matrix.rows() != q_matrix.cols()) throw std::invalid_argument("q_matrix must be square");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(q_matrix));
    if (q_matrix.size() > 0 && es.eigenvalues().minCoeff() < -1e-10 * (1.0 + q_matrix.norm()))
        throw std::invalid_argument("q_matrix must be positive semidefinite");
}

void CubicAr1Params::validate() const {
    if (std::abs(phi) >= 1.0) throw std::invalid_argument("|phi| must be < 1");
    if (sigma_hat < 0.0) throw std::invalid_argument("sigma_hat must be nonnegative");
}

Trajectory integrate_linear_exact(const LinearTwoScaleParams& p, const VectorXd& x0,
                                  double dt, long n_steps, std::uint64_t seed) {
    p.validate();
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    if (x0.size() != 2 || !x0.allFinite()) throw std::invalid_argument("bad initial state");
    auto [phi, cov] = ou_discretize(p.drift(), p.noise_cov(), dt);
    MatrixXd noise_sqrt = sym_sqrt(cov);

    Trajectory traj;
    traj.seed = seed;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    RngStream rng(seed, "linear-exact");
    VectorXd x = x0;
    for (long k = 1; k <= n_steps; ++k) {
        VectorXd xi(2);
        xi << rng.normal(), rng.normal();
        x = phi * x + noise_sqrt * xi;
        check_finite(x, k, "integrate_linear_exact");
        traj.times.push_back(k * dt);
        traj.states.push_back(x);
    }
    return traj;
}

Trajectory integrate_sde_em(const DriftFn& drift, const DiffusionFn& diffusion,
                            const VectorXd& x0, double dt, long n_steps,
                            std::uint64_t seed, double max_rate) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    if (dt * max_rate > 0.5)
        throw std::invalid_argument("integrate_sde_em: dt too large for the fastest rate");
    if (!x0.allFinite()) throw std::invalid_argument("bad initial state");
    Trajectory traj;
    traj.seed = seed;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    RngStream rng(seed, "euler-maruyama");
    const double sq = std::sqrt(dt);
    VectorXd x = x0;
    for (long k = 1; k <= n_steps; ++k) {
        VectorXd amp = diffusion(x);
        VectorXd d = drift(x);
        for (int i = 0; i < x.size(); ++i) x(i) += d(i) * dt + amp(i) * sq * rng.normal();
        check_finite(x, k, "integrate_sde_em");
        traj.times.push_back(k * dt);
        traj.states.push_back(x);
    }
    return traj;
}

VectorXd spekf_equilibrium_sample(const SpekfParams& p, RngStream& rng) {
    // Product of the marginal equilibrium Gaussians; complex variance splits
    // evenly over real and imaginary parts.
    const double su = std::sqrt(p.var_u0() / 2.0);
    const double sb = std::sqrt(p.var_b0() / 2.0);
    const double sg = std::sqrt(p.var_gamma0());
    VectorXd x(5);
    x << su * rng.normal(), su * rng.normal(), sb * rng.normal(), sb * rng.normal(),
        sg * rng.normal();
    return x;
}

Trajectory integrate_spekf_em(const SpekfParams& p, const VectorXd& x0, double dt,
                              long n_steps, std::uint64_t seed) {
    p.validate();
    if (x0.size() != 5) throw std::invalid_argument("SPEKF state must have 5 real components");
    const double max_rate = std::max({std::abs(p.lambda_u.real()),
                                      p.lambda_b.real() / p.eps, p.lambda_gamma / p.eps});
    const double su = p.sigma_u / std::sqrt(2.0);
    const double sb = p.sigma_b / std::sqrt(2.0 * p.eps);
    const double sg = p.sigma_gamma / std::sqrt(p.eps);
    auto drift = [&p](const VectorXd& x) -> VectorXd {
        const cplx u(x(0), x(1)), b(x(2), x(3));
        const double g = x(4);
        const cplx du = -(g + p.lambda_u) * u + b;
        const cplx db = -(p.lambda_b / p.eps) * b;
        VectorXd d(5);
        d << du.real(), du.imag(), db.real(), db.imag(), -(p.lambda_gamma / p.eps) * g;
        return d;
    };
    auto diffusion = [=](const VectorXd&) -> VectorXd {
        VectorXd a(5);
        a << su, su, sb, sb, sg;
        return a;
    };
    return integrate_sde_em(drift, diffusion, x0, dt, n_steps, seed, max_rate);
}

Trajectory integrate_reduced_spekf_em(const ReducedSpekfParams& p, const VectorXd& x0,
                                      double dt, long n_steps, std::uint64_t seed) {
    p.validate();
    if (x0.size() != 2) throw std::invalid_argument("reduced state must have 2 real components");
    if (dt * std::abs(p.alpha.real()) > 0.5)
        throw std::invalid_argument("integrate_reduced_spekf_em: dt too large");
    Trajectory traj;
    traj.seed = seed;
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    RngStream rng(seed, "reduced-spekf-em");
    const double sq = std::sqrt(dt);
    const double s1 = std::sqrt(p.sigma1_sq / 2.0);
    const double s2 = std::sqrt(p.sigma2_sq / 2.0);
    const double beta = std::sqrt(p.beta_sq);
    const cplx drift_coeff = -(p.alpha - 0.5 * p.beta_sq);  // Ito form
    cplx u(x0(0), x0(1));
    for (long k = 1; k <= n_steps; ++k) {
        const double dwg = sq * rng.normal();  // real multiplicative driver
        const cplx du = drift_coeff * u * dt + beta * u * dwg +
                        cplx(s1 * sq * rng.normal(), s1 * sq * rng.normal()) +
                        cplx(s2 * sq * rng.normal(), s2 * sq * rng.normal());
        u += du;
        if (!std::isfinite(u.real()) || !std::isfinite(u.imag()))
            throw DivergenceError("integrate_reduced_spekf_em: non-finite state", k, std::abs(u));
        traj.times.push_back(k * dt);
        VectorXd x(2);
        x << u.real(), u.imag();
        traj.states.push_back(x);
    }
    return traj;
}

VectorXd l96_slow_drift(const VectorXd& x, double forcing) {
    const int n = static_cast<int>(x.size());
    VectorXd d(n);
    for (int i = 0; i < n; ++i) {
        const double xm1 = x((i - 1 + n) % n);
        const double xm2 = x((i - 2 + n) % n);
        const double xp1 = x((i + 1) % n);
        d(i) = xm1 * (xp1 - xm2) - x(i) + forcing;
    }
    return d;
}

VectorXd l96_two_layer_drift(const L96Params& p, const VectorXd& state) {
    const int n = p.n_slow, j = p.n_fast_per_slow, nj = n * j;
    VectorXd d(n + nj);
    const auto x = state.head(n);
    const auto y = state.tail(nj);
    for (int i = 0; i < n; ++i) {
        const double xm1 = x((i - 1 + n) % n);
        const double xm2 = x((i - 2 + n) % n);
        const double xp1 = x((i + 1) % n);
        double coupling = 0.0;
        for (int q = i * j; q < (i + 1) * j; ++q) coupling += y(q);
        d(i) = xm1 * (xp1 - xm2) - x(i) + p.forcing + p.h_x * coupling;
    }
    for (int q = 0; q < nj; ++q) {
        const double ym1 = y((q - 1 + nj) % nj);
        const double yp1 = y((q + 1) % nj);
        const double yp2 = y((q + 2) % nj);
        d(n + q) = (p.fast_advect * yp1 * (ym1 - yp2) - y(q) + p.h_y * x(q / j)) / p.eps;
    }
    return d;
}

VectorXd rk4_step(const DriftFn& drift, const VectorXd& x, double dt) {
    VectorXd k1 = drift(x);
    VectorXd k2 = drift(x + 0.5 * dt * k1);
    VectorXd k3 = drift(x + 0.5 * dt * k2);
    VectorXd k4 = drift(x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate_l96_full_rk4(const L96Params& p, const VectorXd& x0, double dt,
                                  long n_steps) {
    p.validate();
    if (x0.size() != p.dim()) throw std::invalid_argument("state dimension mismatch");
    if (!x0.allFinite()) throw std::invalid_argument("bad initial state");
    auto drift = [&p](const VectorXd& s) { return l96_two_layer_drift(p, s); };
    Trajectory traj;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    VectorXd x = x0;
    for (long k = 1; k <= n_steps; ++k) {
        x = rk4_step(drift, x, dt);
        check_finite(x, k, "integrate_l96_full_rk4");
        traj.times.push_back(k * dt);
        traj.states.push_back(x);
    }
    return traj;
}

Trajectory integrate_l96_reduced_rk4(const ReducedL96Params& rp, double forcing,
                                     const VectorXd& x0, double dt, long n_steps,
                                     std::uint64_t seed) {
    rp.validate();
    if (!x0.allFinite()) throw std::invalid_argument("bad initial state");
    const bool stochastic = rp.q_matrix.size() > 0 && rp.q_matrix.norm() > 0.0;
    MatrixXd noise_sqrt;
    if (stochastic) {
        if (rp.q_matrix.rows() != x0.size()) throw std::invalid_argument("q_matrix dimension mismatch");
        noise_sqrt = sym_sqrt(rp.q_matrix);
    }
    Trajectory traj;
    traj.seed = seed;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    RngStream rng(seed, "l96-reduced");
    const double inv_sq = 1.0 / std::sqrt(dt);
    VectorXd x = x0;
    VectorXd noise = VectorXd::Zero(x0.size());
    for (long k = 1; k <= n_steps; ++k) {
        if (stochastic) {
            VectorXd xi(x0.size());
            for (int i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
            noise = inv_sq * (noise_sqrt * xi);  // held constant across the stages
        }
        auto drift = [&](const VectorXd& s) -> VectorXd {
            return l96_slow_drift(s, forcing) - rp.alpha * s + noise;
        };
        x = rk4_step(drift, x, dt);
        check_finite(x, k, "integrate_l96_reduced_rk4");
        traj.times.push_back(k * dt);
        traj.states.push_back(x);
    }
    return traj;
}

Trajectory integrate_l96_cubic_ar1_rk4(const CubicAr1Params& cp, double forcing,
                                       const VectorXd& x0, double dt, long n_steps,
                                       std::uint64_t seed) {
    cp.validate();
    if (!x0.allFinite()) throw std::invalid_argument("bad initial state");
    const int n = static_cast<int>(x0.size());
    const double noise_gain =
        cp.sqrt_noise_convention ? cp.sigma_hat * std::sqrt(1.0 - cp.phi * cp.phi)
                                 : cp.sigma_hat * (1.0 - cp.phi * cp.phi);
    Trajectory traj;
    traj.seed = seed;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    RngStream rng(seed, "l96-cubic-ar1");
    VectorXd x = x0;
    VectorXd e = VectorXd::Zero(n);
    for (long k = 1; k <= n_steps; ++k) {
        for (int i = 0; i < n; ++i) e(i) = cp.phi * e(i) + noise_gain * rng.normal();
        auto drift = [&](const VectorXd& s) -> VectorXd {
            VectorXd d = l96_slow_drift(s, forcing);
            for (int i = 0; i < n; ++i) {
                const double xi = s(i);
                d(i) -= cp.b0 + cp.b1 * xi + cp.b2 * xi * xi + cp.b3 * xi * xi * xi + e(i);
            }
            return d;
        };
        x = rk4_step(drift, x, dt);
        check_finite(x, k, "integrate_l96_cubic_ar1_rk4");
        traj.times.push_back(k * dt);
        traj.states.push_back(x);
    }
    return traj;
}

}  // namespace msf
