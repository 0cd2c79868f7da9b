#pragma once

#include <complex>
#include <functional>
#include <stdexcept>

#include "msfilter/trajectory.hpp"

namespace msf {

using cplx = std::complex<double>;

// Raised when an integrator or filter produces a non-finite state.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, long step_, double norm_)
        : std::runtime_error(what + " (step " + std::to_string(step_) + ", norm " +
                             std::to_string(norm_) + ")"),
          step(step_),
          state_norm(norm_) {}
    long step;
    double state_norm;
};

// Slow/fast linear pair: dx = (a11 x + a12 y)dt + sigma_x dWx,
// dy = (a21 x + a22 y)/eps dt + sigma_y/sqrt(eps) dWy, observing x with
// variance r_obs.
struct LinearTwoScaleParams {
    double a11, a12, a21, a22;
    double sigma_x, sigma_y;
    double eps;
    double r_obs;

    MatrixXd drift() const;      // A_eps
    MatrixXd noise_cov() const;  // Q_eps = diag(sigma_x^2, sigma_y^2/eps)
    void validate() const;       // throws std::invalid_argument
};

// Observed complex mode u driven by fast stochastic bias b and damping gamma:
// du = [-(gamma + lambda_u)u + b]dt + sigma_u dWu
// db = -(lambda_b/eps) b dt + (sigma_b/sqrt(eps)) dWb
// dgamma = -(lambda_gamma/eps) gamma dt + (sigma_gamma/sqrt(eps)) dWgamma.
// u, b complex; gamma real. Complex noise amplitude sigma means total rate
// sigma^2 split evenly across the two real components.
struct SpekfParams {
    cplx lambda_u, lambda_b;
    double lambda_gamma;
    double sigma_u, sigma_b, sigma_gamma;
    double eps;
    double r_obs;  // total observation noise variance of the complex value

    void validate() const;
    // Equilibrium variances of the independent-product initial condition.
    double var_u0() const { return sigma_u * sigma_u / (2.0 * lambda_u.real()); }
    double var_b0() const { return sigma_b * sigma_b / (2.0 * lambda_b.real()); }
    double var_gamma0() const { return sigma_gamma * sigma_gamma / (2.0 * lambda_gamma); }
};

// One-mode surrogate dU = -alpha U dt + beta U o dWgamma + sigma_1 dWu
// + sigma_2 dWb (Stratonovich multiplicative term).
struct ReducedSpekfParams {
    cplx alpha;
    double beta_sq = 0.0;
    double sigma1_sq = 0.0;
    double sigma2_sq = 0.0;

    void validate() const;
};

struct L96Params {
    int n_slow;           // N
    int n_fast_per_slow;  // J
    double eps;
    double forcing;      // F
    double fast_advect;  // a
    double h_x, h_y;
    MatrixXd r_obs;
    std::vector<int> obs_indices;

    int dim() const { return n_slow * (1 + n_fast_per_slow); }
    void validate() const;
};

struct ReducedL96Params {
    double alpha = 0.0;
    MatrixXd q_matrix;  // N x N additive-noise covariance sigma sigma^T

    void validate() const;
};

struct CubicAr1Params {
    double b0, b1, b2, b3;
    double phi;
    double sigma_hat;
    // true: e = phi e + sigma_hat*sqrt(1-phi^2) z; false (default): the
    // literal (1-phi^2) factor.
    bool sqrt_noise_convention = false;

    void validate() const;
};

// Exact Gaussian transition sampling of the 2-D OU process over dt.
Trajectory integrate_linear_exact(const LinearTwoScaleParams& p, const VectorXd& x0,
                                  double dt, long n_steps, std::uint64_t seed);

using DriftFn = std::function<VectorXd(const VectorXd&)>;
using DiffusionFn = std::function<VectorXd(const VectorXd&)>;  // per-component amplitude

// Euler-Maruyama in Ito form. max_rate is the fastest damping rate in the
// drift; the step is rejected when dt*max_rate > 0.5.
Trajectory integrate_sde_em(const DriftFn& drift, const DiffusionFn& diffusion,
                            const VectorXd& x0, double dt, long n_steps,
                            std::uint64_t seed, double max_rate);

// State layout (5 real): (Re u, Im u, Re b, Im b, gamma).
Trajectory integrate_spekf_em(const SpekfParams& p, const VectorXd& x0, double dt,
                              long n_steps, std::uint64_t seed);
VectorXd spekf_equilibrium_sample(const SpekfParams& p, class RngStream& rng);

// State layout (2 real): (Re U, Im U). Multiplicative term integrated in Ito
// form with drift correction -(alpha - beta^2/2)U and real noise Wgamma.
Trajectory integrate_reduced_spekf_em(const ReducedSpekfParams& p, const VectorXd& x0,
                                      double dt, long n_steps, std::uint64_t seed);

// Drift of the coupled system; state = (x_0..x_{N-1}, y_0..y_{NJ-1}).
VectorXd l96_two_layer_drift(const L96Params& p, const VectorXd& state);
// One-layer drift x' = x_{i-1}(x_{i+1}-x_{i-2}) - x_i + F (cyclic).
VectorXd l96_slow_drift(const VectorXd& x, double forcing);

Trajectory integrate_l96_full_rk4(const L96Params& p, const VectorXd& x0, double dt,
                                  long n_steps);

// Reduced model dx = [slow drift - alpha x]dt + sigma dW; the noise increment
// is sampled once per step and held constant through the RK4 stages (net
// sqrt(dt) scaling). q_matrix == 0 gives the deterministic truncated model.
Trajectory integrate_l96_reduced_rk4(const ReducedL96Params& rp, double forcing,
                                     const VectorXd& x0, double dt, long n_steps,
                                     std::uint64_t seed);

// Cubic drift correction with AR(1) residual held constant per step.
Trajectory integrate_l96_cubic_ar1_rk4(const CubicAr1Params& cp, double forcing,
                                       const VectorXd& x0, double dt, long n_steps,
                                       std::uint64_t seed);

// Classical RK4 for a deterministic ODE (used by tests and ensemble forecasts).
VectorXd rk4_step(const DriftFn& drift, const VectorXd& x, double dt);

}  // namespace msf
