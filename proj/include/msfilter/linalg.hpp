#pragma once

#include <Eigen/Dense>
#include <utility>

namespace msf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

/// Nearest PSD matrix: symmetrize and clip negative eigenvalues at zero.
MatrixXd spd_project(const MatrixXd& m);

/// Symmetric matrix square root (input must be PSD up to roundoff).
MatrixXd sym_sqrt(const MatrixXd& m);

/// Moore-Penrose pseudo-inverse with singular values truncated at
/// rel_tol * sigma_max.
MatrixXd pinv(const MatrixXd& m, double rel_tol = 1e-8);

/// Solves the continuous Lyapunov equation A X + X A^T + Q = 0 for small
/// dense systems via Kronecker vectorization. Throws if the operator is
/// singular (non-Hurwitz A).
MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& q);

/// Exact discretization of the linear SDE dx = A x dt + sqrt(Q) dW over a
/// step dt: returns (Phi, S) with Phi = exp(A dt) and S the covariance of the
/// state increment, computed with the augmented-matrix (Van Loan) exponential.
std::pair<MatrixXd, MatrixXd> ou_discretize(const MatrixXd& a, const MatrixXd& q, double dt);

/// Solves the continuous algebraic Riccati equation
///   A S + S A^T - S C S + Q = 0,  C = H^T R^-1 H,
/// by integrating the Riccati ODE to near-steady state and polishing with
/// Newton steps (each Newton step is a Lyapunov solve). Intended for the
/// small systems used here.
MatrixXd solve_riccati_care(const MatrixXd& a, const MatrixXd& q, const MatrixXd& c,
                            double tol = 1e-12, int max_newton = 100);

/// Frobenius-norm residual of the algebraic Riccati equation.
double riccati_residual(const MatrixXd& s, const MatrixXd& a, const MatrixXd& q,
                        const MatrixXd& c);

/// Ordinary least squares fit of y against the given design matrix.
VectorXd lstsq(const MatrixXd& design, const VectorXd& y);

/// Slope of a least-squares line through (log x, log y) points.
double loglog_slope(const VectorXd& x, const VectorXd& y);

}  // namespace msf
