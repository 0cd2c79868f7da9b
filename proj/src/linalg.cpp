#include "msfilter/linalg.hpp"

#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace msf {

MatrixXd spd_project(const MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m));
    VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

MatrixXd sym_sqrt(const MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m));
    VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

MatrixXd pinv(const MatrixXd& m, double rel_tol) {
    Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0)
        throw std::runtime_error("pinv: zero matrix");
    VectorXd inv = VectorXd::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * sv(0)) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& q) {
    const int n = static_cast<int>(a.rows());
    MatrixXd id = MatrixXd::Identity(n, n);
    MatrixXd op = MatrixXd::Zero(n * n, n * n);
    // vec(AX + XA^T) = (I (x) A + A (x) I) vec(X), column-major vec.
    for (int bi = 0; bi < n; ++bi)
        for (int bj = 0; bj < n; ++bj) {
            if (bi == bj) op.block(bi * n, bj * n, n, n) += a;
            op.block(bi * n, bj * n, n, n) += a(bi, bj) * id;
        }
    Eigen::VectorXd rhs = Eigen::Map<const VectorXd>(q.data(), n * n);
    Eigen::FullPivLU<MatrixXd> lu(op);
    if (!lu.isInvertible())
        throw std::runtime_error("solve_lyapunov: singular operator (drift not Hurwitz?)");
    VectorXd x = lu.solve(-rhs);
    MatrixXd out = Eigen::Map<const MatrixXd>(x.data(), n, n);
    return symmetrize(out);
}

std::pair<MatrixXd, MatrixXd> ou_discretize(const MatrixXd& a, const MatrixXd& q, double dt) {
    const int n = static_cast<int>(a.rows());
    Eigen::EigenSolver<MatrixXd> es(a);
    if (es.eigenvalues().real().maxCoeff() < 0.0) {
        // Stable drift: the augmented exponential mixes e^{+|a| dt} blocks and
        // loses all precision for stiff systems, so use the stationary
        // relation S = C - Phi C Phi^T with C the Lyapunov equilibrium.
        MatrixXd phi = (a * dt).exp();
        MatrixXd c = solve_lyapunov(a, q);
        return {phi, symmetrize(c - phi * c * phi.transpose())};
    }
    MatrixXd blk = MatrixXd::Zero(2 * n, 2 * n);
    blk.topLeftCorner(n, n) = -a;
    blk.topRightCorner(n, n) = q;
    blk.bottomRightCorner(n, n) = a.transpose();
    MatrixXd e = (blk * dt).exp();
    MatrixXd phi = e.bottomRightCorner(n, n).transpose();
    MatrixXd cov = phi * e.topRightCorner(n, n);
    return {phi, symmetrize(cov)};
}

double riccati_residual(const MatrixXd& s, const MatrixXd& a, const MatrixXd& q,
                        const MatrixXd& c) {
    MatrixXd r = a * s + s * a.transpose() - s * c * s + q;
    return r.norm();
}

MatrixXd solve_riccati_care(const MatrixXd& a, const MatrixXd& q, const MatrixXd& c,
                            double tol, int max_newton) {
    const int n = static_cast<int>(a.rows());
    // Warm start: integrate dS/dt = A S + S A^T - S C S + Q with RK4.
    MatrixXd s = MatrixXd::Identity(n, n);
    auto rhs = [&](const MatrixXd& m) -> MatrixXd {
        return a * m + m * a.transpose() - m * c * m + q;
    };
    double h = 1e-3;
    for (int it = 0; it < 200000; ++it) {
        MatrixXd k1 = rhs(s);
        MatrixXd k2 = rhs(s + 0.5 * h * k1);
        MatrixXd k3 = rhs(s + 0.5 * h * k2);
        MatrixXd k4 = rhs(s + h * k3);
        s = symmetrize(s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        if (k1.norm() < 1e-6 * (1.0 + s.norm())) break;
        if (it % 1000 == 999 && h < 0.05) h *= 2.0;
    }
    // Newton polish: (A - S C) D + D (A - S C)^T = -residual.
    for (int it = 0; it < max_newton; ++it) {
        MatrixXd res = rhs(s);
        if (res.norm() < tol) return symmetrize(s);
        MatrixXd acl = a - s * c;
        MatrixXd d = solve_lyapunov(acl, res);
        s = symmetrize(s + d);
    }
    MatrixXd res = rhs(s);
    if (res.norm() > 1e-10)
        throw std::runtime_error("solve_riccati_care: Newton failed, residual " +
                                 std::to_string(res.norm()));
    return symmetrize(s);
}

VectorXd lstsq(const MatrixXd& design, const VectorXd& y) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
    if (qr.rank() < design.cols())
        throw std::runtime_error("lstsq: rank-deficient design matrix");
    return qr.solve(y);
}

double loglog_slope(const VectorXd& x, const VectorXd& y) {
    const int n = static_cast<int>(x.size());
    MatrixXd design(n, 2);
    VectorXd ly(n);
    for (int i = 0; i < n; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = std::log(x(i));
        ly(i) = std::log(y(i));
    }
    return lstsq(design, ly)(1);
}

}  // namespace msf
