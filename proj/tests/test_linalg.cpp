#include <cmath>

#include "doctest.h"
#include "msfilter/linalg.hpp"

using namespace msf;

TEST_CASE("spd_project clips negative eigenvalues and is idempotent") {
    MatrixXd m(2, 2);
    m << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
    MatrixXd p = spd_project(m);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(p);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    CHECK((spd_project(p) - p).norm() == doctest::Approx(0.0).epsilon(1e-12));
    // the positive eigenspace is preserved
    CHECK(p(0, 0) == doctest::Approx(1.5));
    CHECK(p(0, 1) == doctest::Approx(1.5));
}

TEST_CASE("sym_sqrt squares back to the input") {
    MatrixXd b(3, 3);
    b << 2, 1, 0, 1, 3, 1, 0, 1, 2;
    MatrixXd s = sym_sqrt(b);
    CHECK((s * s - b).norm() < 1e-10);
    CHECK((s - s.transpose()).norm() < 1e-12);
}

TEST_CASE("pinv inverts full-rank and satisfies Moore-Penrose on deficient input") {
    MatrixXd a(2, 2);
    a << 4, 1, 2, 3;
    CHECK((pinv(a) * a - MatrixXd::Identity(2, 2)).norm() < 1e-10);

    MatrixXd r(2, 2);
    r << 1, 2, 2, 4;  // rank 1
    MatrixXd rp = pinv(r);
    CHECK((r * rp * r - r).norm() < 1e-10);
    CHECK((rp * r * rp - rp).norm() < 1e-10);
}

TEST_CASE("solve_lyapunov matches the scalar OU equilibrium variance") {
    MatrixXd a(1, 1), q(1, 1);
    a << -1.5;
    q << 2.0;
    MatrixXd x = solve_lyapunov(a, q);
    CHECK(x(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("solve_lyapunov residual vanishes for a random stable system") {
    MatrixXd a(3, 3);
    a << -2, 0.3, 0.1, -0.4, -1.5, 0.2, 0.1, 0.3, -3.0;
    MatrixXd g(3, 3);
    g << 1, 0.2, 0, 0.2, 2, 0.1, 0, 0.1, 1.5;
    MatrixXd x = solve_lyapunov(a, g);
    CHECK((a * x + x * a.transpose() + g).norm() < 1e-10);
    CHECK((x - x.transpose()).norm() < 1e-12);
}

TEST_CASE("ou_discretize matches scalar closed forms and the semigroup law") {
    MatrixXd a(1, 1), q(1, 1);
    a << -0.7;
    q << 1.3;
    const double dt = 0.4;
    auto [phi, s] = ou_discretize(a, q, dt);
    CHECK(phi(0, 0) == doctest::Approx(std::exp(-0.7 * dt)).epsilon(1e-12));
    double s_exact = 1.3 * (std::exp(2.0 * -0.7 * dt) - 1.0) / (2.0 * -0.7);
    CHECK(s(0, 0) == doctest::Approx(s_exact).epsilon(1e-12));

    MatrixXd a2(2, 2), q2(2, 2);
    a2 << -1, 0.5, -0.2, -2;
    q2 << 1, 0.1, 0.1, 0.5;
    auto [p1, s1] = ou_discretize(a2, q2, 0.3);
    auto [p2, s2] = ou_discretize(a2, q2, 0.6);
    CHECK((p1 * p1 - p2).norm() < 1e-10);
    CHECK((p1 * s1 * p1.transpose() + s1 - s2).norm() < 1e-10);
}

TEST_CASE("solve_riccati_care reproduces the scalar closed form") {
    // -s^2/r + 2 a s + q = 0 with a=-1, q=2, r=1 has positive root sqrt(3)-1.
    MatrixXd a(1, 1), q(1, 1), c(1, 1);
    a << -1.0;
    q << 2.0;
    c << 1.0;
    MatrixXd s = solve_riccati_care(a, q, c);
    CHECK(s(0, 0) == doctest::Approx(std::sqrt(3.0) - 1.0).epsilon(1e-10));
    CHECK(riccati_residual(s, a, q, c) < 1e-10);
}

TEST_CASE("solve_riccati_care handles a 2x2 system to tight residual") {
    MatrixXd a(2, 2), q(2, 2), c(2, 2);
    a << -1, 1, -2, -2;
    q << 2, 0, 0, 4;
    c << 2, 0, 0, 0;  // only the first component observed, R = 0.5
    MatrixXd s = solve_riccati_care(a, q, c);
    CHECK(riccati_residual(s, a, q, c) < 1e-9);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("lstsq recovers exact linear coefficients") {
    MatrixXd x(5, 2);
    x << 1, 0.5, 1, 1.0, 1, 1.5, 1, 2.0, 1, 2.5;
    VectorXd beta(2);
    beta << 0.3, -1.7;
    VectorXd y = x * beta;
    CHECK((lstsq(x, y) - beta).norm() < 1e-12);
}

TEST_CASE("loglog_slope recovers a power law exponent") {
    VectorXd x(4), y(4);
    for (int i = 0; i < 4; ++i) {
        x(i) = std::pow(2.0, -i);
        y(i) = 3.0 * std::pow(x(i), 2.5);
    }
    CHECK(loglog_slope(x, y) == doctest::Approx(2.5).epsilon(1e-12));
}
