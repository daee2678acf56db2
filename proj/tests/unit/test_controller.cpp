#include <gtest/gtest.h>

#include <unsupported/Eigen/Polynomials>

#include <cmath>
#include <random>

#include "ppnac/controller.hpp"
#include "ppnac/dynamics.hpp"

using namespace ppnac;

namespace {

// vec(A^T M + M A) = (I ⊗ A^T + A^T ⊗ I) vec(M)
Matrix lyapunov_by_vectorization(const Matrix& a, double beta) {
    const auto n = a.rows();
    const Matrix id = Matrix::Identity(n, n);
    Matrix k = Matrix::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            k.block(i * n, j * n, n, n) += id(i, j) * a.transpose();
            k.block(i * n, j * n, n, n) += a(j, i) * id;
        }
    const Vector rhs = Eigen::Map<const Vector>(Matrix(-beta * id).data(), n * n);
    const Vector x = k.fullPivLu().solve(rhs);
    return Eigen::Map<const Matrix>(x.data(), n, n);
}

std::vector<JetD> scalar_eps(std::initializer_list<double> d) { return {JetD::from_derivatives(d)}; }

}  // namespace

TEST(Companion, Examples) {
    const Matrix l1 = companion_matrix({3.0});
    EXPECT_EQ(l1, Matrix::Constant(1, 1, -3.0));
    const Matrix l2 = companion_matrix({2.0, 3.0});
    EXPECT_EQ(l2, (Matrix(2, 2) << 0, 1, -2, -3).finished());
    Eigen::EigenSolver<Matrix> es(l2);
    std::vector<double> ev{es.eigenvalues()(0).real(), es.eigenvalues()(1).real()};
    std::sort(ev.begin(), ev.end());
    EXPECT_NEAR(ev[0], -2.0, 1e-12);
    EXPECT_NEAR(ev[1], -1.0, 1e-12);
    EXPECT_THROW((void)companion_matrix({-1.0}), NotHurwitz);
    EXPECT_EQ(companion_matrix({}).size(), 0);
    EXPECT_EQ(default_lambda(3), (std::vector<double>{4.0, 4.0}));
    EXPECT_EQ(default_lambda(2), (std::vector<double>{2.0}));
    EXPECT_TRUE(default_lambda(1).empty());
}

TEST(Companion, HurwitzCheckAgreesWithPolynomialRoots) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 6.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 5;
        std::vector<double> lambda(n);
        for (auto& v : lambda) v = u(rng);
        // s^n + lambda_n s^{n-1} + ... + lambda_1, ascending coefficients
        Vector coeffs(n + 1);
        for (std::size_t i = 0; i < n; ++i) coeffs(static_cast<Eigen::Index>(i)) = lambda[i];
        coeffs(static_cast<Eigen::Index>(n)) = 1.0;
        Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
        bool stable = true;
        for (Eigen::Index i = 0; i < solver.roots().size(); ++i) stable = stable && solver.roots()(i).real() < 0.0;
        bool accepted = true;
        try {
            (void)companion_matrix(lambda);
        } catch (const NotHurwitz&) {
            accepted = false;
        }
        EXPECT_EQ(stable, accepted);
    }
}

TEST(Lyapunov, ScalarExamples) {
    EXPECT_NEAR(solve_lyapunov(Matrix::Constant(1, 1, -1.0), 2.0)(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(solve_lyapunov(Matrix::Constant(1, 1, -3.0), 6.0)(0, 0), 1.0, 1e-15);
    EXPECT_THROW((void)solve_lyapunov(Matrix::Constant(1, 1, 1.0), 1.0), NotHurwitz);
}

TEST(Lyapunov, MatchesVectorizedSolve) {
    const Matrix lam = companion_matrix({2.0, 3.0});
    const Matrix m = solve_lyapunov(lam, 1.0);
    const Matrix oracle = lyapunov_by_vectorization(lam, 1.0);
    EXPECT_LE((m - oracle).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((lam.transpose() * m + m * lam + Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Lyapunov, RandomHurwitzUpToSix) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + trial % 6;
        Matrix a(n, n);
        for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
        Eigen::EigenSolver<Matrix> es(a);
        a -= (es.eigenvalues().real().maxCoeff() + 0.5) * Matrix::Identity(n, n);
        const double beta = 0.5 + std::abs(nd(rng));
        const Matrix m = solve_lyapunov(a, beta);
        const Matrix res = a.transpose() * m + m * a + beta * Matrix::Identity(n, n);
        EXPECT_LT(res.rowwise().lpNorm<1>().maxCoeff(), 1e-8);
        EXPECT_EQ(m, m.transpose());
        EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().minCoeff(), 0.0);
        EXPECT_LE((m - lyapunov_by_vectorization(a, beta)).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, m.norm()));
    }
}

TEST(MetricError, Examples) {
    EXPECT_EQ(metric_error(scalar_eps({0.0, 0.0, 0.0}), {2.0, 3.0})(0), 0.0);
    EXPECT_EQ(metric_error(scalar_eps({0.7}), {})(0), 0.7);
    EXPECT_EQ(metric_error(scalar_eps({1.0, 1.0, 1.0}), {2.0, 3.0})(0), 6.0);
}

TEST(MetricError, LinearInTheJet) {
    std::mt19937_64 rng(14);
    std::normal_distribution<double> nd;
    const std::vector<double> lambda{2.0, 3.0};
    for (int k = 0; k < 50; ++k) {
        const auto j1 = JetD::from_derivatives({nd(rng), nd(rng), nd(rng)});
        const auto j2 = JetD::from_derivatives({nd(rng), nd(rng), nd(rng)});
        const double a = nd(rng);
        const double lhs = metric_error({j1 * a + j2}, lambda)(0);
        const double rhs = a * metric_error({j1}, lambda)(0) + metric_error({j2}, lambda)(0);
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST(Omega, Examples) {
    const PerformanceSpec unit{1.0, 0.1, 1.0, 1.0, 1.0};
    EXPECT_EQ(omega_matrix(Vector::Zero(2), Vector::Ones(2), {unit, unit}), Matrix::Identity(2, 2));
    const PerformanceSpec p1{4.0, 0.03, 0.6, 4.0, 4.0};
    EXPECT_EQ(omega_matrix(Vector::Constant(1, 0.3), Vector::Constant(1, 2.0), {p1})(0, 0), slope_r(0.3, 2.0, p1));
    EXPECT_THROW((void)omega_matrix(Vector::Constant(1, 9.0), Vector::Constant(1, 2.0), {p1}), OutOfEnvelope);
}

TEST(ControlSignal, QuiescentAndDegenerate) {
    ControllerParams params{30.0, 0.1, {4.0, 4.0}, {0.05}, 1.0};
    const auto eps = scalar_eps({0.0, 0.0, 0.0});
    const Vector e0 = Vector::Zero(1);
    const Matrix w = Matrix::Zero(6, 1);
    const Vector phi = Vector::Ones(6);
    const Matrix omega = Matrix::Identity(1, 1);
    const Matrix g = Matrix::Identity(1, 1);
    EXPECT_EQ(control_signal({eps, e0, w, phi, omega, 2.0, g}, params)(0), 0.0);

    // order 1: u = G^{-1}(-c E - W^T phi)
    ControllerParams first{5.0, 0.1, {}, {0.05}, 1.0};
    const auto eps1 = scalar_eps({0.2});
    const Vector e1 = Vector::Constant(1, 0.2);
    const Matrix w1 = Matrix::Constant(6, 1, 0.1);
    EXPECT_NEAR(control_signal({eps1, e1, w1, phi, omega, 2.0, Matrix::Constant(1, 1, 2.0)}, first)(0),
                (-1.0 - 0.6) / 2.0, 1e-15);
}

TEST(ControlSignal, HandSubstitution) {
    // c = 30, E = 0.1, W^T phi = 0.5, d + b = 2, Omega = 0.25, lambda = (2, 3), eps'' ... = (0.01, 0.02)
    ControllerParams params{30.0, 0.1, {2.0, 3.0}, {0.05}, 1.0};
    const auto eps = scalar_eps({0.0, 0.01, 0.02});
    const Vector e = Vector::Constant(1, 0.1);
    const Matrix w = Matrix::Constant(1, 1, 0.5);
    const Vector phi = Vector::Ones(1);
    const Matrix omega = Matrix::Constant(1, 1, 0.25);
    const Matrix g = Matrix::Identity(1, 1);
    const double u = control_signal({eps, e, w, phi, omega, 2.0, g}, params)(0);
    const double independent = -30.0 * 0.1 - 0.5 - (1.0 / 2.0) * (1.0 / 0.25) * (3.0 * 0.02 + 2.0 * 0.01);
    EXPECT_NEAR(u, -3.66, 1e-14);
    EXPECT_NEAR(u, independent, 1e-15);
}

TEST(ControlSignal, ErrorPaths) {
    ControllerParams params{1.0, 0.1, {}, {0.05}, 1.0};
    const auto eps = scalar_eps({0.1});
    const Vector e = Vector::Constant(1, 0.1);
    const Matrix w = Matrix::Zero(2, 1);
    const Vector phi = Vector::Ones(2);
    const Matrix omega = Matrix::Identity(1, 1);
    EXPECT_THROW((void)control_signal({eps, e, w, phi, omega, 0.0, Matrix::Identity(1, 1)}, params), ZeroRowDegree);
    EXPECT_THROW((void)control_signal({eps, e, w, phi, omega, 1.0, Matrix::Zero(1, 1)}, params), SingularInput);
    EXPECT_THROW((void)control_signal_kron({eps, e, w, phi, omega, 1.0, Matrix::Zero(1, 1)}, params), SingularInput);
}

TEST(ControlSignal, ScalarAndKroneckerPathsAgree) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> pos(0.1, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int p = 1 + trial % 3;
        ControllerParams params{pos(rng) * 20, 0.1, {pos(rng), pos(rng)}, {0.05}, 1.0};
        std::vector<JetD> eps;
        for (int c = 0; c < p; ++c) eps.push_back(JetD::from_derivatives({nd(rng), nd(rng), nd(rng)}));
        const Vector e = metric_error(eps, params.lambda);
        Matrix w(6, p);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = nd(rng);
        Vector phi(6);
        for (int i = 0; i < 6; ++i) phi(i) = pos(rng);
        Matrix omega = Matrix::Zero(p, p);
        for (int c = 0; c < p; ++c) omega(c, c) = pos(rng);
        Matrix g = Matrix::Identity(p, p) * 2.0;
        for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] += 0.3 * nd(rng);
        const double db = pos(rng) * 3;
        const Vector a = control_signal({eps, e, w, phi, omega, db, g}, params);
        const Vector b = control_signal_kron({eps, e, w, phi, omega, db, g}, params);
        const double tol = (p == 1 ? 1e-14 : 1e-12) * std::max(1.0, a.cwiseAbs().maxCoeff());
        EXPECT_LE((a - b).cwiseAbs().maxCoeff(), tol);
    }
}

namespace {
GainBounds tiny_bounds() { return {1e-3, 1.0, 1.0}; }
}  // namespace

TEST(VerifyGains, StrongGainsPassAndZeroGainFails) {
    const auto g = problem1::default_graph();
    ControllerParams strong{1e6, 0.1, {4.0, 4.0}, {0.05}, 1.0};
    const SlopeEstimate slope{1.0 / 16.0, 0.2};
    const auto r = verify_gains(g, strong, tiny_bounds(), slope);
    EXPECT_TRUE(r.sylvester_ok);
    EXPECT_TRUE(r.gain_condition_ok);
    EXPECT_TRUE(r.satisfied());

    ControllerParams zero = strong;
    zero.c = 0.0;
    const auto z = verify_gains(g, zero, tiny_bounds(), slope);
    EXPECT_GT(z.c_lower_bound, 0.0);
    EXPECT_FALSE(z.gain_condition_ok);
    EXPECT_FALSE(z.satisfied());
}

TEST(VerifyGains, StructureOfH) {
    const auto g = problem1::default_graph();
    ControllerParams params{30.0, 0.1, {4.0, 4.0}, {0.05}, 1.7};
    const auto r = verify_gains(g, params, tiny_bounds(), {0.05, 0.3});
    EXPECT_EQ(r.h_matrix, r.h_matrix.transpose());
    EXPECT_EQ(r.minor1, params.beta / 2.0);
    EXPECT_EQ(r.minor2, params.beta * params.k / 2.0);
    EXPECT_NEAR(r.minor3, r.h_matrix.determinant(), 1e-12 * std::max(1.0, std::abs(r.minor3)));
    // det H = (beta/2) (k mu - gamma^2) - g^2 k = sylvester_expr / 2
    EXPECT_NEAR(r.minor3, 0.5 * r.sylvester_expr, 1e-10 * std::max(1.0, std::abs(r.minor3)));
}

TEST(VerifyGains, FormulasAgainstIndependentSvd) {
    const auto g = problem1::default_graph();
    ControllerParams params{30.0, 0.1, {4.0, 4.0}, {0.05}, 1.0};
    const GainBounds b{2.5, 1.0, 1.0};
    const SlopeEstimate slope{0.06, 0.4};
    const auto r = verify_gains(g, params, b, slope);

    auto smax = [](const Matrix& m) { return Eigen::JacobiSVD<Matrix>(m).singularValues().maxCoeff(); };
    auto smin = [](const Matrix& m) { return Eigen::JacobiSVD<Matrix>(m).singularValues().minCoeff(); };
    const Matrix lb = laplacian_plus_pinning(g);
    const Vector q = lb.fullPivHouseholderQr().solve(Vector::Ones(5));
    const Matrix scaling = q.cwiseInverse().asDiagonal();
    const Matrix qm = scaling * lb + lb.transpose() * scaling;
    const Matrix a = g.adjacency();
    Matrix db = Matrix::Zero(5, 5);
    for (int i = 0; i < 5; ++i) db(i, i) = a.row(i).sum() + g.pinning()(i);
    Matrix lam(2, 2);
    lam << 0, 1, -4, -4;
    // M from the vectorized Lyapunov system
    Matrix k = Matrix::Zero(4, 4);
    const Matrix id = Matrix::Identity(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            k.block(2 * i, 2 * j, 2, 2) += id(i, j) * lam.transpose();
            k.block(2 * i, 2 * j, 2, 2) += lam(j, i) * id;
        }
    const Vector mv = k.fullPivLu().solve(Eigen::Map<const Vector>(Matrix(-id).data(), 4));
    const Matrix m = Eigen::Map<const Matrix>(mv.data(), 2, 2);
    const double lam_norm = std::sqrt(32.0);
    const double coupling = smax(scaling) * smax(a) / smin(db);

    const double gamma = -0.5 * 2.5 * smax(scaling) * 0.4 * smax(a);
    const double gg = -0.5 * (smax(m) + coupling * lam.norm() * lam_norm);
    const double nu = coupling * lam_norm;
    const double mu = 30.0 * 0.06 * smin(qm) - coupling;
    const double c_low = (gamma * gamma / 0.1 + 2.0 * gg * gg + nu) / (smin(qm) * 0.06);

    EXPECT_NEAR(r.gamma, gamma, 1e-10 * std::abs(gamma));
    EXPECT_NEAR(r.g, gg, 1e-10 * std::abs(gg));
    EXPECT_NEAR(r.nu, nu, 1e-10 * std::abs(nu));
    EXPECT_NEAR(r.mu, mu, 1e-10 * std::max(1.0, std::abs(mu)));
    EXPECT_NEAR(r.c_lower_bound, c_low, 1e-10 * c_low);
    EXPECT_GT(r.sigma_min_Q, 0.0);
}

TEST(VerifyGains, MonotoneInC) {
    const auto g = problem1::default_graph();
    const SlopeEstimate slope{0.06, 0.4};
    double prev_mu = -std::numeric_limits<double>::infinity();
    bool was_ok = false;
    for (double c = 0.0; c <= 1e5; c = c * 1.5 + 1.0) {
        ControllerParams params{c, 0.1, {4.0, 4.0}, {0.05}, 1.0};
        const auto r = verify_gains(g, params, tiny_bounds(), slope);
        EXPECT_GT(r.mu, prev_mu);
        if (was_ok) EXPECT_TRUE(r.sylvester_ok);
        was_ok = r.sylvester_ok;
        prev_mu = r.mu;
    }
    EXPECT_TRUE(was_ok);
}

TEST(VerifyGains, MissingBounds) {
    ControllerParams params{30.0, 0.1, {4.0, 4.0}, {0.05}, 1.0};
    EXPECT_THROW((void)verify_gains(problem1::default_graph(), params, GainBounds{std::nullopt, 1.0, 1.0}, {0.1, 0.2}),
                 MissingBounds);
}
