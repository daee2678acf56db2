#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ppnac/dynamics.hpp"
#include "ppnac/nn.hpp"

using namespace ppnac;

TEST(AgentDerivative, Examples) {
    const DriftFn zero = [](const Vector& x, double) { return Vector::Zero(x.size() / 2); };
    const AgentModel two{2, 1, zero, Matrix::Identity(1, 1)};
    EXPECT_TRUE(agent_derivative(two, Vector::Zero(2), Vector::Zero(1), 0.0).isZero(0.0));
    EXPECT_EQ(agent_derivative(two, Eigen::Vector2d(1, 2), Vector::Constant(1, 3.0), 0.0), Eigen::Vector2d(2, 3));
    EXPECT_THROW((void)agent_derivative(two, Vector::Zero(3), Vector::Zero(1), 0.0), DimensionMismatch);

    const auto agents = problem1_agents();
    EXPECT_EQ(agent_derivative(agents[4], Vector::Zero(3), Vector::Zero(1), 0.0), Eigen::Vector3d(0, 0, 1));
}

TEST(AgentDerivative, LowerRowsAreAnExactShift) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    const auto agents = problem2_agents(problem2::default_params());
    for (int k = 0; k < 20; ++k) {
        Vector x(4), u(2);
        for (int i = 0; i < 4; ++i) x(i) = nd(rng);
        for (int i = 0; i < 2; ++i) u(i) = nd(rng);
        const Vector d = agent_derivative(agents[static_cast<std::size_t>(k % 5)], x, u, 0.1 * k);
        EXPECT_EQ(d.head(2), x.tail(2));
    }
}

TEST(Problem1, DriftsByHand) {
    EXPECT_NEAR(problem1::agent_drift(1)(Eigen::Vector3d(1.0, 1.0, 0.0), 0.0)(0), -1.0, 1e-15);
    // f1 = x2 sin x1 + cos^2 x3
    const Eigen::Vector3d x(0.4, -1.3, 0.9);
    EXPECT_NEAR(problem1::agent_drift(0)(x, 0.0)(0), -1.3 * std::sin(0.4) + std::pow(std::cos(0.9), 2), 1e-15);
    EXPECT_NEAR(problem1::agent_drift(2)(x, 0.0)(0), -1.3 + std::sin(0.9), 1e-15);
    const double s = 0.4 - 1.3 - 1.0;
    EXPECT_NEAR(problem1::agent_drift(3)(x, 0.3)(0),
                -3.0 * s * s * (s + 0.9) - 0.9 + 0.5 * std::sin(0.6) + std::cos(0.6), 1e-14);
}

TEST(Problem1, LeaderTopDerivative) {
    const auto leader = problem1_leader();
    const Vector d = leader_derivative(leader, Vector::Zero(3), 0.0);
    EXPECT_NEAR(d(2), 20.0 / 3.0, 1e-14);
    const Eigen::Vector3d x(0.2, -0.1, 0.7);
    const Vector dx = leader_derivative(leader, x, 0.0);
    EXPECT_EQ(dx(0), x(1));
    EXPECT_EQ(dx(1), x(2));
}

TEST(Problem1, SetupMatchesCaseStudy) {
    const auto s = builtin_problem1();
    EXPECT_EQ(s.agents.size(), 5u);
    EXPECT_EQ(s.graph.pinning(), (Vector(5) << 1, 0, 0, 0, 1).finished());
    EXPECT_EQ(s.agent_initial[0], Eigen::Vector3d(-0.2850, -0.0821, -0.2126));
    EXPECT_EQ(s.agent_initial[1], Eigen::Vector3d(-0.6044, -0.3964, -0.0775));
    EXPECT_EQ(s.leader_initial, Eigen::Vector3d(0.3, 0.3, 0.3));
}

TEST(Problem2, SetupMatchesCaseStudy) {
    const auto s = builtin_problem2();
    const auto p = problem2::default_params();
    EXPECT_EQ(p.a.row(0), Eigen::RowVector2d(1.5, 0.5));
    EXPECT_EQ(problem2::disturbance(p, 0, 0.0), Eigen::Vector2d(1.0, 1.2));
    EXPECT_EQ(s.agent_initial[2].head(2), Eigen::Vector2d(-0.1475, -0.4880));
    EXPECT_TRUE(s.agent_initial[2].tail(2).isZero(0.0));
    EXPECT_EQ(s.leader.closed_form.state(0.0).head(2), Eigen::Vector2d(0.5, 0.6));
    for (const auto& a : s.agents) EXPECT_EQ(a.g_matrix, Matrix::Identity(2, 2));

    // closed-form leader: top derivative is the derivative of the velocity block
    const double t = 1.3, h = 1e-5;
    const Vector fd = (s.leader.closed_form.state(t + h) - s.leader.closed_form.state(t - h)) / (2 * h);
    EXPECT_LE((fd.head(2) - s.leader.closed_form.state(t).tail(2)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((fd.tail(2) - s.leader.closed_form.top_derivative(t)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Problem2, DisturbanceEntersDrift) {
    // zero state: f and psi terms vanish, leaving D_i(t)
    const auto p = problem2::default_params();
    const auto agents = problem2_agents(p);
    for (std::size_t i = 0; i < 5; ++i) {
        const Vector f = agents[i].drift(Vector::Zero(4), 0.9);
        EXPECT_LE((f - problem2::disturbance(p, i, 0.9)).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(DriftTable, EvaluatesMonomialsAndTimeFactors) {
    DriftTable table(1);
    table[0].push_back({2.0, {1, 2}, TimeFactor::None, 0.0, 0.0});
    table[0].push_back({-0.5, {}, TimeFactor::Sin, 2.0, 0.1});
    const auto f = make_table_drift(table);
    const Eigen::Vector2d x(1.5, -2.0);
    EXPECT_NEAR(f(x, 0.7)(0), 2.0 * 1.5 * 4.0 - 0.5 * std::sin(1.4 + 0.1), 1e-15);
}

TEST(Basis, Examples) {
    const auto b = make_basis(6, 3, CenterPlacement::Diagonal, 2.0, 2.0, 1);
    EXPECT_EQ(basis_eval(b, Vector(b.centers.row(2).transpose()))(2), 1.0);
    EXPECT_LT(basis_eval(b, Vector::Constant(3, 1e3)).maxCoeff(), 1e-300);
    EXPECT_THROW((void)basis_eval(b, Vector::Zero(2)), DimensionMismatch);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (const auto& basis : {b, make_basis(50, 4, CenterPlacement::LatinHypercube, 2.0, 2.0, 3)}) {
        for (int k = 0; k < 1000; ++k) {
            Vector x(basis.input_dim());
            for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
            const Vector phi = basis_eval(basis, x);
            EXPECT_TRUE((phi.array() > 0.0).all());
            EXPECT_TRUE((phi.array() <= 1.0).all());
            EXPECT_LE(phi.norm(), std::sqrt(static_cast<double>(basis.neurons())));
        }
    }
}

TEST(Basis, LatinHypercubeStratifiesEveryAxis) {
    const auto b = make_basis(10, 3, CenterPlacement::LatinHypercube, 2.0, 2.0, 42);
    for (Eigen::Index k = 0; k < 3; ++k) {
        std::vector<int> hits(10, 0);
        for (Eigen::Index j = 0; j < 10; ++j) hits[static_cast<std::size_t>((b.centers(j, k) + 2.0) / 0.4)]++;
        for (int h : hits) EXPECT_EQ(h, 1);
    }
    const auto again = make_basis(10, 3, CenterPlacement::LatinHypercube, 2.0, 2.0, 42);
    EXPECT_EQ(again.centers, b.centers);
    EXPECT_EQ(again.width, b.width);
}

TEST(Predict, Examples) {
    EXPECT_TRUE(predict(Matrix::Zero(3, 2), Vector::Ones(3)).isZero(0.0));
    EXPECT_EQ(predict(Matrix::Constant(1, 1, 2.0), Vector::Constant(1, 0.5))(0), 1.0);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd;
    Matrix w(5, 3);
    Vector phi(5);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = nd(rng);
    for (Eigen::Index i = 0; i < 5; ++i) phi(i) = nd(rng);
    const Vector out = predict(w, phi);
    for (int p = 0; p < 3; ++p) {
        double acc = 0.0;
        for (int j = 0; j < 5; ++j) acc += w(j, p) * phi(j);
        EXPECT_NEAR(out(p), acc, 1e-14);
    }
    EXPECT_THROW((void)predict(w, Vector::Zero(4)), DimensionMismatch);
}

TEST(WeightUpdate, Examples) {
    const AdaptationGains gains{0.05, 0.1};
    const Matrix omega = Matrix::Identity(1, 1);
    EXPECT_TRUE(weight_update_derivative(Matrix::Zero(4, 1), Vector::Ones(4), Vector::Zero(1), 1.0, omega, 2.0, gains)
                    .isZero(0.0));
    const Matrix w = Matrix::Constant(4, 1, 3.0);
    EXPECT_LE((weight_update_derivative(w, Vector::Zero(4), Vector::Ones(1), 1.0, omega, 2.0, gains) + 0.005 * w)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-16);
    const Matrix one = weight_update_derivative(Matrix::Zero(1, 1), Vector::Constant(1, 2.0), Vector::Constant(1, 3.0),
                                                1.0, Matrix::Constant(1, 1, 0.5), 1.0, AdaptationGains{1.0, 0.0});
    EXPECT_EQ(one(0, 0), 3.0);
    EXPECT_THROW((void)weight_update_derivative(w, Vector::Zero(4), Vector::Ones(1), 1.0, omega, 2.0, {0.0, 0.1}),
                 NonpositiveGain);
    EXPECT_THROW((void)weight_update_derivative(w, Vector::Zero(3), Vector::Ones(1), 1.0, omega, 2.0, gains),
                 DimensionMismatch);
}

TEST(WeightUpdate, ScalarAndKroneckerFormsAgree) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> pos(0.1, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int p = 1 + trial % 3;
        Matrix w(6, p);
        Vector phi(6), e(p);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = nd(rng);
        for (int i = 0; i < 6; ++i) phi(i) = pos(rng);
        for (int i = 0; i < p; ++i) e(i) = nd(rng);
        Matrix omega = Matrix::Zero(p, p);
        for (int i = 0; i < p; ++i) omega(i, i) = pos(rng);
        const AdaptationGains g{pos(rng), pos(rng)};
        const double m = pos(rng), db = pos(rng);
        const Matrix a = weight_update_derivative(w, phi, e, m, omega, db, g);
        const Matrix b = weight_update_derivative_kron(w, phi, e, m, omega, db, g);
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        EXPECT_LE((a - b).cwiseAbs().maxCoeff(), (p == 1 ? 1e-14 : 1e-13) * scale);
    }
}

TEST(WeightUpdate, LeakageDecaysNormWithRateTwoKPi) {
    // with E = 0: d|W|^2/dt = -2 k Pi |W|^2
    const AdaptationGains g{0.05, 0.1};
    Matrix w = Matrix::Constant(6, 1, 1.0);
    const Vector phi = Vector::Ones(6);
    const double n0 = w.squaredNorm();
    const double dt = 1e-3;
    for (int k = 0; k < 5000; ++k) {
        auto f = [&](const Matrix& x) {
            return weight_update_derivative(x, phi, Vector::Zero(1), 1.0, Matrix::Identity(1, 1), 2.0, g);
        };
        const Matrix k1 = f(w), k2 = f(w + 0.5 * dt * k1), k3 = f(w + 0.5 * dt * k2), k4 = f(w + dt * k3);
        w += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    const double rate = -std::log(w.squaredNorm() / n0) / 5.0;
    EXPECT_NEAR(rate, 2.0 * g.k * g.pi_gain, 0.01 * 2.0 * g.k * g.pi_gain);
}
