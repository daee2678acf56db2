#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ppnac/errors.hpp"
#include "ppnac/graph.hpp"

namespace ppnac {

// Full agent state x_i in R^{P * order}, laid out block by derivative order:
// [x^1 (P entries), x^2 (P entries), ..., x^order]. Index of (m, p) is m * P + p.
[[nodiscard]] constexpr std::size_t state_index(std::size_t m, std::size_t p, std::size_t channels) noexcept {
    return m * channels + p;
}

using DriftFn = std::function<Vector(const Vector& x, double t)>;

// Brunovsky-form agent: x^m' = x^{m+1}, x^order' = f(x, t) + G u.
struct AgentModel {
    std::size_t order = 1;
    std::size_t channels = 1;
    DriftFn drift;
    Matrix g_matrix;

    [[nodiscard]] std::size_t state_dim() const noexcept { return order * channels; }
};

// Leader either integrated from its own drift f0(t, x0) or given in closed form
// (state and top derivative as functions of time).
struct LeaderModel {
    struct ClosedForm {
        std::function<Vector(double t)> state;
        std::function<Vector(double t)> top_derivative;
    };

    std::size_t order = 1;
    std::size_t channels = 1;
    DriftFn drift;  // signature (x0, t)
    ClosedForm closed_form;

    [[nodiscard]] bool is_closed_form() const noexcept { return static_cast<bool>(closed_form.state); }
    [[nodiscard]] std::size_t state_dim() const noexcept { return order * channels; }
};

namespace detail {
inline Vector integrator_chain(const Vector& x, const Vector& top, std::size_t order, std::size_t channels) {
    const auto p = static_cast<Eigen::Index>(channels);
    const auto lower = static_cast<Eigen::Index>((order - 1) * channels);
    Vector dx(x.size());
    dx.head(lower) = x.segment(p, lower);
    dx.tail(p) = top;
    return dx;
}
}  // namespace detail

[[nodiscard]] inline Vector agent_derivative(const AgentModel& m, const Vector& x, const Vector& u, double t) {
    if (x.size() != static_cast<Eigen::Index>(m.state_dim()) || u.size() != static_cast<Eigen::Index>(m.channels)) {
        throw DimensionMismatch("agent_derivative: state or control has the wrong size");
    }
    Vector top = m.drift(x, t) + m.g_matrix * u;
    if (top.size() != u.size()) throw DimensionMismatch("agent_derivative: drift returned the wrong size");
    return detail::integrator_chain(x, top, m.order, m.channels);
}

[[nodiscard]] inline Vector leader_top_derivative(const LeaderModel& l, const Vector& x0, double t) {
    return l.is_closed_form() ? l.closed_form.top_derivative(t) : l.drift(x0, t);
}

[[nodiscard]] inline Vector leader_derivative(const LeaderModel& l, const Vector& x0, double t) {
    if (x0.size() != static_cast<Eigen::Index>(l.state_dim())) {
        throw DimensionMismatch("leader_derivative: state has the wrong size");
    }
    Vector top = leader_top_derivative(l, x0, t);
    if (top.size() != static_cast<Eigen::Index>(l.channels)) {
        throw DimensionMismatch("leader_derivative: drift returned the wrong size");
    }
    return detail::integrator_chain(x0, top, l.order, l.channels);
}

// ---------------------------------------------------------------------------
// Expression table: each channel of the drift is a sum of monomials in the
// state, optionally multiplied by sin/cos(omega t + phase).
// ---------------------------------------------------------------------------

enum class TimeFactor { None, Sin, Cos };

struct DriftTerm {
    double coeff = 0.0;
    std::vector<int> powers;  // one exponent per state entry (empty => constant)
    TimeFactor time = TimeFactor::None;
    double omega = 0.0;
    double phase = 0.0;

    friend bool operator==(const DriftTerm&, const DriftTerm&) = default;
};

using DriftTable = std::vector<std::vector<DriftTerm>>;  // [channel][term]

[[nodiscard]] inline DriftFn make_table_drift(DriftTable table) {
    return [table = std::move(table)](const Vector& x, double t) {
        Vector out = Vector::Zero(static_cast<Eigen::Index>(table.size()));
        for (std::size_t p = 0; p < table.size(); ++p) {
            for (const auto& term : table[p]) {
                double v = term.coeff;
                for (std::size_t k = 0; k < term.powers.size(); ++k) {
                    if (term.powers[k] != 0) v *= std::pow(x(static_cast<Eigen::Index>(k)), term.powers[k]);
                }
                switch (term.time) {
                    case TimeFactor::Sin: v *= std::sin(term.omega * t + term.phase); break;
                    case TimeFactor::Cos: v *= std::cos(term.omega * t + term.phase); break;
                    case TimeFactor::None: break;
                }
                out(static_cast<Eigen::Index>(p)) += v;
            }
        }
        return out;
    };
}

// ---------------------------------------------------------------------------
// Built-in case studies.
// ---------------------------------------------------------------------------

struct ProblemSetup {
    Digraph graph;
    std::vector<AgentModel> agents;
    LeaderModel leader;
    std::vector<Vector> agent_initial;
    Vector leader_initial;
};

namespace problem1 {

// Five agents on a directed ring 1 -> 2 -> 3 -> 4 -> 5 -> 1 with a chord 1 -> 3,
// the leader pinned to agents 1 and 5.
[[nodiscard]] inline Digraph default_graph() {
    Matrix a = Matrix::Zero(5, 5);
    a(1, 0) = 1.0;  // 2 <- 1
    a(2, 1) = 1.0;  // 3 <- 2
    a(3, 2) = 1.0;  // 4 <- 3
    a(4, 3) = 1.0;  // 5 <- 4
    a(0, 4) = 1.0;  // 1 <- 5
    a(2, 0) = 1.0;  // 3 <- 1
    Vector b(5);
    b << 1.0, 0.0, 0.0, 0.0, 1.0;
    return Digraph(a, b);
}

[[nodiscard]] inline DriftFn agent_drift(std::size_t i) {
    switch (i) {
        case 0:
            return [](const Vector& x, double) {
                const double c = std::cos(x(2));
                return Vector::Constant(1, x(1) * std::sin(x(0)) + c * c);
            };
        case 1:
            return [](const Vector& x, double) {
                return Vector::Constant(1, -x(0) * x(0) * x(1) + 0.01 * x(0) - 0.01 * x(0) * x(0) * x(0));
            };
        case 2:
            return [](const Vector& x, double) { return Vector::Constant(1, x(1) + std::sin(x(2))); };
        case 3:
            return [](const Vector& x, double t) {
                const double s = x(0) + x(1) - 1.0;
                return Vector::Constant(1, -3.0 * s * s * (x(0) + x(1) + x(2) - 1.0) - x(2) + 0.5 * std::sin(2.0 * t) +
                                               std::cos(2.0 * t));
            };
        case 4:
            return [](const Vector& x, double) { return Vector::Constant(1, std::cos(x(0))); };
        default:
            throw DimensionMismatch("problem1: agent index out of range");
    }
}

[[nodiscard]] inline Vector leader_drift(const Vector& x, double t) {
    return Vector::Constant(1, -x(1) - 2.0 * x(2) + 1.0 + 3.0 * std::sin(2.0 * t) + 6.0 * std::cos(2.0 * t) -
                                   (1.0 / 3.0) * (x(0) + x(1) - 1.0) * (x(0) + 4.0 * x(1) + 3.0 * x(2) - 1.0));
}

[[nodiscard]] inline std::vector<Vector> default_initial_states() {
    const double v[5][3] = {{-0.2850, -0.0821, -0.2126},
                            {-0.6044, -0.3964, -0.0775},
                            {-0.2110, -0.4237, -0.3253},
                            {-0.1501, -0.3986, -0.0050},
                            {-0.3281, 0.1618, -0.4160}};
    std::vector<Vector> out;
    for (const auto& row : v) out.push_back(Eigen::Vector3d(row[0], row[1], row[2]));
    return out;
}

[[nodiscard]] inline Vector default_leader_initial() { return Eigen::Vector3d(0.3, 0.3, 0.3); }

}  // namespace problem1

namespace problem2 {

// Per-agent parameter rows (agent-major, two entries per agent).
struct Params {
    Matrix a;  // 5 x 2
    Matrix b;  // 5 x 2
    Matrix c;  // 5 x 2

    friend bool operator==(const Params& l, const Params& r) { return l.a == r.a && l.b == r.b && l.c == r.c; }
};

[[nodiscard]] inline Params default_params() {
    Params p;
    p.a.resize(5, 2);
    p.b.resize(5, 2);
    p.c.resize(5, 2);
    p.a << 1.5, 0.5, 0.5, 1.4, 0.7, 0.1, 1.3, 1.3, 0.7, 2.4;
    p.b << 0.5, 0.7, 1.5, 1.2, 1.1, 1.3, 1.6, 0.5, 0.3, 0.3;
    p.c << 1.5, 0.5, 2.5, 1.7, 0.5, 1.1, 1.7, 0.3, 0.7, 0.4;
    return p;
}

// Drift f_i(x, t) + psi_i(t) [x^1; x^2] + D_i(t). Channel superscripts index
// outputs; the velocity block of the state supplies the overdot terms.
[[nodiscard]] inline DriftFn agent_drift(double a1, double a2, double b1, double b2, double c1, double c2) {
    return [=](const Vector& x, double t) {
        const double y1 = x(0), y2 = x(1), v1 = x(2), v2 = x(3);
        Eigen::Vector2d f;
        f(0) = a1 * y2 * y1 * y1 * v2 + 0.2 * std::sin(a1 * y1 * v1);
        f(1) = -a2 * y1 * y2 * v1 - 0.2 * a2 * std::cos(a2 * y2 * t) * y1 * v2;
        Eigen::Matrix2d psi;
        psi << 3.0 * c1 * std::sin(0.5 * t), 2.0 * c1 * std::sin(0.4 * c1 * t) * std::cos(0.3 * t),
            0.9 * std::sin(0.2 * c2 * t), 2.5 * std::sin(0.3 * c2 * t) + 0.3 * std::cos(t);
        const Eigen::Vector2d disturbance(1.0 + b1 * std::sin(b1 * t), 1.2 * std::cos(b2 * t));
        return Vector(f + psi * Eigen::Vector2d(y1, y2) + disturbance);
    };
}

[[nodiscard]] inline Vector disturbance(const Params& p, std::size_t i, double t) {
    const auto r = static_cast<Eigen::Index>(i);
    return Eigen::Vector2d(1.0 + p.b(r, 0) * std::sin(p.b(r, 0) * t), 1.2 * std::cos(p.b(r, 1) * t));
}

[[nodiscard]] inline LeaderModel leader() {
    LeaderModel l;
    l.order = 2;
    l.channels = 2;
    l.closed_form.state = [](double t) {
        Vector s(4);
        s << 0.5 * std::cos(0.8 * t), 0.6 * std::cos(0.7 * t), -0.4 * std::sin(0.8 * t), -0.42 * std::sin(0.7 * t);
        return s;
    };
    l.closed_form.top_derivative = [](double t) {
        return Vector(Eigen::Vector2d(-0.32 * std::cos(0.8 * t), -0.294 * std::cos(0.7 * t)));
    };
    return l;
}

[[nodiscard]] inline std::vector<Vector> default_initial_states() {
    const double v[5][2] = {{0.1956, -0.2307}, {-0.4947, -0.3852}, {-0.1475, -0.4880}, {-0.2947, -0.2203},
                            {-0.2850, -0.1593}};
    std::vector<Vector> out;
    for (const auto& row : v) {
        Vector s = Vector::Zero(4);
        s(0) = row[0];
        s(1) = row[1];
        out.push_back(s);
    }
    return out;
}

}  // namespace problem2

[[nodiscard]] inline std::vector<AgentModel> problem1_agents() {
    std::vector<AgentModel> agents;
    for (std::size_t i = 0; i < 5; ++i) {
        agents.push_back(AgentModel{3, 1, problem1::agent_drift(i), Matrix::Identity(1, 1)});
    }
    return agents;
}

[[nodiscard]] inline LeaderModel problem1_leader() {
    LeaderModel l;
    l.order = 3;
    l.channels = 1;
    l.drift = problem1::leader_drift;
    return l;
}

[[nodiscard]] inline std::vector<AgentModel> problem2_agents(const problem2::Params& p) {
    if (p.a.rows() != 5 || p.b.rows() != 5 || p.c.rows() != 5 || p.a.cols() != 2 || p.b.cols() != 2 ||
        p.c.cols() != 2) {
        throw DimensionMismatch("problem2: parameter tables must be 5 x 2");
    }
    std::vector<AgentModel> agents;
    for (Eigen::Index i = 0; i < 5; ++i) {
        agents.push_back(AgentModel{
            2, 2, problem2::agent_drift(p.a(i, 0), p.a(i, 1), p.b(i, 0), p.b(i, 1), p.c(i, 0), p.c(i, 1)),
            Matrix::Identity(2, 2)});
    }
    return agents;
}

[[nodiscard]] inline ProblemSetup builtin_problem1() {
    return ProblemSetup{problem1::default_graph(), problem1_agents(), problem1_leader(),
                        problem1::default_initial_states(), problem1::default_leader_initial()};
}

[[nodiscard]] inline ProblemSetup builtin_problem2() {
    auto leader = problem2::leader();
    Vector x0 = leader.closed_form.state(0.0);
    return ProblemSetup{problem1::default_graph(), problem2_agents(problem2::default_params()), std::move(leader),
                        problem2::default_initial_states(), std::move(x0)};
}

}  // namespace ppnac
