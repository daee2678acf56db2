#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ppnac/errors.hpp"

namespace ppnac {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Fixed communication topology. a(i, j) > 0 means agent i receives agent j's
// output; pinning(i) > 0 means agent i observes the leader directly.
class Digraph {
public:
    Digraph(Matrix adjacency, Vector pinning)
        : adjacency_(std::move(adjacency)), pinning_(std::move(pinning)) {
        const auto n = adjacency_.rows();
        if (n < 1 || adjacency_.cols() != n || pinning_.size() != n) {
            throw DimensionMismatch("Digraph: adjacency must be N x N and pinning length N");
        }
        std::vector<std::string> problems;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (adjacency_(i, i) != 0.0) {
                problems.push_back("graph.adjacency[" + std::to_string(i) + "][" + std::to_string(i) +
                                   "]: self-loops are not allowed");
            }
            for (Eigen::Index j = 0; j < n; ++j) {
                if (!(adjacency_(i, j) >= 0.0) || !std::isfinite(adjacency_(i, j))) {
                    problems.push_back("graph.adjacency[" + std::to_string(i) + "][" + std::to_string(j) +
                                       "]: weights must be finite and nonnegative");
                }
            }
            if (!(pinning_(i) >= 0.0) || !std::isfinite(pinning_(i))) {
                problems.push_back("graph.pinning[" + std::to_string(i) + "]: must be finite and nonnegative");
            }
        }
        if (!problems.empty()) throw ValidationError(std::move(problems));
    }

    [[nodiscard]] std::size_t n_agents() const noexcept { return static_cast<std::size_t>(adjacency_.rows()); }
    [[nodiscard]] const Matrix& adjacency() const noexcept { return adjacency_; }
    [[nodiscard]] const Vector& pinning() const noexcept { return pinning_; }

    [[nodiscard]] double in_degree(std::size_t i) const { return adjacency_.row(static_cast<Eigen::Index>(i)).sum(); }
    [[nodiscard]] bool has_pinning() const { return (pinning_.array() > 0.0).any(); }

private:
    Matrix adjacency_;
    Vector pinning_;
};

// L = D - A with D the diagonal in-degree matrix.
[[nodiscard]] inline Matrix laplacian(const Digraph& g) {
    const Matrix& a = g.adjacency();
    Matrix l = -a;
    for (Eigen::Index i = 0; i < a.rows(); ++i) l(i, i) = a.row(i).sum();
    return l;
}

[[nodiscard]] inline Matrix pinning_matrix(const Digraph& g) { return g.pinning().asDiagonal(); }

[[nodiscard]] inline Matrix laplacian_plus_pinning(const Digraph& g) { return laplacian(g) + pinning_matrix(g); }

// D + B, diagonal.
[[nodiscard]] inline Matrix degree_plus_pinning(const Digraph& g) {
    Vector d = g.adjacency().rowwise().sum() + g.pinning();
    return d.asDiagonal();
}

// One breadth-first sweep per source node over the edges j -> i (a(i, j) > 0).
[[nodiscard]] inline bool is_strongly_connected(const Digraph& g) {
    const auto n = static_cast<Eigen::Index>(g.n_agents());
    const Matrix& a = g.adjacency();
    std::vector<char> seen(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> queue;
    queue.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index s = 0; s < n; ++s) {
        std::fill(seen.begin(), seen.end(), 0);
        queue.clear();
        queue.push_back(s);
        seen[static_cast<std::size_t>(s)] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const auto from = queue[head];
            for (Eigen::Index to = 0; to < n; ++to) {
                if (a(to, from) > 0.0 && !seen[static_cast<std::size_t>(to)]) {
                    seen[static_cast<std::size_t>(to)] = 1;
                    queue.push_back(to);
                }
            }
        }
        if (queue.size() != static_cast<std::size_t>(n)) return false;
    }
    return true;
}

// True when every agent can be reached from the leader through pinned agents
// and then along graph edges (a spanning tree rooted at the leader).
[[nodiscard]] inline bool reachable_from_leader(const Digraph& g) {
    const auto n = static_cast<Eigen::Index>(g.n_agents());
    const Matrix& a = g.adjacency();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> queue;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (g.pinning()(i) > 0.0) {
            seen[static_cast<std::size_t>(i)] = 1;
            queue.push_back(i);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto from = queue[head];
        for (Eigen::Index to = 0; to < n; ++to) {
            if (a(to, from) > 0.0 && !seen[static_cast<std::size_t>(to)]) {
                seen[static_cast<std::size_t>(to)] = 1;
                queue.push_back(to);
            }
        }
    }
    return queue.size() == static_cast<std::size_t>(n);
}

// Eigenvalues of M^T M via a symmetric solver; fine for the <= 10 x 10 matrices used here.
[[nodiscard]] inline Vector singular_values(const Matrix& m) {
    if (m.size() == 0) return Vector{};
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

[[nodiscard]] inline double min_singular_value(const Matrix& m) {
    const Vector s = singular_values(m);
    return s.size() == 0 ? 0.0 : s.minCoeff();
}

[[nodiscard]] inline double max_singular_value(const Matrix& m) {
    const Vector s = singular_values(m);
    return s.size() == 0 ? 0.0 : s.maxCoeff();
}

// m ⊗ I_p.
[[nodiscard]] inline Matrix kron_expand(const Matrix& m, std::size_t p) {
    if (p < 1) throw DimensionMismatch("kron_expand: channel count must be >= 1");
    if (p == 1) return m;
    const auto pp = static_cast<Eigen::Index>(p);
    Matrix out = Matrix::Zero(m.rows() * pp, m.cols() * pp);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (m(i, j) != 0.0) out.block(i * pp, j * pp, pp, pp).diagonal().setConstant(m(i, j));
        }
    }
    return out;
}

struct Lemma1Quantities {
    Vector q;         // (L + B)^{-1} 1
    Vector m_diag;    // 1 / q_i
    Matrix q_matrix;  // M (L+B) + (L+B)^T M
};

[[nodiscard]] inline Lemma1Quantities lemma1_quantities(const Digraph& g) {
    if (!g.has_pinning()) {
        throw SingularSystem("lemma1_quantities: no agent is pinned to the leader, L + B is singular");
    }
    // Strong connectivity is sufficient; what L + B actually needs is that the
    // leader reaches everyone, which also admits pinned chains.
    if (!reachable_from_leader(g)) {
        throw NotStronglyConnected("lemma1_quantities: some agents are not reachable from the leader");
    }
    const Matrix lb = laplacian_plus_pinning(g);
    Eigen::PartialPivLU<Matrix> lu(lb);
    if (!(lu.rcond() > 1e-13)) {
        throw SingularSystem("lemma1_quantities: L + B is numerically singular");
    }
    Lemma1Quantities out;
    out.q = lu.solve(Vector::Ones(lb.rows()));
    if ((out.q.array() <= 0.0).any()) {
        throw SingularSystem("lemma1_quantities: q has a nonpositive entry");
    }
    out.m_diag = out.q.cwiseInverse();
    const Matrix mlb = out.m_diag.asDiagonal() * lb;
    out.q_matrix = mlb + mlb.transpose();
    return out;
}

// Per-agent neighborhood error, channel-wise:
//   e_i = sum_j a_ij (x_i - x_j) + b_i (x_i - x_0)
// x1 is N x P (one row per agent), x0 has length P.
[[nodiscard]] inline Matrix sync_error(const Digraph& g, const Matrix& x1, const Vector& x0) {
    const auto n = static_cast<Eigen::Index>(g.n_agents());
    if (x1.rows() != n || x1.cols() != x0.size()) {
        throw DimensionMismatch("sync_error: expected x1 of shape N x P and x0 of length P");
    }
    const Matrix& a = g.adjacency();
    Matrix e = Matrix::Zero(n, x1.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (a(i, j) != 0.0) e.row(i) += a(i, j) * (x1.row(i) - x1.row(j));
        }
        e.row(i) += g.pinning()(i) * (x1.row(i) - x0.transpose());
    }
    return e;
}

// Same quantity through the stacked form e = ((L + B) ⊗ I_P)(x - 1 ⊗ x0).
[[nodiscard]] inline Matrix sync_error_global(const Digraph& g, const Matrix& x1, const Vector& x0) {
    const auto n = static_cast<Eigen::Index>(g.n_agents());
    if (x1.rows() != n || x1.cols() != x0.size()) {
        throw DimensionMismatch("sync_error_global: expected x1 of shape N x P and x0 of length P");
    }
    const auto p = x1.cols();
    Vector stacked(n * p);
    for (Eigen::Index i = 0; i < n; ++i) stacked.segment(i * p, p) = (x1.row(i) - x0.transpose()).transpose();
    const Vector e = kron_expand(laplacian_plus_pinning(g), static_cast<std::size_t>(p)) * stacked;
    Matrix out(n, p);
    for (Eigen::Index i = 0; i < n; ++i) out.row(i) = e.segment(i * p, p).transpose();
    return out;
}

}  // namespace ppnac
