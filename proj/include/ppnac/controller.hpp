#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ppnac/errors.hpp"
#include "ppnac/graph.hpp"
#include "ppnac/jet.hpp"
#include "ppnac/nn.hpp"
#include "ppnac/ppf.hpp"

namespace ppnac {

struct ControllerParams {
    double c = 1.0;              // error feedback gain
    double k = 0.1;              // weight leakage
    std::vector<double> lambda;  // filter coefficients lambda^1 .. lambda^{order-1}
    std::vector<double> pi_gain; // adaptation gain per agent
    double beta = 1.0;           // right-hand side scale of the Lyapunov equation
};

// Filter poles placed at -2: coefficients of (s + 2)^{n} in ascending order,
// without the leading one. order = 3 gives {4, 4}.
[[nodiscard]] inline std::vector<double> default_lambda(std::size_t order) {
    const std::size_t n = order > 0 ? order - 1 : 0;
    std::vector<double> poly{1.0};  // ascending coefficients
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t j = 0; j < poly.size(); ++j) {
            next[j] += 2.0 * poly[j];
            next[j + 1] += poly[j];
        }
        poly = std::move(next);
    }
    poly.pop_back();
    return poly;
}

[[nodiscard]] inline bool is_hurwitz(const Matrix& m) {
    if (m.size() == 0) return true;
    Eigen::EigenSolver<Matrix> es(m, false);
    return (es.eigenvalues().real().array() < 0.0).all();
}

// Superdiagonal ones, last row -lambda^1 ... -lambda^{order-1}.
[[nodiscard]] inline Matrix companion_matrix(const std::vector<double>& lambda) {
    const auto n = static_cast<Eigen::Index>(lambda.size());
    Matrix out = Matrix::Zero(n, n);
    if (n == 0) return out;
    for (Eigen::Index i = 0; i + 1 < n; ++i) out(i, i + 1) = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) out(n - 1, j) = -lambda[static_cast<std::size_t>(j)];
    if (!is_hurwitz(out)) throw NotHurwitz("companion_matrix: filter polynomial has a root with Re >= 0");
    return out;
}

// Solves Lambda^T M + M Lambda = -beta I by complex Schur reduction
// (Bartels-Stewart): with Lambda^T = U T U^H the problem becomes
// T X + X T^H = -beta I, solved column by column from the right.
[[nodiscard]] inline Matrix solve_lyapunov(const Matrix& lambda_mat, double beta) {
    const auto n = lambda_mat.rows();
    if (lambda_mat.cols() != n) throw DimensionMismatch("solve_lyapunov: matrix must be square");
    if (n == 0) return Matrix{};
    if (!is_hurwitz(lambda_mat)) throw NotHurwitz("solve_lyapunov: matrix is not Hurwitz");

    using CMatrix = Eigen::MatrixXcd;
    Eigen::ComplexSchur<Matrix> schur(lambda_mat.transpose());
    const CMatrix& u = schur.matrixU();
    const CMatrix& t = schur.matrixT();
    const CMatrix rhs = u.adjoint() * (CMatrix::Identity(n, n) * std::complex<double>(-beta, 0.0)) * u;

    CMatrix x = CMatrix::Zero(n, n);
    for (Eigen::Index j = n - 1; j >= 0; --j) {
        Eigen::VectorXcd col = rhs.col(j);
        for (Eigen::Index k = j + 1; k < n; ++k) col -= std::conj(t(j, k)) * x.col(k);
        CMatrix sys = t;
        sys.diagonal().array() += std::conj(t(j, j));
        x.col(j) = sys.triangularView<Eigen::Upper>().solve(col);
    }
    Matrix m = (u * x * u.adjoint()).real();
    return 0.5 * (m + m.transpose());
}

// E = eps^{(n)} + lambda^{n} eps^{(n-1)} + ... + lambda^1 eps, n = order - 1,
// one entry per channel. eps[p] carries derivatives 0..order-1 of channel p.
[[nodiscard]] inline Vector metric_error(const std::vector<JetD>& eps, const std::vector<double>& lambda) {
    Vector out(static_cast<Eigen::Index>(eps.size()));
    for (std::size_t p = 0; p < eps.size(); ++p) {
        const std::size_t top = lambda.size();
        if (eps[p].order() < top) throw DimensionMismatch("metric_error: jet order below system order - 1");
        double acc = eps[p].derivative(top);
        for (std::size_t m = 0; m < top; ++m) acc += lambda[m] * eps[p].derivative(m);
        out(static_cast<Eigen::Index>(p)) = acc;
    }
    return out;
}

// lambda^{n} eps^{(n)} + ... + lambda^1 eps', the term cancelled by the control law.
[[nodiscard]] inline Vector filter_compensation(const std::vector<JetD>& eps, const std::vector<double>& lambda) {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(eps.size()));
    for (std::size_t p = 0; p < eps.size(); ++p) {
        double acc = 0.0;
        for (std::size_t m = 0; m < lambda.size(); ++m) acc += lambda[m] * eps[p].derivative(m + 1);
        out(static_cast<Eigen::Index>(p)) = acc;
    }
    return out;
}

// Diagonal matrix of per-channel slopes r.
[[nodiscard]] inline Matrix omega_matrix(const Vector& e, const Vector& rho, const std::vector<PerformanceSpec>& specs) {
    if (e.size() != rho.size() || static_cast<std::size_t>(e.size()) != specs.size()) {
        throw DimensionMismatch("omega_matrix: inconsistent channel counts");
    }
    Matrix out = Matrix::Zero(e.size(), e.size());
    for (Eigen::Index p = 0; p < e.size(); ++p) out(p, p) = slope_r(e(p), rho(p), specs[static_cast<std::size_t>(p)]);
    return out;
}

// Inputs shared by both forms of the local control law.
struct LocalControlInputs {
    const std::vector<JetD>& eps;  // per channel, derivatives 0..order-1
    const Vector& e_metric;
    const Matrix& w_hat;
    const Vector& phi;
    const Matrix& omega;
    double d_plus_b;
    const Matrix& g_matrix;
};

namespace detail {
inline void check_control(const LocalControlInputs& in) {
    if (!(in.d_plus_b > 0.0)) throw ZeroRowDegree("control_signal: agent has no in-neighbors and no pinning");
    const auto p = in.e_metric.size();
    if (in.g_matrix.rows() != p || in.g_matrix.cols() != p || in.omega.rows() != p ||
        static_cast<Eigen::Index>(in.eps.size()) != p) {
        throw DimensionMismatch("control_signal: inconsistent channel counts");
    }
}
}  // namespace detail

// u_i = G^{-1} (-c E - W^T phi - (d + b)^{-1} Omega^{-1} (lambda-weighted eps derivatives)),
// computed channel by channel.
[[nodiscard]] inline Vector control_signal(const LocalControlInputs& in, const ControllerParams& params) {
    detail::check_control(in);
    const Vector f_hat = predict(in.w_hat, in.phi);
    const Vector comp = filter_compensation(in.eps, params.lambda);
    Vector v(in.e_metric.size());
    for (Eigen::Index p = 0; p < v.size(); ++p) {
        v(p) = -params.c * in.e_metric(p) - f_hat(p) - comp(p) / (in.d_plus_b * in.omega(p, p));
    }
    if (v.size() == 1) {
        if (in.g_matrix(0, 0) == 0.0) throw SingularInput("control_signal: input gain is zero");
        return v / in.g_matrix(0, 0);
    }
    Eigen::PartialPivLU<Matrix> lu(in.g_matrix);
    if (!(lu.rcond() > 1e-14)) throw SingularInput("control_signal: input matrix is singular");
    return lu.solve(v);
}

// Same law with the degree factor written as (d + b)^{-1} ⊗ I_P and Omega inverted as a matrix.
[[nodiscard]] inline Vector control_signal_kron(const LocalControlInputs& in, const ControllerParams& params) {
    detail::check_control(in);
    const auto p = static_cast<std::size_t>(in.e_metric.size());
    const Matrix degree_inv = kron_expand(Matrix::Constant(1, 1, 1.0 / in.d_plus_b), p);
    const Matrix omega_inv = in.omega.diagonal().cwiseInverse().asDiagonal();
    const Vector rhs = -params.c * in.e_metric - in.w_hat.transpose() * in.phi -
                       degree_inv * omega_inv * filter_compensation(in.eps, params.lambda);
    Eigen::PartialPivLU<Matrix> lu(in.g_matrix);
    if (!(lu.rcond() > 1e-14)) throw SingularInput("control_signal: input matrix is singular");
    return lu.solve(rhs);
}

// ---------------------------------------------------------------------------
// Gain condition
// ---------------------------------------------------------------------------

// User-supplied bounds: activation bound phi_M, ideal weight bound W_M and the
// residual bound T_M. The last two do not enter the gain inequality but are
// part of the bound set and are echoed in the report.
struct GainBounds {
    std::optional<double> phi_max;
    std::optional<double> w_max;
    std::optional<double> t_max;
};

// Conservative extremes of the slope matrix R over the horizon.
struct SlopeEstimate {
    double sigma_min = 0.0;
    double sigma_max = 0.0;
};

struct GainReport {
    double c = 0.0;
    double gamma = 0.0;
    double g = 0.0;
    double nu = 0.0;
    double mu = 0.0;
    double c_lower_bound = 0.0;
    bool gain_condition_ok = false;  // c > c_lower_bound
    double minor1 = 0.0;             // beta / 2
    double minor2 = 0.0;             // beta k / 2
    double minor3 = 0.0;             // det H
    double sylvester_expr = 0.0;     // k (beta mu - 2 g^2) - beta gamma^2
    bool sylvester_beta_ok = false;
    bool sylvester_beta_k_ok = false;
    bool sylvester_det_ok = false;
    bool sylvester_ok = false;
    Matrix h_matrix;
    double sigma_min_Q = 0.0;
    double sigma_min_R = 0.0;
    double sigma_max_R = 0.0;
    double sigma_max_scaling = 0.0;  // of diag(1 / q_i)
    double sigma_max_A = 0.0;
    double sigma_min_DB = 0.0;
    double sigma_max_lyapunov = 0.0;
    double lambda_frobenius = 0.0;   // |Lambda|_F
    double lambda_norm = 0.0;        // |lambda|
    double phi_max = 0.0;
    double w_max = 0.0;
    double t_max = 0.0;

    [[nodiscard]] bool satisfied() const noexcept { return gain_condition_ok && sylvester_ok; }
};

[[nodiscard]] inline GainReport verify_gains(const Digraph& graph, const ControllerParams& params,
                                             const GainBounds& bounds, const SlopeEstimate& slope) {
    if (!bounds.phi_max || !bounds.w_max || !bounds.t_max) {
        throw MissingBounds("verify_gains: phi_max, w_max and t_max must all be supplied");
    }
    const Lemma1Quantities lq = lemma1_quantities(graph);
    const Matrix lam = companion_matrix(params.lambda);
    const Matrix lyap = solve_lyapunov(lam, params.beta);

    GainReport r;
    r.c = params.c;
    r.phi_max = *bounds.phi_max;
    r.w_max = *bounds.w_max;
    r.t_max = *bounds.t_max;
    r.sigma_min_Q = min_singular_value(lq.q_matrix);
    r.sigma_min_R = slope.sigma_min;
    r.sigma_max_R = slope.sigma_max;
    r.sigma_max_scaling = max_singular_value(Matrix(lq.m_diag.asDiagonal()));
    r.sigma_max_A = max_singular_value(graph.adjacency());
    r.sigma_min_DB = min_singular_value(degree_plus_pinning(graph));
    r.sigma_max_lyapunov = max_singular_value(lyap);
    r.lambda_frobenius = lam.norm();
    r.lambda_norm = Eigen::Map<const Vector>(params.lambda.data(), static_cast<Eigen::Index>(params.lambda.size())).norm();

    const double coupling = r.sigma_max_scaling * r.sigma_max_A / r.sigma_min_DB;
    r.gamma = -0.5 * r.phi_max * r.sigma_max_scaling * r.sigma_max_R * r.sigma_max_A;
    r.g = -0.5 * (r.sigma_max_lyapunov + coupling * r.lambda_frobenius * r.lambda_norm);
    r.nu = coupling * r.lambda_norm;
    r.mu = params.c * r.sigma_min_R * r.sigma_min_Q - coupling;

    const double denom = r.sigma_min_Q * r.sigma_min_R;
    const double numer = r.gamma * r.gamma / params.k + 2.0 / params.beta * r.g * r.g + r.nu;
    r.c_lower_bound = denom > 0.0 ? numer / denom : std::numeric_limits<double>::infinity();
    r.gain_condition_ok = params.c > r.c_lower_bound;

    r.h_matrix.resize(3, 3);
    r.h_matrix << 0.5 * params.beta, 0.0, r.g, 0.0, params.k, r.gamma, r.g, r.gamma, r.mu;
    r.minor1 = r.h_matrix(0, 0);
    r.minor2 = r.h_matrix(0, 0) * r.h_matrix(1, 1) - r.h_matrix(0, 1) * r.h_matrix(1, 0);
    r.minor3 = r.h_matrix.determinant();
    r.sylvester_expr = params.k * (params.beta * r.mu - 2.0 * r.g * r.g) - params.beta * r.gamma * r.gamma;
    r.sylvester_beta_ok = params.beta > 0.0;
    r.sylvester_beta_k_ok = params.beta * params.k > 0.0;
    r.sylvester_det_ok = r.sylvester_expr > 0.0;
    r.sylvester_ok = r.sylvester_beta_ok && r.sylvester_beta_k_ok && r.sylvester_det_ok;
    return r;
}

}  // namespace ppnac
