#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ppnac/errors.hpp"
#include "ppnac/graph.hpp"

namespace ppnac {

// Gaussian radial basis phi_j(x) = exp(-|x - c_j|^2 / (2 w^2)), one center per row.
struct RbfBasis {
    Matrix centers;  // v x dim
    double width = 1.0;

    [[nodiscard]] std::size_t neurons() const noexcept { return static_cast<std::size_t>(centers.rows()); }
    [[nodiscard]] std::size_t input_dim() const noexcept { return static_cast<std::size_t>(centers.cols()); }
};

[[nodiscard]] inline Vector basis_eval(const RbfBasis& b, const Vector& x) {
    if (x.size() != b.centers.cols()) throw DimensionMismatch("basis_eval: state size does not match centers");
    const double inv = 1.0 / (2.0 * b.width * b.width);
    Vector phi(b.centers.rows());
    for (Eigen::Index j = 0; j < b.centers.rows(); ++j) {
        phi(j) = std::exp(-(x.transpose() - b.centers.row(j)).squaredNorm() * inv);
    }
    return phi;
}

// f_hat = W^T phi.
[[nodiscard]] inline Vector predict(const Matrix& w, const Vector& phi) {
    if (w.rows() != phi.size()) throw DimensionMismatch("predict: weight rows must equal basis size");
    return w.transpose() * phi;
}

struct AdaptationGains {
    double pi_gain = 1.0;  // F_i = pi_gain * I
    double k = 0.1;        // leakage
};

namespace detail {
inline void check_adaptation(const Matrix& w, const Vector& phi, const Vector& e_metric, const Matrix& omega,
                             const AdaptationGains& gains) {
    if (w.rows() != phi.size() || w.cols() != e_metric.size() || omega.rows() != e_metric.size() ||
        omega.cols() != e_metric.size()) {
        throw DimensionMismatch("weight_update_derivative: inconsistent dimensions");
    }
    // k == 0 switches the leakage off; only negative values are rejected.
    if (!(gains.pi_gain > 0.0) || !(gains.k >= 0.0)) {
        throw NonpositiveGain("weight_update_derivative: pi_gain must be positive and k nonnegative");
    }
}
}  // namespace detail

// dW/dt = F phi E^T m Omega (d + b) - k F W, with (d + b) a scalar.
// Evaluated one output channel at a time (Omega is diagonal).
[[nodiscard]] inline Matrix weight_update_derivative(const Matrix& w, const Vector& phi, const Vector& e_metric,
                                                     double m_i, const Matrix& omega, double d_plus_b,
                                                     const AdaptationGains& gains) {
    detail::check_adaptation(w, phi, e_metric, omega, gains);
    Matrix dw(w.rows(), w.cols());
    for (Eigen::Index p = 0; p < w.cols(); ++p) {
        const double drive = e_metric(p) * m_i * omega(p, p) * d_plus_b;
        for (Eigen::Index j = 0; j < w.rows(); ++j) {
            dw(j, p) = gains.pi_gain * phi(j) * drive - gains.k * gains.pi_gain * w(j, p);
        }
    }
    return dw;
}

// Same law with the degree factor expanded to (d + b) ⊗ I_P and full matrix products.
[[nodiscard]] inline Matrix weight_update_derivative_kron(const Matrix& w, const Vector& phi, const Vector& e_metric,
                                                          double m_i, const Matrix& omega, double d_plus_b,
                                                          const AdaptationGains& gains) {
    detail::check_adaptation(w, phi, e_metric, omega, gains);
    const auto v = w.rows();
    const Matrix f = gains.pi_gain * Matrix::Identity(v, v);
    const Matrix degree = kron_expand(Matrix::Constant(1, 1, d_plus_b), static_cast<std::size_t>(e_metric.size()));
    return f * phi * e_metric.transpose() * m_i * omega * degree - gains.k * f * w;
}

// ---------------------------------------------------------------------------
// Center placement
// ---------------------------------------------------------------------------

enum class CenterPlacement { Diagonal, LatinHypercube };

namespace detail {
// Uniform in [0, 1) from the top 53 bits; independent of the standard library's
// distribution implementations so traces are reproducible across toolchains.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double mean_nearest_spacing(const Matrix& centers) {
    const auto v = centers.rows();
    if (v < 2) return 0.0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < v; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < v; ++j) {
            if (i != j) best = std::min(best, (centers.row(i) - centers.row(j)).norm());
        }
        total += best;
    }
    return total / static_cast<double>(v);
}
}  // namespace detail

// Diagonal: centers evenly spaced on the line s * (1, ..., 1), s in [-half_width, half_width].
// LatinHypercube: one center per stratum in every coordinate of [-half_width, half_width]^dim.
// The shared width is width_factor times the mean nearest-center distance.
[[nodiscard]] inline RbfBasis make_basis(std::size_t neurons, std::size_t dim, CenterPlacement placement,
                                         double half_width, double width_factor, std::uint64_t seed) {
    if (neurons < 1 || dim < 1) throw DimensionMismatch("make_basis: need at least one neuron and one input");
    const auto v = static_cast<Eigen::Index>(neurons);
    const auto d = static_cast<Eigen::Index>(dim);
    RbfBasis b;
    b.centers.resize(v, d);
    if (placement == CenterPlacement::Diagonal) {
        for (Eigen::Index j = 0; j < v; ++j) {
            const double s = v == 1 ? 0.0 : -half_width + 2.0 * half_width * static_cast<double>(j) / static_cast<double>(v - 1);
            b.centers.row(j).setConstant(s);
        }
    } else {
        std::mt19937_64 rng(seed);
        std::vector<Eigen::Index> strata(static_cast<std::size_t>(v));
        for (Eigen::Index k = 0; k < d; ++k) {
            std::iota(strata.begin(), strata.end(), Eigen::Index{0});
            for (std::size_t i = strata.size(); i > 1; --i) {
                const auto j = static_cast<std::size_t>(detail::unit_uniform(rng) * static_cast<double>(i));
                std::swap(strata[i - 1], strata[std::min(j, i - 1)]);
            }
            for (Eigen::Index j = 0; j < v; ++j) {
                const double u = (static_cast<double>(strata[static_cast<std::size_t>(j)]) + detail::unit_uniform(rng)) /
                                 static_cast<double>(v);
                b.centers(j, k) = -half_width + 2.0 * half_width * u;
            }
        }
    }
    const double spacing = detail::mean_nearest_spacing(b.centers);
    b.width = width_factor * (spacing > 0.0 ? spacing : half_width);
    return b;
}

}  // namespace ppnac
