#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <string>
#include <vector>

#include "ppnac/errors.hpp"
#include "ppnac/jet.hpp"

namespace ppnac {

// Exponentially shrinking funnel for one agent channel:
//   rho(t) = (rho0 - rho_inf) exp(-ell t) + rho_inf
// with the error kept inside (-delta_under * rho, delta_bar * rho).
struct PerformanceSpec {
    double rho0 = 1.0;
    double rho_inf = 0.1;
    double ell = 1.0;
    double delta_bar = 1.0;
    double delta_under = 1.0;

    // Empty when the invariants hold; otherwise one message per violated field,
    // prefixed with `path`.
    [[nodiscard]] std::vector<std::string> problems(const std::string& path = "ppf") const {
        std::vector<std::string> out;
        auto positive = [&](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) out.push_back(path + "." + name + ": must be a positive finite number");
        };
        positive(rho0, "rho0");
        positive(rho_inf, "rho_inf");
        positive(ell, "ell");
        positive(delta_bar, "delta_bar");
        positive(delta_under, "delta_under");
        if (rho0 > 0.0 && rho_inf > 0.0 && !(rho0 > rho_inf)) out.push_back(path + ".rho0: must exceed rho_inf");
        return out;
    }

    friend bool operator==(const PerformanceSpec&, const PerformanceSpec&) = default;
};

// Minimum distance from a funnel edge before the logarithm is considered unsafe.
inline constexpr double kFunnelEdgeGuard = 1e-9;

// The transform is defined on (-delta_under, delta_bar). For a channel whose
// initial error is negative the two constants trade places so that the funnel
// matches the mirrored bounds used by check_envelope.
[[nodiscard]] inline PerformanceSpec oriented(const PerformanceSpec& spec, int sign0) {
    if (sign0 >= 0) return spec;
    PerformanceSpec s = spec;
    std::swap(s.delta_bar, s.delta_under);
    return s;
}

[[nodiscard]] inline double rho_value(const PerformanceSpec& spec, double t) {
    return (spec.rho0 - spec.rho_inf) * std::exp(-spec.ell * t) + spec.rho_inf;
}

[[nodiscard]] inline JetD rho_jet(const PerformanceSpec& spec, double t, std::size_t order) {
    std::vector<double> d(order + 1);
    const double amp = (spec.rho0 - spec.rho_inf) * std::exp(-spec.ell * t);
    double scale = 1.0;
    for (std::size_t m = 0; m <= order; ++m) {
        d[m] = amp * scale;
        scale *= -spec.ell;
    }
    d[0] += spec.rho_inf;
    return JetD::from_derivatives(std::span<const double>(d));
}

namespace detail {
inline void require_inside(double xi, const PerformanceSpec& spec, const char* where) {
    if (!(xi > -spec.delta_under + kFunnelEdgeGuard) || !(xi < spec.delta_bar - kFunnelEdgeGuard)) {
        std::ostringstream os;
        os << where << ": normalized error " << xi << " outside funnel (" << -spec.delta_under << ", "
           << spec.delta_bar << ")";
        throw OutOfEnvelope(os.str());
    }
}
}  // namespace detail

// epsilon = 1/2 ln((delta_under + xi) / (delta_bar - xi)), xi = e / rho.
[[nodiscard]] inline double transform(double xi, const PerformanceSpec& spec) {
    detail::require_inside(xi, spec, "transform");
    return 0.5 * (std::log(spec.delta_under + xi) - std::log(spec.delta_bar - xi));
}

// xi = (delta_bar e^eps - delta_under e^-eps) / (e^eps + e^-eps), evaluated
// with the decaying exponential only.
[[nodiscard]] inline double inverse_transform(double eps, const PerformanceSpec& spec) {
    if (eps >= 0.0) {
        const double z = std::exp(-2.0 * eps);
        return (spec.delta_bar - spec.delta_under * z) / (1.0 + z);
    }
    const double z = std::exp(2.0 * eps);
    return (spec.delta_bar * z - spec.delta_under) / (z + 1.0);
}

// r = d(epsilon)/d(e) = 1/(2 rho) (1/(delta_under + xi) + 1/(delta_bar - xi)).
[[nodiscard]] inline double slope_r(double e, double rho, const PerformanceSpec& spec) {
    const double xi = e / rho;
    detail::require_inside(xi, spec, "slope_r");
    return (1.0 / (2.0 * rho)) * (1.0 / (spec.delta_under + xi) + 1.0 / (spec.delta_bar - xi));
}

// Exact Taylor expansion of epsilon(t) = transform(e(t) / rho(t)) from the
// expansions of e and rho. Coefficient 1 reproduces r (e' - e rho' / rho).
[[nodiscard]] inline JetD transform_jet(const JetD& e_jet, const JetD& rho_jet, const PerformanceSpec& spec) {
    if (e_jet.order() != rho_jet.order()) throw DimensionMismatch("transform_jet: jets of different order");
    const JetD xi = e_jet / rho_jet;
    detail::require_inside(xi.value(), spec, "transform_jet");
    return (log(spec.delta_under + xi) - log(spec.delta_bar - xi)) * 0.5;
}

// Strict funnel membership. sign0 >= 0: -delta_under rho < e < delta_bar rho;
// sign0 < 0: -delta_bar rho < e < delta_under rho.
[[nodiscard]] inline bool check_envelope(double e, double rho, const PerformanceSpec& spec, int sign0) {
    const PerformanceSpec s = oriented(spec, sign0);
    return -s.delta_under * rho < e && e < s.delta_bar * rho;
}

[[nodiscard]] inline int sign_of(double v) { return v < 0.0 ? -1 : 1; }

}  // namespace ppnac
