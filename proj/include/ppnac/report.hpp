#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ppnac/controller.hpp"
#include "ppnac/errors.hpp"
#include "ppnac/ppf.hpp"
#include "ppnac/scenario.hpp"
#include "ppnac/sim.hpp"

namespace ppnac {

// Non-finite numbers have no JSON literal; they are written as strings.
inline Json json_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

[[nodiscard]] inline Json summary_json(const RunSummary& s) {
    Json j;
    j["completed"] = s.completed;
    j["passed"] = s.passed();
    if (!s.completed) {
        Json& f = j["failure"];
        f["kind"] = s.failure_kind;
        f["message"] = s.failure_message;
        f["t"] = json_number(s.failure_time);
        f["agent"] = s.failure_agent >= 0 ? Json(s.failure_agent + 1) : Json(nullptr);
        f["channel"] = s.failure_channel >= 0 ? Json(s.failure_channel + 1) : Json(nullptr);
    }
    j["samples"] = s.samples;
    j["envelope_violations"] = s.envelope_violations;
    j["window_start"] = s.window_start;
    Json table = Json::array();
    for (Eigen::Index i = 0; i < s.max_abs_e_after.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < s.max_abs_e_after.cols(); ++c) row.push_back(s.max_abs_e_after(i, c));
        table.push_back(std::move(row));
    }
    j["max_abs_e_after"] = std::move(table);
    j["max_abs_e_after_all"] = s.max_abs_e_after_all;
    j["settling_time"] = json_number(s.settling_time);
    j["final_disagreement_norm"] = s.final_disagreement_norm;
    j["weight_norm_max"] = s.weight_norm_max;
    j["disagreement_bound_violations"] = s.disagreement_bound_violations;
    return j;
}

// Extremes of the slope r over all agents and channels at t = 0.
[[nodiscard]] inline SlopeEstimate initial_slope_estimate(const Scenario& sc) {
    const auto n = static_cast<Eigen::Index>(sc.n_agents());
    const auto p = static_cast<Eigen::Index>(sc.channels());
    Matrix x1(n, p);
    for (Eigen::Index i = 0; i < n; ++i) x1.row(i) = sc.agent_initial[static_cast<std::size_t>(i)].head(p).transpose();
    const Vector x0 = sc.leader.is_closed_form() ? Vector(sc.leader.closed_form.state(0.0).head(p))
                                                 : Vector(sc.leader_initial.head(p));
    const Matrix e = sync_error(sc.graph, x1, x0);
    SlopeEstimate est{std::numeric_limits<double>::infinity(), 0.0};
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < p; ++c) {
            const auto& spec = sc.ppf[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            const double r = slope_r(e(i, c), spec.rho0, oriented(spec, sign_of(e(i, c))));
            est.sigma_min = std::min(est.sigma_min, r);
            est.sigma_max = std::max(est.sigma_max, r);
        }
    }
    return est;
}

// Bounds document: {"phi_max": .., "w_max": .., "t_max": .., optional
// "sigma_min_R", "sigma_max_R"}.
struct BoundsFile {
    GainBounds bounds;
    std::optional<SlopeEstimate> slope;
};

[[nodiscard]] inline BoundsFile parse_bounds(const Json& j) {
    BoundsFile b;
    if (!j.is_object()) throw ParseError("bounds: expected a JSON object");
    auto read = [&](const char* key) -> std::optional<double> {
        if (!j.contains(key)) return std::nullopt;
        if (!j[key].is_number()) throw ParseError(std::string("bounds.") + key + ": expected a number");
        return j[key].get<double>();
    };
    b.bounds.phi_max = read("phi_max");
    b.bounds.w_max = read("w_max");
    b.bounds.t_max = read("t_max");
    const auto lo = read("sigma_min_R");
    const auto hi = read("sigma_max_R");
    if (lo.has_value() != hi.has_value()) throw ParseError("bounds: sigma_min_R and sigma_max_R go together");
    if (lo) b.slope = SlopeEstimate{*lo, *hi};
    return b;
}

[[nodiscard]] inline std::vector<std::pair<std::string, double>> gain_report_fields(const GainReport& r) {
    return {{"c", r.c},
            {"c_lower_bound", r.c_lower_bound},
            {"gain_condition_ok", r.gain_condition_ok ? 1.0 : 0.0},
            {"gamma", r.gamma},
            {"g", r.g},
            {"nu", r.nu},
            {"mu", r.mu},
            {"minor1", r.minor1},
            {"minor2", r.minor2},
            {"minor3", r.minor3},
            {"sylvester_expr", r.sylvester_expr},
            {"sylvester_beta_ok", r.sylvester_beta_ok ? 1.0 : 0.0},
            {"sylvester_beta_k_ok", r.sylvester_beta_k_ok ? 1.0 : 0.0},
            {"sylvester_det_ok", r.sylvester_det_ok ? 1.0 : 0.0},
            {"sylvester_ok", r.sylvester_ok ? 1.0 : 0.0},
            {"sigma_min_Q", r.sigma_min_Q},
            {"sigma_min_R", r.sigma_min_R},
            {"sigma_max_R", r.sigma_max_R},
            {"sigma_max_scaling", r.sigma_max_scaling},
            {"sigma_max_A", r.sigma_max_A},
            {"sigma_min_DB", r.sigma_min_DB},
            {"sigma_max_lyapunov", r.sigma_max_lyapunov},
            {"lambda_frobenius", r.lambda_frobenius},
            {"lambda_norm", r.lambda_norm},
            {"phi_max", r.phi_max},
            {"w_max", r.w_max},
            {"t_max", r.t_max}};
}

// Two-line CSV record: header and values, 17 significant digits.
inline void write_gain_report_csv(std::ostream& os, const GainReport& r) {
    const auto fields = gain_report_fields(r);
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << fields[i].first;
    os << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << fields[i].second;
    os << '\n';
}

}  // namespace ppnac
