#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ppnac/controller.hpp"
#include "ppnac/dynamics.hpp"
#include "ppnac/errors.hpp"
#include "ppnac/graph.hpp"
#include "ppnac/jet.hpp"
#include "ppnac/nn.hpp"
#include "ppnac/ppf.hpp"

namespace ppnac {

// Which algebraic route computes the neighborhood error, the control law and
// the weight law. Both must agree; Kronecker exists to cross-check Local.
enum class ControlPath { Local, Kronecker };

struct NnSettings {
    std::size_t neurons = 6;
    CenterPlacement placement = CenterPlacement::Diagonal;
    double half_width = 2.0;
    double width_factor = 2.0;
    std::uint64_t seed = 1;
};

struct SimSettings {
    double dt = 1e-3;
    double t_end = 20.0;
    std::size_t log_stride = 1;
    double settle_window = 15.0;  // start of the window used for max |e| in the summary
};

// Everything a closed-loop run needs, already resolved to runtime objects.
struct Scenario {
    std::string name;
    Digraph graph{Matrix::Zero(1, 1), Vector::Ones(1)};
    std::vector<AgentModel> agents;
    LeaderModel leader;
    std::vector<Vector> agent_initial;
    Vector leader_initial;
    std::vector<std::vector<PerformanceSpec>> ppf;  // [agent][channel]
    ControllerParams controller;
    NnSettings nn;
    ControlPath path = ControlPath::Local;
    SimSettings sim;

    [[nodiscard]] std::size_t n_agents() const noexcept { return agents.size(); }
    [[nodiscard]] std::size_t channels() const noexcept { return leader.channels; }
    [[nodiscard]] std::size_t order() const noexcept { return leader.order; }
};

// ---------------------------------------------------------------------------
// Trace and summary
// ---------------------------------------------------------------------------

struct TraceSample {
    double t = 0.0;
    Vector leader;       // P * order
    Matrix states;       // N x (P * order)
    Matrix e;            // N x P neighborhood errors
    Matrix eps;          // N x P transformed errors
    Matrix rho;          // N x P funnel radius
    Matrix u;            // N x P controls
    Vector wnorm;        // N, Frobenius norms of the weight estimates
    Matrix disagreement; // N x P, x_i^1 - x_0^1
};

struct TraceLog {
    std::size_t n_agents = 0;
    std::size_t channels = 0;
    std::size_t order = 0;
    std::vector<TraceSample> samples;
};

struct RunSummary {
    bool completed = true;
    std::string failure_kind;
    std::string failure_message;
    double failure_time = std::numeric_limits<double>::quiet_NaN();
    int failure_agent = -1;
    int failure_channel = -1;

    std::size_t samples = 0;
    std::size_t envelope_violations = 0;
    double window_start = 0.0;
    Matrix max_abs_e_after;               // N x P, over samples with t >= window_start
    double max_abs_e_after_all = 0.0;
    double settling_time = std::numeric_limits<double>::infinity();  // last entry into |e| <= rho_inf
    double final_disagreement_norm = 0.0;
    double weight_norm_max = 0.0;
    std::size_t disagreement_bound_violations = 0;  // |x^1 - x_0^1| > |e| / sigma_min(L + B)

    [[nodiscard]] bool passed() const noexcept { return completed && envelope_violations == 0; }
};

struct RunResult {
    TraceLog trace;
    RunSummary summary;
};

// Counts strict funnel violations, terminal-window error maxima, settling time
// and the disagreement bound at every logged sample. sign0 per channel is
// taken from the first sample.
[[nodiscard]] inline RunSummary summarize(const TraceLog& trace, const Digraph& graph,
                                          const std::vector<std::vector<PerformanceSpec>>& ppf,
                                          double window_start) {
    RunSummary s;
    s.window_start = window_start;
    const auto n = static_cast<Eigen::Index>(trace.n_agents);
    const auto p = static_cast<Eigen::Index>(trace.channels);
    s.max_abs_e_after = Matrix::Zero(n, p);
    s.samples = trace.samples.size();
    if (trace.samples.empty()) return s;

    const double sigma = min_singular_value(laplacian_plus_pinning(graph));
    const Matrix& e0 = trace.samples.front().e;
    double last_outside = -std::numeric_limits<double>::infinity();
    bool any_outside = false;
    for (const auto& smp : trace.samples) {
        bool outside_final_set = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index c = 0; c < p; ++c) {
                const auto& spec = ppf[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
                const double e = smp.e(i, c);
                if (!check_envelope(e, smp.rho(i, c), spec, sign_of(e0(i, c)))) ++s.envelope_violations;
                if (smp.t >= window_start) s.max_abs_e_after(i, c) = std::max(s.max_abs_e_after(i, c), std::abs(e));
                if (!(std::abs(e) <= spec.rho_inf)) outside_final_set = true;
            }
        }
        if (outside_final_set) {
            any_outside = true;
            last_outside = smp.t;
        }
        if (smp.wnorm.size() > 0) s.weight_norm_max = std::max(s.weight_norm_max, smp.wnorm.maxCoeff());
        const double lhs = smp.disagreement.norm();
        const double rhs = sigma > 0.0 ? smp.e.norm() / sigma : std::numeric_limits<double>::infinity();
        if (lhs > rhs * (1.0 + 1e-12) + 1e-15) ++s.disagreement_bound_violations;
    }
    s.max_abs_e_after_all = s.max_abs_e_after.size() > 0 ? s.max_abs_e_after.maxCoeff() : 0.0;
    if (!any_outside) {
        s.settling_time = trace.samples.front().t;
    } else {
        for (const auto& smp : trace.samples) {
            if (smp.t > last_outside) {
                s.settling_time = smp.t;
                break;
            }
        }
    }
    s.final_disagreement_norm = trace.samples.back().disagreement.norm();
    return s;
}

// Header: t, x{i}_{m}_{p} (i = 0 is the leader), e{i}_{p}, eps{i}_{p}, rho{i}_{p},
// u{i}_{p}, wnorm{i}; indices are 1-based, 17 significant digits.
inline void write_trace_csv(std::ostream& os, const TraceLog& trace) {
    const std::size_t n = trace.n_agents, p = trace.channels, order = trace.order;
    os << "t";
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t m = 0; m < order; ++m)
            for (std::size_t c = 0; c < p; ++c) os << ",x" << i << '_' << m + 1 << '_' << c + 1;
    for (const char* name : {"e", "eps", "rho", "u"})
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t c = 0; c < p; ++c) os << ',' << name << i << '_' << c + 1;
    for (std::size_t i = 1; i <= n; ++i) os << ",wnorm" << i;
    os << '\n';

    os << std::setprecision(17);
    for (const auto& s : trace.samples) {
        os << s.t;
        for (Eigen::Index k = 0; k < s.leader.size(); ++k) os << ',' << s.leader(k);
        for (Eigen::Index i = 0; i < s.states.rows(); ++i)
            for (Eigen::Index k = 0; k < s.states.cols(); ++k) os << ',' << s.states(i, k);
        for (const Matrix* m : {&s.e, &s.eps, &s.rho, &s.u})
            for (Eigen::Index i = 0; i < m->rows(); ++i)
                for (Eigen::Index c = 0; c < m->cols(); ++c) os << ',' << (*m)(i, c);
        for (Eigen::Index i = 0; i < s.wnorm.size(); ++i) os << ',' << s.wnorm(i);
        os << '\n';
    }
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

// Classical fourth-order Runge-Kutta step.
template <typename Derivative>
[[nodiscard]] Vector rk4_step(Derivative&& f, const Vector& y, double t, double dt) {
    const Vector k1 = f(t, y);
    const Vector k2 = f(t + 0.5 * dt, Vector(y + 0.5 * dt * k1));
    const Vector k3 = f(t + 0.5 * dt, Vector(y + 0.5 * dt * k2));
    const Vector k4 = f(t + dt, Vector(y + dt * k3));
    Vector out = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!out.allFinite()) {
        std::ostringstream os;
        os << "rk4_step: non-finite state after step from t = " << t;
        throw NonFiniteState(os.str(), t + dt);
    }
    return out;
}

// Load-time checks on a resolved scenario. Each entry names the config path.
[[nodiscard]] inline std::vector<std::string> validate(const Scenario& sc) {
    std::vector<std::string> out;
    const std::size_t n = sc.n_agents();
    const std::size_t p = sc.channels();
    const std::size_t order = sc.order();
    if (n == 0) {
        out.push_back("agents: at least one agent is required");
        return out;
    }
    if (sc.graph.n_agents() != n) out.push_back("graph.adjacency: size must equal the number of agents");
    if (order < 1 || order + 1 > JetD::kCapacity) out.push_back("agents.order: must be between 1 and 7");
    if (p < 1) out.push_back("agents.channels: must be >= 1");
    if (!out.empty()) return out;

    if (!sc.graph.has_pinning()) out.push_back("graph.pinning: at least one agent must be pinned to the leader (b_i > 0)");
    if (!is_strongly_connected(sc.graph)) out.push_back("graph.adjacency: graph must be strongly connected");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sc.graph.in_degree(i) + sc.graph.pinning()(static_cast<Eigen::Index>(i)) > 0.0)) {
            out.push_back("graph.adjacency[" + std::to_string(i) + "]: agent receives no information (d_i + b_i = 0)");
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const std::string path = "agents.models[" + std::to_string(i) + "]";
        const auto& a = sc.agents[i];
        if (a.order != order || a.channels != p) out.push_back(path + ": order/channels differ from the leader");
        if (!a.drift) out.push_back(path + ".drift: missing");
        if (a.g_matrix.rows() != static_cast<Eigen::Index>(p) || a.g_matrix.cols() != static_cast<Eigen::Index>(p)) {
            out.push_back(path + ".input_matrix: must be P x P");
        } else if (!(Eigen::FullPivLU<Matrix>(a.g_matrix).rank() == static_cast<Eigen::Index>(p))) {
            out.push_back(path + ".input_matrix: must be invertible");
        }
    }
    if (!sc.leader.is_closed_form() && !sc.leader.drift) out.push_back("agents.leader: missing dynamics");

    if (sc.agent_initial.size() != n) out.push_back("initial.agents: need one state per agent");
    for (std::size_t i = 0; i < sc.agent_initial.size(); ++i) {
        if (sc.agent_initial[i].size() != static_cast<Eigen::Index>(p * order)) {
            out.push_back("initial.agents[" + std::to_string(i) + "]: expected " + std::to_string(p * order) + " entries");
        }
    }
    if (sc.leader_initial.size() != static_cast<Eigen::Index>(p * order)) {
        out.push_back("initial.leader: expected " + std::to_string(p * order) + " entries");
    }

    if (sc.ppf.size() != n) out.push_back("ppf: need one entry per agent");
    for (std::size_t i = 0; i < sc.ppf.size(); ++i) {
        if (sc.ppf[i].size() != p) out.push_back("ppf[" + std::to_string(i) + "]: need one entry per channel");
        for (std::size_t c = 0; c < sc.ppf[i].size(); ++c) {
            auto probs = sc.ppf[i][c].problems("ppf[" + std::to_string(i) + "][" + std::to_string(c) + "]");
            out.insert(out.end(), probs.begin(), probs.end());
        }
    }

    const auto& cp = sc.controller;
    if (!(cp.c >= 0.0)) out.push_back("controller.c: must be nonnegative");
    if (!(cp.k > 0.0)) out.push_back("controller.k: must be positive");
    if (!(cp.beta > 0.0)) out.push_back("controller.beta: must be positive");
    if (cp.lambda.size() + 1 != order) {
        out.push_back("controller.lambda: expected " + std::to_string(order > 0 ? order - 1 : 0) + " coefficients");
    } else {
        bool positive = std::all_of(cp.lambda.begin(), cp.lambda.end(), [](double v) { return v > 0.0; });
        bool hurwitz = false;
        try {
            (void)companion_matrix(cp.lambda);
            hurwitz = true;
        } catch (const NotHurwitz&) {
        }
        if (!positive || !hurwitz) out.push_back("controller.lambda: coefficients must be positive and give a Hurwitz companion matrix");
    }
    if (cp.pi_gain.size() != n) {
        out.push_back("controller.pi: need one adaptation gain per agent");
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (!(cp.pi_gain[i] > 0.0)) out.push_back("controller.pi[" + std::to_string(i) + "]: must be positive");
        }
    }

    if (sc.nn.neurons < 1) out.push_back("nn.neurons: must be >= 1");
    if (!(sc.nn.half_width > 0.0)) out.push_back("nn.half_width: must be positive");
    if (!(sc.nn.width_factor > 0.0)) out.push_back("nn.width_factor: must be positive");

    if (!(sc.sim.dt > 0.0)) out.push_back("sim.dt: must be positive");
    if (!(sc.sim.t_end > 0.0)) out.push_back("sim.t_end: must be positive");
    if (sc.sim.log_stride < 1) out.push_back("sim.log_stride: must be >= 1");
    if (!out.empty()) return out;

    // Initial neighborhood errors must start inside their funnels.
    Matrix x1(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < n; ++i) x1.row(static_cast<Eigen::Index>(i)) = sc.agent_initial[i].head(static_cast<Eigen::Index>(p)).transpose();
    const Vector x0 = sc.leader.is_closed_form() ? Vector(sc.leader.closed_form.state(0.0).head(static_cast<Eigen::Index>(p)))
                                                 : Vector(sc.leader_initial.head(static_cast<Eigen::Index>(p)));
    const Matrix e = sync_error(sc.graph, x1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < p; ++c) {
            const auto& spec = sc.ppf[i][c];
            const double ev = e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
            if (!check_envelope(ev, spec.rho0, spec, sign_of(ev))) {
                std::ostringstream os;
                os << "ppf[" << i << "][" << c << "]: initial error " << ev << " of agent " << i + 1 << " channel "
                   << c + 1 << " lies outside the initial funnel";
                out.push_back(os.str());
            }
        }
    }
    return out;
}

// Closed-loop network: agents, leader and weight estimates integrated together.
// Augmented state layout: [x_1 .. x_N | x_0 | vec(W_1) .. vec(W_N)].
class ClosedLoop {
public:
    explicit ClosedLoop(const Scenario& sc)
        : sc_(sc),
          n_(sc.n_agents()),
          p_(sc.channels()),
          order_(sc.order()),
          dim_(sc.channels() * sc.order()) {
        if (auto problems = validate(sc); !problems.empty()) throw ValidationError(std::move(problems));
        lemma_ = lemma1_quantities(sc.graph);
        for (std::size_t i = 0; i < n_; ++i) {
            d_plus_b_.push_back(sc.graph.in_degree(i) + sc.graph.pinning()(static_cast<Eigen::Index>(i)));
            bases_.push_back(make_basis(sc.nn.neurons, dim_, sc.nn.placement, sc.nn.half_width, sc.nn.width_factor,
                                        sc.nn.seed + i));
        }
        v_ = sc.nn.neurons;
        // Funnel orientation from the sign of each initial error.
        const Vector y0 = initial_state();
        const Matrix e0 = errors_of_order(y0, 0.0, 0);
        oriented_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t c = 0; c < p_; ++c)
                oriented_[i].push_back(oriented(sc.ppf[i][c], sign_of(e0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)))));
    }

    [[nodiscard]] Vector initial_state() const {
        Vector y = Vector::Zero(static_cast<Eigen::Index>(state_size()));
        for (std::size_t i = 0; i < n_; ++i) y.segment(agent_offset(i), idx(dim_)) = sc_.agent_initial[i];
        y.segment(leader_offset(), idx(dim_)) =
            sc_.leader.is_closed_form() ? sc_.leader.closed_form.state(0.0) : sc_.leader_initial;
        return y;  // weights start at zero
    }

    [[nodiscard]] std::size_t state_size() const noexcept { return n_ * dim_ + dim_ + n_ * v_ * p_; }

    struct AgentEval {
        std::vector<JetD> eps;  // per channel
        Vector e;
        Vector rho;
        Vector e_metric;
        Matrix omega;
        Vector phi;
    };

    // Steps 2-6 for every agent at (t, y).
    [[nodiscard]] std::vector<AgentEval> evaluate(double t, const Vector& y) const {
        std::vector<Matrix> e_orders;
        e_orders.reserve(order_);
        for (std::size_t m = 0; m < order_; ++m) e_orders.push_back(errors_of_order(y, t, m));

        std::vector<AgentEval> out(n_);
        std::vector<double> derivs(order_);
        for (std::size_t i = 0; i < n_; ++i) {
            auto& ev = out[i];
            ev.e.resize(idx(p_));
            ev.rho.resize(idx(p_));
            std::vector<PerformanceSpec> specs;
            for (std::size_t c = 0; c < p_; ++c) {
                const auto& spec = oriented_[i][c];
                for (std::size_t m = 0; m < order_; ++m) derivs[m] = e_orders[m](idx(i), idx(c));
                const JetD e_jet = JetD::from_derivatives(std::span<const double>(derivs));
                const JetD r_jet = rho_jet(spec, t, order_ - 1);
                try {
                    ev.eps.push_back(transform_jet(e_jet, r_jet, spec));
                } catch (const OutOfEnvelope& ex) {
                    throw OutOfEnvelope(ex.what(), t, static_cast<int>(i), static_cast<int>(c));
                }
                ev.e(idx(c)) = e_jet.value();
                ev.rho(idx(c)) = r_jet.value();
                specs.push_back(spec);
            }
            ev.e_metric = metric_error(ev.eps, sc_.controller.lambda);
            ev.omega = omega_matrix(ev.e, ev.rho, specs);
            ev.phi = basis_eval(bases_[i], Vector(y.segment(agent_offset(i), idx(dim_))));
        }
        return out;
    }

    [[nodiscard]] Matrix weights(const Vector& y, std::size_t i) const {
        return Eigen::Map<const Matrix>(y.data() + weight_offset(i), idx(v_), idx(p_));
    }

    [[nodiscard]] Matrix controls(const std::vector<AgentEval>& ev, const Vector& y) const {
        Matrix u(idx(n_), idx(p_));
        for (std::size_t i = 0; i < n_; ++i) {
            const Matrix w = weights(y, i);
            const LocalControlInputs in{ev[i].eps, ev[i].e_metric, w, ev[i].phi, ev[i].omega, d_plus_b_[i],
                                        sc_.agents[i].g_matrix};
            const Vector ui = sc_.path == ControlPath::Local ? control_signal(in, sc_.controller)
                                                             : control_signal_kron(in, sc_.controller);
            u.row(idx(i)) = ui.transpose();
        }
        return u;
    }

    // Augmented derivative with the control held at `u`; `ev` may carry a
    // precomputed evaluation at exactly (t, y).
    [[nodiscard]] Vector derivative(double t, const Vector& y, const Matrix& u,
                                    const std::vector<AgentEval>* ev = nullptr) const {
        std::vector<AgentEval> local;
        if (ev == nullptr) {
            local = evaluate(t, y);
            ev = &local;
        }
        Vector dy(y.size());
        for (std::size_t i = 0; i < n_; ++i) {
            const Vector xi = y.segment(agent_offset(i), idx(dim_));
            dy.segment(agent_offset(i), idx(dim_)) = agent_derivative(sc_.agents[i], xi, Vector(u.row(idx(i)).transpose()), t);
        }
        if (sc_.leader.is_closed_form()) {
            dy.segment(leader_offset(), idx(dim_)).setZero();
        } else {
            dy.segment(leader_offset(), idx(dim_)) =
                leader_derivative(sc_.leader, Vector(y.segment(leader_offset(), idx(dim_))), t);
        }
        const AdaptationGains base{1.0, sc_.controller.k};
        for (std::size_t i = 0; i < n_; ++i) {
            const Matrix w = weights(y, i);
            AdaptationGains gains = base;
            gains.pi_gain = sc_.controller.pi_gain[i];
            const auto& a = (*ev)[i];
            const double m_i = lemma_.m_diag(idx(i));
            const Matrix dw = sc_.path == ControlPath::Local
                                  ? weight_update_derivative(w, a.phi, a.e_metric, m_i, a.omega, d_plus_b_[i], gains)
                                  : weight_update_derivative_kron(w, a.phi, a.e_metric, m_i, a.omega, d_plus_b_[i], gains);
            dy.segment(weight_offset(i), idx(v_ * p_)) = Eigen::Map<const Vector>(dw.data(), dw.size());
        }
        return dy;
    }

    // Leader block for time t: integrated state or closed-form trajectory.
    [[nodiscard]] Vector leader_state(const Vector& y, double t) const {
        if (sc_.leader.is_closed_form()) return sc_.leader.closed_form.state(t);
        return y.segment(leader_offset(), idx(dim_));
    }

    void refresh_leader(Vector& y, double t) const {
        if (sc_.leader.is_closed_form()) y.segment(leader_offset(), idx(dim_)) = sc_.leader.closed_form.state(t);
    }

    [[nodiscard]] TraceSample sample(double t, const Vector& y, const std::vector<AgentEval>& ev, const Matrix& u) const {
        TraceSample s;
        s.t = t;
        s.leader = leader_state(y, t);
        s.states.resize(idx(n_), idx(dim_));
        s.e.resize(idx(n_), idx(p_));
        s.eps.resize(idx(n_), idx(p_));
        s.rho.resize(idx(n_), idx(p_));
        s.disagreement.resize(idx(n_), idx(p_));
        s.wnorm.resize(idx(n_));
        s.u = u;
        for (std::size_t i = 0; i < n_; ++i) {
            const auto r = idx(i);
            s.states.row(r) = y.segment(agent_offset(i), idx(dim_)).transpose();
            s.e.row(r) = ev[i].e.transpose();
            for (std::size_t c = 0; c < p_; ++c) s.eps(r, idx(c)) = ev[i].eps[c].value();
            s.rho.row(r) = ev[i].rho.transpose();
            s.disagreement.row(r) = (s.states.row(r).head(idx(p_)) - s.leader.head(idx(p_)).transpose());
            s.wnorm(r) = weights(y, i).norm();
        }
        return s;
    }

    [[nodiscard]] const Lemma1Quantities& lemma() const noexcept { return lemma_; }
    [[nodiscard]] const std::vector<RbfBasis>& bases() const noexcept { return bases_; }
    [[nodiscard]] const std::vector<std::vector<PerformanceSpec>>& oriented_specs() const noexcept { return oriented_; }

private:
    static Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }
    [[nodiscard]] Eigen::Index agent_offset(std::size_t i) const { return idx(i * dim_); }
    [[nodiscard]] Eigen::Index leader_offset() const { return idx(n_ * dim_); }
    [[nodiscard]] Eigen::Index weight_offset(std::size_t i) const { return idx(n_ * dim_ + dim_ + i * v_ * p_); }

    // Neighborhood error of derivative block m (N x P).
    [[nodiscard]] Matrix errors_of_order(const Vector& y, double t, std::size_t m) const {
        Matrix xm(idx(n_), idx(p_));
        for (std::size_t i = 0; i < n_; ++i) xm.row(idx(i)) = y.segment(agent_offset(i) + idx(m * p_), idx(p_)).transpose();
        const Vector x0 = leader_state(y, t).segment(idx(m * p_), idx(p_));
        return sc_.path == ControlPath::Local ? sync_error(sc_.graph, xm, x0) : sync_error_global(sc_.graph, xm, x0);
    }

    const Scenario& sc_;
    std::size_t n_, p_, order_, dim_, v_ = 0;
    Lemma1Quantities lemma_;
    std::vector<double> d_plus_b_;
    std::vector<RbfBasis> bases_;
    std::vector<std::vector<PerformanceSpec>> oriented_;
};

// Fixed-step closed-loop run. The control is computed once per step and held
// over the four Runge-Kutta stages; the weight law is re-evaluated at every
// stage. A funnel exit or a non-finite state ends the run and is recorded in
// the summary.
[[nodiscard]] inline RunResult run_experiment(const Scenario& sc) {
    const ClosedLoop loop(sc);
    RunResult res;
    res.trace.n_agents = sc.n_agents();
    res.trace.channels = sc.channels();
    res.trace.order = sc.order();

    const auto steps = static_cast<std::int64_t>(std::llround(sc.sim.t_end / sc.sim.dt));
    const auto stride = static_cast<std::int64_t>(sc.sim.log_stride);
    Vector y = loop.initial_state();
    std::int64_t k = 0;
    auto fail = [&](const Error& err, double t) {
        res.summary = summarize(res.trace, sc.graph, sc.ppf, sc.sim.settle_window);
        res.summary.completed = false;
        res.summary.failure_kind = err.kind();
        res.summary.failure_message = err.what();
        res.summary.failure_time = t;
    };
    try {
        for (; k <= steps; ++k) {
            const double t = static_cast<double>(k) * sc.sim.dt;
            const auto ev = loop.evaluate(t, y);
            const Matrix u = loop.controls(ev, y);
            if (k % stride == 0) res.trace.samples.push_back(loop.sample(t, y, ev, u));
            if (k == steps) break;
            bool first = true;
            y = rk4_step(
                [&](double ts, const Vector& ys) {
                    if (first) {
                        first = false;
                        return loop.derivative(ts, ys, u, &ev);
                    }
                    return loop.derivative(ts, ys, u);
                },
                y, t, sc.sim.dt);
            loop.refresh_leader(y, static_cast<double>(k + 1) * sc.sim.dt);
        }
    } catch (const OutOfEnvelope& err) {
        fail(err, err.time());
        res.summary.failure_agent = err.agent();
        res.summary.failure_channel = err.channel();
        res.summary.envelope_violations = std::max<std::size_t>(res.summary.envelope_violations, 1);
        return res;
    } catch (const NonFiniteState& err) {
        fail(err, err.time());
        return res;
    }
    res.summary = summarize(res.trace, sc.graph, sc.ppf, sc.sim.settle_window);
    return res;
}

}  // namespace ppnac
