#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ppnac/controller.hpp"
#include "ppnac/dynamics.hpp"
#include "ppnac/errors.hpp"
#include "ppnac/graph.hpp"
#include "ppnac/nn.hpp"
#include "ppnac/ppf.hpp"
#include "ppnac/sim.hpp"

namespace ppnac {

using Json = nlohmann::ordered_json;
using Table = std::vector<std::vector<double>>;

// File-level description of a scenario. Mirrors the JSON document one to one
// so that load -> save -> load is lossless; `resolve` turns it into runtime
// objects.
struct ScenarioConfig {
    struct CustomModel {
        DriftTable drift;
        Table input_matrix;
        friend bool operator==(const CustomModel&, const CustomModel&) = default;
    };

    struct Agents {
        std::string builtin;  // "problem1", "problem2" or empty for a custom table
        Table a, b, c;        // problem2 parameter rows
        std::size_t order = 0;
        std::size_t channels = 0;
        std::vector<CustomModel> models;
        DriftTable leader_drift;
        friend bool operator==(const Agents&, const Agents&) = default;
    };

    std::string name;
    Table adjacency;
    std::vector<double> pinning;
    Agents agents;
    std::vector<double> leader_initial;
    Table agent_initial;
    std::vector<std::vector<PerformanceSpec>> ppf;
    double c = 1.0;
    double k = 0.1;
    std::vector<double> lambda;
    std::vector<double> pi;
    double beta = 1.0;
    std::string path = "local";
    std::size_t neurons = 6;
    std::string placement = "diagonal";
    double half_width = 2.0;
    double width_factor = 2.0;
    std::uint64_t seed = 1;
    double dt = 1e-3;
    double t_end = 20.0;
    std::size_t log_stride = 10;
    double settle_window = 15.0;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

namespace detail {

inline Table to_table(const Matrix& m) {
    Table t(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    return t;
}

inline std::vector<double> to_list(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline Vector to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Returns nullopt when the rows are ragged.
inline std::optional<Matrix> to_matrix(const Table& t) {
    const std::size_t cols = t.empty() ? 0 : t.front().size();
    Matrix m(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i].size() != cols) return std::nullopt;
        for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t[i][j];
    }
    return m;
}

inline const char* time_name(TimeFactor f) {
    switch (f) {
        case TimeFactor::Sin: return "sin";
        case TimeFactor::Cos: return "cos";
        case TimeFactor::None: break;
    }
    return "none";
}

// Reads typed fields out of a JSON object, recording a path-qualified message
// for every missing or mistyped entry instead of stopping at the first.
class Reader {
public:
    explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

    template <typename T>
    void get(const Json& obj, const std::string& key, const std::string& path, T& out, bool required = false) {
        if (!obj.is_object() || !obj.contains(key)) {
            if (required) problems_.push_back(path + ": required field missing");
            return;
        }
        try {
            out = obj.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            problems_.push_back(path + ": wrong type");
        }
    }

    void fail(std::string msg) { problems_.push_back(std::move(msg)); }

private:
    std::vector<std::string>& problems_;
};

inline DriftTerm parse_term(const Json& j, const std::string& path, Reader& rd) {
    DriftTerm t;
    rd.get(j, "coeff", path + ".coeff", t.coeff, true);
    rd.get(j, "powers", path + ".powers", t.powers);
    std::string time = "none";
    rd.get(j, "time", path + ".time", time);
    if (time == "sin") {
        t.time = TimeFactor::Sin;
    } else if (time == "cos") {
        t.time = TimeFactor::Cos;
    } else if (time != "none") {
        rd.fail(path + ".time: expected none, sin or cos");
    }
    rd.get(j, "omega", path + ".omega", t.omega);
    rd.get(j, "phase", path + ".phase", t.phase);
    return t;
}

inline DriftTable parse_drift(const Json& j, const std::string& path, Reader& rd) {
    DriftTable table;
    if (!j.is_array()) {
        rd.fail(path + ": expected one list of terms per channel");
        return table;
    }
    for (std::size_t p = 0; p < j.size(); ++p) {
        const std::string cp = path + "[" + std::to_string(p) + "]";
        std::vector<DriftTerm> terms;
        if (!j[p].is_array()) {
            rd.fail(cp + ": expected a list of terms");
        } else {
            for (std::size_t k = 0; k < j[p].size(); ++k) terms.push_back(parse_term(j[p][k], cp + "[" + std::to_string(k) + "]", rd));
        }
        table.push_back(std::move(terms));
    }
    return table;
}

inline Json drift_json(const DriftTable& table) {
    Json out = Json::array();
    for (const auto& channel : table) {
        Json terms = Json::array();
        for (const auto& t : channel) {
            Json jt;
            jt["coeff"] = t.coeff;
            jt["powers"] = t.powers;
            jt["time"] = time_name(t.time);
            jt["omega"] = t.omega;
            jt["phase"] = t.phase;
            terms.push_back(std::move(jt));
        }
        out.push_back(std::move(terms));
    }
    return out;
}

inline PerformanceSpec parse_spec(const Json& j, const std::string& path, Reader& rd) {
    PerformanceSpec s;
    if (!j.is_object()) {
        rd.fail(path + ": expected an object");
        return s;
    }
    rd.get(j, "rho0", path + ".rho0", s.rho0, true);
    rd.get(j, "rho_inf", path + ".rho_inf", s.rho_inf, true);
    rd.get(j, "ell", path + ".ell", s.ell, true);
    if (j.contains("delta")) {
        rd.get(j, "delta", path + ".delta", s.delta_bar);
        s.delta_under = s.delta_bar;
    }
    rd.get(j, "delta_bar", path + ".delta_bar", s.delta_bar, !j.contains("delta"));
    rd.get(j, "delta_under", path + ".delta_under", s.delta_under, !j.contains("delta"));
    return s;
}

inline Json spec_json(const PerformanceSpec& s) {
    Json j;
    j["rho0"] = s.rho0;
    j["rho_inf"] = s.rho_inf;
    j["ell"] = s.ell;
    j["delta_bar"] = s.delta_bar;
    j["delta_under"] = s.delta_under;
    return j;
}

inline std::pair<std::size_t, std::size_t> builtin_shape(const std::string& name) {
    if (name == "problem1") return {3, 1};
    if (name == "problem2") return {2, 2};
    return {0, 0};
}

}  // namespace detail

[[nodiscard]] inline std::vector<std::string> builtin_names() { return {"problem1", "problem2"}; }

// Shipped case-study parameter sets.
[[nodiscard]] inline ScenarioConfig builtin_config(const std::string& name) {
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.agents.builtin = name;
    if (name == "problem1") {
        const auto setup = builtin_problem1();
        cfg.adjacency = detail::to_table(setup.graph.adjacency());
        cfg.pinning = detail::to_list(setup.graph.pinning());
        for (const auto& x : setup.agent_initial) cfg.agent_initial.push_back(detail::to_list(x));
        cfg.leader_initial = detail::to_list(setup.leader_initial);
        cfg.ppf.assign(5, {PerformanceSpec{4.0, 0.03, 0.6, 4.0, 4.0}});
        cfg.c = 30.0;
        cfg.k = 0.1;
        cfg.lambda = default_lambda(3);
        cfg.pi.assign(5, 0.05);
        cfg.neurons = 6;
    } else if (name == "problem2") {
        const auto setup = builtin_problem2();
        const auto params = problem2::default_params();
        cfg.adjacency = detail::to_table(setup.graph.adjacency());
        cfg.pinning = detail::to_list(setup.graph.pinning());
        cfg.agents.a = detail::to_table(params.a);
        cfg.agents.b = detail::to_table(params.b);
        cfg.agents.c = detail::to_table(params.c);
        for (const auto& x : setup.agent_initial) cfg.agent_initial.push_back(detail::to_list(x));
        cfg.leader_initial = detail::to_list(setup.leader_initial);
        cfg.ppf.assign(5, std::vector<PerformanceSpec>(2, PerformanceSpec{6.0, 0.03, 0.6, 6.0, 6.0}));
        cfg.c = 300.0;
        cfg.k = 0.1;
        cfg.lambda = default_lambda(2);
        cfg.pi.assign(5, 0.05);
        cfg.neurons = 50;
        cfg.placement = "lhs";
        cfg.dt = 2.5e-4;
        cfg.log_stride = 40;
    } else {
        throw ValidationError({"agents.builtin: unknown builtin '" + name + "'"});
    }
    return cfg;
}

[[nodiscard]] inline Json to_json(const ScenarioConfig& cfg) {
    Json j;
    j["name"] = cfg.name;
    j["graph"]["adjacency"] = cfg.adjacency;
    j["graph"]["pinning"] = cfg.pinning;
    Json& a = j["agents"];
    if (!cfg.agents.builtin.empty()) {
        a["builtin"] = cfg.agents.builtin;
        if (cfg.agents.builtin == "problem2") {
            a["params"]["a"] = cfg.agents.a;
            a["params"]["b"] = cfg.agents.b;
            a["params"]["c"] = cfg.agents.c;
        }
    } else {
        a["order"] = cfg.agents.order;
        a["channels"] = cfg.agents.channels;
        a["models"] = Json::array();
        for (const auto& m : cfg.agents.models) {
            Json jm;
            jm["drift"] = detail::drift_json(m.drift);
            jm["input_matrix"] = m.input_matrix;
            a["models"].push_back(std::move(jm));
        }
        a["leader"]["drift"] = detail::drift_json(cfg.agents.leader_drift);
    }
    j["initial"]["leader"] = cfg.leader_initial;
    j["initial"]["agents"] = cfg.agent_initial;
    j["ppf"] = Json::array();
    for (const auto& row : cfg.ppf) {
        Json jr = Json::array();
        for (const auto& s : row) jr.push_back(detail::spec_json(s));
        j["ppf"].push_back(std::move(jr));
    }
    Json& c = j["controller"];
    c["c"] = cfg.c;
    c["k"] = cfg.k;
    c["lambda"] = cfg.lambda;
    c["pi"] = cfg.pi;
    c["beta"] = cfg.beta;
    c["path"] = cfg.path;
    Json& nn = j["nn"];
    nn["neurons"] = cfg.neurons;
    nn["placement"] = cfg.placement;
    nn["half_width"] = cfg.half_width;
    nn["width_factor"] = cfg.width_factor;
    nn["seed"] = cfg.seed;
    Json& s = j["sim"];
    s["dt"] = cfg.dt;
    s["t_end"] = cfg.t_end;
    s["log_stride"] = cfg.log_stride;
    s["settle_window"] = cfg.settle_window;
    return j;
}

// Parses a document. Fields omitted from a builtin scenario fall back to the
// builtin defaults; all type errors are collected before throwing.
[[nodiscard]] inline ScenarioConfig from_json(const Json& j) {
    std::vector<std::string> problems;
    detail::Reader rd(problems);
    if (!j.is_object()) throw ValidationError({"<root>: expected a JSON object"});

    ScenarioConfig cfg;
    const Json agents = j.value("agents", Json::object());
    std::string builtin;
    rd.get(agents, "builtin", "agents.builtin", builtin);
    if (!builtin.empty()) {
        if (builtin != "problem1" && builtin != "problem2") {
            problems.push_back("agents.builtin: unknown builtin '" + builtin + "'");
            throw ValidationError(std::move(problems));
        }
        cfg = builtin_config(builtin);
        if (agents.contains("params")) {
            const Json& p = agents["params"];
            rd.get(p, "a", "agents.params.a", cfg.agents.a);
            rd.get(p, "b", "agents.params.b", cfg.agents.b);
            rd.get(p, "c", "agents.params.c", cfg.agents.c);
        }
    } else {
        cfg.agents.builtin.clear();
        rd.get(agents, "order", "agents.order", cfg.agents.order, true);
        rd.get(agents, "channels", "agents.channels", cfg.agents.channels, true);
        if (!agents.contains("models") || !agents["models"].is_array()) {
            problems.push_back("agents.models: required list of agent models missing");
        } else {
            for (std::size_t i = 0; i < agents["models"].size(); ++i) {
                const std::string path = "agents.models[" + std::to_string(i) + "]";
                const Json& jm = agents["models"][i];
                ScenarioConfig::CustomModel m;
                if (jm.contains("drift")) m.drift = detail::parse_drift(jm["drift"], path + ".drift", rd);
                else problems.push_back(path + ".drift: required field missing");
                rd.get(jm, "input_matrix", path + ".input_matrix", m.input_matrix, true);
                cfg.agents.models.push_back(std::move(m));
            }
        }
        if (agents.contains("leader") && agents["leader"].contains("drift")) {
            cfg.agents.leader_drift = detail::parse_drift(agents["leader"]["drift"], "agents.leader.drift", rd);
        } else {
            problems.push_back("agents.leader.drift: required field missing");
        }
    }

    rd.get(j, "name", "name", cfg.name);
    const bool custom = builtin.empty();
    const Json graph = j.value("graph", Json::object());
    rd.get(graph, "adjacency", "graph.adjacency", cfg.adjacency, custom);
    rd.get(graph, "pinning", "graph.pinning", cfg.pinning, custom);
    const Json initial = j.value("initial", Json::object());
    rd.get(initial, "leader", "initial.leader", cfg.leader_initial, custom);
    rd.get(initial, "agents", "initial.agents", cfg.agent_initial, custom);

    // ppf: one object for every agent/channel, or [agent][channel] table, or
    // one object per agent applied to all its channels.
    if (j.contains("ppf")) {
        const Json& jp = j["ppf"];
        const std::size_t n = cfg.adjacency.size();
        const std::size_t p = custom ? cfg.agents.channels : detail::builtin_shape(builtin).second;
        cfg.ppf.clear();
        if (jp.is_object()) {
            const auto s = detail::parse_spec(jp, "ppf", rd);
            cfg.ppf.assign(n, std::vector<PerformanceSpec>(p, s));
        } else if (jp.is_array()) {
            for (std::size_t i = 0; i < jp.size(); ++i) {
                const std::string path = "ppf[" + std::to_string(i) + "]";
                std::vector<PerformanceSpec> row;
                if (jp[i].is_object()) {
                    row.assign(p, detail::parse_spec(jp[i], path, rd));
                } else if (jp[i].is_array()) {
                    for (std::size_t c = 0; c < jp[i].size(); ++c)
                        row.push_back(detail::parse_spec(jp[i][c], path + "[" + std::to_string(c) + "]", rd));
                } else {
                    problems.push_back(path + ": expected an object or a list of objects");
                }
                cfg.ppf.push_back(std::move(row));
            }
        } else {
            problems.push_back("ppf: expected an object or a table");
        }
    } else if (custom) {
        problems.push_back("ppf: required field missing");
    }

    const Json ctl = j.value("controller", Json::object());
    rd.get(ctl, "c", "controller.c", cfg.c, custom);
    rd.get(ctl, "k", "controller.k", cfg.k, custom);
    if (custom) cfg.lambda = default_lambda(cfg.agents.order);
    rd.get(ctl, "lambda", "controller.lambda", cfg.lambda);
    if (ctl.contains("pi") && ctl["pi"].is_number()) {
        cfg.pi.assign(cfg.adjacency.size(), ctl["pi"].get<double>());
    } else {
        rd.get(ctl, "pi", "controller.pi", cfg.pi, custom);
    }
    rd.get(ctl, "beta", "controller.beta", cfg.beta);
    rd.get(ctl, "path", "controller.path", cfg.path);
    if (cfg.path != "local" && cfg.path != "kronecker") problems.push_back("controller.path: expected local or kronecker");

    const Json nn = j.value("nn", Json::object());
    rd.get(nn, "neurons", "nn.neurons", cfg.neurons);
    rd.get(nn, "placement", "nn.placement", cfg.placement);
    if (cfg.placement != "diagonal" && cfg.placement != "lhs") problems.push_back("nn.placement: expected diagonal or lhs");
    rd.get(nn, "half_width", "nn.half_width", cfg.half_width);
    rd.get(nn, "width_factor", "nn.width_factor", cfg.width_factor);
    rd.get(nn, "seed", "nn.seed", cfg.seed);

    const Json sim = j.value("sim", Json::object());
    rd.get(sim, "dt", "sim.dt", cfg.dt);
    rd.get(sim, "t_end", "sim.t_end", cfg.t_end);
    rd.get(sim, "log_stride", "sim.log_stride", cfg.log_stride);
    rd.get(sim, "settle_window", "sim.settle_window", cfg.settle_window);

    if (!problems.empty()) throw ValidationError(std::move(problems));
    return cfg;
}

// Builds runtime objects and runs every load-time check; all failures are
// reported together.
[[nodiscard]] inline Scenario resolve(const ScenarioConfig& cfg) {
    std::vector<std::string> problems;
    Scenario sc;
    sc.name = cfg.name;

    const auto adj = detail::to_matrix(cfg.adjacency);
    if (!adj || adj->rows() != adj->cols() || adj->rows() == 0) {
        problems.push_back("graph.adjacency: must be a nonempty square matrix");
    } else if (cfg.pinning.size() != static_cast<std::size_t>(adj->rows())) {
        problems.push_back("graph.pinning: must have one entry per agent");
    } else {
        try {
            sc.graph = Digraph(*adj, detail::to_vector(cfg.pinning));
        } catch (const ValidationError& e) {
            problems.insert(problems.end(), e.problems().begin(), e.problems().end());
        }
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
    const std::size_t n = sc.graph.n_agents();

    const auto& ag = cfg.agents;
    if (ag.builtin == "problem1") {
        if (n != 5) problems.push_back("graph.adjacency: builtin problem1 has 5 agents");
        sc.agents = problem1_agents();
        sc.leader = problem1_leader();
    } else if (ag.builtin == "problem2") {
        if (n != 5) problems.push_back("graph.adjacency: builtin problem2 has 5 agents");
        problem2::Params params;
        const auto a = detail::to_matrix(ag.a), b = detail::to_matrix(ag.b), c = detail::to_matrix(ag.c);
        if (!a || !b || !c || a->rows() != 5 || b->rows() != 5 || c->rows() != 5 || a->cols() != 2 ||
            b->cols() != 2 || c->cols() != 2) {
            problems.push_back("agents.params: a, b and c must be 5 x 2 tables");
        } else {
            params.a = *a;
            params.b = *b;
            params.c = *c;
            sc.agents = problem2_agents(params);
        }
        sc.leader = problem2::leader();
    } else {
        if (ag.order < 1) problems.push_back("agents.order: must be >= 1");
        if (ag.channels < 1) problems.push_back("agents.channels: must be >= 1");
        if (ag.models.size() != n) problems.push_back("agents.models: need one model per agent");
        const std::size_t dim = ag.order * ag.channels;
        auto check_table = [&](const DriftTable& t, const std::string& path) {
            if (t.size() != ag.channels) problems.push_back(path + ": need one term list per channel");
            for (std::size_t p = 0; p < t.size(); ++p)
                for (std::size_t k = 0; k < t[p].size(); ++k)
                    if (t[p][k].powers.size() > dim)
                        problems.push_back(path + "[" + std::to_string(p) + "][" + std::to_string(k) +
                                           "].powers: more exponents than state entries");
        };
        for (std::size_t i = 0; i < ag.models.size(); ++i) {
            const std::string path = "agents.models[" + std::to_string(i) + "]";
            check_table(ag.models[i].drift, path + ".drift");
            const auto g = detail::to_matrix(ag.models[i].input_matrix);
            Matrix gm = g ? *g : Matrix();
            if (!g) problems.push_back(path + ".input_matrix: ragged rows");
            sc.agents.push_back(AgentModel{ag.order, ag.channels, make_table_drift(ag.models[i].drift), gm});
        }
        check_table(ag.leader_drift, "agents.leader.drift");
        sc.leader.order = ag.order;
        sc.leader.channels = ag.channels;
        sc.leader.drift = make_table_drift(ag.leader_drift);
    }

    for (const auto& x : cfg.agent_initial) sc.agent_initial.push_back(detail::to_vector(x));
    sc.leader_initial = detail::to_vector(cfg.leader_initial);
    sc.ppf = cfg.ppf;
    sc.controller.c = cfg.c;
    sc.controller.k = cfg.k;
    sc.controller.lambda = cfg.lambda;
    sc.controller.pi_gain = cfg.pi;
    sc.controller.beta = cfg.beta;
    sc.path = cfg.path == "kronecker" ? ControlPath::Kronecker : ControlPath::Local;
    sc.nn.neurons = cfg.neurons;
    sc.nn.placement = cfg.placement == "lhs" ? CenterPlacement::LatinHypercube : CenterPlacement::Diagonal;
    sc.nn.half_width = cfg.half_width;
    sc.nn.width_factor = cfg.width_factor;
    sc.nn.seed = cfg.seed;
    sc.sim.dt = cfg.dt;
    sc.sim.t_end = cfg.t_end;
    sc.sim.log_stride = cfg.log_stride;
    sc.sim.settle_window = cfg.settle_window;

    if (problems.empty()) problems = validate(sc);
    if (!problems.empty()) throw ValidationError(std::move(problems));
    return sc;
}

// --override dotted.path=value. The value is read as JSON when it parses and
// as a plain string otherwise; list indices are written as path.0.x.
inline void apply_override(Json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("override '" + assignment + "': expected key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    Json value = Json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    Json* node = &doc;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string& p = parts[i];
        const bool last = i + 1 == parts.size();
        if (node->is_array()) {
            std::size_t pos = 0;
            std::size_t index = 0;
            try {
                index = std::stoul(p, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != p.size() || index >= node->size()) throw ParseError("override '" + key + "': bad index '" + p + "'");
            node = &(*node)[index];
        } else {
            if (!node->is_object()) *node = Json::object();
            node = &(*node)[p];
        }
        if (last) *node = value;
    }
}

[[nodiscard]] inline Json parse_document(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

// Builtin name or file path to a normalized document (builtins are expanded so
// that overrides apply to every field).
[[nodiscard]] inline Json scenario_document(const std::string& name_or_path) {
    for (const auto& b : builtin_names())
        if (name_or_path == b) return to_json(builtin_config(b));
    std::ifstream in(name_or_path);
    if (!in) throw ParseError("cannot open scenario file '" + name_or_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_document(buf.str(), name_or_path);
}

[[nodiscard]] inline ScenarioConfig load_config(const std::string& name_or_path,
                                                const std::vector<std::string>& overrides = {}) {
    Json doc = scenario_document(name_or_path);
    for (const auto& o : overrides) apply_override(doc, o);
    return from_json(doc);
}

[[nodiscard]] inline Scenario load_scenario(const std::string& name_or_path,
                                            const std::vector<std::string>& overrides = {}) {
    return resolve(load_config(name_or_path, overrides));
}

inline void save_config(const ScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write scenario file '" + path + "'");
    out << to_json(cfg).dump(2) << '\n';
}

}  // namespace ppnac
