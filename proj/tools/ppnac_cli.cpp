#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ppnac/report.hpp"
#include "ppnac/scenario.hpp"
#include "ppnac/sim.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitGain = 4;

void print_problems(const ppnac::ValidationError& e) {
    std::cerr << "scenario rejected:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
}

std::string default_out_dir() {
    if (const char* env = std::getenv("PPNAC_OUT_DIR"); env != nullptr && *env != '\0') return env;
    return "out";
}

int cmd_run(const std::string& scenario, std::string out_dir, const std::vector<std::string>& overrides,
            bool save_resolved) {
    ppnac::ScenarioConfig cfg;
    ppnac::Scenario sc;
    try {
        cfg = ppnac::load_config(scenario, overrides);
        sc = ppnac::resolve(cfg);
    } catch (const ppnac::ValidationError& e) {
        print_problems(e);
        return kExitValidation;
    } catch (const ppnac::Error& e) {
        std::cerr << e.kind() << ": " << e.what() << '\n';
        return kExitValidation;
    }

    if (out_dir.empty()) out_dir = default_out_dir();
    fs::create_directories(out_dir);
    if (save_resolved) ppnac::save_config(cfg, (fs::path(out_dir) / "scenario.json").string());

    const auto result = ppnac::run_experiment(sc);
    {
        std::ofstream csv(fs::path(out_dir) / "trace.csv");
        ppnac::write_trace_csv(csv, result.trace);
    }
    auto summary = ppnac::summary_json(result.summary);
    summary["scenario"] = cfg.name;
    {
        std::ofstream js(fs::path(out_dir) / "summary.json");
        js << summary.dump(2) << '\n';
    }
    std::cout << summary.dump(2) << '\n';
    return result.summary.passed() ? kExitOk : kExitRuntime;
}

int cmd_check_gains(const std::string& scenario, const std::string& bounds_path,
                    const std::vector<std::string>& overrides) {
    ppnac::Scenario sc;
    ppnac::BoundsFile bounds;
    try {
        sc = ppnac::load_scenario(scenario, overrides);
        std::ifstream in(bounds_path);
        if (!in) throw ppnac::ParseError("cannot open bounds file '" + bounds_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        bounds = ppnac::parse_bounds(ppnac::parse_document(buf.str(), bounds_path));
    } catch (const ppnac::ValidationError& e) {
        print_problems(e);
        return kExitValidation;
    } catch (const ppnac::Error& e) {
        std::cerr << e.kind() << ": " << e.what() << '\n';
        return kExitValidation;
    }
    try {
        const auto slope = bounds.slope ? *bounds.slope : ppnac::initial_slope_estimate(sc);
        const auto report = ppnac::verify_gains(sc.graph, sc.controller, bounds.bounds, slope);
        ppnac::write_gain_report_csv(std::cout, report);
        return report.satisfied() ? kExitOk : kExitGain;
    } catch (const ppnac::MissingBounds& e) {
        std::cerr << e.kind() << ": " << e.what() << '\n';
        return kExitValidation;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neuro-adaptive prescribed-performance cooperative tracking simulator"};
    app.require_subcommand(1);

    std::string scenario;
    std::string out_dir;
    std::string bounds;
    std::vector<std::string> overrides;
    bool save_resolved = false;

    auto* run = app.add_subcommand("run", "simulate a scenario and write trace.csv + summary.json");
    run->add_option("--scenario", scenario, "builtin name or scenario JSON path")->required();
    run->add_option("--out", out_dir, "output directory (default: $PPNAC_OUT_DIR or ./out)");
    run->add_option("--override", overrides, "dotted.path=value, value parsed as JSON when possible");
    run->add_flag("--save-scenario", save_resolved, "also write the resolved scenario.json");

    auto* gains = app.add_subcommand("check-gains", "evaluate the gain condition and Sylvester test");
    gains->add_option("--scenario", scenario, "builtin name or scenario JSON path")->required();
    gains->add_option("--bounds", bounds, "bounds JSON (phi_max, w_max, t_max, optional sigma_min_R/sigma_max_R)")
        ->required();
    gains->add_option("--override", overrides, "dotted.path=value");

    auto* list = app.add_subcommand("list-builtins", "print builtin scenario names");
    auto* dump = app.add_subcommand("dump", "print a builtin or file scenario as normalized JSON");
    dump->add_option("--scenario", scenario, "builtin name or scenario JSON path")->required();
    dump->add_option("--override", overrides, "dotted.path=value");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(scenario, out_dir, overrides, save_resolved);
    if (gains->parsed()) return cmd_check_gains(scenario, bounds, overrides);
    if (list->parsed()) {
        for (const auto& n : ppnac::builtin_names()) std::cout << n << '\n';
        return kExitOk;
    }
    if (dump->parsed()) {
        try {
            const auto cfg = ppnac::load_config(scenario, overrides);
            (void)ppnac::resolve(cfg);
            std::cout << ppnac::to_json(cfg).dump(2) << '\n';
        } catch (const ppnac::ValidationError& e) {
            print_problems(e);
            return kExitValidation;
        } catch (const ppnac::Error& e) {
            std::cerr << e.kind() << ": " << e.what() << '\n';
            return kExitValidation;
        }
    }
    return kExitOk;
}
