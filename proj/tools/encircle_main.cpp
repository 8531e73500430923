// Scenario runner and verifier for the encirclement library.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "encircle/metrics.hpp"
#include "encircle/simulator.hpp"
#include "../tests/acceptance/acceptance.hpp"

namespace {

namespace fs = std::filesystem;
using namespace encircle;

std::string resolve_scenario(const std::string& name) {
    if (fs::exists(name)) return name;
    const std::string builtin = accept::scenario_dir() + "/" + name + ".json";
    if (fs::exists(builtin)) return builtin;
    throw ConfigError("scenario not found: " + name + " (also tried " + builtin + ")");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string default_out_dir() {
    if (const char* env = std::getenv("ENCIRCLE_OUT")) return env;
    return "out";
}

int write_artifacts(const Scenario& scenario, const SimLog& log, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const RunMetrics m = compute_metrics(log, scenario);
    write_states_csv(log, out_dir + "/states.csv");
    write_errors_csv(log, out_dir + "/errors.csv", scenario.controller.rho_star, m.omega_target);
    write_messages_csv(log, out_dir + "/messages.csv");
    if (!scenario.estimator.oracle_globals) write_estimates_csv(log, out_dir + "/estimates.csv");
    if (scenario.output.distances) write_distances_csv(log, out_dir + "/distances.csv");
    if (scenario.output.message_trace)
        write_message_trace_csv(log, out_dir + "/message_trace.csv");
    const std::string summary = summary_text(m, log, scenario);
    std::ofstream(out_dir + "/summary.txt") << summary;
    std::cout << summary;
    return 0;
}

int cmd_run(const std::string& scenario_arg, const std::string& out_dir,
            const std::vector<std::string>& overrides, long seed, bool have_seed) {
    std::string text = read_file(resolve_scenario(scenario_arg));
    for (const std::string& kv : overrides) text = apply_override(text, kv);
    if (have_seed) text = apply_override(text, "seed=" + std::to_string(seed));
    const Scenario scenario = parse_scenario(text);
    const SimLog log = run_scenario(scenario);
    return write_artifacts(scenario, log, out_dir);
}

int cmd_verify(const std::string& filter) {
    const auto results = accept::run_acceptance(filter);
    bool all = !results.empty();
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << r.number << ": " << r.name
                  << " — " << r.detail << "\n";
        all = all && r.passed;
    }
    if (results.empty()) {
        std::cout << "no criteria matched the filter\n";
        return 2;
    }
    return all ? 0 : 1;
}

int cmd_sweep(const std::string& scenario_arg, const std::string& param,
              const std::string& values_csv, const std::string& out_dir) {
    const std::string base = read_file(resolve_scenario(scenario_arg));
    std::vector<std::string> values;
    std::stringstream ss(values_csv);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(item);
    if (values.empty()) throw ConfigError("sweep needs at least one value");

    std::cout << param << ",final_rho_error,final_phase_error,final_phi_rate_error,"
                 "min_pair_distance,per_robot_rate_max,total_message_rate\n";
    for (const std::string& value : values) {
        const std::string text = apply_override(base, param + "=" + value);
        const Scenario scenario = parse_scenario(text);
        const SimLog log = run_scenario(scenario);
        const RunMetrics m = compute_metrics(log, scenario);
        std::cout << value << ',' << m.final_rho_error << ',' << m.final_phase_error << ','
                  << m.final_phi_rate_error << ',' << m.min_pair_distance << ','
                  << m.per_robot_rate_max << ',' << m.total_message_rate << "\n";
        if (!out_dir.empty()) {
            const std::string run_dir = out_dir + "/" + param + "_" + value;
            write_artifacts(scenario, log, run_dir);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentralized multi-robot target encirclement simulator"};
    app.require_subcommand(1);

    std::string scenario_arg, out_dir = default_out_dir(), filter;
    std::vector<std::string> overrides;
    long seed = 0;
    bool have_seed = false;

    auto* run = app.add_subcommand("run", "run a scenario and write CSV logs");
    run->add_option("scenario", scenario_arg, "scenario file or built-in name")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--override", overrides, "key.path=value override (repeatable)");
    auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");

    auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
    verify->add_option("--filter", filter, "only criteria whose name contains this");

    std::string param, values_csv;
    auto* sweep = app.add_subcommand("sweep", "re-run a scenario over parameter values");
    sweep->add_option("scenario", scenario_arg, "scenario file or built-in name")->required();
    sweep->add_option("--param", param, "dotted key path to vary")->required();
    sweep->add_option("--values", values_csv, "comma-separated values")->required();
    sweep->add_option("--out", out_dir, "per-run artifact directory (optional)");

    try {
        app.parse(argc, argv);
        have_seed = seed_opt->count() > 0;
        if (run->parsed()) return cmd_run(scenario_arg, out_dir, overrides, seed, have_seed);
        if (verify->parsed()) return cmd_verify(filter);
        if (sweep->parsed())
            return cmd_sweep(scenario_arg, param, values_csv,
                             sweep->count("--out") ? out_dir : "");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const encircle::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
