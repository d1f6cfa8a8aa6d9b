// Copyright 2026 The ptrlab developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ptrlab/scenario.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& scenario, int d, bool d_set,
                std::uint64_t seed, bool seed_set, std::int64_t shots, bool shots_set,
                const std::string& gamma, const std::string& counter_dim,
                const std::string& format, const std::string& output) {
    ptrlab::ScenarioConfig config;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config file '" << config_path << "'\n";
            return 2;
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        config = ptrlab::parse_config(buffer.str());
    } else if (scenario.empty()) {
        std::cerr << "error: provide a config file or --scenario\n";
        return 2;
    }

    // Flags override the config file.
    if (!scenario.empty()) config.scenario = ptrlab::scenario_from_name(scenario);
    if (d_set) {
        config.d = d;
        ptrlab::check_dimension(config.d);
    }
    if (seed_set) config.seed = seed;
    if (shots_set) {
        if (shots < 0) throw std::invalid_argument("--shots must be >= 0");
        config.shots = shots;
    }
    if (!gamma.empty()) {
        if (gamma == "ones")
            config.gamma_kind = ptrlab::GammaKind::ones;
        else if (gamma == "identity")
            config.gamma_kind = ptrlab::GammaKind::identity;
        else
            throw std::invalid_argument("--gamma must be 'ones' or 'identity'");
    }
    if (!counter_dim.empty()) {
        if (counter_dim == "d")
            config.counter_dim_plus_one = false;
        else if (counter_dim == "d+1" || counter_dim == "d_plus_1")
            config.counter_dim_plus_one = true;
        else
            throw std::invalid_argument("--counter-dim must be 'd' or 'd+1'");
    }
    if (!output.empty()) config.output_path = output;

    // The environment variable wins over both config file and flags.
    if (const char* env_seed = std::getenv("PTRLAB_SEED")) {
        try {
            config.seed = std::stoull(env_seed);
        } catch (const std::exception&) {
            std::cerr << "error: PTRLAB_SEED is not a valid seed\n";
            return 2;
        }
    }

    const ptrlab::Report report = ptrlab::run_scenario(config);
    const std::string rendered = format == "json" ? ptrlab::emit_report_json(report)
                                                  : ptrlab::emit_report_table(report);

    if (config.output_path.empty()) {
        std::cout << rendered;
    } else {
        std::ofstream out(config.output_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write output file '" << config.output_path << "'\n";
            return 2;
        }
        out << rendered;
    }
    return report.aggregate_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qudit spin/pointer measurement-model scenario runner"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a scenario and emit a verification report");
    std::string config_path;
    run->add_option("config", config_path, "JSON config file path");
    std::string scenario;
    run->add_option("--scenario", scenario, "Scenario name (see list-scenarios)");
    int d = 3;
    auto* d_opt = run->add_option("--d", d, "Qudit dimension (2..10)");
    std::uint64_t seed = 0;
    auto* seed_opt = run->add_option("--seed", seed, "RNG seed");
    std::int64_t shots = 10000;
    auto* shots_opt = run->add_option("--shots", shots, "Sampling shots (0 = analytic only)");
    std::string gamma;
    run->add_option("--gamma", gamma, "Coherence Gram preset: ones|identity");
    std::string counter_dim;
    run->add_option("--counter-dim", counter_dim, "Counter dimension: d|d+1");
    std::string format = "table";
    run->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"json", "table"}));
    std::string output;
    run->add_option("--output", output, "Write the report to this path instead of stdout");

    auto* list = app.add_subcommand("list-scenarios", "List scenario names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& name : ptrlab::scenario_names()) std::cout << name << "\n";
            return 0;
        }
        return run_command(config_path, scenario, d, d_opt->count() > 0, seed,
                           seed_opt->count() > 0, shots, shots_opt->count() > 0, gamma,
                           counter_dim, format, output);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
