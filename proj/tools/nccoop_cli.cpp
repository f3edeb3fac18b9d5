// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <nccoop/experiment.hpp>
#include <nccoop/version.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

namespace {

constexpr int exit_invalid_config = 2;
constexpr int exit_trial_failed = 3;
constexpr int exit_io = 4;

std::filesystem::path output_dir(const std::string& flag, const nccoop::experiment::ExperimentConfig& c) {
    if (!flag.empty()) return flag;
    if (!c.output_dir.empty()) return c.output_dir;
    if (const char* env = std::getenv("NCCOOP_OUTPUT_DIR"); env && *env) return env;
    return "results";
}

}  // namespace

int main(int argc, char** argv) {
    namespace ex = nccoop::experiment;
    CLI::App app{"Noncoherent two-cell cooperation: rate regions, power allocation and beamforming experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    std::size_t workers = 0;
    auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    run->add_option("-o,--output-dir", out_flag,
                    "Directory for the CSV and JSON results (default: config output.dir, then $NCCOOP_OUTPUT_DIR, then ./results)");
    run->add_option("-j,--workers", workers, "Worker threads (default: config workers, else 1)")->check(CLI::Range(1, 256));

    auto* validate = app.add_subcommand("validate", "Check a JSON config without running it");
    validate->add_option("config", config_path, "Experiment config (JSON)")->required();

    app.add_subcommand("version", "Print the version");

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("version")) {
        std::cout << "nccoop " << nccoop::version << '\n';
        return 0;
    }

    ex::ExperimentConfig cfg;
    try {
        cfg = ex::load_config(config_path);
    } catch (const ex::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_invalid_config;
    }
    if (app.got_subcommand("validate")) {
        std::cout << "valid\n";
        return 0;
    }

    ex::RunOutput out;
    try {
        out = ex::run_and_write(cfg, output_dir(out_flag, cfg), workers);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    }
    std::cout << out.csv.string() << '\n' << out.json.string() << '\n';
    if (out.result.failure) {
        std::cerr << "error: trial " << out.result.failure->trial << " failed: " << out.result.failure->message
                  << " (results of " << out.result.trials.size() << " earlier trials kept)\n";
        return exit_trial_failed;
    }
    return 0;
}
