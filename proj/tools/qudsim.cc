// Copyright 2026 The qudsim Authors
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

// qudsim: run, sweep or validate a quantum-undemolition experiment config.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qud/experiment.h"

namespace {

constexpr int kConfigErrorExit = 2;
constexpr int kRuntimeErrorExit = 3;

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qudsim: seeded Monte Carlo runner for measurement-undo experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<uint64_t> seed;
    unsigned workers = 1;
    std::string out_dir = ".";

    auto add_common = [&](CLI::App *sub, bool writes) {
        sub->add_option("config", config_path, "Experiment configuration (JSON)")->required();
        if (writes) {
            sub->add_option("--seed", seed, "Override master_seed");
            sub->add_option("--workers", workers, "Worker threads (results do not depend on this)")
                ->check(CLI::Range(1u, 4096u));
            sub->add_option("--out", out_dir, "Output directory");
        }
    };
    CLI::App *run = app.add_subcommand("run", "Run the experiment at the configured parameters");
    CLI::App *sweep = app.add_subcommand("sweep", "Run the configured parameter sweep");
    CLI::App *validate = app.add_subcommand("validate", "Check a configuration without running it");
    add_common(run, true);
    add_common(sweep, true);
    add_common(validate, false);

    CLI11_PARSE(app, argc, argv);

    qud::ExperimentConfig config;
    try {
        config = qud::load_config(config_path);
        if (seed) {
            config.master_seed = *seed;
        }
        if (sweep->parsed() && !config.sweep) {
            throw qud::ConfigError("sweep", "the sweep command needs a sweep specification");
        }
    } catch (const qud::ConfigError &e) {
        std::cerr << "config error in field '" << e.field() << "': " << e.what() << "\n";
        return kConfigErrorExit;
    }

    if (validate->parsed()) {
        std::cout << "ok\n";
        return 0;
    }

    qud::RunMode mode = sweep->parsed() ? qud::RunMode::kSweep : qud::RunMode::kRun;
    try {
        // Everything is computed before anything is written.
        qud::ResultFiles files = qud::run_experiment(config, mode, workers);
        std::string meta = qud::make_meta(mode, config_path, workers, seed);
        qud::write_result_files(files, meta, out_dir);
    } catch (const qud::ConfigError &e) {
        std::cerr << "config error in field '" << e.field() << "': " << e.what() << "\n";
        return kConfigErrorExit;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeErrorExit;
    }
    return 0;
}
