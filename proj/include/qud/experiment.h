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

#ifndef QUD_EXPERIMENT_H
#define QUD_EXPERIMENT_H

// Batch experiment runner behind the qudsim CLI.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qud/dqd.h"
#include "qud/phase_qubit.h"
#include "qud/state.h"
#include "qud/undo_dqd.h"

namespace qud {

/// Invalid configuration; field() is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
   public:
    ConfigError(std::string field, const std::string &message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string &field() const { return field_; }

   private:
    std::string field_;
};

enum class SystemKind { kDqd, kPhase };

struct SweepSpec {
    std::string parameter;
    double start = 0.0;
    double stop = 0.0;
    int steps = 1;

    double value(int k) const { return steps == 1 ? start : start + (stop - start) * k / (steps - 1); }
};

struct ExperimentConfig {
    SystemKind system = SystemKind::kDqd;
    std::vector<QubitState> initial_states;
    uint64_t n_attempts = 1;
    uint64_t master_seed = 0;
    std::optional<SweepSpec> sweep;

    // Charge qubit. Times are in units of t_m.
    std::optional<double> r0;
    std::optional<double> t1;
    double timeout = 50.0;
    double dt = 0.01;
    double i0 = 0.0;
    double delta_i = 1.0;
    double s_i = 0.5;
    CrossingDetection crossing = CrossingDetection::kBrownianBridge;

    // Phase qubit.
    double gamma_t = 0.0;
    double phi = 0.0;
    double t_low = 1.0;
    double gamma_ratio = std::numeric_limits<double>::infinity();

    DqdDetectorParams detector() const;
    PhaseQubitParams phase_params() const;
};

/// Parses and fully validates a JSON configuration. Throws ConfigError.
ExperimentConfig parse_config(const std::string &json_text);
ExperimentConfig load_config(const std::filesystem::path &path);

enum class RunMode { kRun, kSweep };

/// Deterministic result files. meta.json (timestamps, worker count) is
/// produced separately by make_meta.
struct ResultFiles {
    std::string summary_json;
    std::optional<std::string> sweep_csv;
};

/// Executes the experiment. The output depends only on the configuration,
/// never on `workers`.
ResultFiles run_experiment(const ExperimentConfig &config, RunMode mode, unsigned workers = 1);

std::string make_meta(RunMode mode, const std::string &config_path, unsigned workers,
                      std::optional<uint64_t> seed_override);

/// Writes summary.json, sweep.csv (when present) and meta.json into dir.
void write_result_files(const ResultFiles &files, const std::string &meta_json, const std::filesystem::path &dir);

/// "%.17g"; "nan" for NaN.
std::string format_csv_number(double x);

}  // namespace qud

#endif
