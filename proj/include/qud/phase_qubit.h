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

#ifndef QUD_PHASE_QUBIT_H
#define QUD_PHASE_QUBIT_H

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include "qud/outcome.h"
#include "qud/rng.h"
#include "qud/state.h"
#include "qud/stats.h"

namespace qud {

/// Barrier lowering of a superconducting phase qubit: |2> tunnels out at
/// rate gamma for t_low, |1> at rate gamma / gamma_ratio (never, by default).
struct PhaseQubitParams {
    double gamma = 1.0;
    double t_low = 1.0;
    double phi = 0.0;
    double gamma_ratio = std::numeric_limits<double>::infinity();

    double strength() const { return gamma * t_low; }
    /// Equivalent charge-qubit measurement result.
    double equivalent_result() const { return strength() / 2.0; }
    /// Probability that |2> does not tunnel out during one lowering.
    double survival_two() const { return std::exp(-strength()); }
    double survival_one() const;

    /// Throws std::invalid_argument for negative or non-finite values, or
    /// gamma_ratio < 1.
    void validate() const;
};

struct PhaseMeasurementOutcome {
    bool tunneled = false;
    /// Set only when the qubit survived.
    std::optional<QubitState> post_state;
};

/// Null result: populations reweighted by the survival probabilities, murity
/// rotated by e^{-i phi}.
QubitState null_result_update(const QubitState &state, const PhaseQubitParams &params);

/// 1 - (rho11 survival_one + rho22 survival_two).
double tunneling_probability(const QubitState &state, const PhaseQubitParams &params);

/// One Bernoulli draw with the integrated tunneling probability.
PhaseMeasurementOutcome sample_measurement(const QubitState &state, const PhaseQubitParams &params,
                                           RandomStream &rng);
PhaseMeasurementOutcome sample_measurement(const QubitState &state, const PhaseQubitParams &params, uint64_t seed);

/// Which stage of the protocol ended it.
enum class PhaseStage { kFirstMeasurement, kUndoMeasurement, kCompleted };

struct PhaseProtocolOutcome {
    UndoOutcome outcome;
    PhaseStage stopped_at = PhaseStage::kCompleted;
    bool survived_first() const { return stopped_at != PhaseStage::kFirstMeasurement; }
};

/// Measurement, pi-pulse, identical measurement, pi-pulse. Success means both
/// measurements were null; the final state is then the initial state with
/// the phase cancelled. undo_time is 2 t_low.
PhaseProtocolOutcome qud_protocol(const QubitState &state, const PhaseQubitParams &params, RandomStream &rng);
PhaseProtocolOutcome qud_protocol(const QubitState &state, const PhaseQubitParams &params, uint64_t seed);

/// e^{-gamma t} / [rho11 + e^{-gamma t} rho22]: success probability given the
/// first measurement was null. For finite gamma_ratio the survival of |1> is
/// included.
double ps_phase_formula(const QubitState &state, const PhaseQubitParams &params);

/// Probability of two null results, e^{-gamma t} for a perfectly selective
/// barrier and any initial state.
double double_null_formula(const QubitState &state, const PhaseQubitParams &params);

struct PhaseSummary {
    uint64_t n_attempts = 0;
    uint64_t n_survived_first = 0;
    uint64_t n_success = 0;
    double gamma_t = 0.0;
    double phi = 0.0;
    uint64_t seed = 0;
    /// n_success / n_attempts.
    double double_null_rate = 0.0;
    Interval double_null_ci95;
    double double_null_analytic = 0.0;
    /// n_success / n_survived_first.
    double ps_conditional = 0.0;
    Interval ps_conditional_ci95;
    double ps_analytic = 0.0;
    double undo_time = 0.0;
    /// Smallest fidelity(final, initial) over successes (1 if none).
    double fidelity_min = 1.0;
    /// Largest trace distance between final and initial state over successes.
    double max_restoration_error = 0.0;
};

struct PhaseRunOptions {
    unsigned workers = 1;
    uint64_t point_index = 0;
};

PhaseSummary run_phase_experiment(const QubitState &state, const PhaseQubitParams &params, uint64_t n_attempts,
                                  uint64_t master_seed, const PhaseRunOptions &options = {});

/// Tomographic check of the undone state from single-shot projective
/// readouts. Successful run j is read out in basis z, x, y for j mod 3 = 0,
/// 1, 2.
struct TomographyReport {
    enum class Status { kOk, kNoData };
    Status status = Status::kNoData;
    uint64_t n_runs = 0;
    uint64_t n_success = 0;
    uint64_t shots[3] = {0, 0, 0};  // z, x, y
    /// Raw Bloch estimate (may lie outside the unit ball).
    double bloch[3] = {0.0, 0.0, 0.0};
    /// Estimate projected onto the Bloch ball.
    std::optional<QubitState> reconstructed;
    double trace_distance = 0.0;
};

TomographyReport tomography_check(const QubitState &initial, uint64_t n_runs, const PhaseQubitParams &params,
                                  uint64_t master_seed);

}  // namespace qud

#endif
