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

#ifndef QUD_UNDO_DQD_H
#define QUD_UNDO_DQD_H

// First-passage uncollapse of the charge qubit: after a first result r0 the
// detector keeps running and is switched off the first time the accumulated
// result returns to zero.

#include <cstdint>
#include <string>
#include <vector>

#include "qud/dqd.h"
#include "qud/outcome.h"
#include "qud/rng.h"
#include "qud/stats.h"

namespace qud {

/// How a zero crossing between two grid points is detected.
enum class CrossingDetection {
    /// Sign change of consecutive samples (or |r| below tolerance). Misses
    /// excursions through zero inside a step, biasing success down by
    /// O(sqrt(dt / t_m)).
    kSignChange,
    /// Sign change, plus the exact Brownian-bridge probability
    /// exp(-2 r_k r_{k+1} / (sigma^2 dt)) that a path with same-sign
    /// endpoints touched zero in between. Unbiased for the continuous process.
    kBrownianBridge,
};

struct UndoOptions {
    double r_tolerance = 1e-9;
    CrossingDetection detection = CrossingDetection::kBrownianBridge;
};

/// Runs the undoing stage starting from accumulated result r0 with the
/// detector driven by `latent` (the caller samples it from the posterior
/// bayes_update(initial_state, r0)). On the first return to zero the outcome
/// is a success with final_state = bayes_update(posterior, -r0). Hitting the
/// timeout is a failure whose final_state is conditioned on the full record.
UndoOutcome attempt_undo(const DqdDetectorParams &params, const QubitState &initial_state, MeasurementResult r0,
                         Latent latent, double timeout, RandomStream &rng, const UndoOptions &options = {});
UndoOutcome attempt_undo(const DqdDetectorParams &params, const QubitState &initial_state, MeasurementResult r0,
                         Latent latent, double timeout, uint64_t seed, const UndoOptions &options = {});

/// timeout < t_m: the attempt still runs, but almost nothing can be undone.
bool timeout_warning(const DqdDetectorParams &params, double timeout);

/// e^{-|r0|} / [e^{r0} rho11 + e^{-r0} rho22], infinite horizon; 0 for |r0| > 700.
double ps_formula(const QubitState &initial_state, MeasurementResult r0);

/// t_m |r0|.
double t_undo_formula(MeasurementResult r0, const DqdDetectorParams &params);

/// P(first return to zero happens by time t | it happens at all). Both latent
/// branches conditioned on returning have the same inverse-Gaussian law with
/// mean t_m |r0| and shape t_m r0^2.
double first_passage_cdf(MeasurementResult r0, double t, const DqdDetectorParams &params);

/// Its density.
double first_passage_pdf(MeasurementResult r0, double t, const DqdDetectorParams &params);

/// ps_formula times first_passage_cdf(timeout): success probability for a
/// continuously monitored detector that gives up at `timeout`.
double ps_finite_horizon(const QubitState &initial_state, MeasurementResult r0, double timeout,
                         const DqdDetectorParams &params);

/// Two-stage experiment (first measurement of duration t1, then undo):
/// overall success probability erfc(sqrt(t1 / (2 t_m))), the same for every
/// initial state.
double two_stage_success_formula(double t1, const DqdDetectorParams &params);

/// Mean undo time of successful two-stage attempts, t_m E[|r0| | success].
double two_stage_t_undo_formula(double t1, const DqdDetectorParams &params);

/// Source of the first result.
struct R0Policy {
    enum class Kind { kFixed, kFirstMeasurement };
    Kind kind = Kind::kFixed;
    /// r0 for kFixed, first-measurement duration t1 for kFirstMeasurement.
    double value = 0.0;

    static R0Policy fixed(double r0) { return {Kind::kFixed, r0}; }
    static R0Policy first_measurement(double t1) { return {Kind::kFirstMeasurement, t1}; }
};

struct UndoRunOptions {
    unsigned workers = 1;
    /// Mixed into the stream ids so sweep points draw from disjoint streams.
    uint64_t point_index = 0;
    bool keep_log = false;
    UndoOptions undo;
};

struct AttemptRecord {
    Latent latent = Latent::kOne;
    double r0 = 0.0;
    bool success = false;
    bool timeout_hit = false;
    double undo_time = 0.0;  // meaningful only on success
};

struct UndoSummary {
    uint64_t n_attempts = 0;
    uint64_t n_success = 0;
    uint64_t n_timeout = 0;
    double rate = 0.0;
    Interval rate_ci95;
    /// Conditioned on success.
    double mean_undo_time = 0.0;
    double se_undo_time = 0.0;
    /// Over all attempts, failures counted at the time they gave up.
    double mean_elapsed_time = 0.0;
    double timeout = 0.0;
    double dt = 0.0;
    uint64_t seed = 0;
    double ps_analytic = 0.0;
    double t_undo_analytic = 0.0;
    /// ps_analytic minus the continuous-monitoring prediction at this timeout.
    double censoring_deficit = 0.0;

    uint64_t n_latent_one = 0;
    uint64_t n_success_latent_one = 0;
    uint64_t n_latent_two = 0;
    uint64_t n_success_latent_two = 0;

    /// Smallest fidelity(final, initial) over successes (1 if none).
    double min_restoration_fidelity = 1.0;
    uint64_t n_restoration_failures = 0;

    std::vector<std::string> warnings;
    std::vector<AttemptRecord> log;
};

/// Monte Carlo over n_attempts independent attempts. Attempt i draws from
/// stream stream_id(point_index, i) of master_seed, so the summary is
/// identical for every worker count.
UndoSummary run_undo_experiment(const DqdDetectorParams &params, const QubitState &initial_state,
                                const R0Policy &policy, uint64_t n_attempts, double timeout, uint64_t master_seed,
                                const UndoRunOptions &options = {});

/// Coupled comparison of crossing detectors. Each attempt simulates one fine
/// path with step coarse_dt / refine; the coarse detectors see every
/// refine-th point of the same path.
struct DiscretizationStudy {
    uint64_t n_attempts = 0;
    double coarse_dt = 0.0;
    double fine_dt = 0.0;
    double rate_sign_change_coarse = 0.0;
    double rate_sign_change_fine = 0.0;
    double rate_bridge_coarse = 0.0;
    double ps_analytic = 0.0;
    double ps_finite_horizon = 0.0;
};

DiscretizationStudy discretization_study(const DqdDetectorParams &coarse, const QubitState &initial_state,
                                         MeasurementResult r0, unsigned refine, uint64_t n_attempts, double timeout,
                                         uint64_t master_seed, unsigned workers = 1);

}  // namespace qud

#endif
