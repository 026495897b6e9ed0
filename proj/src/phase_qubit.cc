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

#include "qud/phase_qubit.h"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "qud/parallel.h"

namespace qud {

double PhaseQubitParams::survival_one() const {
    if (std::isinf(gamma_ratio)) {
        return 1.0;
    }
    return std::exp(-strength() / gamma_ratio);
}

void PhaseQubitParams::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("phase qubit: gamma must be finite and non-negative");
    }
    if (!(t_low >= 0.0) || !std::isfinite(t_low)) {
        throw std::invalid_argument("phase qubit: t_low must be finite and non-negative");
    }
    if (!std::isfinite(phi)) {
        throw std::invalid_argument("phase qubit: phi must be finite");
    }
    if (!(gamma_ratio >= 1.0)) {
        throw std::invalid_argument("phase qubit: gamma_ratio must be at least 1");
    }
}

QubitState null_result_update(const QubitState &state, const PhaseQubitParams &params) {
    double s1 = params.survival_one();
    double s2 = params.survival_two();
    double p1 = state.rho11() * s1;
    double p2 = state.rho22() * s2;
    double z = p1 + p2;
    if (!(z > 0.0)) {
        throw std::domain_error("null_result_update: a null result has zero probability for this state");
    }
    Complex coherence = state.rho12() * (std::sqrt(s1 * s2) / z);
    return apply_phase(QubitState::normalized(p1 / z, p2 / z, coherence), params.phi);
}

double tunneling_probability(const QubitState &state, const PhaseQubitParams &params) {
    double survive = state.rho11() * params.survival_one() + state.rho22() * params.survival_two();
    return std::clamp(1.0 - survive, 0.0, 1.0);
}

PhaseMeasurementOutcome sample_measurement(const QubitState &state, const PhaseQubitParams &params,
                                           RandomStream &rng) {
    PhaseMeasurementOutcome out;
    out.tunneled = rng.uniform() < tunneling_probability(state, params);
    if (!out.tunneled) {
        out.post_state = null_result_update(state, params);
    }
    return out;
}

PhaseMeasurementOutcome sample_measurement(const QubitState &state, const PhaseQubitParams &params, uint64_t seed) {
    RandomStream rng(seed, 0);
    return sample_measurement(state, params, rng);
}

PhaseProtocolOutcome qud_protocol(const QubitState &state, const PhaseQubitParams &params, RandomStream &rng) {
    params.validate();
    PhaseProtocolOutcome result;
    UndoOutcome &out = result.outcome;

    PhaseMeasurementOutcome first = sample_measurement(state, params, rng);
    if (first.tunneled) {
        result.stopped_at = PhaseStage::kFirstMeasurement;
        out.elapsed = params.t_low;
        return result;
    }
    PhaseMeasurementOutcome second = sample_measurement(pi_pulse(*first.post_state), params, rng);
    out.elapsed = 2.0 * params.t_low;
    if (second.tunneled) {
        result.stopped_at = PhaseStage::kUndoMeasurement;
        return result;
    }
    result.stopped_at = PhaseStage::kCompleted;
    out.success = true;
    out.undo_time = 2.0 * params.t_low;
    out.final_state = pi_pulse(*second.post_state);
    return result;
}

PhaseProtocolOutcome qud_protocol(const QubitState &state, const PhaseQubitParams &params, uint64_t seed) {
    RandomStream rng(seed, 0);
    return qud_protocol(state, params, rng);
}

double ps_phase_formula(const QubitState &state, const PhaseQubitParams &params) {
    double s1 = params.survival_one();
    double s2 = params.survival_two();
    return s1 * s2 / (state.rho11() * s1 + state.rho22() * s2);
}

double double_null_formula(const QubitState &, const PhaseQubitParams &params) {
    return params.survival_one() * params.survival_two();
}

PhaseSummary run_phase_experiment(const QubitState &state, const PhaseQubitParams &params, uint64_t n_attempts,
                                  uint64_t master_seed, const PhaseRunOptions &options) {
    params.validate();
    if (n_attempts == 0) {
        throw std::invalid_argument("phase experiment: n_attempts must be at least 1");
    }
    struct Chunk {
        uint64_t survived_first = 0;
        uint64_t success = 0;
        double min_fidelity = 1.0;
        double max_error = 0.0;
    };
    size_t n_chunks = chunk_count(n_attempts);
    std::vector<Chunk> chunks(n_chunks);
    for_each_chunk(n_chunks, options.workers, [&](size_t c) {
        uint64_t begin = c * kChunkSize;
        uint64_t end = std::min<uint64_t>(n_attempts, begin + kChunkSize);
        Chunk &acc = chunks[c];
        for (uint64_t i = begin; i < end; ++i) {
            RandomStream rng(master_seed, stream_id(options.point_index, i));
            PhaseProtocolOutcome run = qud_protocol(state, params, rng);
            acc.survived_first += run.survived_first();
            if (run.outcome.success) {
                ++acc.success;
                acc.min_fidelity = std::min(acc.min_fidelity, fidelity(*run.outcome.final_state, state));
                acc.max_error = std::max(acc.max_error, trace_distance(*run.outcome.final_state, state));
            }
        }
    });

    PhaseSummary s;
    s.n_attempts = n_attempts;
    for (const auto &c : chunks) {
        s.n_survived_first += c.survived_first;
        s.n_success += c.success;
        s.fidelity_min = std::min(s.fidelity_min, c.min_fidelity);
        s.max_restoration_error = std::max(s.max_restoration_error, c.max_error);
    }
    s.gamma_t = params.strength();
    s.phi = params.phi;
    s.seed = master_seed;
    s.double_null_rate = static_cast<double>(s.n_success) / static_cast<double>(n_attempts);
    s.double_null_ci95 = wilson_interval(s.n_success, n_attempts);
    s.double_null_analytic = double_null_formula(state, params);
    s.ps_conditional =
        s.n_survived_first == 0 ? 0.0 : static_cast<double>(s.n_success) / static_cast<double>(s.n_survived_first);
    s.ps_conditional_ci95 = wilson_interval(s.n_success, s.n_survived_first);
    s.ps_analytic = ps_phase_formula(state, params);
    s.undo_time = 2.0 * params.t_low;
    return s;
}

TomographyReport tomography_check(const QubitState &initial, uint64_t n_runs, const PhaseQubitParams &params,
                                  uint64_t master_seed) {
    if (n_runs == 0) {
        throw std::invalid_argument("tomography_check: n_runs must be at least 1");
    }
    TomographyReport report;
    report.n_runs = n_runs;
    int64_t plus[3] = {0, 0, 0};
    for (uint64_t i = 0; i < n_runs; ++i) {
        RandomStream rng(master_seed, stream_id(0, i));
        PhaseProtocolOutcome run = qud_protocol(initial, params, rng);
        if (!run.outcome.success) {
            continue;
        }
        const QubitState &copy = *run.outcome.final_state;
        int basis = static_cast<int>(report.n_success % 3);
        double expectation = basis == 0 ? copy.bloch_z() : basis == 1 ? copy.bloch_x() : copy.bloch_y();
        if (rng.uniform() < 0.5 * (1.0 + expectation)) {
            ++plus[basis];
        }
        ++report.shots[basis];
        ++report.n_success;
    }
    if (report.n_success == 0) {
        report.status = TomographyReport::Status::kNoData;
        return report;
    }
    report.status = TomographyReport::Status::kOk;
    for (int b = 0; b < 3; ++b) {
        report.bloch[b] =
            report.shots[b] == 0 ? 0.0 : (2.0 * static_cast<double>(plus[b]) - static_cast<double>(report.shots[b])) /
                                             static_cast<double>(report.shots[b]);
    }
    double z = report.bloch[0];
    double x = report.bloch[1];
    double y = report.bloch[2];
    double length = std::sqrt(x * x + y * y + z * z);
    double scale = length > 1.0 ? 1.0 / length : 1.0;
    report.reconstructed = QubitState::from_bloch(x * scale, y * scale, z * scale);
    report.trace_distance = trace_distance(*report.reconstructed, initial);
    return report;
}

}  // namespace qud
