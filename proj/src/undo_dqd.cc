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

#include "qud/undo_dqd.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qud/parallel.h"

namespace qud {

namespace {

// RandomStream::uniform() never returns less than 2^-54, so the bridge test
// u < exp(-x) cannot pass once x > 54 ln 2 and the draw is skipped.
constexpr double kBridgeExponentCutoff = 54.0 * std::numbers::ln2;

constexpr double kRestorationFidelity = 1.0 - 1e-9;

size_t timeout_steps(double timeout, double dt) {
    if (!(timeout > 0.0) || !std::isfinite(timeout)) {
        throw std::invalid_argument("undo: timeout must be positive");
    }
    return static_cast<size_t>(std::floor(timeout / dt + 1e-9));
}

bool crossed(double before, double after) { return (before > 0.0 && after <= 0.0) || (before < 0.0 && after >= 0.0); }

}  // namespace

UndoOutcome attempt_undo(const DqdDetectorParams &params, const QubitState &initial_state, MeasurementResult r0,
                         Latent latent, double timeout, RandomStream &rng, const UndoOptions &options) {
    params.validate();
    size_t steps = timeout_steps(timeout, params.dt);
    ResultIncrement inc = result_increment(params);
    double drift = latent_sign(latent) * inc.drift;
    double sigma = inc.sigma;
    double variance = sigma * sigma;
    bool bridge = options.detection == CrossingDetection::kBrownianBridge;

    UndoOutcome out;
    auto succeed = [&](double t) {
        out.success = true;
        out.undo_time = t;
        out.elapsed = t;
        out.r_at_stop = 0.0;
        out.final_state = bayes_update(bayes_update(initial_state, r0), -r0);
        return out;
    };

    double r = r0.r;
    if (std::abs(r) < options.r_tolerance) {
        return succeed(0.0);
    }
    for (size_t k = 1; k <= steps; ++k) {
        double next = r + drift + sigma * rng.normal();
        double t_prev = static_cast<double>(k - 1) * params.dt;
        if (crossed(r, next)) {
            return succeed(t_prev + params.dt * r / (r - next));
        }
        if (std::abs(next) < options.r_tolerance) {
            return succeed(static_cast<double>(k) * params.dt);
        }
        if (bridge) {
            double exponent = 2.0 * r * next / variance;
            if (exponent < kBridgeExponentCutoff && rng.uniform() < std::exp(-exponent)) {
                return succeed(t_prev + 0.5 * params.dt);
            }
        }
        r = next;
    }
    out.timeout_hit = true;
    out.elapsed = static_cast<double>(steps) * params.dt;
    out.r_at_stop = r;
    out.final_state = bayes_update(initial_state, MeasurementResult(r));
    return out;
}

UndoOutcome attempt_undo(const DqdDetectorParams &params, const QubitState &initial_state, MeasurementResult r0,
                         Latent latent, double timeout, uint64_t seed, const UndoOptions &options) {
    RandomStream rng(seed, 0);
    return attempt_undo(params, initial_state, r0, latent, timeout, rng, options);
}

bool timeout_warning(const DqdDetectorParams &params, double timeout) { return timeout < params.t_m(); }

double ps_formula(const QubitState &initial_state, MeasurementResult r0) {
    double r = r0.r;
    if (std::abs(r) > kMaxResultMagnitude) {
        return 0.0;
    }
    // Numerator and denominator divided by e^{|r0|}.
    double w = std::exp(-2.0 * std::abs(r));
    if (r >= 0.0) {
        return w / (initial_state.rho11() + w * initial_state.rho22());
    }
    return w / (w * initial_state.rho11() + initial_state.rho22());
}

double t_undo_formula(MeasurementResult r0, const DqdDetectorParams &params) { return params.t_m() * std::abs(r0.r); }

double first_passage_cdf(MeasurementResult r0, double t, const DqdDetectorParams &params) {
    double a = std::abs(r0.r);
    if (a == 0.0) {
        return t >= 0.0 ? 1.0 : 0.0;
    }
    if (!(t > 0.0)) {
        return 0.0;
    }
    double tm = params.t_m();
    double mean = a * tm;
    double shape = a * a * tm;
    double root = std::sqrt(shape / t);
    double first = normal_cdf(root * (t / mean - 1.0));
    double second = std::exp(2.0 * a + log_normal_upper_tail(root * (t / mean + 1.0)));
    return std::min(1.0, first + second);
}

double first_passage_pdf(MeasurementResult r0, double t, const DqdDetectorParams &params) {
    double a = std::abs(r0.r);
    if (a == 0.0 || !(t > 0.0)) {
        return 0.0;
    }
    double tm = params.t_m();
    double mean = a * tm;
    double shape = a * a * tm;
    double dev = t - mean;
    return std::sqrt(shape / (2.0 * std::numbers::pi * t * t * t)) * std::exp(-shape * dev * dev / (2.0 * mean * mean * t));
}

double ps_finite_horizon(const QubitState &initial_state, MeasurementResult r0, double timeout,
                         const DqdDetectorParams &params) {
    return ps_formula(initial_state, r0) * first_passage_cdf(r0, timeout, params);
}

double two_stage_success_formula(double t1, const DqdDetectorParams &params) {
    double mu = t1 / params.t_m();
    return std::erfc(std::sqrt(mu / 2.0));
}

double two_stage_t_undo_formula(double t1, const DqdDetectorParams &params) {
    // Success-weighted density of r0 is 2 N(r0; -mu, mu) on r0 > 0 (and its mirror).
    double mu = t1 / params.t_m();
    double s = std::sqrt(mu);
    double success = 2.0 * normal_cdf(-s);
    double first_moment = 2.0 * (s * normal_pdf(s) - mu * normal_cdf(-s));
    return params.t_m() * first_moment / success;
}

namespace {

double two_stage_finite_horizon(double t1, double timeout, const DqdDetectorParams &params) {
    double mu = t1 / params.t_m();
    double s = std::sqrt(mu);
    auto integrand = [&](double r) {
        double z = (r + mu) / s;
        return 2.0 * normal_pdf(z) / s * first_passage_cdf(MeasurementResult(r), timeout, params);
    };
    return simpson(integrand, 0.0, 12.0 * s + mu, 4000);
}

struct ChunkResult {
    uint64_t n = 0;
    uint64_t n_success = 0;
    uint64_t n_timeout = 0;
    uint64_t n_latent_one = 0;
    uint64_t n_success_latent_one = 0;
    uint64_t n_latent_two = 0;
    uint64_t n_success_latent_two = 0;
    Moments undo_times;
    Moments elapsed;
    double min_fidelity = 1.0;
    uint64_t n_restoration_failures = 0;
    std::vector<AttemptRecord> log;
};

}  // namespace

UndoSummary run_undo_experiment(const DqdDetectorParams &params, const QubitState &initial_state,
                                const R0Policy &policy, uint64_t n_attempts, double timeout, uint64_t master_seed,
                                const UndoRunOptions &options) {
    params.validate();
    if (n_attempts == 0) {
        throw std::invalid_argument("undo experiment: n_attempts must be at least 1");
    }
    timeout_steps(timeout, params.dt);
    bool first_measurement = policy.kind == R0Policy::Kind::kFirstMeasurement;
    size_t t1_steps = 0;
    if (first_measurement) {
        TrajectoryConfig first;
        first.duration = policy.value;
        t1_steps = first.step_count(params.dt);
    } else {
        MeasurementResult checked(policy.value);
        (void)checked;
    }
    QubitState posterior = bayes_update(initial_state, MeasurementResult(first_measurement ? 0.0 : policy.value));
    ResultIncrement inc = result_increment(params);

    size_t n_chunks = chunk_count(n_attempts);
    std::vector<ChunkResult> chunks(n_chunks);
    for_each_chunk(n_chunks, options.workers, [&](size_t c) {
        ChunkResult &acc = chunks[c];
        uint64_t begin = c * kChunkSize;
        uint64_t end = std::min<uint64_t>(n_attempts, begin + kChunkSize);
        if (options.keep_log) {
            acc.log.reserve(end - begin);
        }
        for (uint64_t i = begin; i < end; ++i) {
            RandomStream rng(master_seed, stream_id(options.point_index, i));
            Latent latent;
            double r0;
            if (first_measurement) {
                latent = sample_latent(initial_state, rng);
                r0 = simulate_result(inc, latent, t1_steps, rng);
            } else {
                latent = sample_latent(posterior, rng);
                r0 = policy.value;
            }
            UndoOutcome out = attempt_undo(params, initial_state, MeasurementResult(r0), latent, timeout, rng, options.undo);
            ++acc.n;
            bool one = latent == Latent::kOne;
            (one ? acc.n_latent_one : acc.n_latent_two) += 1;
            acc.elapsed.add(out.elapsed);
            if (out.success) {
                ++acc.n_success;
                (one ? acc.n_success_latent_one : acc.n_success_latent_two) += 1;
                acc.undo_times.add(*out.undo_time);
                double f = fidelity(*out.final_state, initial_state);
                acc.min_fidelity = std::min(acc.min_fidelity, f);
                if (f < kRestorationFidelity) {
                    ++acc.n_restoration_failures;
                }
            }
            if (out.timeout_hit) {
                ++acc.n_timeout;
            }
            if (options.keep_log) {
                acc.log.push_back({latent, r0, out.success, out.timeout_hit, out.undo_time.value_or(0.0)});
            }
        }
    });

    UndoSummary s;
    Moments undo_times;
    Moments elapsed;
    for (auto &acc : chunks) {
        s.n_attempts += acc.n;
        s.n_success += acc.n_success;
        s.n_timeout += acc.n_timeout;
        s.n_latent_one += acc.n_latent_one;
        s.n_success_latent_one += acc.n_success_latent_one;
        s.n_latent_two += acc.n_latent_two;
        s.n_success_latent_two += acc.n_success_latent_two;
        undo_times.merge(acc.undo_times);
        elapsed.merge(acc.elapsed);
        s.min_restoration_fidelity = std::min(s.min_restoration_fidelity, acc.min_fidelity);
        s.n_restoration_failures += acc.n_restoration_failures;
        if (options.keep_log) {
            s.log.insert(s.log.end(), acc.log.begin(), acc.log.end());
        }
    }
    s.rate = static_cast<double>(s.n_success) / static_cast<double>(s.n_attempts);
    s.rate_ci95 = wilson_interval(s.n_success, s.n_attempts);
    s.mean_undo_time = undo_times.mean();
    s.se_undo_time = undo_times.standard_error();
    s.mean_elapsed_time = elapsed.mean();
    s.timeout = timeout;
    s.dt = params.dt;
    s.seed = master_seed;
    if (first_measurement) {
        s.ps_analytic = two_stage_success_formula(policy.value, params);
        s.t_undo_analytic = two_stage_t_undo_formula(policy.value, params);
        s.censoring_deficit = s.ps_analytic - two_stage_finite_horizon(policy.value, timeout, params);
    } else {
        MeasurementResult r0(policy.value);
        s.ps_analytic = ps_formula(initial_state, r0);
        s.t_undo_analytic = t_undo_formula(r0, params);
        s.censoring_deficit = s.ps_analytic - ps_finite_horizon(initial_state, r0, timeout, params);
    }
    if (timeout_warning(params, timeout)) {
        s.warnings.push_back("timeout is shorter than t_m");
    }
    if (params.weak_response_warning()) {
        s.warnings.push_back("|delta_i|/i0 > 0.1: detector outside the weakly responding regime");
    }
    return s;
}

DiscretizationStudy discretization_study(const DqdDetectorParams &coarse, const QubitState &initial_state,
                                         MeasurementResult r0, unsigned refine, uint64_t n_attempts, double timeout,
                                         uint64_t master_seed, unsigned workers) {
    coarse.validate();
    if (refine < 1 || n_attempts == 0) {
        throw std::invalid_argument("discretization_study: refine and n_attempts must be at least 1");
    }
    DqdDetectorParams fine = coarse;
    fine.dt = coarse.dt / refine;
    size_t coarse_steps = timeout_steps(timeout, coarse.dt);
    ResultIncrement fine_inc = result_increment(fine);
    double coarse_variance = result_increment(coarse).sigma * result_increment(coarse).sigma;
    QubitState posterior = bayes_update(initial_state, r0);

    struct Counts {
        uint64_t coarse_sign = 0;
        uint64_t fine_sign = 0;
        uint64_t coarse_bridge = 0;
    };
    size_t n_chunks = chunk_count(n_attempts);
    std::vector<Counts> chunks(n_chunks);
    for_each_chunk(n_chunks, workers, [&](size_t c) {
        uint64_t begin = c * kChunkSize;
        uint64_t end = std::min<uint64_t>(n_attempts, begin + kChunkSize);
        Counts &acc = chunks[c];
        for (uint64_t i = begin; i < end; ++i) {
            RandomStream rng(master_seed, stream_id(0, i));
            Latent latent = sample_latent(posterior, rng);
            double drift = latent_sign(latent) * fine_inc.drift;
            double r = r0.r;
            double coarse_prev = r;
            bool fine_hit = r == 0.0;
            bool coarse_hit = fine_hit;
            bool bridge_hit = fine_hit;
            for (size_t k = 1; k <= coarse_steps && !(fine_hit && coarse_hit && bridge_hit); ++k) {
                for (unsigned j = 0; j < refine; ++j) {
                    double next = r + drift + fine_inc.sigma * rng.normal();
                    fine_hit = fine_hit || crossed(r, next);
                    r = next;
                }
                if (crossed(coarse_prev, r)) {
                    coarse_hit = true;
                    bridge_hit = true;
                } else if (!bridge_hit) {
                    double exponent = 2.0 * coarse_prev * r / coarse_variance;
                    bridge_hit = exponent < kBridgeExponentCutoff && rng.uniform() < std::exp(-exponent);
                }
                coarse_prev = r;
            }
            acc.fine_sign += fine_hit;
            acc.coarse_sign += coarse_hit;
            acc.coarse_bridge += bridge_hit;
        }
    });
    Counts total;
    for (const auto &c : chunks) {
        total.coarse_sign += c.coarse_sign;
        total.fine_sign += c.fine_sign;
        total.coarse_bridge += c.coarse_bridge;
    }
    double n = static_cast<double>(n_attempts);
    DiscretizationStudy out;
    out.n_attempts = n_attempts;
    out.coarse_dt = coarse.dt;
    out.fine_dt = fine.dt;
    out.rate_sign_change_coarse = static_cast<double>(total.coarse_sign) / n;
    out.rate_sign_change_fine = static_cast<double>(total.fine_sign) / n;
    out.rate_bridge_coarse = static_cast<double>(total.coarse_bridge) / n;
    out.ps_analytic = ps_formula(initial_state, r0);
    out.ps_finite_horizon = ps_finite_horizon(initial_state, r0, timeout, coarse);
    return out;
}

}  // namespace qud
