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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qud;

namespace {

const QubitState kPlus = QubitState::from_components(0.5, Complex(0.5, 0.0));

double three_sigma(double p, uint64_t n) { return 3.0 * binomial_sigma(p, n); }

// Survival of r(t) = r0 - t + W(t) before its first visit to zero, from an
// explicit finite-difference solution of the forward equation
// p_t = p_r + p_rr / 2 with p(0) = 0. Returns survival at each of the
// requested times and the mean absorption time over [0, horizon].
struct FokkerPlanckResult {
    std::vector<double> survival;
    double mean_time = 0.0;
};

FokkerPlanckResult fokker_planck_latent_two(double r0, double horizon, const std::vector<double> &times) {
    const double dx = 0.02;
    const double length = r0 + 15.0;
    const int cells = static_cast<int>(length / dx);
    const double step = 0.4 * dx * dx;
    std::vector<double> p(cells + 1, 0.0);
    int start = static_cast<int>(std::lround(r0 / dx));
    p[start] = 1.0 / dx;
    std::vector<double> next(p.size(), 0.0);
    FokkerPlanckResult out;
    size_t want = 0;
    double t = 0.0;
    double prev_survival = 1.0;
    double mean = 0.0;
    while (t < horizon) {
        for (int k = 1; k < cells; ++k) {
            double advect = (p[k + 1] - p[k - 1]) / (2.0 * dx);
            double diffuse = (p[k + 1] - 2.0 * p[k] + p[k - 1]) / (dx * dx);
            next[k] = p[k] + step * (advect + 0.5 * diffuse);
        }
        next[0] = 0.0;
        next[cells] = 0.0;
        std::swap(p, next);
        t += step;
        double survival = 0.0;
        for (double v : p) {
            survival += v * dx;
        }
        // Absorbed mass in this step, weighted by the midpoint time.
        mean += (prev_survival - survival) * (t - step / 2.0);
        prev_survival = survival;
        while (want < times.size() && t >= times[want]) {
            out.survival.push_back(survival);
            ++want;
        }
    }
    out.mean_time = mean;
    return out;
}

}  // namespace

TEST(AttemptUndo, ZeroResultSucceedsImmediately) {
    DqdDetectorParams p;
    UndoOutcome out = attempt_undo(p, kPlus, MeasurementResult(0.0), Latent::kOne, 10.0, uint64_t{1});
    EXPECT_TRUE(out.success);
    EXPECT_FALSE(out.timeout_hit);
    ASSERT_TRUE(out.undo_time.has_value());
    EXPECT_EQ(*out.undo_time, 0.0);
    EXPECT_EQ(out.light(), Light::kGreen);
    ASSERT_TRUE(out.final_state.has_value());
    EXPECT_EQ(*out.final_state, kPlus);
}

TEST(AttemptUndo, OutcomeInvariants) {
    DqdDetectorParams p;
    QubitState s = QubitState::from_components(0.3, Complex(0.2, -0.3));
    QubitState posterior = bayes_update(s, MeasurementResult(1.5));
    for (uint64_t seed = 0; seed < 2000; ++seed) {
        RandomStream rng(seed, 0);
        Latent latent = sample_latent(posterior, rng);
        UndoOutcome out = attempt_undo(p, s, MeasurementResult(1.5), latent, 5.0, rng);
        EXPECT_FALSE(out.success && out.timeout_hit);
        ASSERT_TRUE(out.final_state.has_value());
        if (out.success) {
            EXPECT_EQ(out.light(), Light::kGreen);
            EXPECT_LT(std::abs(out.r_at_stop), 1e-9);
            EXPECT_GE(fidelity(*out.final_state, s), 1.0 - 1e-9);
            EXPECT_LE(*out.undo_time, 5.0);
        } else {
            EXPECT_TRUE(out.timeout_hit);
            EXPECT_EQ(out.light(), Light::kRed);
            EXPECT_FALSE(out.undo_time.has_value());
            EXPECT_NEAR(std::abs(fidelity(*out.final_state, bayes_update(s, MeasurementResult(out.r_at_stop))) - 1.0),
                        0.0, 1e-12);
        }
    }
}

TEST(AttemptUndo, TimeoutWarning) {
    DqdDetectorParams p;
    EXPECT_TRUE(timeout_warning(p, 0.5));
    EXPECT_FALSE(timeout_warning(p, 50.0));
    EXPECT_NO_THROW(attempt_undo(p, kPlus, MeasurementResult(1.0), Latent::kOne, 0.5, uint64_t{3}));
}

TEST(Formulas, SuccessProbability) {
    EXPECT_EQ(ps_formula(kPlus, MeasurementResult(0.0)), 1.0);
    EXPECT_NEAR(ps_formula(QubitState::basis_one(), MeasurementResult(1.0)), std::exp(-2.0), 1e-15);
    EXPECT_NEAR(ps_formula(QubitState::basis_one(), MeasurementResult(1.0)), 0.135335, 1e-6);
    EXPECT_NEAR(ps_formula(kPlus, MeasurementResult(1.0)), 0.238406, 1e-6);
    EXPECT_NEAR(ps_formula(kPlus, MeasurementResult(1.0)), std::exp(-1.0) / std::cosh(1.0), 1e-15);
    EXPECT_EQ(ps_formula(kPlus, MeasurementResult(701.0)), 0.0);
    EXPECT_EQ(ps_formula(kPlus, MeasurementResult(-701.0)), 0.0);
    // Stable for large |r0| where the naive form overflows.
    EXPECT_NEAR(std::log(ps_formula(kPlus, MeasurementResult(300.0))), -600.0 + std::log(2.0), 1e-9);
    for (double r : {-5.0, -0.3, 0.2, 4.0}) {
        double ps = ps_formula(QubitState::from_components(0.3, Complex(0.0, 0.0)), MeasurementResult(r));
        EXPECT_GT(ps, 0.0);
        EXPECT_LE(ps, 1.0);
    }
}

TEST(Formulas, UndoTime) {
    DqdDetectorParams p;
    EXPECT_EQ(t_undo_formula(MeasurementResult(0.0), p), 0.0);
    EXPECT_DOUBLE_EQ(t_undo_formula(MeasurementResult(2.0), p), 2.0);
    DqdDetectorParams half;
    half.s_i = 0.25;
    half.dt = 0.005;
    EXPECT_DOUBLE_EQ(half.t_m(), 0.5);
    EXPECT_DOUBLE_EQ(t_undo_formula(MeasurementResult(-3.0), half), 1.5);
}

TEST(Formulas, FirstPassageCdfMatchesQuadratureAndPde) {
    DqdDetectorParams p;
    MeasurementResult r0(1.0);
    std::vector<double> times = {0.5, 1.0, 2.0, 5.0, 10.0};
    for (double t : times) {
        double quad = simpson([&](double u) { return first_passage_pdf(r0, u, p); }, 1e-12, t, 20000);
        EXPECT_NEAR(first_passage_cdf(r0, t, p), quad, 1e-7);
    }
    FokkerPlanckResult fp = fokker_planck_latent_two(1.0, 30.0, times);
    ASSERT_EQ(fp.survival.size(), times.size());
    for (size_t k = 0; k < times.size(); ++k) {
        EXPECT_NEAR(1.0 - fp.survival[k], first_passage_cdf(r0, times[k], p), 2e-3) << times[k];
    }
    EXPECT_NEAR(first_passage_cdf(r0, 1e6, p), 1.0, 1e-12);
}

TEST(Formulas, TwoStageClosedForms) {
    DqdDetectorParams p;
    for (double t1 : {0.25, 1.0, 3.0}) {
        double mu = t1;
        // P(r0) Ps(r0) = exp(-(r^2 + mu^2) / (2 mu) - |r|) / sqrt(2 pi mu).
        auto joint = [&](double r) {
            return std::exp(-(r * r + mu * mu) / (2.0 * mu) - std::abs(r)) / std::sqrt(2.0 * std::numbers::pi * mu);
        };
        double total = 2.0 * simpson(joint, 0.0, 40.0, 40000);
        EXPECT_NEAR(two_stage_success_formula(t1, p), total, 1e-9);
        double first = 2.0 * simpson([&](double r) { return r * joint(r); }, 0.0, 40.0, 40000);
        EXPECT_NEAR(two_stage_t_undo_formula(t1, p), first / total, 1e-9);
    }
}

// Latent |2>: drift toward zero, certain return, mean time r0 t_m.
TEST(AttemptUndo, LatentTwoMeanTime) {
    DqdDetectorParams p;
    FokkerPlanckResult fp = fokker_planck_latent_two(1.0, 40.0, {});
    EXPECT_NEAR(fp.mean_time, 1.0, 0.01);
    EXPECT_NEAR(t_undo_formula(MeasurementResult(1.0), p), fp.mean_time, 0.01);

    Moments hit;
    uint64_t success = 0;
    const uint64_t n = 20000;
    for (uint64_t i = 0; i < n; ++i) {
        RandomStream rng(5, i);
        UndoOutcome out = attempt_undo(p, QubitState::basis_two(), MeasurementResult(1.0), Latent::kTwo, 50.0, rng);
        if (out.success) {
            ++success;
            hit.add(*out.undo_time);
        }
    }
    EXPECT_EQ(success, n);
    EXPECT_NEAR(hit.mean(), 1.0, 3.0 * hit.standard_error() + 0.005);
}

TEST(AttemptUndo, LatentOneHittingProbability) {
    DqdDetectorParams p;
    uint64_t success = 0;
    const uint64_t n = 100000;
    for (uint64_t i = 0; i < n; ++i) {
        RandomStream rng(6, i);
        success += attempt_undo(p, QubitState::basis_one(), MeasurementResult(1.0), Latent::kOne, 50.0, rng).success;
    }
    double rate = static_cast<double>(success) / n;
    EXPECT_NEAR(rate, std::exp(-2.0), 0.004);
}

TEST(RunUndoExperiment, EqualSuperposition) {
    DqdDetectorParams p;
    UndoSummary s = run_undo_experiment(p, kPlus, R0Policy::fixed(1.0), 100000, 50.0, 2026);
    double ps = ps_formula(kPlus, MeasurementResult(1.0));
    EXPECT_NEAR(s.ps_analytic, 0.238406, 1e-6);
    EXPECT_NEAR(s.rate, ps, three_sigma(ps, s.n_attempts));
    EXPECT_NEAR(s.mean_undo_time, 1.0, 0.05);
    EXPECT_GT(s.se_undo_time, 0.0);
    EXPECT_EQ(s.n_restoration_failures, 0u);
    EXPECT_GE(s.min_restoration_fidelity, 1.0 - 1e-9);
    EXPECT_TRUE(s.rate_ci95.contains(s.rate));
    EXPECT_LT(s.censoring_deficit, 1e-3);
    EXPECT_EQ(s.n_success, s.n_success_latent_one + s.n_success_latent_two);
    EXPECT_EQ(s.n_success + s.n_timeout, s.n_attempts);
}

TEST(RunUndoExperiment, AsymmetricStateNegativeResult) {
    DqdDetectorParams p;
    QubitState s = QubitState::from_components(0.3, Complex(0.1, 0.2));
    UndoSummary sum = run_undo_experiment(p, s, R0Policy::fixed(-0.5), 100000, 50.0, 99);
    double ps = ps_formula(s, MeasurementResult(-0.5));
    EXPECT_NEAR(sum.rate, ps, three_sigma(ps, sum.n_attempts));
    EXPECT_EQ(sum.n_restoration_failures, 0u);
}

TEST(RunUndoExperiment, DeterministicAcrossWorkers) {
    DqdDetectorParams p;
    UndoRunOptions serial;
    serial.keep_log = true;
    UndoRunOptions parallel = serial;
    parallel.workers = 8;
    UndoSummary a = run_undo_experiment(p, kPlus, R0Policy::fixed(0.5), 5000, 10.0, 7, serial);
    UndoSummary b = run_undo_experiment(p, kPlus, R0Policy::fixed(0.5), 5000, 10.0, 7, parallel);
    EXPECT_EQ(a.n_success, b.n_success);
    EXPECT_EQ(a.mean_undo_time, b.mean_undo_time);
    EXPECT_EQ(a.se_undo_time, b.se_undo_time);
    EXPECT_EQ(a.mean_elapsed_time, b.mean_elapsed_time);
    ASSERT_EQ(a.log.size(), b.log.size());
    for (size_t i = 0; i < a.log.size(); ++i) {
        EXPECT_EQ(a.log[i].undo_time, b.log[i].undo_time);
    }
}

// The latent-conditioned success rates carry no trace of the initial state.
TEST(RunUndoExperiment, LatentConditionedRatesAreStateIndependent) {
    DqdDetectorParams p;
    UndoSummary a = run_undo_experiment(p, kPlus, R0Policy::fixed(1.0), 60000, 50.0, 11);
    UndoSummary b =
        run_undo_experiment(p, QubitState::from_components(0.8, Complex(0.0, 0.0)), R0Policy::fixed(1.0), 60000, 50.0, 12);
    double pa = static_cast<double>(a.n_success_latent_one) / a.n_latent_one;
    double pb = static_cast<double>(b.n_success_latent_one) / b.n_latent_one;
    double sigma = std::sqrt(pa * (1 - pa) / a.n_latent_one + pb * (1 - pb) / b.n_latent_one);
    EXPECT_LT(std::abs(pa - pb), 3.0 * sigma);
    EXPECT_NEAR(pa, std::exp(-2.0), 3.0 * binomial_sigma(std::exp(-2.0), a.n_latent_one));
    EXPECT_EQ(a.n_success_latent_two, a.n_latent_two);
    EXPECT_EQ(b.n_success_latent_two, b.n_latent_two);
}

// Joint probability of a first result in a bin and a later success.
TEST(RunUndoExperiment, TwoStageJointRateIsStateIndependent) {
    DqdDetectorParams p;
    const uint64_t n = 60000;
    const double t1 = 1.0;
    UndoRunOptions opts;
    opts.keep_log = true;
    std::vector<double> joint;
    for (const QubitState &s : {kPlus, QubitState::from_components(0.9, Complex(0.1, 0.0)),
                                QubitState::from_components(0.2, Complex(0.0, -0.3))}) {
        UndoSummary sum = run_undo_experiment(p, s, R0Policy::first_measurement(t1), n, 50.0, 21, opts);
        uint64_t hits = 0;
        for (const AttemptRecord &rec : sum.log) {
            hits += rec.success && rec.r0 > 0.5 && rec.r0 < 1.0;
        }
        joint.push_back(static_cast<double>(hits) / n);
        double overall = two_stage_success_formula(t1, p);
        EXPECT_NEAR(sum.rate, overall, three_sigma(overall, n));
        EXPECT_EQ(sum.n_restoration_failures, 0u);
    }
    auto c = [](double r) { return std::exp(-(r * r + 1.0) / 2.0 - r) / std::sqrt(2.0 * std::numbers::pi); };
    double expect = simpson(c, 0.5, 1.0, 200);
    for (double j : joint) {
        EXPECT_NEAR(j, expect, three_sigma(expect, n));
    }
    for (size_t k = 1; k < joint.size(); ++k) {
        EXPECT_LT(std::abs(joint[k] - joint[0]), 3.0 * std::sqrt(2.0) * binomial_sigma(expect, n));
    }
}

TEST(RunUndoExperiment, CensoringMonotoneInTimeout) {
    DqdDetectorParams p;
    double previous = 0.0;
    for (double timeout : {1.0, 2.0, 5.0, 10.0, 50.0}) {
        UndoSummary s = run_undo_experiment(p, kPlus, R0Policy::fixed(2.0), 20000, timeout, 31);
        // Common random numbers: a longer horizon only adds successes.
        EXPECT_GE(s.rate, previous);
        previous = s.rate;
    }
    for (double r0 : {0.25, 1.0, 2.0, -2.0}) {
        double deficit =
            ps_formula(kPlus, MeasurementResult(r0)) - ps_finite_horizon(kPlus, MeasurementResult(r0), 50.0, p);
        EXPECT_GE(deficit, 0.0);
        EXPECT_LT(deficit, 0.005);
    }
}

TEST(Discretization, NaiveDeficitShrinksWithStep) {
    DqdDetectorParams p;
    DiscretizationStudy d = discretization_study(p, kPlus, MeasurementResult(1.0), 10, 20000, 10.0, 41);
    double sigma = binomial_sigma(d.ps_finite_horizon, d.n_attempts);
    // Coupled paths: the finer grid sees every crossing of the coarser one.
    EXPECT_LE(d.rate_sign_change_coarse, d.rate_sign_change_fine);
    EXPECT_LE(d.rate_sign_change_fine, d.rate_bridge_coarse + 4.0 * sigma);
    double coarse_gap = d.ps_finite_horizon - d.rate_sign_change_coarse;
    double fine_gap = d.ps_finite_horizon - d.rate_sign_change_fine;
    EXPECT_GT(coarse_gap, 3.0 * sigma);
    EXPECT_LT(fine_gap, coarse_gap);
    EXPECT_NEAR(d.rate_bridge_coarse, d.ps_finite_horizon, 3.0 * sigma);
}
