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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qud/undo_dqd.h"

using namespace qud;

namespace {

const QubitState kPlus = QubitState::from_components(0.5, Complex(0.5, 0.0));
const QubitState kMixed = QubitState::from_components(0.5, Complex(0.0, 0.0));

PhaseQubitParams with_strength(double gamma_t, double phi = 0.0) {
    PhaseQubitParams p;
    p.gamma = gamma_t;
    p.t_low = 1.0;
    p.phi = phi;
    return p;
}

QubitState random_state(std::mt19937_64 &gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double x, y, z;
    do {
        x = u(gen);
        y = u(gen);
        z = u(gen);
    } while (x * x + y * y + z * z > 1.0);
    return QubitState::from_bloch(x, y, z);
}

void expect_state_near(const QubitState &a, const QubitState &b, double tol) {
    EXPECT_NEAR(a.rho11(), b.rho11(), tol);
    EXPECT_NEAR(a.rho22(), b.rho22(), tol);
    EXPECT_NEAR(std::abs(a.rho12() - b.rho12()), 0.0, tol);
}

}  // namespace

TEST(PhaseParams, DerivedQuantities) {
    PhaseQubitParams p;
    p.gamma = 3.0;
    p.t_low = 0.5;
    EXPECT_DOUBLE_EQ(p.strength(), 1.5);
    EXPECT_DOUBLE_EQ(p.equivalent_result(), 0.75);
    EXPECT_DOUBLE_EQ(p.survival_two(), std::exp(-1.5));
    EXPECT_EQ(p.survival_one(), 1.0);
    p.gamma_ratio = 200.0;
    EXPECT_DOUBLE_EQ(p.survival_one(), std::exp(-1.5 / 200.0));
    EXPECT_NO_THROW(p.validate());
    p.gamma = -1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p.gamma = 1.0;
    p.gamma_ratio = 0.5;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(NullResultUpdate, Examples) {
    QubitState out = null_result_update(kMixed, with_strength(std::log(2.0)));
    EXPECT_NEAR(out.rho11(), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(out.rho22(), 1.0 / 3.0, 1e-15);
    EXPECT_EQ(out.rho12(), Complex(0.0, 0.0));
    expect_state_near(null_result_update(kPlus, with_strength(0.0)), kPlus, 1e-15);
    EXPECT_EQ(null_result_update(QubitState::basis_one(), with_strength(4.0)), QubitState::basis_one());
}

TEST(NullResultUpdate, MatchesBayesUpdateWithPhase) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> g(0.0, 6.0);
    std::uniform_real_distribution<double> phi(-4.0, 4.0);
    for (int i = 0; i < 10000; ++i) {
        QubitState s = random_state(gen);
        PhaseQubitParams p = with_strength(g(gen), phi(gen));
        QubitState expect = apply_phase(bayes_update(s, MeasurementResult(p.equivalent_result())), p.phi);
        expect_state_near(null_result_update(s, p), expect, 1e-12);
    }
}

TEST(NullResultUpdate, ZeroWeightThrows) {
    PhaseQubitParams p = with_strength(1.0);
    p.gamma_ratio = 1.0;
    p.gamma = INFINITY;
    EXPECT_THROW(null_result_update(kPlus, p), std::exception);
}

TEST(SampleMeasurement, Frequencies) {
    PhaseQubitParams p = with_strength(std::log(2.0));
    for (uint64_t seed = 0; seed < 1000; ++seed) {
        EXPECT_FALSE(sample_measurement(QubitState::basis_one(), p, seed).tunneled);
    }
    const uint64_t n = 100000;
    PhaseQubitParams q = with_strength(0.8);
    uint64_t two = 0;
    uint64_t plus = 0;
    for (uint64_t i = 0; i < n; ++i) {
        RandomStream a(10, i);
        RandomStream b(11, i);
        two += sample_measurement(QubitState::basis_two(), q, a).tunneled;
        PhaseMeasurementOutcome out = sample_measurement(kPlus, p, b);
        plus += out.tunneled;
        EXPECT_EQ(out.tunneled, !out.post_state.has_value());
    }
    double p_two = 1.0 - std::exp(-0.8);
    EXPECT_NEAR(static_cast<double>(two) / n, p_two, 3.0 * binomial_sigma(p_two, n));
    EXPECT_NEAR(static_cast<double>(plus) / n, 0.25, 3.0 * binomial_sigma(0.25, n));
    EXPECT_NEAR(tunneling_probability(kPlus, p), 0.25, 1e-15);
}

TEST(QudProtocol, GroundStateSucceedsAtDoubleNullRate) {
    PhaseQubitParams p = with_strength(1.0);
    const uint64_t n = 100000;
    uint64_t success = 0;
    uint64_t survived = 0;
    for (uint64_t i = 0; i < n; ++i) {
        RandomStream rng(12, i);
        PhaseProtocolOutcome out = qud_protocol(QubitState::basis_one(), p, rng);
        survived += out.survived_first();
        success += out.outcome.success;
    }
    EXPECT_EQ(survived, n);
    EXPECT_NEAR(static_cast<double>(success) / n, std::exp(-1.0), 3.0 * binomial_sigma(std::exp(-1.0), n));
}

TEST(QudProtocol, ExcitedStateAlwaysSucceedsAfterSurvival) {
    PhaseQubitParams p = with_strength(0.5);
    for (uint64_t i = 0; i < 20000; ++i) {
        RandomStream rng(13, i);
        PhaseProtocolOutcome out = qud_protocol(QubitState::basis_two(), p, rng);
        if (out.survived_first()) {
            EXPECT_TRUE(out.outcome.success);
        } else {
            EXPECT_EQ(out.stopped_at, PhaseStage::kFirstMeasurement);
            EXPECT_EQ(out.outcome.light(), Light::kRed);
        }
    }
}

TEST(QudProtocol, SuccessRestoresStateExactly) {
    std::mt19937_64 gen(14);
    std::uniform_real_distribution<double> g(0.05, 3.0);
    std::uniform_real_distribution<double> phi(-3.0, 3.0);
    int successes = 0;
    for (uint64_t i = 0; i < 20000; ++i) {
        QubitState s = random_state(gen);
        PhaseQubitParams p = with_strength(g(gen), phi(gen));
        PhaseProtocolOutcome out = qud_protocol(s, p, i);
        if (out.outcome.success) {
            ++successes;
            ASSERT_TRUE(out.outcome.final_state.has_value());
            EXPECT_NEAR(fidelity(*out.outcome.final_state, s), 1.0, 1e-12);
            expect_state_near(*out.outcome.final_state, s, 1e-12);
            EXPECT_DOUBLE_EQ(*out.outcome.undo_time, 2.0 * p.t_low);
            EXPECT_EQ(out.outcome.light(), Light::kGreen);
        } else {
            EXPECT_FALSE(out.outcome.final_state.has_value());
        }
    }
    EXPECT_GT(successes, 5000);
}

TEST(PhaseFormula, Examples) {
    EXPECT_EQ(ps_phase_formula(kPlus, with_strength(0.0)), 1.0);
    EXPECT_NEAR(ps_phase_formula(kPlus, with_strength(std::log(2.0))), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(ps_phase_formula(QubitState::basis_one(), with_strength(1.0)), 0.367879, 1e-6);
    EXPECT_NEAR(double_null_formula(kPlus, with_strength(1.3)), std::exp(-1.3), 1e-15);
}

// A null result acts like a charge-qubit result r = gamma t / 2.
TEST(PhaseFormula, CoincidesWithChargeQubitFormula) {
    std::mt19937_64 gen(15);
    std::uniform_real_distribution<double> g(0.0, 8.0);
    for (int i = 0; i < 10000; ++i) {
        QubitState s = random_state(gen);
        PhaseQubitParams p = with_strength(g(gen));
        double r = p.equivalent_result();
        double by_ratio = std::exp(-2.0 * r) / (s.rho11() + std::exp(-2.0 * r) * s.rho22());
        EXPECT_NEAR(ps_phase_formula(s, p), by_ratio, 1e-12);
        // A null result favours |1>, like a charge-qubit result r > 0.
        EXPECT_NEAR(ps_phase_formula(s, p), ps_formula(s, MeasurementResult(r)), 1e-12);
    }
}

TEST(RunPhaseExperiment, ConditionalSuccessMatchesFormula) {
    struct Case {
        QubitState state;
        double gamma_t;
    };
    std::vector<Case> cases = {{kPlus, std::log(2.0)},
                               {QubitState::basis_one(), 1.0},
                               {QubitState::from_components(0.3, Complex(0.2, 0.3)), 0.5},
                               {QubitState::from_components(0.8, Complex(0.0, -0.1)), 2.0},
                               {kMixed, 3.0}};
    for (const Case &c : cases) {
        PhaseSummary s = run_phase_experiment(c.state, with_strength(c.gamma_t, 0.4), 100000, 17);
        double ps = ps_phase_formula(c.state, with_strength(c.gamma_t));
        EXPECT_NEAR(s.ps_analytic, ps, 1e-15);
        EXPECT_NEAR(s.ps_conditional, ps, 3.0 * binomial_sigma(ps, s.n_survived_first)) << c.gamma_t;
        EXPECT_GE(s.fidelity_min, 1.0 - 1e-12);
        EXPECT_LE(s.max_restoration_error, 1e-12);
    }
}

TEST(RunPhaseExperiment, DoubleNullRateIsStateIndependent) {
    PhaseQubitParams p = with_strength(0.9, 1.0);
    double expect = std::exp(-0.9);
    for (const QubitState &s :
         {QubitState::basis_one(), kPlus, QubitState::from_components(0.1, Complex(0.2, -0.1))}) {
        PhaseSummary sum = run_phase_experiment(s, p, 100000, 18);
        EXPECT_NEAR(sum.double_null_analytic, expect, 1e-15);
        EXPECT_NEAR(sum.double_null_rate, expect, 3.0 * binomial_sigma(expect, sum.n_attempts));
    }
}

TEST(RunPhaseExperiment, DeterministicAcrossWorkers) {
    PhaseRunOptions serial;
    PhaseRunOptions parallel;
    parallel.workers = 8;
    PhaseSummary a = run_phase_experiment(kPlus, with_strength(0.7), 30000, 19, serial);
    PhaseSummary b = run_phase_experiment(kPlus, with_strength(0.7), 30000, 19, parallel);
    EXPECT_EQ(a.n_success, b.n_success);
    EXPECT_EQ(a.n_survived_first, b.n_survived_first);
    EXPECT_EQ(a.fidelity_min, b.fidelity_min);
}

TEST(Tomography, RecoversEqualSuperposition) {
    TomographyReport r = tomography_check(kPlus, 20000, with_strength(std::log(2.0), 0.3), 20);
    ASSERT_EQ(r.status, TomographyReport::Status::kOk);
    EXPECT_GE(r.n_success, 9500u);
    EXPECT_LT(r.trace_distance, 0.02);
}

TEST(Tomography, RecoversGroundState) {
    TomographyReport r = tomography_check(QubitState::basis_one(), 20000, with_strength(std::log(2.0)), 21);
    ASSERT_EQ(r.status, TomographyReport::Status::kOk);
    ASSERT_TRUE(r.reconstructed.has_value());
    EXPECT_NEAR(r.reconstructed->rho11(), 1.0, 0.02);
}

TEST(Tomography, NoDataWhenNothingSucceeds) {
    TomographyReport r = tomography_check(QubitState::basis_one(), 1000, with_strength(50.0), 22);
    EXPECT_EQ(r.status, TomographyReport::Status::kNoData);
    EXPECT_EQ(r.n_success, 0u);
    EXPECT_FALSE(r.reconstructed.has_value());
}
