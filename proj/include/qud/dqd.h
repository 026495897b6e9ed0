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

#ifndef QUD_DQD_H
#define QUD_DQD_H

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "qud/rng.h"
#include "qud/state.h"

namespace qud {

/// Charge-qubit basis state that drives the detector in a given trajectory.
enum class Latent { kOne, kTwo };

inline double latent_sign(Latent latent) { return latent == Latent::kOne ? 1.0 : -1.0; }

/// Quantum point contact characterization. Defaults measure time in units of
/// the measurement time (t_m = 1) with I0 = 0.
struct DqdDetectorParams {
    double i0 = 0.0;
    double delta_i = 1.0;  // I1 - I2
    double s_i = 0.5;      // shot-noise spectral density
    double dt = 0.01;

    /// 2 S_I / dI^2.
    double t_m() const { return 2.0 * s_i / (delta_i * delta_i); }
    double current_one() const { return i0 + delta_i / 2.0; }
    double current_two() const { return i0 - delta_i / 2.0; }

    /// Throws std::invalid_argument for s_i <= 0, dt <= 0, delta_i == 0 or
    /// dt > t_m / 10.
    void validate() const;

    /// |dI| / I0 > 0.1 with I0 > 0: outside the weakly responding regime the
    /// Bayesian update still holds given r, but the detector model is suspect.
    /// I0 <= 0 is treated as an offset convention and not checked.
    bool weak_response_warning() const;
};

/// Per-step moments of the measurement result for latent |1>:
/// dr = drift + sigma N(0, 1), with drift = dt / t_m and sigma^2 = dt / t_m.
/// Both follow from the current model I = I0 + (dI/2) s_z + xi with
/// <xi(t) xi(0)> = (S_I / 2) delta(t). Latent |2> negates the drift.
struct ResultIncrement {
    double drift = 0.0;
    double sigma = 0.0;
};
ResultIncrement result_increment(const DqdDetectorParams &params);

struct TrajectoryConfig {
    uint64_t seed = 0;
    uint64_t stream = 0;
    double duration = 1.0;
    /// Unset: sampled from the initial state.
    std::optional<Latent> latent;
    /// Keep every stride-th averaged current sample (the last step is always kept).
    size_t current_stride = 1;
    /// Test hook: suppresses the shot noise.
    bool zero_noise = false;

    /// Throws std::invalid_argument for non-positive duration, zero stride or
    /// a duration that is not a whole number of steps to within one step.
    size_t step_count(double dt) const;
};

struct CurrentSample {
    size_t step = 0;  // 1-based: time = step * dt
    double i_bar = 0.0;
};

/// One detector run. r_of_t[k] is r at time (k + 1) dt.
struct CurrentRecord {
    Latent latent = Latent::kOne;
    double dt = 0.0;
    std::vector<CurrentSample> samples;
    std::vector<double> r_of_t;
    MeasurementResult r_final;

    double duration() const { return dt * static_cast<double>(r_of_t.size()); }
};

/// One with probability rho11.
Latent sample_latent(const QubitState &state, RandomStream &rng);
Latent sample_latent(const QubitState &state, uint64_t seed);

/// Integrates the detector current over the configured duration with fixed
/// latent state and converts it to r(t) = [I_bar(t) - I0] t dI / S_I.
CurrentRecord simulate_record(const DqdDetectorParams &params, const TrajectoryConfig &config, Latent latent);

/// Uses config.latent when set, otherwise samples it from `state` on the same
/// stream before the record is generated.
CurrentRecord simulate_record(const DqdDetectorParams &params, const TrajectoryConfig &config,
                              const QubitState &state);

/// Endpoint only: r(t) for latent `latent` after `steps` Euler increments.
double simulate_result(const ResultIncrement &inc, Latent latent, size_t steps, RandomStream &rng);

/// Distribution of the time-averaged current I_bar(t): a two-Gaussian mixture
/// with weights rho11, rho22, centers I1, I2 and common variance S_I / (2 t).
class OutputDensity {
   public:
    OutputDensity(const DqdDetectorParams &params, const QubitState &state, double t);

    double operator()(double i_bar) const { return pdf(i_bar); }
    double pdf(double i_bar) const;
    double cdf(double i_bar) const;

    double weight_one() const { return weight_one_; }
    double weight_two() const { return weight_two_; }
    double mean_one() const { return mean_one_; }
    double mean_two() const { return mean_two_; }
    double variance() const { return variance_; }

   private:
    double weight_one_;
    double weight_two_;
    double mean_one_;
    double mean_two_;
    double variance_;
};

OutputDensity output_density(const DqdDetectorParams &params, const QubitState &state, double t);

/// Averaged current corresponding to result r at time t.
double current_from_result(const DqdDetectorParams &params, double r, double t);

QubitState collapse_along_record(const QubitState &state, const CurrentRecord &record);

/// CSV with header "step,time,I_bar,r", one row per stored current sample.
void write_record_csv(const CurrentRecord &record, std::ostream &out);

}  // namespace qud

#endif
