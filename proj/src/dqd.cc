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

#include "qud/dqd.h"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "qud/stats.h"

namespace qud {

void DqdDetectorParams::validate() const {
    if (!(s_i > 0.0) || !std::isfinite(s_i)) {
        throw std::invalid_argument("detector: s_i must be positive");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("detector: dt must be positive");
    }
    if (delta_i == 0.0 || !std::isfinite(delta_i) || !std::isfinite(i0)) {
        throw std::invalid_argument("detector: delta_i must be finite and nonzero");
    }
    if (dt > t_m() / 10.0) {
        throw std::invalid_argument("detector: dt exceeds t_m/10 (discretization too coarse)");
    }
}

bool DqdDetectorParams::weak_response_warning() const { return i0 > 0.0 && std::abs(delta_i) / i0 > 0.1; }

ResultIncrement result_increment(const DqdDetectorParams &params) {
    // Over one step the averaged-current fluctuation integrates to
    // dq = (dI/2) dt + sqrt(S_I dt / 2) N, and dr = dq dI / S_I.
    double scale = params.delta_i / params.s_i;
    ResultIncrement inc;
    inc.drift = scale * (params.delta_i / 2.0) * params.dt;
    inc.sigma = std::abs(scale) * std::sqrt(params.s_i * params.dt / 2.0);
    return inc;
}

size_t TrajectoryConfig::step_count(double dt) const {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw std::invalid_argument("trajectory: duration must be positive");
    }
    if (current_stride == 0) {
        throw std::invalid_argument("trajectory: current_stride must be at least 1");
    }
    double steps = std::round(duration / dt);
    if (steps < 1.0 || std::abs(steps * dt - duration) > dt) {
        throw std::invalid_argument("trajectory: duration is not a whole number of steps");
    }
    return static_cast<size_t>(steps);
}

Latent sample_latent(const QubitState &state, RandomStream &rng) {
    return rng.uniform() < state.rho11() ? Latent::kOne : Latent::kTwo;
}

Latent sample_latent(const QubitState &state, uint64_t seed) {
    RandomStream rng(seed, 0);
    return sample_latent(state, rng);
}

namespace {

CurrentRecord simulate_with_stream(const DqdDetectorParams &params, const TrajectoryConfig &config, Latent latent,
                                   RandomStream &rng) {
    params.validate();
    size_t steps = config.step_count(params.dt);
    double mean_step = latent_sign(latent) * params.delta_i / 2.0 * params.dt;
    double noise_step = config.zero_noise ? 0.0 : std::sqrt(params.s_i * params.dt / 2.0);
    double to_result = params.delta_i / params.s_i;

    CurrentRecord record;
    record.latent = latent;
    record.dt = params.dt;
    record.r_of_t.reserve(steps);
    record.samples.reserve(steps / config.current_stride + 1);

    // Integrated current minus I0 t.
    double charge = 0.0;
    for (size_t k = 1; k <= steps; ++k) {
        charge += mean_step;
        if (noise_step != 0.0) {
            charge += noise_step * rng.normal();
        }
        record.r_of_t.push_back(charge * to_result);
        if (k % config.current_stride == 0 || k == steps) {
            double t = static_cast<double>(k) * params.dt;
            record.samples.push_back({k, params.i0 + charge / t});
        }
    }
    record.r_final = MeasurementResult(record.r_of_t.back());
    return record;
}

}  // namespace

CurrentRecord simulate_record(const DqdDetectorParams &params, const TrajectoryConfig &config, Latent latent) {
    RandomStream rng(config.seed, config.stream);
    return simulate_with_stream(params, config, latent, rng);
}

CurrentRecord simulate_record(const DqdDetectorParams &params, const TrajectoryConfig &config,
                              const QubitState &state) {
    RandomStream rng(config.seed, config.stream);
    Latent latent = config.latent ? *config.latent : sample_latent(state, rng);
    return simulate_with_stream(params, config, latent, rng);
}

double simulate_result(const ResultIncrement &inc, Latent latent, size_t steps, RandomStream &rng) {
    double drift = latent_sign(latent) * inc.drift;
    double r = 0.0;
    for (size_t k = 0; k < steps; ++k) {
        r += drift + inc.sigma * rng.normal();
    }
    return r;
}

OutputDensity::OutputDensity(const DqdDetectorParams &params, const QubitState &state, double t)
    : weight_one_(state.rho11()),
      weight_two_(state.rho22()),
      mean_one_(params.current_one()),
      mean_two_(params.current_two()),
      variance_(params.s_i / (2.0 * t)) {
    if (!(t > 0.0)) {
        throw std::invalid_argument("output_density: t must be positive");
    }
}

double OutputDensity::pdf(double i_bar) const {
    double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * variance_);
    double a = i_bar - mean_one_;
    double b = i_bar - mean_two_;
    return norm * (weight_one_ * std::exp(-a * a / (2.0 * variance_)) + weight_two_ * std::exp(-b * b / (2.0 * variance_)));
}

double OutputDensity::cdf(double i_bar) const {
    double sd = std::sqrt(variance_);
    return weight_one_ * normal_cdf((i_bar - mean_one_) / sd) + weight_two_ * normal_cdf((i_bar - mean_two_) / sd);
}

OutputDensity output_density(const DqdDetectorParams &params, const QubitState &state, double t) {
    return OutputDensity(params, state, t);
}

double current_from_result(const DqdDetectorParams &params, double r, double t) {
    return params.i0 + r * params.s_i / (t * params.delta_i);
}

QubitState collapse_along_record(const QubitState &state, const CurrentRecord &record) {
    return bayes_update(state, record.r_final);
}

void write_record_csv(const CurrentRecord &record, std::ostream &out) {
    out << "step,time,I_bar,r\n";
    char line[128];
    for (const auto &s : record.samples) {
        double t = static_cast<double>(s.step) * record.dt;
        std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g\n", s.step, t, s.i_bar, record.r_of_t[s.step - 1]);
        out << line;
    }
}

}  // namespace qud
