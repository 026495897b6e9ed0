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

#include "qud/povm.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qud {

Matrix2 Matrix2::diagonal(Complex a, Complex d) {
    Matrix2 out;
    out.m = {a, 0.0, 0.0, d};
    return out;
}

Matrix2 Matrix2::from_state(const QubitState &state) {
    Matrix2 out;
    out.m = {state.rho11(), state.rho12(), state.rho21(), state.rho22()};
    return out;
}

Matrix2 Matrix2::adjoint() const {
    Matrix2 out;
    out.m = {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])};
    return out;
}

Matrix2 Matrix2::operator*(const Matrix2 &o) const {
    Matrix2 out;
    out.m = {m[0] * o.m[0] + m[1] * o.m[2], m[0] * o.m[1] + m[1] * o.m[3], m[2] * o.m[0] + m[3] * o.m[2],
             m[2] * o.m[1] + m[3] * o.m[3]};
    return out;
}

Matrix2 Matrix2::operator+(const Matrix2 &o) const {
    Matrix2 out;
    for (int k = 0; k < 4; ++k) {
        out.m[k] = m[k] + o.m[k];
    }
    return out;
}

Matrix2 Matrix2::operator*(Complex scale) const {
    Matrix2 out;
    for (int k = 0; k < 4; ++k) {
        out.m[k] = m[k] * scale;
    }
    return out;
}

double Matrix2::distance(const Matrix2 &o) const {
    double d = 0.0;
    for (int k = 0; k < 4; ++k) {
        d = std::max(d, std::abs(m[k] - o.m[k]));
    }
    return d;
}

std::array<double, 2> hermitian_eigenvalues(const Matrix2 &h) {
    double a = h(0, 0).real();
    double d = h(1, 1).real();
    double half_sum = 0.5 * (a + d);
    double half_diff = 0.5 * (a - d);
    double radius = std::hypot(half_diff, std::abs(h(0, 1)));
    double upper = half_sum + radius;
    // Small root from the determinant avoids cancellation when it is tiny.
    double det = a * d - std::norm(h(0, 1));
    double lower = upper > 0.0 ? det / upper : half_sum - radius;
    return {lower, upper};
}

double MeasurementOperator::probability(const QubitState &state) const {
    return (m * Matrix2::from_state(state) * m.adjoint()).trace().real();
}

QubitState MeasurementOperator::apply(const QubitState &state) const {
    Matrix2 out = m * Matrix2::from_state(state) * m.adjoint();
    double p = out.trace().real();
    if (!(p > 0.0)) {
        throw std::domain_error("MeasurementOperator::apply: outcome has zero probability");
    }
    return QubitState::normalized(out(0, 0).real() / p, out(1, 1).real() / p, out(0, 1) / p);
}

double completeness_residual(std::span<const MeasurementOperator> operators) {
    Matrix2 sum;
    for (const auto &op : operators) {
        sum = sum + op.effect();
    }
    return sum.distance(Matrix2::identity());
}

MeasurementOperator dqd_operator(MeasurementResult r) {
    return {Matrix2::diagonal(std::exp(r.r / 2.0), std::exp(-r.r / 2.0))};
}

MeasurementOperator dqd_density_operator(MeasurementResult r, double t_over_tm) {
    if (!(t_over_tm > 0.0)) {
        throw std::invalid_argument("dqd_density_operator: duration must be positive");
    }
    double mu = t_over_tm;
    double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * mu);
    double a = r.r - mu;
    double b = r.r + mu;
    double p1 = norm * std::exp(-a * a / (2.0 * mu));
    double p2 = norm * std::exp(-b * b / (2.0 * mu));
    return {Matrix2::diagonal(std::sqrt(p1), std::sqrt(p2))};
}

double dqd_completeness_residual(double t_over_tm, double lo, double hi, int n) {
    if (n % 2 != 0) {
        ++n;
    }
    double h = (hi - lo) / n;
    Matrix2 sum;
    for (int k = 0; k <= n; ++k) {
        double weight = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        MeasurementOperator op = dqd_density_operator(MeasurementResult(lo + k * h), t_over_tm);
        sum = sum + op.effect() * (weight * h / 3.0);
    }
    return sum.distance(Matrix2::identity());
}

MeasurementOperator phase_null_operator(const PhaseQubitParams &params) {
    // rho12 picks up M11 conj(M22), so the phase sits as e^{+i phi} on |2>.
    return {Matrix2::diagonal(std::sqrt(params.survival_one()), std::polar(std::sqrt(params.survival_two()), params.phi))};
}

MeasurementOperator phase_tunnel_operator(const PhaseQubitParams &params) {
    return {Matrix2::diagonal(std::sqrt(1.0 - params.survival_one()), std::sqrt(1.0 - params.survival_two()))};
}

double undo_bound(const MeasurementOperator &op, const QubitState &state) {
    double p = op.probability(state);
    if (!(p > 0.0)) {
        throw std::domain_error("undo_bound: outcome has zero probability");
    }
    double lambda_min = std::max(0.0, hermitian_eigenvalues(op.effect())[0]);
    return lambda_min / p;
}

}  // namespace qud
