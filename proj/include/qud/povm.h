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

#ifndef QUD_POVM_H
#define QUD_POVM_H

// Measurement operators for both systems and the probabilistic-inversion
// bound lambda_min(M^dag M) / Tr(M rho M^dag).

#include <array>
#include <span>

#include "qud/phase_qubit.h"
#include "qud/state.h"

namespace qud {

/// Row-major 2x2 complex matrix.
struct Matrix2 {
    std::array<Complex, 4> m{};

    Complex &operator()(int row, int col) { return m[2 * row + col]; }
    const Complex &operator()(int row, int col) const { return m[2 * row + col]; }

    static Matrix2 identity() { return diagonal(1.0, 1.0); }
    static Matrix2 diagonal(Complex a, Complex d);
    static Matrix2 from_state(const QubitState &state);

    Matrix2 adjoint() const;
    Matrix2 operator*(const Matrix2 &other) const;
    Matrix2 operator+(const Matrix2 &other) const;
    Matrix2 operator*(Complex scale) const;
    Complex trace() const { return m[0] + m[3]; }
    /// Largest entrywise modulus of the difference.
    double distance(const Matrix2 &other) const;
};

/// Eigenvalues (ascending) of a Hermitian 2x2 matrix in closed form.
std::array<double, 2> hermitian_eigenvalues(const Matrix2 &h);

struct MeasurementOperator {
    Matrix2 m;

    /// M^dag M.
    Matrix2 effect() const { return m.adjoint() * m; }
    /// Tr(M rho M^dag).
    double probability(const QubitState &state) const;
    /// M rho M^dag / Tr(M rho M^dag); throws std::domain_error at zero weight.
    QubitState apply(const QubitState &state) const;
};

/// Largest entrywise deviation of sum M_k^dag M_k from the identity.
double completeness_residual(std::span<const MeasurementOperator> operators);

/// diag(e^{r/2}, e^{-r/2}): the charge-qubit operator for result r, up to the
/// r-dependent scalar that only fixes outcome probabilities.
MeasurementOperator dqd_operator(MeasurementResult r);

/// Normalized density form diag(sqrt(p1(r)), sqrt(p2(r))) for a measurement
/// of duration t, where p_{1,2}(r) = N(r; +-t/t_m, t/t_m) are the densities of
/// the result given |1>, |2>. Integrating M^dag M over r gives the identity.
MeasurementOperator dqd_density_operator(MeasurementResult r, double t_over_tm);

/// Quadrature of the density form over r in [lo, hi] with n Simpson intervals;
/// returns the largest deviation from the identity.
double dqd_completeness_residual(double t_over_tm, double lo, double hi, int n);

/// Null-result operator diag(sqrt(s1), sqrt(s2) e^{i phi}).
MeasurementOperator phase_null_operator(const PhaseQubitParams &params);

/// Tunneling effect diag(1 - s1, 1 - s2) as an operator with that M^dag M.
MeasurementOperator phase_tunnel_operator(const PhaseQubitParams &params);

/// lambda_min(M^dag M) / Tr(M rho M^dag). Throws std::domain_error when the
/// outcome has zero probability.
double undo_bound(const MeasurementOperator &op, const QubitState &state);

}  // namespace qud

#endif
