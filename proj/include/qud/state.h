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

#ifndef QUD_STATE_H
#define QUD_STATE_H

#include <complex>
#include <optional>
#include <string>

namespace qud {

using Complex = std::complex<double>;

/// Structural tolerance on trace and positivity.
inline constexpr double kStructuralTol = 1e-12;
/// Behavioral tolerance (purity, round-trip identities).
inline constexpr double kBehavioralTol = 1e-10;
/// Results with larger magnitude saturate to the nearer eigenstate.
inline constexpr double kMaxResultMagnitude = 700.0;

/// Qubit density matrix in the {|1>, |2>} basis.
///
/// Both diagonal entries are stored so that populations far below machine
/// epsilon relative to 1 survive long update chains; every operation
/// renormalizes them to unit trace. rho21 is the conjugate of rho12.
class QubitState {
   public:
    /// |1><1|.
    QubitState() = default;

    /// Validates the invariants and throws std::invalid_argument naming the
    /// violated one. rho22 = 1 - rho11.
    static QubitState from_components(double rho11, Complex rho12);
    static QubitState from_components(double rho11, double rho22, Complex rho12);

    /// Normalizes (p1, p2) to unit trace and clamps rho12 onto the positivity
    /// boundary if round-off pushed it outside. For internal results of
    /// physically valid maps.
    static QubitState normalized(double p1, double p2, Complex rho12);

    static QubitState basis_one() { return QubitState(1.0, 0.0, 0.0); }
    static QubitState basis_two() { return QubitState(0.0, 1.0, 0.0); }
    /// Pure state sqrt(p)|1> + e^{i theta} sqrt(1-p)|2> with rho12 = psi1 psi2*.
    static QubitState pure(double p, double theta);

    double rho11() const { return rho11_; }
    double rho22() const { return rho22_; }
    Complex rho12() const { return rho12_; }
    Complex rho21() const { return std::conj(rho12_); }

    double trace() const { return rho11_ + rho22_; }
    bool is_pure(double tol = kBehavioralTol) const;
    bool is_eigenstate() const { return rho11_ == 0.0 || rho22_ == 0.0; }

    /// Bloch vector (<sigma_x>, <sigma_y>, <sigma_z>), sigma_z = |1><1| - |2><2|.
    double bloch_x() const { return 2.0 * rho12_.real(); }
    double bloch_y() const { return -2.0 * rho12_.imag(); }
    double bloch_z() const { return rho11_ - rho22_; }
    static QubitState from_bloch(double x, double y, double z);

    /// Throws std::logic_error if trace or positivity drifted.
    void check_invariants() const;

    std::string str() const;

    bool operator==(const QubitState &other) const = default;

   private:
    friend QubitState pi_pulse(const QubitState &state);
    friend QubitState apply_phase(const QubitState &state, double phi);

    QubitState(double p1, double p2, Complex c) : rho11_(p1), rho22_(p2), rho12_(c) {}

    double rho11_ = 1.0;
    double rho22_ = 0.0;
    Complex rho12_ = 0.0;
};

/// Dimensionless log-likelihood result r accumulated from a detector record.
struct MeasurementResult {
    double r = 0.0;

    /// Throws std::invalid_argument if r is not finite.
    explicit MeasurementResult(double value);
    MeasurementResult() = default;

    MeasurementResult operator+(MeasurementResult other) const { return MeasurementResult(r + other.r); }
    MeasurementResult operator-() const { return MeasurementResult(-r); }
};

/// Quantum Bayes update for an ideal QND detector:
/// rho11/rho22 is multiplied by e^{2r} with the murity held fixed.
/// Eigenstates are fixed points for every finite r.
QubitState bayes_update(const QubitState &state, MeasurementResult result);

/// rho12 / sqrt(rho11 rho22), empty at eigenstates where it is undefined.
std::optional<Complex> murity(const QubitState &state);

/// Squared Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2, closed form for 2x2.
double fidelity(const QubitState &a, const QubitState &b);

/// Half the trace norm of a - b.
double trace_distance(const QubitState &a, const QubitState &b);

/// X rho X.
QubitState pi_pulse(const QubitState &state);

/// rho12 -> rho12 e^{-i phi}.
QubitState apply_phase(const QubitState &state, double phi);

}  // namespace qud

#endif
