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

#include "qud/state.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qud {

QubitState QubitState::from_components(double rho11, Complex rho12) {
    return from_components(rho11, 1.0 - rho11, rho12);
}

QubitState QubitState::from_components(double rho11, double rho22, Complex rho12) {
    if (!std::isfinite(rho11) || !std::isfinite(rho22) || !std::isfinite(rho12.real()) ||
        !std::isfinite(rho12.imag())) {
        throw std::invalid_argument("QubitState: non-finite component");
    }
    if (rho11 < -kStructuralTol || rho11 > 1.0 + kStructuralTol) {
        throw std::invalid_argument("QubitState: rho11 outside [0, 1]");
    }
    if (rho22 < -kStructuralTol || rho22 > 1.0 + kStructuralTol) {
        throw std::invalid_argument("QubitState: rho22 outside [0, 1]");
    }
    if (std::abs(rho11 + rho22 - 1.0) > kStructuralTol) {
        throw std::invalid_argument("QubitState: trace differs from 1");
    }
    rho11 = std::clamp(rho11, 0.0, 1.0);
    rho22 = std::clamp(rho22, 0.0, 1.0);
    if (std::norm(rho12) > rho11 * rho22 + kStructuralTol) {
        throw std::invalid_argument("QubitState: |rho12|^2 exceeds rho11*rho22 (not positive)");
    }
    return normalized(rho11, rho22, rho12);
}

QubitState QubitState::normalized(double p1, double p2, Complex rho12) {
    double s = p1 + p2;
    p1 /= s;
    p2 /= s;
    double bound = p1 * p2;
    double n = std::norm(rho12);
    if (n > bound) {
        rho12 *= n > 0 ? std::sqrt(bound / n) : 0.0;
    }
    return QubitState(p1, p2, rho12);
}

QubitState QubitState::pure(double p, double theta) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("QubitState::pure: population outside [0, 1]");
    }
    double amp = std::sqrt(p * (1.0 - p));
    return QubitState(p, 1.0 - p, std::polar(amp, -theta));
}

QubitState QubitState::from_bloch(double x, double y, double z) {
    return from_components((1.0 + z) / 2.0, (1.0 - z) / 2.0, Complex(x / 2.0, -y / 2.0));
}

bool QubitState::is_pure(double tol) const {
    return std::abs(std::norm(rho12_) - rho11_ * rho22_) <= tol;
}

void QubitState::check_invariants() const {
    if (std::abs(trace() - 1.0) >= kStructuralTol) {
        throw std::logic_error("QubitState: trace drift " + str());
    }
    if (rho11_ < 0.0 || rho22_ < 0.0) {
        throw std::logic_error("QubitState: negative population " + str());
    }
    if (std::norm(rho12_) > rho11_ * rho22_ + kStructuralTol) {
        throw std::logic_error("QubitState: positivity violated " + str());
    }
}

std::string QubitState::str() const {
    std::ostringstream out;
    out.precision(17);
    out << "(rho11=" << rho11_ << ", rho22=" << rho22_ << ", rho12=" << rho12_.real() << (rho12_.imag() < 0 ? "" : "+")
        << rho12_.imag() << "i)";
    return out.str();
}

MeasurementResult::MeasurementResult(double value) : r(value) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument("MeasurementResult: r must be finite");
    }
}

QubitState bayes_update(const QubitState &state, MeasurementResult result) {
    double r = result.r;
    if (r == 0.0 || state.is_eigenstate()) {
        return state;
    }
    if (r > kMaxResultMagnitude) {
        return QubitState::basis_one();
    }
    if (r < -kMaxResultMagnitude) {
        return QubitState::basis_two();
    }
    // Kraus form diag(e^{r/2}, e^{-r/2}) rescaled by e^{-|r|/2} so nothing overflows.
    double p1 = state.rho11();
    double p2 = state.rho22();
    double w = std::exp(-2.0 * std::abs(r));
    double coherence = std::exp(-std::abs(r));
    if (r > 0) {
        double z = p1 + p2 * w;
        return QubitState::normalized(p1 / z, p2 * w / z, state.rho12() * (coherence / z));
    }
    double z = p1 * w + p2;
    return QubitState::normalized(p1 * w / z, p2 / z, state.rho12() * (coherence / z));
}

std::optional<Complex> murity(const QubitState &state) {
    double d = state.rho11() * state.rho22();
    if (!(d > 0.0)) {
        return std::nullopt;
    }
    return state.rho12() / std::sqrt(d);
}

double fidelity(const QubitState &a, const QubitState &b) {
    double overlap =
        a.rho11() * b.rho11() + a.rho22() * b.rho22() + 2.0 * (a.rho12() * std::conj(b.rho12())).real();
    double det_a = std::max(0.0, a.rho11() * a.rho22() - std::norm(a.rho12()));
    double det_b = std::max(0.0, b.rho11() * b.rho22() - std::norm(b.rho12()));
    return std::clamp(overlap + 2.0 * std::sqrt(det_a * det_b), 0.0, 1.0);
}

double trace_distance(const QubitState &a, const QubitState &b) {
    double dx = a.bloch_x() - b.bloch_x();
    double dy = a.bloch_y() - b.bloch_y();
    double dz = a.bloch_z() - b.bloch_z();
    return 0.5 * std::sqrt(dx * dx + dy * dy + dz * dz);
}

QubitState pi_pulse(const QubitState &state) {
    return QubitState(state.rho22(), state.rho11(), std::conj(state.rho12()));
}

QubitState apply_phase(const QubitState &state, double phi) {
    if (phi == 0.0) {
        return state;
    }
    return QubitState(state.rho11(), state.rho22(), state.rho12() * std::polar(1.0, -phi));
}

}  // namespace qud
