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

#ifndef QUD_OUTCOME_H
#define QUD_OUTCOME_H

#include <optional>

#include "qud/state.h"

namespace qud {

/// What the detector reports at the end of an undo attempt.
enum class Light { kGreen, kRed };

/// Result of one uncollapse attempt on either system.
struct UndoOutcome {
    bool success = false;
    bool timeout_hit = false;
    /// Time from the start of the undoing stage to detector switch-off; set
    /// only on success.
    std::optional<double> undo_time;
    /// Time the undoing stage ran, whatever the outcome.
    double elapsed = 0.0;
    /// Empty when the qubit was destroyed (phase-qubit tunneling).
    std::optional<QubitState> final_state;
    /// Accumulated result when the detector stopped (charge qubit only).
    double r_at_stop = 0.0;

    Light light() const { return success ? Light::kGreen : Light::kRed; }
};

}  // namespace qud

#endif
