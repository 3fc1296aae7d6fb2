// Copyright 2026 The certgate Authors
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

#ifndef CERTGATE_DISSIPATION_HPP
#define CERTGATE_DISSIPATION_HPP

#include <optional>
#include <utility>
#include <vector>

#include "certgate/noise.hpp"
#include "certgate/statespace.hpp"

namespace certgate {

/// Optical-pumping clean-out of one ion: population in `levels` (restricted
/// to `fock_levels` when non-empty) is pumped to Bright and heralds.
///
/// With selectivity s < 1 the pump also hits the protected population with
/// probability 1 - s, giving a false-positive herald. It never leaves target
/// population behind, so there are no false negatives.
struct CleanoutChannel {
    int ion = 0;
    LevelSet levels = LevelSet::qubit();
    std::vector<int> fock_levels;
    double selectivity = 1.0;
};

enum class HeraldKind { none, error, false_positive };

struct HeraldRecord {
    int step_index = 0;
    int ion = 0;
    bool flagged = false;
    double branch_probability = 0.0;
};

/// One outcome of a clean-out. Flagged outcomes are terminal aggregates and
/// carry no state.
struct CleanoutBranch {
    std::optional<PureState> state;
    double probability;
    HeraldKind herald;

    bool flagged() const { return herald != HeraldKind::none; }
};

/// Branches with probability below this are dropped.
inline constexpr double kBranchCutoff = 1e-14;

/// Exact branch enumeration. Returns at most three branches: unflagged,
/// flagged by residual target population, flagged by a false positive.
std::vector<CleanoutBranch> cleanout_branches(const PureState& state, const CleanoutChannel& ch);

/// The unflagged outcome alone: projected, renormalized state and its
/// probability s (1 - p). nullopt when that probability is below the cutoff.
std::optional<std::pair<PureState, double>> cleanout_survivor(const PureState& state, const CleanoutChannel& ch);

/// Kraus unraveling of the channel with the pumped population kept in the
/// Bright level, one branch per pumped source level. Used when herald
/// queries are deferred to the end of a run. `herald` is none only for the
/// unflagged branch.
struct KrausBranch {
    PureState state;
    double probability;
    HeraldKind herald;
};
std::vector<KrausBranch> cleanout_kraus_branches(const PureState& state, const CleanoutChannel& ch);

struct SampledCleanout {
    std::optional<PureState> state;  // nullopt when flagged
    HeraldRecord record;
    HeraldKind herald = HeraldKind::none;
};

SampledCleanout cleanout_sample(const PureState& state, const CleanoutChannel& ch, Rng& rng, int step_index = 0);

/// Total Bright population over all ions.
double bright_population(const PureState& state);

}  // namespace certgate

#endif  // CERTGATE_DISSIPATION_HPP
