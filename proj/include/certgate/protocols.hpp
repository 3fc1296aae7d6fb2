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

#ifndef CERTGATE_PROTOCOLS_HPP
#define CERTGATE_PROTOCOLS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "certgate/dissipation.hpp"
#include "certgate/pulses.hpp"
#include "certgate/statespace.hpp"

namespace certgate {

/// U(n, Theta) = exp(-i Theta n.sigma / 2).
struct GateSpec {
    BlochAxis axis;
    double angle = 0.0;
};

/// Rabi-frequency fraction seen by each ion of a chain when one ion is
/// addressed. The addressed ion has ratio 1.
struct CrosstalkProfile {
    std::vector<double> ratios;
};

// ---------------------------------------------------------------------------
// Schedules: the pulse / clean-out sequence of a protocol, built once per
// error draw and executed either exhaustively or along one sampled path.

struct LocalOp {
    CMatrix unitary;
    Subsystems targets;
};

/// Simultaneous drives. The ops act on disjoint couplings and commute.
struct PulseStep {
    std::string label;
    int transfer = 0;
    std::vector<LocalOp> ops;
};

struct CleanoutStep {
    std::string label;
    int transfer = 0;
    CleanoutChannel channel;
};

using ScheduleStep = std::variant<PulseStep, CleanoutStep>;

struct Schedule {
    StateSpace space;
    int n_transfers = 0;
    std::vector<ScheduleStep> steps;

    int n_cleanouts() const;
};

enum class ExecutionMode { branch_enumeration, monte_carlo };
enum class FlagQuery { immediate, deferred };

std::string to_string(ExecutionMode mode);
ExecutionMode execution_mode_from_string(const std::string& name);

/// Monte Carlo runs draw herald outcomes from trajectory_rng(seed,
/// trajectory, kHeraldStream).
struct ExecutionOptions {
    ExecutionMode mode = ExecutionMode::branch_enumeration;
    FlagQuery query = FlagQuery::immediate;
    std::uint64_t seed = 0;
    std::uint64_t trajectory = 0;
};

inline constexpr std::uint64_t kErrorStream = 0;
inline constexpr std::uint64_t kHeraldStream = 1;

struct ProtocolBranch {
    std::optional<PureState> state;  // set only on the unflagged branch
    double probability = 0.0;
    bool flagged = false;
    HeraldKind herald = HeraldKind::none;
    int flag_transfer = -1;
    int flag_ion = -1;
    std::vector<HeraldRecord> heralds;
};

struct TraceEntry {
    std::string label;
    PureState state;
};

struct ProtocolOutcome {
    ExecutionMode mode = ExecutionMode::branch_enumeration;
    std::vector<ProtocolBranch> branches;
    /// Unflagged-path state after every schedule step.
    std::vector<TraceEntry> trace;
    /// Largest population seen in the top Fock level (0 without motion).
    double max_cutoff_population = 0.0;

    const ProtocolBranch* no_flag() const;
    double no_flag_probability() const;
    double flag_probability() const;
    /// Latest trace entry whose label equals `label`.
    const PureState& traced(const std::string& label) const;
};

ProtocolOutcome enumerate_branches(const Schedule& schedule, const PureState& input,
                                   FlagQuery query = FlagQuery::immediate);
ProtocolOutcome sample_trajectory(const Schedule& schedule, const PureState& input, Rng& rng);
ProtocolOutcome execute(const Schedule& schedule, const PureState& input, const ExecutionOptions& options);

// ---------------------------------------------------------------------------
// Single-qubit gate.

Eigen::Matrix2cd ideal_single_qubit(const GateSpec& spec);

/// Ideal gate applied to ion `ion` of `state`.
PureState apply_ideal_single_qubit(const PureState& state, const GateSpec& spec, int ion = 0);

/// transfer 1 (area pi + d1), clean-out of the qubit manifold, transfer 2
/// (area pi + d2, pair phases from gate_phase_shifts), clean-out of the
/// auxiliary manifold.
Schedule certified_single_qubit_schedule(const GateSpec& spec, const std::array<double, 2>& errors,
                                         double selectivity = 1.0);

ProtocolOutcome certified_single_qubit(const PureState& state, const GateSpec& spec,
                                       const std::array<double, 2>& errors, double selectivity = 1.0,
                                       const ExecutionOptions& options = {});

struct BareResult {
    PureState final_state;
    double fidelity;
};

/// Both transfers with their errors and no clean-outs; fidelity of the
/// unconditional output against the ideal gate.
BareResult bare_single_qubit(const PureState& state, const GateSpec& spec, const std::array<double, 2>& errors);

// ---------------------------------------------------------------------------
// Cirac-Zoller gate. Ion 0 is m, ion 1 is n; g is Q0 and e is Q1.

inline constexpr IonLevel kGround = IonLevel::Q0;
inline constexpr IonLevel kExcited = IonLevel::Q1;
inline constexpr int kDefaultFockCutoff = 3;

/// diag(1, 1, 1, -1) on (gg, ge, eg, ee).
Eigen::Matrix4cd ideal_cz();

/// Ideal CZ on the qubit part of a two-ion state, motion left as is.
PureState apply_ideal_cz(const PureState& state);

Schedule certified_cz_schedule(const StateSpace& space, const std::array<double, 4>& errors,
                               double selectivity = 1.0);

ProtocolOutcome certified_cz(const PureState& state, const std::array<double, 4>& errors, double selectivity = 1.0,
                             const ExecutionOptions& options = {});

// ---------------------------------------------------------------------------
// Addressed single-qubit gate with crosstalk onto the rest of the chain.

Schedule certified_addressed_schedule(const StateSpace& space, int target, const GateSpec& spec,
                                      const CrosstalkProfile& xtalk, const std::array<double, 2>& errors,
                                      double selectivity = 1.0);

ProtocolOutcome certified_addressed_gate(const PureState& chain, int target, const GateSpec& spec,
                                         const CrosstalkProfile& xtalk, const std::array<double, 2>& errors,
                                         double selectivity = 1.0, const ExecutionOptions& options = {});

/// Throws std::invalid_argument unless every ion of `state` is in its qubit
/// manifold (and the motional mode, if any, in |0>).
void require_qubit_input(const PureState& state, const std::string& where);

}  // namespace certgate

#endif  // CERTGATE_PROTOCOLS_HPP
