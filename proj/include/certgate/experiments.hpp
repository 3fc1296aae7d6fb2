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

#ifndef CERTGATE_EXPERIMENTS_HPP
#define CERTGATE_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "certgate/noise.hpp"
#include "certgate/protocols.hpp"

namespace certgate {

enum class ProtocolKind { single, cz, addressing };

std::string to_string(ProtocolKind kind);
ProtocolKind protocol_from_string(const std::string& name);

/// Named input preparation.
///
/// * basis: `label` is one character per ion from {0, 1} (for cz also
///   accepted as g/e, e.g. "ge").
/// * plus_n / minus_n: every ion in |+n> / |-n> of the gate axis.
/// * bell: (|gg> + |ee>)/sqrt(2), cz only.
/// * amplitudes: 2^n_ions qubit-manifold amplitudes, ion 0 most significant.
struct InputSpec {
    enum class Kind { basis, plus_n, minus_n, bell, amplitudes };
    Kind kind = Kind::basis;
    std::string label = "0";
    std::vector<Complex> amplitudes;
};

std::string to_string(InputSpec::Kind kind);
InputSpec::Kind input_kind_from_string(const std::string& name);

struct ExperimentSpec {
    ProtocolKind protocol = ProtocolKind::single;
    GateSpec gate;
    AmplitudeErrorModel error_model;
    double selectivity = 1.0;
    InputSpec input;
    int trials = 1;
    std::uint64_t master_seed = 0;
    ExecutionMode mode = ExecutionMode::branch_enumeration;
    int fock_cutoff = kDefaultFockCutoff;  // cz only
    int n_ions = 3;                        // addressing only
    int target = 1;                        // addressing only
    std::vector<double> crosstalk;         // addressing only, one ratio per ion

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    int n_transfers() const;
    StateSpace space() const;
};

PureState prepare_input(const ExperimentSpec& spec);

/// Reference output of the error-free gate for `input`.
PureState ideal_output(const ExperimentSpec& spec, const PureState& input);

/// Schedule of `spec`'s protocol for one error draw.
Schedule build_schedule(const ExperimentSpec& spec, std::span<const double> errors);

struct ChannelKey {
    int transfer;
    int ion;
};

struct TrajectoryResult {
    std::uint64_t index = 0;
    std::vector<double> errors;
    int clamped = 0;
    /// Exact flag probability (branch mode) or 0/1 (Monte Carlo).
    double flag_probability = 0.0;
    int flag_transfer = -1;  // Monte Carlo only
    int flag_ion = -1;
    std::optional<double> conditional_fidelity;
    double unconditional_fidelity = 0.0;
    /// Flagged mass per clean-out channel, in schedule order.
    std::vector<double> channel_flags;
};

struct ChannelStatistics {
    ChannelKey key;
    double flagged;  // mean flagged mass
    double reached;  // mean mass reaching the channel
    double rate;     // flagged / reached, 0 when unreached
};

struct EnsembleStatistics {
    int trials = 0;
    ExecutionMode mode = ExecutionMode::branch_enumeration;
    double herald_rate = 0.0;
    double herald_rate_se = 0.0;
    /// 95% interval on herald_rate: Wilson score (Monte Carlo) or
    /// herald_rate +- 1.96 se over error draws (branch enumeration).
    double wilson_low = 0.0;
    double wilson_high = 0.0;
    double no_flag_probability = 1.0;
    /// Undefined (nullopt) when no trajectory survives unflagged.
    std::optional<double> conditional_fidelity;
    double conditional_fidelity_se = 0.0;
    std::optional<double> min_conditional_fidelity;
    double unconditional_fidelity = 0.0;
    double unconditional_fidelity_se = 0.0;
    std::vector<ChannelStatistics> channels;
    std::vector<double> transfer_flags;  // flagged mass per transfer
    int clamp_count = 0;
    double rms_delta_pi = 0.0;
    /// Mean of herald_probability_analytic over the error draws.
    double analytic_flag_probability = 0.0;
    /// n_transfers * (rms/2)^2, the small-error approximation.
    double approx_flag_probability = 0.0;
};

struct EnsembleRun {
    EnsembleStatistics statistics;
    std::vector<TrajectoryResult> trajectories;
    std::vector<ChannelKey> channels;
    /// Full outcome of trajectory 0, for branch tables.
    ProtocolOutcome first_outcome;
};

/// Runs spec.trials trajectories. Result is bit-identical for any worker
/// count: trajectory t uses trajectory_rng(master_seed, t, *) and the
/// reduction runs in index order.
EnsembleRun run_ensemble_detailed(const ExperimentSpec& spec, unsigned workers = 1);
EnsembleStatistics run_ensemble(const ExperimentSpec& spec, unsigned workers = 1);

/// 1 - prod(1 - sin^2(d/2)).
double herald_probability_analytic(std::span<const double> errors);
double no_flag_probability_analytic(std::span<const double> errors);

struct SweepRow {
    double value;
    EnsembleStatistics statistics;
};

/// Sweepable parameters: delta_pi, sigma, selectivity, r_neighbor, theta_gate.
std::vector<SweepRow> sweep(const ExperimentSpec& base, const std::string& parameter, std::span<const double> values,
                            unsigned workers = 1);

/// Copy of `base` with `parameter` set to `value`.
ExperimentSpec with_parameter(const ExperimentSpec& base, const std::string& parameter, double value);

struct CertifiedVsBare {
    double certified_herald_rate;
    double certified_herald_rate_se;
    /// 1 - worst no-flag fidelity over all draws.
    double certified_conditional_infidelity;
    double bare_infidelity;
    double bare_infidelity_se;
    /// certified_herald_rate / bare_infidelity (NaN when the baseline is 0).
    double ratio;
    double rms_delta_pi;
};

/// Certified flag probability against the unconditional infidelity of the
/// same two pulses without clean-outs, on identical error draws.
CertifiedVsBare compare_certified_vs_bare(const ExperimentSpec& spec, unsigned workers = 1);

}  // namespace certgate

#endif  // CERTGATE_EXPERIMENTS_HPP
