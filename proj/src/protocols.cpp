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

#include "certgate/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace certgate {

namespace {

constexpr double kInputTol = 1e-12;
constexpr std::size_t kMaxDeferredBranches = 200000;
constexpr double kPi = std::numbers::pi;

std::string transfer_label(int t) { return "transfer " + std::to_string(t + 1); }
std::string cleanout_label(int t) { return "cleanout " + std::to_string(t + 1); }

double top_fock_population(const PureState& state) {
    const StateSpace& space = state.space();
    if (!space.has_motion()) return 0.0;
    double p = 0.0;
    for (std::size_t i = 0; i < space.dimension(); ++i) {
        if (space.fock_of(i) == space.fock_cutoff()) p += std::norm(state[i]);
    }
    return p;
}

PureState apply_pulse(const PureState& state, const PulseStep& step) {
    PureState out = state;
    for (const LocalOp& op : step.ops) out = apply_unitary(out, op.unitary, op.targets);
    return out;
}

LocalOp ion_transfer(const TransferPulse& pulse, int ion) {
    return {embed_ion_operator(transfer_unitary(pulse)), Subsystems{{ion}, false}};
}

LocalOp sideband_op(const SidebandPulse& pulse, const StateSpace& space) {
    return {sideband_unitary(pulse, space), Subsystems{{pulse.ion}, space.has_motion()}};
}

CleanoutStep cleanout(int transfer, int ion, LevelSet levels, double s, std::vector<int> fock = {}) {
    return {cleanout_label(transfer), transfer, CleanoutChannel{ion, levels, std::move(fock), s}};
}

}  // namespace

int Schedule::n_cleanouts() const {
    int n = 0;
    for (const auto& s : steps) n += std::holds_alternative<CleanoutStep>(s) ? 1 : 0;
    return n;
}

std::string to_string(ExecutionMode mode) {
    return mode == ExecutionMode::branch_enumeration ? "branch" : "mc";
}

ExecutionMode execution_mode_from_string(const std::string& name) {
    if (name == "branch") return ExecutionMode::branch_enumeration;
    if (name == "mc") return ExecutionMode::monte_carlo;
    throw std::invalid_argument("unknown execution mode '" + name + "' (expected branch or mc)");
}

const ProtocolBranch* ProtocolOutcome::no_flag() const {
    for (const auto& b : branches) {
        if (!b.flagged) return &b;
    }
    return nullptr;
}

double ProtocolOutcome::no_flag_probability() const {
    const ProtocolBranch* b = no_flag();
    return b ? b->probability : 0.0;
}

double ProtocolOutcome::flag_probability() const {
    double p = 0.0;
    for (const auto& b : branches) {
        if (b.flagged) p += b.probability;
    }
    return p;
}

const PureState& ProtocolOutcome::traced(const std::string& label) const {
    for (auto it = trace.rbegin(); it != trace.rend(); ++it) {
        if (it->label == label) return it->state;
    }
    throw std::out_of_range("ProtocolOutcome::traced: no trace entry '" + label + "'");
}

// ---------------------------------------------------------------------------

namespace {

ProtocolOutcome enumerate_immediate(const Schedule& schedule, const PureState& input) {
    ProtocolOutcome out;
    out.mode = ExecutionMode::branch_enumeration;
    std::optional<PureState> live = input;
    double weight = 1.0;
    std::vector<HeraldRecord> heralds;

    for (const ScheduleStep& step : schedule.steps) {
        if (const auto* pulse = std::get_if<PulseStep>(&step)) {
            live = apply_pulse(*live, *pulse);
            out.max_cutoff_population = std::max(out.max_cutoff_population, top_fock_population(*live));
            out.trace.push_back({pulse->label, *live});
            continue;
        }
        const auto& clean = std::get<CleanoutStep>(step);
        std::optional<PureState> next;
        double next_weight = 0.0;
        for (CleanoutBranch& b : cleanout_branches(*live, clean.channel)) {
            HeraldRecord rec{clean.transfer, clean.channel.ion, b.flagged(), b.probability};
            if (b.flagged()) {
                ProtocolBranch fb;
                fb.probability = weight * b.probability;
                fb.flagged = true;
                fb.herald = b.herald;
                fb.flag_transfer = clean.transfer;
                fb.flag_ion = clean.channel.ion;
                fb.heralds = heralds;
                fb.heralds.push_back(rec);
                out.branches.push_back(std::move(fb));
            } else {
                next = std::move(b.state);
                next_weight = weight * b.probability;
                heralds.push_back(rec);
            }
        }
        if (!next) {
            live.reset();
            break;
        }
        live = std::move(next);
        weight = next_weight;
        out.trace.push_back({clean.label, *live});
    }
    if (live) {
        ProtocolBranch nb;
        nb.state = std::move(live);
        nb.probability = weight;
        nb.heralds = std::move(heralds);
        out.branches.insert(out.branches.begin(), std::move(nb));
    }
    return out;
}

// Flagged branches keep evolving with their pumped population parked in
// Bright; the herald is read only once the schedule has finished.
ProtocolOutcome enumerate_deferred(const Schedule& schedule, const PureState& input) {
    struct Path {
        PureState state;
        double weight;
        int first_transfer = -1;
        int first_ion = -1;
        HeraldKind herald = HeraldKind::none;
        std::vector<HeraldRecord> heralds;
    };
    ProtocolOutcome out;
    out.mode = ExecutionMode::branch_enumeration;
    std::vector<Path> paths;
    paths.push_back(Path{input, 1.0, -1, -1, HeraldKind::none, {}});

    for (const ScheduleStep& step : schedule.steps) {
        if (const auto* pulse = std::get_if<PulseStep>(&step)) {
            for (Path& p : paths) {
                p.state = apply_pulse(p.state, *pulse);
                if (p.first_transfer < 0) {
                    out.max_cutoff_population = std::max(out.max_cutoff_population, top_fock_population(p.state));
                    out.trace.push_back({pulse->label, p.state});
                }
            }
            continue;
        }
        const auto& clean = std::get<CleanoutStep>(step);
        std::vector<Path> next;
        for (Path& p : paths) {
            for (KrausBranch& k : cleanout_kraus_branches(p.state, clean.channel)) {
                const bool pumped = k.herald != HeraldKind::none;
                Path child{std::move(k.state), p.weight * k.probability, p.first_transfer, p.first_ion, p.herald,
                           p.heralds};
                child.heralds.push_back({clean.transfer, clean.channel.ion, pumped, k.probability});
                if (pumped && child.first_transfer < 0) {
                    child.first_transfer = clean.transfer;
                    child.first_ion = clean.channel.ion;
                    child.herald = k.herald;
                }
                if (child.first_transfer < 0) out.trace.push_back({clean.label, child.state});
                next.push_back(std::move(child));
            }
        }
        if (next.size() > kMaxDeferredBranches) throw std::runtime_error("deferred enumeration: too many branches");
        paths = std::move(next);
    }

    // End-of-run query: a path is flagged iff some ion sits in Bright.
    for (Path& p : paths) {
        const bool bright = bright_population(p.state) > 0.5;
        if (bright != (p.first_transfer >= 0)) throw std::logic_error("deferred enumeration: herald bookkeeping mismatch");
        if (!bright) {
            ProtocolBranch nb;
            nb.state = std::move(p.state);
            nb.probability = p.weight;
            nb.heralds = std::move(p.heralds);
            out.branches.insert(out.branches.begin(), std::move(nb));
            continue;
        }
        ProtocolBranch* group = nullptr;
        for (auto& b : out.branches) {
            if (b.flagged && b.flag_transfer == p.first_transfer && b.flag_ion == p.first_ion && b.herald == p.herald) {
                group = &b;
            }
        }
        if (!group) {
            ProtocolBranch fb;
            fb.flagged = true;
            fb.herald = p.herald;
            fb.flag_transfer = p.first_transfer;
            fb.flag_ion = p.first_ion;
            out.branches.push_back(std::move(fb));
            group = &out.branches.back();
        }
        group->probability += p.weight;
    }
    return out;
}

}  // namespace

ProtocolOutcome enumerate_branches(const Schedule& schedule, const PureState& input, FlagQuery query) {
    if (!(input.space() == schedule.space)) throw std::invalid_argument("enumerate_branches: state space mismatch");
    return query == FlagQuery::immediate ? enumerate_immediate(schedule, input) : enumerate_deferred(schedule, input);
}

ProtocolOutcome sample_trajectory(const Schedule& schedule, const PureState& input, Rng& rng) {
    if (!(input.space() == schedule.space)) throw std::invalid_argument("sample_trajectory: state space mismatch");
    ProtocolOutcome out;
    out.mode = ExecutionMode::monte_carlo;
    ProtocolBranch branch;
    branch.probability = 1.0;
    PureState live = input;
    for (const ScheduleStep& step : schedule.steps) {
        if (const auto* pulse = std::get_if<PulseStep>(&step)) {
            live = apply_pulse(live, *pulse);
            out.max_cutoff_population = std::max(out.max_cutoff_population, top_fock_population(live));
            out.trace.push_back({pulse->label, live});
            continue;
        }
        const auto& clean = std::get<CleanoutStep>(step);
        SampledCleanout s = cleanout_sample(live, clean.channel, rng, clean.transfer);
        branch.heralds.push_back(s.record);
        if (s.record.flagged) {
            branch.flagged = true;
            branch.herald = s.herald;
            branch.flag_transfer = clean.transfer;
            branch.flag_ion = clean.channel.ion;
            out.branches.push_back(std::move(branch));
            return out;
        }
        live = std::move(*s.state);
        out.trace.push_back({clean.label, live});
    }
    branch.state = std::move(live);
    out.branches.push_back(std::move(branch));
    return out;
}

ProtocolOutcome execute(const Schedule& schedule, const PureState& input, const ExecutionOptions& options) {
    if (options.mode == ExecutionMode::branch_enumeration) return enumerate_branches(schedule, input, options.query);
    Rng rng = trajectory_rng(options.seed, options.trajectory, kHeraldStream);
    return sample_trajectory(schedule, input, rng);
}

void require_qubit_input(const PureState& state, const std::string& where) {
    const StateSpace& space = state.space();
    for (int ion = 0; ion < space.n_ions(); ++ion) {
        if (manifold_population(state, ion, LevelSet::qubit()) < 1.0 - kInputTol) {
            throw std::invalid_argument(where + ": ion " + std::to_string(ion) + " has population outside the qubit manifold");
        }
    }
    if (space.has_motion() && motional_population_outside(state, 0) > kInputTol) {
        throw std::invalid_argument(where + ": motional mode is not in its ground state");
    }
}

// ---------------------------------------------------------------------------

Eigen::Matrix2cd ideal_single_qubit(const GateSpec& spec) {
    const Eigen::Vector3d n = spec.axis.unit_vector();
    const Complex i{0.0, 1.0};
    Eigen::Matrix2cd n_sigma;
    n_sigma << n.z(), Complex(n.x(), -n.y()), Complex(n.x(), n.y()), -n.z();
    return std::cos(spec.angle / 2) * Eigen::Matrix2cd::Identity() - i * std::sin(spec.angle / 2) * n_sigma;
}

PureState apply_ideal_single_qubit(const PureState& state, const GateSpec& spec, int ion) {
    CMatrix u = CMatrix::Identity(kLevelsPerIon, kLevelsPerIon);
    u.topLeftCorner<2, 2>() = ideal_single_qubit(spec);
    return apply_unitary(state, u, Subsystems{{ion}, false});
}

Schedule certified_single_qubit_schedule(const GateSpec& spec, const std::array<double, 2>& errors, double selectivity) {
    const StateSpace space(1);
    return certified_addressed_schedule(space, 0, spec, CrosstalkProfile{{1.0}}, errors, selectivity);
}

ProtocolOutcome certified_single_qubit(const PureState& state, const GateSpec& spec,
                                       const std::array<double, 2>& errors, double selectivity,
                                       const ExecutionOptions& options) {
    if (state.space().n_ions() != 1 || state.space().has_motion()) {
        throw std::invalid_argument("certified_single_qubit: expected a single bare ion");
    }
    require_qubit_input(state, "certified_single_qubit");
    return execute(certified_single_qubit_schedule(spec, errors, selectivity), state, options);
}

BareResult bare_single_qubit(const PureState& state, const GateSpec& spec, const std::array<double, 2>& errors) {
    if (state.space().n_ions() != 1 || state.space().has_motion()) {
        throw std::invalid_argument("bare_single_qubit: expected a single bare ion");
    }
    require_qubit_input(state, "bare_single_qubit");
    const ToneSet tones{spec.axis};
    const auto [chi_plus, chi_minus] = gate_phase_shifts(spec.angle);
    PureState s = apply_unitary(state, embed_ion_operator(transfer_unitary({tones, kPi + errors[0]})), Subsystems{{0}});
    s = apply_unitary(s, embed_ion_operator(transfer_unitary({tones, kPi + errors[1], chi_plus, chi_minus},
                                                             TransferDirection::aux_to_qubit)),
                      Subsystems{{0}});
    const PureState ideal = apply_ideal_single_qubit(state, spec);
    const double f = fidelity_up_to_global_phase(ideal, s);
    return {std::move(s), f};
}

// ---------------------------------------------------------------------------

Schedule certified_addressed_schedule(const StateSpace& space, int target, const GateSpec& spec,
                                      const CrosstalkProfile& xtalk, const std::array<double, 2>& errors,
                                      double selectivity) {
    const int n = space.n_ions();
    if (target < 0 || target >= n) throw std::out_of_range("addressed gate: invalid target index");
    if (static_cast<int>(xtalk.ratios.size()) != n) {
        throw std::invalid_argument("addressed gate: crosstalk profile needs one ratio per ion");
    }
    for (int k = 0; k < n; ++k) {
        const double r = xtalk.ratios[static_cast<std::size_t>(k)];
        if (k == target ? r != 1.0 : !(r >= 0.0 && r < 1.0)) {
            throw std::invalid_argument("addressed gate: ratio of ion " + std::to_string(k) +
                                        (k == target ? " must be 1" : " must lie in [0, 1)"));
        }
    }

    const ToneSet tones{spec.axis};
    const auto [chi_plus, chi_minus] = gate_phase_shifts(spec.angle);
    Schedule sched{space, 2, {}};

    auto transfer = [&](int t, double chi_p, double chi_m) {
        PulseStep step{transfer_label(t), t, {}};
        for (int k = 0; k < n; ++k) {
            const double r = xtalk.ratios[static_cast<std::size_t>(k)];
            if (r == 0.0) continue;
            const TransferPulse pulse{tones, (kPi + errors[static_cast<std::size_t>(t)]) * r, chi_p, chi_m};
            step.ops.push_back(ion_transfer(pulse, k));
        }
        sched.steps.emplace_back(std::move(step));
    };

    transfer(0, 0.0, 0.0);
    sched.steps.emplace_back(cleanout(0, target, LevelSet::qubit(), selectivity));
    for (int k = 0; k < n; ++k) {
        if (k != target) sched.steps.emplace_back(cleanout(0, k, LevelSet::auxiliary(), selectivity));
    }
    transfer(1, chi_plus, chi_minus);
    sched.steps.emplace_back(cleanout(1, target, LevelSet::auxiliary(), selectivity));
    for (int k = 0; k < n; ++k) {
        if (k != target) sched.steps.emplace_back(cleanout(1, k, LevelSet::auxiliary(), selectivity));
    }
    return sched;
}

ProtocolOutcome certified_addressed_gate(const PureState& chain, int target, const GateSpec& spec,
                                         const CrosstalkProfile& xtalk, const std::array<double, 2>& errors,
                                         double selectivity, const ExecutionOptions& options) {
    if (chain.space().has_motion()) throw std::invalid_argument("certified_addressed_gate: expected bare ions");
    require_qubit_input(chain, "certified_addressed_gate");
    return execute(certified_addressed_schedule(chain.space(), target, spec, xtalk, errors, selectivity), chain,
                   options);
}

// ---------------------------------------------------------------------------

Eigen::Matrix4cd ideal_cz() {
    Eigen::Matrix4cd u = Eigen::Matrix4cd::Identity();
    u(3, 3) = -1.0;
    return u;
}

PureState apply_ideal_cz(const PureState& state) {
    const StateSpace& space = state.space();
    if (space.n_ions() != 2) throw std::invalid_argument("apply_ideal_cz: expected two ions");
    CVector amps = state.amplitudes();
    for (std::size_t i = 0; i < space.dimension(); ++i) {
        if (space.level_of(i, 0) == kExcited && space.level_of(i, 1) == kExcited) {
            amps(static_cast<Eigen::Index>(i)) = -amps(static_cast<Eigen::Index>(i));
        }
    }
    return PureState(space, std::move(amps));
}

Schedule certified_cz_schedule(const StateSpace& space, const std::array<double, 4>& errors, double selectivity) {
    if (space.n_ions() != 2) throw std::invalid_argument("certified_cz: expected two ions");
    if (space.fock_cutoff() < 2) {
        throw std::invalid_argument("certified_cz: fock_cutoff must be >= 2 (the blue sideband populates n=1 and the "
                                    "top Fock level must stay empty)");
    }
    constexpr int m = 0;
    constexpr int n = 1;
    const auto area = [&](int t) { return kPi + errors[static_cast<std::size_t>(t)]; };
    Schedule sched{space, 4, {}};

    // Transfers 1 and 4: f1+nu (blue, e_m -> A+_m) and f4 (carrier, g_m -> A-_m).
    auto outer = [&](int t) {
        PulseStep step{transfer_label(t), t, {}};
        step.ops.push_back(sideband_op({SidebandKind::blue, kExcited, IonLevel::AuxPlus, area(t), 0.0, m}, space));
        step.ops.push_back(sideband_op({SidebandKind::carrier, kGround, IonLevel::AuxMinus, area(t), 0.0, m}, space));
        sched.steps.emplace_back(std::move(step));
    };
    // Transfers 2 and 3: f4 on m, f1-nu and f4-nu (red) on n.
    auto inner = [&](int t, double f1_phase) {
        PulseStep step{transfer_label(t), t, {}};
        step.ops.push_back(sideband_op({SidebandKind::carrier, kGround, IonLevel::AuxMinus, area(t), 0.0, m}, space));
        step.ops.push_back(sideband_op({SidebandKind::red, kExcited, IonLevel::AuxPlus, area(t), f1_phase, n}, space));
        step.ops.push_back(sideband_op({SidebandKind::red, kGround, IonLevel::AuxMinus, area(t), 0.0, n}, space));
        sched.steps.emplace_back(std::move(step));
    };

    outer(0);
    sched.steps.emplace_back(cleanout(0, m, LevelSet::qubit(), selectivity));
    inner(1, 0.0);
    sched.steps.emplace_back(cleanout(1, m, LevelSet{IonLevel::AuxMinus}, selectivity));
    sched.steps.emplace_back(cleanout(1, n, LevelSet::qubit(), selectivity, {1}));
    inner(2, kPi);
    sched.steps.emplace_back(cleanout(2, n, LevelSet::auxiliary(), selectivity));
    sched.steps.emplace_back(cleanout(2, m, LevelSet{kGround}, selectivity));
    outer(3);
    sched.steps.emplace_back(cleanout(3, m, LevelSet::auxiliary(), selectivity));
    return sched;
}

ProtocolOutcome certified_cz(const PureState& state, const std::array<double, 4>& errors, double selectivity,
                             const ExecutionOptions& options) {
    const StateSpace& space = state.space();
    if (space.n_ions() != 2 || !space.has_motion()) {
        throw std::invalid_argument("certified_cz: expected two ions and a motional mode");
    }
    require_qubit_input(state, "certified_cz");
    return execute(certified_cz_schedule(space, errors, selectivity), state, options);
}

}  // namespace certgate
