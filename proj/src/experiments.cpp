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

#include "certgate/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace certgate {

namespace {

// Runs fn(i) for i in [0, n). Each index is handled exactly once; callers
// write results into index-addressed slots, so the worker count never
// influences the output.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

IonLevel level_from_char(char c) {
    if (c == '0' || c == 'g') return IonLevel::Q0;
    if (c == '1' || c == 'e') return IonLevel::Q1;
    throw std::invalid_argument(std::string("input_state.label: invalid level character '") + c + "'");
}

std::vector<ChannelKey> channel_keys(const Schedule& schedule) {
    std::vector<ChannelKey> keys;
    for (const auto& step : schedule.steps) {
        if (const auto* c = std::get_if<CleanoutStep>(&step)) keys.push_back({c->transfer, c->channel.ion});
    }
    return keys;
}

double sample_se(std::span<const double> xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

double mean_of(std::span<const double> xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

}  // namespace

std::string to_string(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::single: return "single";
        case ProtocolKind::cz: return "cz";
        case ProtocolKind::addressing: return "addressing";
    }
    return "unknown";
}

ProtocolKind protocol_from_string(const std::string& name) {
    for (ProtocolKind k : {ProtocolKind::single, ProtocolKind::cz, ProtocolKind::addressing}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown protocol '" + name + "'");
}

std::string to_string(InputSpec::Kind kind) {
    switch (kind) {
        case InputSpec::Kind::basis: return "basis";
        case InputSpec::Kind::plus_n: return "plus_n";
        case InputSpec::Kind::minus_n: return "minus_n";
        case InputSpec::Kind::bell: return "bell";
        case InputSpec::Kind::amplitudes: return "amplitudes";
    }
    return "unknown";
}

InputSpec::Kind input_kind_from_string(const std::string& name) {
    using K = InputSpec::Kind;
    for (K k : {K::basis, K::plus_n, K::minus_n, K::bell, K::amplitudes}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown input_state kind '" + name + "'");
}

int ExperimentSpec::n_transfers() const { return protocol == ProtocolKind::cz ? 4 : 2; }

StateSpace ExperimentSpec::space() const {
    switch (protocol) {
        case ProtocolKind::single: return StateSpace(1);
        case ProtocolKind::cz: return StateSpace(2, fock_cutoff);
        case ProtocolKind::addressing: return StateSpace(n_ions);
    }
    throw std::logic_error("unreachable");
}

void ExperimentSpec::validate() const {
    if (trials < 1) throw std::invalid_argument("trials: must be >= 1");
    if (!(selectivity >= 0.0 && selectivity <= 1.0)) throw std::invalid_argument("selectivity: must lie in [0, 1]");
    if (!std::isfinite(gate.axis.theta) || !std::isfinite(gate.axis.phi) || !std::isfinite(gate.angle)) {
        throw std::invalid_argument("gate: angles must be finite");
    }
    try {
        error_model.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("error_model: ") + e.what());
    }
    if (protocol == ProtocolKind::cz && fock_cutoff < 2) {
        throw std::invalid_argument("fock_cutoff: cz needs a motional cutoff >= 2 (the blue sideband drives n=0 -> "
                                    "n=1 and the top Fock level must stay empty), got " +
                                    std::to_string(fock_cutoff));
    }
    if (protocol == ProtocolKind::addressing) {
        if (n_ions < 1 || n_ions > kMaxIons) throw std::invalid_argument("n_ions: must lie in [1, 4]");
        if (target < 0 || target >= n_ions) throw std::invalid_argument("target: invalid ion index");
        if (static_cast<int>(crosstalk.size()) != n_ions) {
            throw std::invalid_argument("crosstalk: needs one ratio per ion");
        }
        for (int k = 0; k < n_ions; ++k) {
            const double r = crosstalk[static_cast<std::size_t>(k)];
            if (k == target ? r != 1.0 : !(r >= 0.0 && r < 1.0)) {
                throw std::invalid_argument("crosstalk: ratio of ion " + std::to_string(k) +
                                            (k == target ? " must be 1" : " must lie in [0, 1)"));
            }
        }
    }
    const int n = space().n_ions();
    switch (input.kind) {
        case InputSpec::Kind::basis:
            if (static_cast<int>(input.label.size()) != n) {
                throw std::invalid_argument("input_state.label: expected " + std::to_string(n) + " characters");
            }
            for (char c : input.label) level_from_char(c);
            break;
        case InputSpec::Kind::bell:
            if (protocol != ProtocolKind::cz) throw std::invalid_argument("input_state.kind: bell needs protocol cz");
            break;
        case InputSpec::Kind::amplitudes: {
            if (input.amplitudes.size() != (std::size_t{1} << n)) {
                throw std::invalid_argument("input_state.amplitudes: expected " + std::to_string(1 << n) + " entries");
            }
            double norm = 0.0;
            for (Complex a : input.amplitudes) norm += std::norm(a);
            if (!(norm > 0.0) || !std::isfinite(norm)) {
                throw std::invalid_argument("input_state.amplitudes: zero or non-finite vector");
            }
            break;
        }
        default: break;
    }
}

PureState prepare_input(const ExperimentSpec& spec) {
    spec.validate();
    const StateSpace space = spec.space();
    const int n = space.n_ions();
    const std::size_t nq = std::size_t{1} << n;
    std::vector<Complex> qubit(nq, 0.0);
    switch (spec.input.kind) {
        case InputSpec::Kind::basis: {
            std::size_t q = 0;
            for (char c : spec.input.label) q = 2 * q + (level_from_char(c) == IonLevel::Q1 ? 1 : 0);
            qubit[q] = 1.0;
            break;
        }
        case InputSpec::Kind::plus_n:
        case InputSpec::Kind::minus_n: {
            const auto [plus, minus] = plus_minus_n_vectors(spec.gate.axis.theta, spec.gate.axis.phi);
            const auto& v = spec.input.kind == InputSpec::Kind::plus_n ? plus : minus;
            for (std::size_t q = 0; q < nq; ++q) {
                Complex a = 1.0;
                for (int ion = 0; ion < n; ++ion) a *= v((q >> (n - 1 - ion)) & 1U);
                qubit[q] = a;
            }
            break;
        }
        case InputSpec::Kind::bell:
            qubit[0] = qubit[3] = 1.0 / std::sqrt(2.0);
            break;
        case InputSpec::Kind::amplitudes:
            qubit = spec.input.amplitudes;
            break;
    }
    std::vector<std::pair<std::size_t, Complex>> entries;
    for (std::size_t q = 0; q < nq; ++q) {
        if (qubit[q] == Complex(0.0)) continue;
        std::vector<IonLevel> levels;
        for (int ion = 0; ion < n; ++ion) levels.push_back(((q >> (n - 1 - ion)) & 1U) ? IonLevel::Q1 : IonLevel::Q0);
        entries.emplace_back(space.index(levels, 0), qubit[q]);
    }
    return make_state(space, entries);
}

PureState ideal_output(const ExperimentSpec& spec, const PureState& input) {
    switch (spec.protocol) {
        case ProtocolKind::single: return apply_ideal_single_qubit(input, spec.gate, 0);
        case ProtocolKind::cz: return apply_ideal_cz(input);
        case ProtocolKind::addressing: return apply_ideal_single_qubit(input, spec.gate, spec.target);
    }
    throw std::logic_error("unreachable");
}

Schedule build_schedule(const ExperimentSpec& spec, std::span<const double> errors) {
    if (static_cast<int>(errors.size()) != spec.n_transfers()) {
        throw std::invalid_argument("build_schedule: expected one error per transfer");
    }
    switch (spec.protocol) {
        case ProtocolKind::single:
            return certified_single_qubit_schedule(spec.gate, {errors[0], errors[1]}, spec.selectivity);
        case ProtocolKind::cz:
            return certified_cz_schedule(spec.space(), {errors[0], errors[1], errors[2], errors[3]}, spec.selectivity);
        case ProtocolKind::addressing:
            return certified_addressed_schedule(spec.space(), spec.target, spec.gate, CrosstalkProfile{spec.crosstalk},
                                                {errors[0], errors[1]}, spec.selectivity);
    }
    throw std::logic_error("unreachable");
}

EnsembleRun run_ensemble_detailed(const ExperimentSpec& spec, unsigned workers) {
    spec.validate();
    const PureState input = prepare_input(spec);
    const PureState ideal = ideal_output(spec, input);
    const auto n = static_cast<std::size_t>(spec.trials);

    EnsembleRun run;
    run.trajectories.resize(n);
    std::vector<std::optional<ProtocolOutcome>> first(1);

    {
        // Channel layout does not depend on the error values.
        const std::vector<double> zeros(static_cast<std::size_t>(spec.n_transfers()), 0.0);
        run.channels = channel_keys(build_schedule(spec, zeros));
    }
    const std::size_t n_channels = run.channels.size();

    parallel_for(n, workers, [&](std::size_t t) {
        TrajectoryResult& r = run.trajectories[t];
        r.index = t;
        Rng erng = trajectory_rng(spec.master_seed, t, kErrorStream);
        ErrorDraw draw = sample_errors(spec.error_model, spec.n_transfers(), erng);
        r.errors = std::move(draw.deltas);
        r.clamped = draw.clamped;

        const Schedule sched = build_schedule(spec, r.errors);
        ProtocolOutcome outcome = execute(sched, input, {spec.mode, FlagQuery::immediate, spec.master_seed, t});

        r.channel_flags.assign(n_channels, 0.0);
        for (const ProtocolBranch& b : outcome.branches) {
            if (!b.flagged) continue;
            for (std::size_t c = 0; c < n_channels; ++c) {
                if (run.channels[c].transfer == b.flag_transfer && run.channels[c].ion == b.flag_ion) {
                    r.channel_flags[c] += b.probability;
                }
            }
            r.flag_transfer = b.flag_transfer;
            r.flag_ion = b.flag_ion;
        }
        r.flag_probability = outcome.flag_probability();
        if (spec.mode == ExecutionMode::branch_enumeration) {
            r.flag_transfer = -1;
            r.flag_ion = -1;
        }
        if (const ProtocolBranch* nf = outcome.no_flag(); nf && nf->probability > 0.0) {
            const double f = fidelity_up_to_global_phase(ideal, *nf->state);
            r.conditional_fidelity = f;
            r.unconditional_fidelity = nf->probability * f;
        }
        if (t == 0) first[0] = std::move(outcome);
    });
    run.first_outcome = std::move(*first[0]);

    // Reduction in index order.
    EnsembleStatistics& s = run.statistics;
    s.trials = spec.trials;
    s.mode = spec.mode;
    std::vector<double> flags(n);
    std::vector<double> uncond(n);
    std::vector<double> all_errors;
    double nf_sum = 0.0;
    double analytic = 0.0;
    double cw = 0.0;
    double cf = 0.0;
    std::size_t n_cond = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const TrajectoryResult& r = run.trajectories[t];
        flags[t] = r.flag_probability;
        uncond[t] = r.unconditional_fidelity;
        nf_sum += 1.0 - r.flag_probability;
        s.clamp_count += r.clamped;
        all_errors.insert(all_errors.end(), r.errors.begin(), r.errors.end());
        analytic += herald_probability_analytic(r.errors);
        if (r.conditional_fidelity) {
            const double w = 1.0 - r.flag_probability;
            cw += w;
            cf += w * *r.conditional_fidelity;
            ++n_cond;
            s.min_conditional_fidelity = std::min(s.min_conditional_fidelity.value_or(1.0), *r.conditional_fidelity);
        }
    }
    const double dn = static_cast<double>(n);
    s.herald_rate = mean_of(flags);
    s.no_flag_probability = nf_sum / dn;
    if (spec.mode == ExecutionMode::monte_carlo) {
        s.herald_rate_se = std::sqrt(s.herald_rate * (1.0 - s.herald_rate) / dn);
    } else {
        s.herald_rate_se = sample_se(flags, s.herald_rate);
    }
    constexpr double z = 1.96;
    if (spec.mode == ExecutionMode::branch_enumeration) {
        s.wilson_low = std::max(0.0, s.herald_rate - z * s.herald_rate_se);
        s.wilson_high = std::min(1.0, s.herald_rate + z * s.herald_rate_se);
    } else {
        const double denom = 1.0 + z * z / dn;
        const double center = (s.herald_rate + z * z / (2.0 * dn)) / denom;
        const double half =
            z * std::sqrt(s.herald_rate * (1.0 - s.herald_rate) / dn + z * z / (4.0 * dn * dn)) / denom;
        s.wilson_low = std::max(0.0, center - half);
        s.wilson_high = std::min(1.0, center + half);
    }
    if (n_cond > 0 && cw > 0.0) {
        const double mean = cf / cw;
        double var = 0.0;
        for (const auto& r : run.trajectories) {
            if (r.conditional_fidelity) {
                const double d = *r.conditional_fidelity - mean;
                var += (1.0 - r.flag_probability) * d * d;
            }
        }
        s.conditional_fidelity = mean;
        s.conditional_fidelity_se = std::sqrt(var / cw / static_cast<double>(n_cond));
    }
    s.unconditional_fidelity = mean_of(uncond);
    s.unconditional_fidelity_se = sample_se(uncond, s.unconditional_fidelity);

    s.channels.reserve(n_channels);
    s.transfer_flags.assign(static_cast<std::size_t>(spec.n_transfers()), 0.0);
    for (std::size_t c = 0; c < n_channels; ++c) {
        double flagged = 0.0;
        double reached = 0.0;
        for (const auto& r : run.trajectories) {
            double before = 0.0;
            for (std::size_t k = 0; k < c; ++k) before += r.channel_flags[k];
            reached += 1.0 - before;
            flagged += r.channel_flags[c];
        }
        flagged /= dn;
        reached /= dn;
        s.channels.push_back({run.channels[c], flagged, reached, reached > 0.0 ? flagged / reached : 0.0});
        s.transfer_flags[static_cast<std::size_t>(run.channels[c].transfer)] += flagged;
    }
    s.rms_delta_pi = rms(all_errors);
    s.analytic_flag_probability = analytic / dn;
    s.approx_flag_probability = spec.n_transfers() * (s.rms_delta_pi / 2) * (s.rms_delta_pi / 2);
    return run;
}

EnsembleStatistics run_ensemble(const ExperimentSpec& spec, unsigned workers) {
    return run_ensemble_detailed(spec, workers).statistics;
}

double no_flag_probability_analytic(std::span<const double> errors) {
    double p = 1.0;
    for (double d : errors) {
        const double s = std::sin(d / 2);
        p *= 1.0 - s * s;
    }
    return p;
}

double herald_probability_analytic(std::span<const double> errors) { return 1.0 - no_flag_probability_analytic(errors); }

ExperimentSpec with_parameter(const ExperimentSpec& base, const std::string& parameter, double value) {
    using K = AmplitudeErrorModel::Kind;
    ExperimentSpec spec = base;
    if (parameter == "delta_pi") {
        if (spec.error_model.kind == K::gaussian_iid) {
            throw std::invalid_argument("sweep: delta_pi does not apply to the gaussian_iid error model");
        }
        spec.error_model.delta_pi = value;
    } else if (parameter == "sigma") {
        if (spec.error_model.kind != K::gaussian_iid && spec.error_model.kind != K::random_walk) {
            throw std::invalid_argument("sweep: sigma needs a gaussian_iid or random_walk error model");
        }
        spec.error_model.sigma = value;
    } else if (parameter == "selectivity") {
        spec.selectivity = value;
    } else if (parameter == "r_neighbor") {
        if (spec.protocol != ProtocolKind::addressing) throw std::invalid_argument("sweep: r_neighbor needs protocol addressing");
        spec.crosstalk.assign(static_cast<std::size_t>(spec.n_ions), value);
        if (spec.target >= 0 && spec.target < spec.n_ions) spec.crosstalk[static_cast<std::size_t>(spec.target)] = 1.0;
    } else if (parameter == "theta_gate") {
        if (spec.protocol == ProtocolKind::cz) throw std::invalid_argument("sweep: theta_gate does not apply to cz");
        spec.gate.angle = value;
    } else {
        throw std::invalid_argument("sweep: unknown parameter '" + parameter + "'");
    }
    return spec;
}

std::vector<SweepRow> sweep(const ExperimentSpec& base, const std::string& parameter, std::span<const double> values,
                            unsigned workers) {
    std::vector<ExperimentSpec> specs;
    specs.reserve(values.size());
    for (double v : values) {
        specs.push_back(with_parameter(base, parameter, v));
        specs.back().validate();
    }
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) rows.push_back({values[i], run_ensemble(specs[i], workers)});
    return rows;
}

CertifiedVsBare compare_certified_vs_bare(const ExperimentSpec& spec, unsigned workers) {
    if (spec.protocol != ProtocolKind::single) throw std::invalid_argument("compare_certified_vs_bare: protocol must be single");
    spec.validate();
    const PureState input = prepare_input(spec);
    const PureState ideal = ideal_output(spec, input);
    const auto n = static_cast<std::size_t>(spec.trials);

    std::vector<double> flags(n), bare(n), cond(n), errs(2 * n);
    parallel_for(n, workers, [&](std::size_t t) {
        Rng erng = trajectory_rng(spec.master_seed, t, kErrorStream);
        const ErrorDraw draw = sample_errors(spec.error_model, 2, erng);
        const std::array<double, 2> e{draw.deltas[0], draw.deltas[1]};
        errs[2 * t] = e[0];
        errs[2 * t + 1] = e[1];
        const ProtocolOutcome out =
            certified_single_qubit(input, spec.gate, e, spec.selectivity, {spec.mode, FlagQuery::immediate, spec.master_seed, t});
        flags[t] = out.flag_probability();
        const ProtocolBranch* nf = out.no_flag();
        cond[t] = (nf && nf->probability > 0.0) ? fidelity_up_to_global_phase(ideal, *nf->state)
                                                : std::numeric_limits<double>::quiet_NaN();
        bare[t] = 1.0 - bare_single_qubit(input, spec.gate, e).fidelity;
    });

    CertifiedVsBare c{};
    c.certified_herald_rate = mean_of(flags);
    c.certified_herald_rate_se = spec.mode == ExecutionMode::monte_carlo
                                     ? std::sqrt(c.certified_herald_rate * (1.0 - c.certified_herald_rate) / static_cast<double>(n))
                                     : sample_se(flags, c.certified_herald_rate);
    double worst = 1.0;
    for (double f : cond) {
        if (!std::isnan(f)) worst = std::min(worst, f);
    }
    c.certified_conditional_infidelity = 1.0 - worst;
    c.bare_infidelity = mean_of(bare);
    c.bare_infidelity_se = sample_se(bare, c.bare_infidelity);
    c.ratio = c.bare_infidelity > 0.0 ? c.certified_herald_rate / c.bare_infidelity
                                      : std::numeric_limits<double>::quiet_NaN();
    c.rms_delta_pi = rms(errs);
    return c;
}

}  // namespace certgate
