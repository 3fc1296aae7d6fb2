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

#include "certgate/dissipation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace certgate {

namespace {

constexpr double kNormTol = 1e-10;

void validate(const PureState& state, const CleanoutChannel& ch) {
    if (std::abs(state.norm() - 1.0) > kNormTol) throw std::invalid_argument("clean-out: input state is not normalized");
    if (ch.ion < 0 || ch.ion >= state.space().n_ions()) throw std::out_of_range("clean-out: invalid ion index");
    if (ch.levels.empty()) throw std::invalid_argument("clean-out: empty target level set");
    if (ch.levels.contains(IonLevel::Bright)) throw std::invalid_argument("clean-out: Bright cannot be a pump target");
    if (!(ch.selectivity >= 0.0 && ch.selectivity <= 1.0)) {
        throw std::invalid_argument("clean-out: selectivity must lie in [0, 1]");
    }
    for (int f : ch.fock_levels) {
        if (f < 0 || f >= state.space().fock_dim()) throw std::out_of_range("clean-out: Fock level out of range");
    }
}

bool fock_selected(const CleanoutChannel& ch, int fock) {
    return ch.fock_levels.empty() || std::find(ch.fock_levels.begin(), ch.fock_levels.end(), fock) != ch.fock_levels.end();
}

std::size_t ion_stride(const StateSpace& space, int ion) {
    std::size_t s = static_cast<std::size_t>(space.fock_dim());
    for (int k = ion + 1; k < space.n_ions(); ++k) s *= kLevelsPerIon;
    return s;
}

// One flag per basis index: set when the index lies in the pump target.
std::vector<unsigned char> target_mask(const StateSpace& space, const CleanoutChannel& ch) {
    const std::size_t stride = ion_stride(space, ch.ion);
    const auto fock_dim = static_cast<std::size_t>(space.fock_dim());
    bool level_hit[kLevelsPerIon];
    for (int l = 0; l < kLevelsPerIon; ++l) level_hit[l] = ch.levels.contains(static_cast<IonLevel>(l));
    std::vector<unsigned char> fock_hit(fock_dim);
    for (std::size_t f = 0; f < fock_dim; ++f) fock_hit[f] = fock_selected(ch, static_cast<int>(f));
    std::vector<unsigned char> mask(space.dimension());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask[i] = level_hit[(i / stride) % kLevelsPerIon] && fock_hit[i % fock_dim];
    }
    return mask;
}

// Target population p and protected population q = 1 - p, summed separately.
std::pair<double, double> split_population(const PureState& state, const std::vector<unsigned char>& mask) {
    double p = 0.0;
    double q = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) (mask[i] ? p : q) += std::norm(state[i]);
    return {p, q};
}

std::optional<std::pair<PureState, double>> survivor_from_mask(const PureState& state, const CleanoutChannel& ch,
                                                                const std::vector<unsigned char>& mask, double q) {
    const double prob = ch.selectivity * q;
    if (prob < kBranchCutoff) return std::nullopt;
    CVector kept = state.amplitudes();
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) kept(static_cast<Eigen::Index>(i)) = 0.0;
    }
    return std::make_pair(PureState(state.space(), std::move(kept)), prob);
}

}  // namespace

std::optional<std::pair<PureState, double>> cleanout_survivor(const PureState& state, const CleanoutChannel& ch) {
    validate(state, ch);
    const auto mask = target_mask(state.space(), ch);
    return survivor_from_mask(state, ch, mask, split_population(state, mask).second);
}

std::vector<CleanoutBranch> cleanout_branches(const PureState& state, const CleanoutChannel& ch) {
    validate(state, ch);
    const auto mask = target_mask(state.space(), ch);
    const auto [p, q] = split_population(state, mask);
    std::vector<CleanoutBranch> out;
    if (auto survivor = survivor_from_mask(state, ch, mask, q)) {
        out.push_back({std::move(survivor->first), survivor->second, HeraldKind::none});
    }
    if (p >= kBranchCutoff) out.push_back({std::nullopt, p, HeraldKind::error});
    const double fp = (1.0 - ch.selectivity) * q;
    if (fp >= kBranchCutoff) out.push_back({std::nullopt, fp, HeraldKind::false_positive});
    return out;
}

std::vector<KrausBranch> cleanout_kraus_branches(const PureState& state, const CleanoutChannel& ch) {
    validate(state, ch);
    const StateSpace& space = state.space();
    const std::size_t stride = ion_stride(space, ch.ion);
    const double leak = 1.0 - ch.selectivity;
    const auto mask = target_mask(space, ch);

    // Branch for population on source level `from` (filtered by `take`)
    // moved to Bright with weight `weight`.
    auto pumped = [&](IonLevel from, auto take, double weight, HeraldKind kind) -> std::optional<KrausBranch> {
        CVector moved = CVector::Zero(state.amplitudes().size());
        double prob = 0.0;
        const std::size_t shift = (static_cast<std::size_t>(IonLevel::Bright) - static_cast<std::size_t>(from)) * stride;
        for (std::size_t i = 0; i < space.dimension(); ++i) {
            if (static_cast<IonLevel>((i / stride) % kLevelsPerIon) != from || !take(i)) continue;
            const Complex a = state[i];
            prob += std::norm(a);
            moved(static_cast<Eigen::Index>(from == IonLevel::Bright ? i : i + shift)) = a;
        }
        prob *= weight;
        if (prob < kBranchCutoff) return std::nullopt;
        return KrausBranch{PureState(space, std::move(moved)), prob, kind};
    };

    std::vector<KrausBranch> out;
    if (auto survivor = survivor_from_mask(state, ch, mask, split_population(state, mask).second)) {
        out.push_back({std::move(survivor->first), survivor->second, HeraldKind::none});
    }
    auto target = [&](std::size_t i) { return fock_selected(ch, space.fock_of(i)); };
    auto protected_part = [&](std::size_t i) { return !mask[i]; };
    for (int l = 0; l < kLevelsPerIon; ++l) {
        const auto level = static_cast<IonLevel>(l);
        if (ch.levels.contains(level)) {
            if (auto b = pumped(level, target, 1.0, HeraldKind::error)) out.push_back(std::move(*b));
        }
    }
    if (leak > 0.0) {
        for (int l = 0; l < kLevelsPerIon; ++l) {
            if (auto b = pumped(static_cast<IonLevel>(l), protected_part, leak, HeraldKind::false_positive)) out.push_back(std::move(*b));
        }
    }
    return out;
}

SampledCleanout cleanout_sample(const PureState& state, const CleanoutChannel& ch, Rng& rng, int step_index) {
    validate(state, ch);
    const auto mask = target_mask(state.space(), ch);
    const auto [p, q] = split_population(state, mask);
    const double fp = (1.0 - ch.selectivity) * q;
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);

    SampledCleanout out;
    out.record.step_index = step_index;
    out.record.ion = ch.ion;
    if (u < p) {
        out.herald = HeraldKind::error;
        out.record.flagged = true;
        out.record.branch_probability = p;
    } else if (u < p + fp) {
        out.herald = HeraldKind::false_positive;
        out.record.flagged = true;
        out.record.branch_probability = fp;
    } else {
        auto survivor = survivor_from_mask(state, ch, mask, q);
        if (survivor) {
            out.record.branch_probability = survivor->second;
            out.state = std::move(survivor->first);
        } else {
            // Survivor weight below the branch cutoff; u landed in rounding slack.
            out.herald = HeraldKind::error;
            out.record.flagged = true;
            out.record.branch_probability = p;
        }
    }
    return out;
}

double bright_population(const PureState& state) {
    const StateSpace& space = state.space();
    double p = 0.0;
    for (std::size_t i = 0; i < space.dimension(); ++i) {
        for (int ion = 0; ion < space.n_ions(); ++ion) {
            if (space.level_of(i, ion) == IonLevel::Bright) {
                p += std::norm(state[i]);
                break;
            }
        }
    }
    return p;
}

}  // namespace certgate
