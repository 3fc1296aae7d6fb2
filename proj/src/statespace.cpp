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

#include "certgate/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace certgate {

namespace {

constexpr double kUnitaryTol = 1e-10;

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

std::string level_name(IonLevel level) {
    switch (level) {
        case IonLevel::Q0: return "0";
        case IonLevel::Q1: return "1";
        case IonLevel::AuxPlus: return "A+";
        case IonLevel::AuxMinus: return "A-";
        case IonLevel::Bright: return "B";
    }
    return "?";
}

std::vector<IonLevel> LevelSet::levels() const {
    std::vector<IonLevel> out;
    for (int l = 0; l < kLevelsPerIon; ++l) {
        if (contains(l)) out.push_back(static_cast<IonLevel>(l));
    }
    return out;
}

std::string LevelSet::to_string() const {
    std::string s = "{";
    bool first = true;
    for (IonLevel l : levels()) {
        if (!first) s += ",";
        s += level_name(l);
        first = false;
    }
    return s + "}";
}

StateSpace::StateSpace(int n_ions, int fock_cutoff) : n_ions_(n_ions), fock_cutoff_(fock_cutoff) {
    if (n_ions < 1 || n_ions > kMaxIons) {
        throw std::invalid_argument("StateSpace: n_ions must be in [1, " + std::to_string(kMaxIons) + "]");
    }
    if (fock_cutoff < 0) throw std::invalid_argument("StateSpace: fock_cutoff must be non-negative");
    dimension_ = ipow(kLevelsPerIon, n_ions) * static_cast<std::size_t>(fock_dim());
}

std::size_t StateSpace::index(std::initializer_list<IonLevel> levels, int fock) const {
    return index(std::vector<IonLevel>(levels), fock);
}

std::size_t StateSpace::index(const std::vector<IonLevel>& levels, int fock) const {
    if (static_cast<int>(levels.size()) != n_ions_) {
        throw std::invalid_argument("StateSpace::index: expected one level per ion");
    }
    if (fock < 0 || fock >= fock_dim()) throw std::out_of_range("StateSpace::index: Fock number out of range");
    std::size_t idx = 0;
    for (IonLevel l : levels) idx = idx * kLevelsPerIon + static_cast<std::size_t>(l);
    return idx * static_cast<std::size_t>(fock_dim()) + static_cast<std::size_t>(fock);
}

IonLevel StateSpace::level_of(std::size_t index, int ion) const {
    if (ion < 0 || ion >= n_ions_) throw std::out_of_range("StateSpace::level_of: invalid ion index");
    std::size_t rest = index / static_cast<std::size_t>(fock_dim());
    rest /= ipow(kLevelsPerIon, n_ions_ - 1 - ion);
    return static_cast<IonLevel>(rest % kLevelsPerIon);
}

int StateSpace::fock_of(std::size_t index) const {
    return static_cast<int>(index % static_cast<std::size_t>(fock_dim()));
}

std::string StateSpace::label(std::size_t index) const {
    std::string s = "|";
    for (int ion = 0; ion < n_ions_; ++ion) {
        if (ion) s += ",";
        s += level_name(level_of(index, ion));
    }
    if (has_motion()) s += ";" + std::to_string(fock_of(index));
    return s + ">";
}

PureState::PureState(StateSpace space, CVector amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != space_.dimension()) {
        throw std::invalid_argument("PureState: amplitude count does not match space dimension");
    }
    const double n = amplitudes_.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("PureState: zero or non-finite vector");
    amplitudes_ /= n;
}

Eigen::Vector3d BlochAxis::unit_vector() const {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

PureState make_state(const StateSpace& space, const std::vector<std::pair<std::size_t, Complex>>& entries) {
    CVector amps = CVector::Zero(static_cast<Eigen::Index>(space.dimension()));
    for (const auto& [idx, value] : entries) {
        if (idx >= space.dimension()) throw std::out_of_range("make_state: basis index out of range");
        amps(static_cast<Eigen::Index>(idx)) += value;
    }
    if (amps.norm() == 0.0) throw std::invalid_argument("make_state: all-zero input");
    return PureState(space, std::move(amps));
}

std::pair<PureState, PureState> plus_minus_n_states(const BlochAxis& axis) {
    const StateSpace space(1);
    const auto [plus, minus] = plus_minus_n_vectors(axis.theta, axis.phi);
    CVector a = CVector::Zero(kLevelsPerIon);
    CVector b = CVector::Zero(kLevelsPerIon);
    a.head<2>() = plus;
    b.head<2>() = minus;
    return {PureState(space, a), PureState(space, b)};
}

PureState apply_unitary(const PureState& state, const CMatrix& u, const Subsystems& targets) {
    const StateSpace& space = state.space();
    const int n = space.n_ions();

    // Mixed-radix digits: one per ion, then the motional mode.
    std::vector<std::size_t> radix(static_cast<std::size_t>(n) + 1, kLevelsPerIon);
    radix.back() = static_cast<std::size_t>(space.fock_dim());
    std::vector<std::size_t> stride(radix.size());
    stride.back() = 1;
    for (int d = n - 1; d >= 0; --d) stride[d] = stride[d + 1] * radix[d + 1];

    std::vector<int> digits;
    std::vector<bool> is_target(radix.size(), false);
    for (int ion : targets.ions) {
        if (ion < 0 || ion >= n) throw std::out_of_range("apply_unitary: invalid ion index");
        if (is_target[ion]) throw std::invalid_argument("apply_unitary: repeated ion in selector");
        is_target[ion] = true;
        digits.push_back(ion);
    }
    if (targets.motion) {
        if (!space.has_motion()) throw std::invalid_argument("apply_unitary: space has no motional mode");
        is_target.back() = true;
        digits.push_back(n);
    }

    std::size_t sub_dim = 1;
    for (int d : digits) sub_dim *= radix[d];
    if (u.rows() != u.cols() || static_cast<std::size_t>(u.rows()) != sub_dim) {
        throw std::invalid_argument("apply_unitary: operator dimension does not match selected subsystems");
    }
    if (!is_unitary(u, kUnitaryTol)) throw std::invalid_argument("apply_unitary: operator is not unitary");

    // Offsets of the sub-basis elements (target digits) and of the bases (all other digits).
    auto digit_offsets = [&](const std::vector<int>& ds) {
        std::size_t count = 1;
        for (int d : ds) count *= radix[d];
        std::vector<std::size_t> offs(count, 0);
        for (std::size_t k = 0; k < count; ++k) {
            std::size_t rem = k;
            std::size_t off = 0;
            for (std::size_t j = ds.size(); j-- > 0;) {
                const auto d = static_cast<std::size_t>(ds[j]);
                off += (rem % radix[d]) * stride[d];
                rem /= radix[d];
            }
            offs[k] = off;
        }
        return offs;
    };
    std::vector<int> others;
    for (std::size_t d = 0; d < radix.size(); ++d) {
        if (!is_target[d]) others.push_back(static_cast<int>(d));
    }
    const std::vector<std::size_t> offsets = digit_offsets(digits);
    const std::vector<std::size_t> bases = digit_offsets(others);

    const CVector& in = state.amplitudes();
    const auto rows = static_cast<Eigen::Index>(sub_dim);
    const auto cols = static_cast<Eigen::Index>(bases.size());
    CMatrix gathered(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index k = 0; k < rows; ++k) gathered(k, c) = in(static_cast<Eigen::Index>(bases[c] + offsets[k]));
    }
    CMatrix mapped(rows, cols);
    mapped.noalias() = u * gathered;
    CVector out(in.size());
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index k = 0; k < rows; ++k) out(static_cast<Eigen::Index>(bases[c] + offsets[k])) = mapped(k, c);
    }
    return PureState(space, std::move(out));
}

double manifold_population(const PureState& state, int ion, LevelSet manifold, const std::vector<int>& fock_levels) {
    const StateSpace& space = state.space();
    if (ion < 0 || ion >= space.n_ions()) throw std::out_of_range("manifold_population: invalid ion index");
    double p = 0.0;
    for (std::size_t i = 0; i < space.dimension(); ++i) {
        if (!manifold.contains(space.level_of(i, ion))) continue;
        if (!fock_levels.empty()) {
            const int f = space.fock_of(i);
            bool hit = false;
            for (int want : fock_levels) hit = hit || want == f;
            if (!hit) continue;
        }
        p += std::norm(state[i]);
    }
    return p;
}

double motional_population_outside(const PureState& state, int n) {
    const StateSpace& space = state.space();
    double p = 0.0;
    for (std::size_t i = 0; i < space.dimension(); ++i) {
        if (space.fock_of(i) != n) p += std::norm(state[i]);
    }
    return p;
}

double fidelity_up_to_global_phase(const PureState& a, const PureState& b) {
    if (!(a.space() == b.space())) throw std::invalid_argument("fidelity_up_to_global_phase: space mismatch");
    return std::min(1.0, std::norm(a.amplitudes().dot(b.amplitudes())));
}

CMatrix embed_ion_operator(const Eigen::Matrix4cd& op) {
    CMatrix full = CMatrix::Identity(kLevelsPerIon, kLevelsPerIon);
    full.topLeftCorner<4, 4>() = op;
    return full;
}

}  // namespace certgate
