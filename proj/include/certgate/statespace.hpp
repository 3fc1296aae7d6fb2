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

#ifndef CERTGATE_STATESPACE_HPP
#define CERTGATE_STATESPACE_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace certgate {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Per-ion internal levels, in basis order. Q0/Q1 hold the qubit,
/// AuxPlus/AuxMinus the auxiliary manifold, Bright is the clean-out sink.
enum class IonLevel : int { Q0 = 0, Q1 = 1, AuxPlus = 2, AuxMinus = 3, Bright = 4 };

inline constexpr int kLevelsPerIon = 5;
inline constexpr int kMaxIons = 4;

std::string level_name(IonLevel level);

/// Set of ion levels, used as the target of populations and clean-outs.
class LevelSet {
public:
    constexpr LevelSet() = default;
    constexpr LevelSet(std::initializer_list<IonLevel> levels) {
        for (IonLevel l : levels) bits_ |= bit(l);
    }

    static constexpr LevelSet qubit() { return {IonLevel::Q0, IonLevel::Q1}; }
    static constexpr LevelSet auxiliary() { return {IonLevel::AuxPlus, IonLevel::AuxMinus}; }
    static constexpr LevelSet all() {
        return {IonLevel::Q0, IonLevel::Q1, IonLevel::AuxPlus, IonLevel::AuxMinus, IonLevel::Bright};
    }

    constexpr bool contains(IonLevel l) const { return (bits_ & bit(l)) != 0; }
    constexpr bool contains(int l) const { return (bits_ >> l) & 1U; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr LevelSet complement() const { return LevelSet(static_cast<unsigned>(~bits_ & 0x1FU)); }
    constexpr bool operator==(const LevelSet&) const = default;

    std::vector<IonLevel> levels() const;
    std::string to_string() const;

private:
    constexpr explicit LevelSet(unsigned bits) : bits_(bits) {}
    static constexpr unsigned bit(IonLevel l) { return 1U << static_cast<int>(l); }
    unsigned bits_ = 0;
};

/// Tensor structure: n_ions five-level ions, then an optional motional mode
/// truncated at fock_cutoff (0 means no mode). Ion 0 is the most
/// significant digit of a basis index, the Fock number the least.
class StateSpace {
public:
    StateSpace(int n_ions, int fock_cutoff = 0);

    int n_ions() const { return n_ions_; }
    int fock_cutoff() const { return fock_cutoff_; }
    bool has_motion() const { return fock_cutoff_ > 0; }
    int fock_dim() const { return fock_cutoff_ > 0 ? fock_cutoff_ + 1 : 1; }
    std::size_t dimension() const { return dimension_; }

    std::size_t index(std::initializer_list<IonLevel> levels, int fock = 0) const;
    std::size_t index(const std::vector<IonLevel>& levels, int fock = 0) const;

    IonLevel level_of(std::size_t index, int ion) const;
    int fock_of(std::size_t index) const;
    std::string label(std::size_t index) const;

    bool operator==(const StateSpace&) const = default;

private:
    int n_ions_;
    int fock_cutoff_;
    std::size_t dimension_;
};

/// Normalized pure state. Immutable; every operation returns a new value.
class PureState {
public:
    /// Normalizes `amplitudes`; throws on a zero vector or size mismatch.
    PureState(StateSpace space, CVector amplitudes);

    const StateSpace& space() const { return space_; }
    const CVector& amplitudes() const { return amplitudes_; }
    Complex operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }
    double norm() const { return amplitudes_.norm(); }

private:
    StateSpace space_;
    CVector amplitudes_;
};

/// Polar/azimuthal angles of a rotation axis on the Bloch sphere.
struct BlochAxis {
    double theta = 0.0;
    double phi = 0.0;

    Eigen::Vector3d unit_vector() const;
};

/// Subsystem selector for apply_unitary: a list of ions, optionally followed
/// by the motional mode. The operator's basis is ordered like the full space
/// restricted to these factors, in the order given.
struct Subsystems {
    std::vector<int> ions;
    bool motion = false;
};

PureState make_state(const StateSpace& space, const std::vector<std::pair<std::size_t, Complex>>& entries);

/// |+n> and |-n> on a single bare ion.
std::pair<PureState, PureState> plus_minus_n_states(const BlochAxis& axis);

/// Qubit-manifold coefficients of |+n>, |-n> as 2-vectors over (|0>, |1>).
template <typename Scalar = double>
std::pair<Eigen::Matrix<std::complex<Scalar>, 2, 1>, Eigen::Matrix<std::complex<Scalar>, 2, 1>>
plus_minus_n_vectors(Scalar theta, Scalar phi) {
    using C = std::complex<Scalar>;
    const C phase = std::polar(Scalar(1), phi);
    const Scalar c = std::cos(theta / 2);
    const Scalar s = std::sin(theta / 2);
    Eigen::Matrix<C, 2, 1> plus(C(c), phase * s);
    Eigen::Matrix<C, 2, 1> minus(C(s), -phase * c);
    return {plus, minus};
}

PureState apply_unitary(const PureState& state, const CMatrix& u, const Subsystems& targets);

/// Population of `ion` in `manifold`, optionally restricted to Fock numbers
/// in `fock_levels` (empty means every Fock number).
double manifold_population(const PureState& state, int ion, LevelSet manifold,
                           const std::vector<int>& fock_levels = {});

/// Population with the motional mode outside Fock number `n`.
double motional_population_outside(const PureState& state, int n);

double fidelity_up_to_global_phase(const PureState& a, const PureState& b);

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u, typename Derived::RealScalar tol) {
    if (u.rows() != u.cols()) return false;
    const auto gram = (u.adjoint() * u).eval();
    using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    return (gram - M::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& h, typename Derived::RealScalar tol) {
    if (h.rows() != h.cols()) return false;
    return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Lifts a 4x4 operator on (Q0, Q1, AuxPlus, AuxMinus) to the five-level
/// ion; Bright is left untouched.
CMatrix embed_ion_operator(const Eigen::Matrix4cd& op);

}  // namespace certgate

#endif  // CERTGATE_STATESPACE_HPP
