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

#ifndef CERTGATE_PULSES_HPP
#define CERTGATE_PULSES_HPP

#include <array>
#include <numbers>
#include <utility>

#include "certgate/statespace.hpp"

namespace certgate {

/// One resonant tone coupling `lower` <-> `upper` of a single ion, in the
/// rotating frame: (rabi/2) (e^{-i phase} |upper><lower| + h.c.).
struct Tone {
    IonLevel lower;
    IonLevel upper;
    double rabi;
    double phase;
};

/// The four simultaneous tones that pair |+n> with |A+> and |-n> with |A->.
///
/// Tones 1 and 2 drive |0>,|1> <-> |A+> with amplitudes Omega cos(theta/2),
/// Omega sin(theta/2); tones 3 and 4 drive |0>,|1> <-> |A-> with
/// Omega sin(theta/2), Omega cos(theta/2). Tones 2 and 4 carry the axis
/// azimuth phi, and tone 4 an extra pi.
struct ToneSet {
    BlochAxis axis;
    double omega = 1.0;

    /// Omega_1 .. Omega_4.
    std::array<double, 4> amplitudes() const;

    /// The four tones with an extra common phase on each pair. The phase
    /// offsets are the only difference between the first and second
    /// transfer of a certified gate.
    std::array<Tone, 4> tones(double pair_phase_plus = 0.0, double pair_phase_minus = 0.0) const;
};

enum class TransferDirection { qubit_to_aux, aux_to_qubit };

/// A four-tone transfer pulse of total area pi + delta.
struct TransferPulse {
    ToneSet tones;
    double area = std::numbers::pi;
    double pair_phase_plus = 0.0;
    double pair_phase_minus = 0.0;

    double area_error() const { return area - std::numbers::pi; }
};

/// Hamiltonian of a set of tones on (Q0, Q1, AuxPlus, AuxMinus).
Eigen::Matrix4cd hamiltonian_matrix(const std::array<Tone, 4>& tones);
Eigen::Matrix4cd hamiltonian_matrix(const ToneSet& tones);

/// Closed-form exp(-i H T) for a transfer pulse: a rotation by the pulse area
/// inside span{|+n>, |A+>} and span{|-n>, |A->}. A perfect pulse maps
/// |+-n> to -i e^{-i chi+-} |A+->. The matrix does not depend on `direction`;
/// the argument documents which manifold the caller expects to empty.
Eigen::Matrix4cd transfer_unitary(const TransferPulse& pulse,
                                  TransferDirection direction = TransferDirection::qubit_to_aux);

/// Common pair phases (pi - Theta/2, pi + Theta/2) for the second transfer.
std::pair<double, double> gate_phase_shifts(double theta_gate);

/// exp(-i h t) by spectral decomposition of the Hermitian matrix h.
CMatrix evolve_numeric(const CMatrix& h, double t);

enum class SidebandKind { carrier, red, blue };

/// Single-tone drive of one ion coupling `lower` to `upper`, optionally
/// exchanging a motional quantum. Blue couples |lower,n> <-> |upper,n+1>
/// with strength sqrt(n+1); red couples |lower,n+1> <-> |upper,n> with
/// strength sqrt(n+1); carrier couples |lower,n> <-> |upper,n>.
struct SidebandPulse {
    SidebandKind kind = SidebandKind::carrier;
    IonLevel lower = IonLevel::Q0;
    IonLevel upper = IonLevel::AuxPlus;
    double area = std::numbers::pi;
    double phase = 0.0;
    int ion = 0;
};

/// Generator G on (ion level x Fock) with exp(-i G area) the pulse unitary,
/// i.e. the Hamiltonian in units of the n=0 Rabi frequency.
CMatrix sideband_generator(const SidebandPulse& pulse, const StateSpace& space);

/// Closed-form pulse unitary on (ion level x Fock), dimension 5 * fock_dim.
/// Pairs that would leave the truncated Fock space are left uncoupled.
CMatrix sideband_unitary(const SidebandPulse& pulse, const StateSpace& space);

}  // namespace certgate

#endif  // CERTGATE_PULSES_HPP
