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

#include "certgate/pulses.hpp"

#include <cmath>
#include <stdexcept>

namespace certgate {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr Complex kI{0.0, 1.0};

int idx(IonLevel l) { return static_cast<int>(l); }

}  // namespace

std::array<double, 4> ToneSet::amplitudes() const {
    const double c = omega * std::cos(axis.theta / 2);
    const double s = omega * std::sin(axis.theta / 2);
    return {c, s, s, c};
}

std::array<Tone, 4> ToneSet::tones(double pair_phase_plus, double pair_phase_minus) const {
    const auto a = amplitudes();
    const double pi = std::numbers::pi;
    return {{
        {IonLevel::Q0, IonLevel::AuxPlus, a[0], pair_phase_plus},
        {IonLevel::Q1, IonLevel::AuxPlus, a[1], axis.phi + pair_phase_plus},
        {IonLevel::Q0, IonLevel::AuxMinus, a[2], pair_phase_minus},
        {IonLevel::Q1, IonLevel::AuxMinus, a[3], axis.phi + pi + pair_phase_minus},
    }};
}

Eigen::Matrix4cd hamiltonian_matrix(const std::array<Tone, 4>& tones) {
    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
    for (const Tone& t : tones) {
        const Complex c = 0.5 * t.rabi * std::polar(1.0, -t.phase);
        h(idx(t.upper), idx(t.lower)) += c;
        h(idx(t.lower), idx(t.upper)) += std::conj(c);
    }
    return h;
}

Eigen::Matrix4cd hamiltonian_matrix(const ToneSet& tones) { return hamiltonian_matrix(tones.tones()); }

Eigen::Matrix4cd transfer_unitary(const TransferPulse& pulse, TransferDirection /*direction*/) {
    const auto [plus, minus] = plus_minus_n_vectors(pulse.tones.axis.theta, pulse.tones.axis.phi);
    Eigen::Vector4cd pn = Eigen::Vector4cd::Zero();
    Eigen::Vector4cd mn = Eigen::Vector4cd::Zero();
    pn.head<2>() = plus;
    mn.head<2>() = minus;
    const Eigen::Vector4cd ap = Eigen::Vector4cd::Unit(idx(IonLevel::AuxPlus));
    const Eigen::Vector4cd am = Eigen::Vector4cd::Unit(idx(IonLevel::AuxMinus));

    const Eigen::Matrix4cd kp = std::polar(1.0, -pulse.pair_phase_plus) * ap * pn.adjoint();
    const Eigen::Matrix4cd km = std::polar(1.0, -pulse.pair_phase_minus) * am * mn.adjoint();
    const Eigen::Matrix4cd coupling = kp + kp.adjoint() + km + km.adjoint();

    // The two pair subspaces span the four levels, so the rotation is
    // cos(A/2) 1 - i sin(A/2) K with K the unit coupling.
    const double half = pulse.area / 2;
    return std::cos(half) * Eigen::Matrix4cd::Identity() - kI * std::sin(half) * coupling;
}

std::pair<double, double> gate_phase_shifts(double theta_gate) {
    const double pi = std::numbers::pi;
    return {pi - theta_gate / 2, pi + theta_gate / 2};
}

CMatrix evolve_numeric(const CMatrix& h, double t) {
    if (!is_hermitian(h, kHermitianTol)) throw std::invalid_argument("evolve_numeric: matrix is not Hermitian");
    const CMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success) throw std::runtime_error("evolve_numeric: eigensolver failed");
    const Eigen::VectorXd& w = solver.eigenvalues();
    CVector phases(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) phases(k) = std::polar(1.0, -w(k) * t);
    const CMatrix& v = solver.eigenvectors();
    return v * phases.asDiagonal() * v.adjoint();
}

namespace {

struct CoupledPair {
    Eigen::Index lower;
    Eigen::Index upper;
    double strength;
};

std::vector<CoupledPair> sideband_pairs(const SidebandPulse& pulse, const StateSpace& space) {
    if (pulse.lower == pulse.upper) throw std::invalid_argument("sideband pulse: lower and upper level coincide");
    if (pulse.lower == IonLevel::Bright || pulse.upper == IonLevel::Bright) {
        throw std::invalid_argument("sideband pulse: the bright sink is never driven");
    }
    if (pulse.ion < 0 || pulse.ion >= space.n_ions()) throw std::out_of_range("sideband pulse: invalid ion index");
    if (pulse.kind != SidebandKind::carrier && space.fock_cutoff() < 1) {
        throw std::invalid_argument("sideband pulse: red/blue sideband needs fock_cutoff >= 1");
    }
    const int nf = space.fock_dim();
    auto local = [nf](IonLevel l, int n) { return static_cast<Eigen::Index>(idx(l) * nf + n); };

    std::vector<CoupledPair> pairs;
    for (int n = 0; n < nf; ++n) {
        switch (pulse.kind) {
            case SidebandKind::carrier:
                pairs.push_back({local(pulse.lower, n), local(pulse.upper, n), 1.0});
                break;
            case SidebandKind::blue:
                if (n + 1 < nf) pairs.push_back({local(pulse.lower, n), local(pulse.upper, n + 1), std::sqrt(n + 1.0)});
                break;
            case SidebandKind::red:
                if (n + 1 < nf) pairs.push_back({local(pulse.lower, n + 1), local(pulse.upper, n), std::sqrt(n + 1.0)});
                break;
        }
    }
    return pairs;
}

}  // namespace

CMatrix sideband_generator(const SidebandPulse& pulse, const StateSpace& space) {
    const Eigen::Index dim = kLevelsPerIon * space.fock_dim();
    CMatrix g = CMatrix::Zero(dim, dim);
    const Complex phase = std::polar(1.0, -pulse.phase);
    for (const CoupledPair& p : sideband_pairs(pulse, space)) {
        g(p.upper, p.lower) += 0.5 * p.strength * phase;
        g(p.lower, p.upper) += 0.5 * p.strength * std::conj(phase);
    }
    return g;
}

CMatrix sideband_unitary(const SidebandPulse& pulse, const StateSpace& space) {
    const Eigen::Index dim = kLevelsPerIon * space.fock_dim();
    CMatrix u = CMatrix::Identity(dim, dim);
    const Complex phase = std::polar(1.0, -pulse.phase);
    for (const CoupledPair& p : sideband_pairs(pulse, space)) {
        const double half = pulse.area * p.strength / 2;
        const double c = std::cos(half);
        const double s = std::sin(half);
        u(p.lower, p.lower) = c;
        u(p.upper, p.upper) = c;
        u(p.upper, p.lower) = -kI * s * phase;
        u(p.lower, p.upper) = -kI * s * std::conj(phase);
    }
    return u;
}

}  // namespace certgate
