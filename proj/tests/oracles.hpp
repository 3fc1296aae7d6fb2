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

// Independent reference computations for the tests. Nothing here calls into
// the library's pulse or protocol code.

#ifndef CERTGATE_TESTS_ORACLES_HPP
#define CERTGATE_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "certgate/statespace.hpp"

namespace oracle {

using certgate::Complex;
using certgate::CMatrix;
using certgate::CVector;
using certgate::IonLevel;
using std::numbers::pi;

inline const Complex I{0.0, 1.0};

/// exp(-i h t) by scaling and squaring of a truncated Taylor series.
inline CMatrix expm_taylor(const CMatrix& h, double t) {
    CMatrix a = -I * t * h;
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::ldexp(1.0, squarings) > 0.25) ++squarings;
    a /= std::ldexp(1.0, squarings);
    CMatrix result = CMatrix::Identity(h.rows(), h.cols());
    CMatrix term = CMatrix::Identity(h.rows(), h.cols());
    for (int k = 1; k <= 24; ++k) {
        term = term * a / static_cast<double>(k);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

/// RK4 integration of i d/dt (a, b) = [[0, g/2], [g*/2, 0]] (a, b) over
/// area `area`, with g = coupling * exp(-i phase) on the upper-lower element.
inline Eigen::Vector2cd two_level_rk4(Eigen::Vector2cd psi, double coupling, double phase, double area,
                                      int steps = 20000) {
    Eigen::Matrix2cd h;
    const Complex g = coupling * std::polar(1.0, -phase);
    h << 0.0, std::conj(g) / 2.0, g / 2.0, 0.0;  // basis (lower, upper)
    const double dt = area / steps;
    auto f = [&](const Eigen::Vector2cd& y) -> Eigen::Vector2cd { return -I * (h * y); };
    for (int s = 0; s < steps; ++s) {
        const Eigen::Vector2cd k1 = f(psi);
        const Eigen::Vector2cd k2 = f(psi + 0.5 * dt * k1);
        const Eigen::Vector2cd k3 = f(psi + 0.5 * dt * k2);
        const Eigen::Vector2cd k4 = f(psi + dt * k3);
        psi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return psi;
}

inline Eigen::Vector4cd plus_n4(double theta, double phi) {
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    v(0) = std::cos(theta / 2);
    v(1) = std::exp(I * phi) * std::sin(theta / 2);
    return v;
}

inline Eigen::Vector4cd minus_n4(double theta, double phi) {
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    v(0) = std::sin(theta / 2);
    v(1) = -std::exp(I * phi) * std::cos(theta / 2);
    return v;
}

/// (omega/2)(|A+><+n| + |A-><-n| + h.c.) on (Q0, Q1, A+, A-).
inline Eigen::Matrix4cd dyadic_hamiltonian(double theta, double phi, double omega = 1.0) {
    Eigen::Vector4cd ap = Eigen::Vector4cd::Unit(2);
    Eigen::Vector4cd am = Eigen::Vector4cd::Unit(3);
    Eigen::Matrix4cd h = ap * plus_n4(theta, phi).adjoint() + am * minus_n4(theta, phi).adjoint();
    return omega / 2.0 * (h + h.adjoint()).eval();
}

/// Simpson integration of f against the N(0, sigma^2) density on +-10 sigma.
inline double gaussian_expectation(const std::function<double(double)>& f, double sigma, int panels = 4000) {
    if (sigma == 0.0) return f(0.0);
    const double a = -10 * sigma;
    const double b = 10 * sigma;
    const double hstep = (b - a) / panels;
    double acc = 0.0;
    for (int k = 0; k <= panels; ++k) {
        const double x = a + k * hstep;
        const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        acc += w * f(x) * std::exp(-x * x / (2 * sigma * sigma));
    }
    return acc * hstep / 3.0 / (sigma * std::sqrt(2 * pi));
}

inline CMatrix random_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CMatrix z(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z(i, j) = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) q.col(j) *= std::polar(1.0, std::arg(r(j, j)));
    return q;
}

inline CVector random_vector(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
    return v.normalized();
}

/// Two-ion amplitudes in the (gg, ge, eg, ee) order, g = Q0, e = Q1.
struct CzCoefficients {
    Complex gg, ge, eg, ee;
};

/// Intermediate no-flag states of the certified CZ gate written out term by
/// term, on two ions with a motional mode truncated at `cutoff`.
struct CzStates {
    CVector psi0, psi1, psi2, psi3, psi4;
};

inline CzStates cz_states(const CzCoefficients& c, int cutoff = 3) {
    const certgate::StateSpace space(2, cutoff);
    auto ket = [&](IonLevel m, IonLevel n, int fock) {
        CVector v = CVector::Zero(static_cast<Eigen::Index>(space.dimension()));
        v(static_cast<Eigen::Index>(space.index({m, n}, fock))) = 1.0;
        return v;
    };
    const IonLevel g = IonLevel::Q0, e = IonLevel::Q1, ap = IonLevel::AuxPlus, am = IonLevel::AuxMinus;
    CzStates s;
    s.psi0 = c.ee * ket(e, e, 0) + c.ge * ket(g, e, 0) + c.eg * ket(e, g, 0) + c.gg * ket(g, g, 0);
    s.psi1 = -I * (c.ee * ket(ap, e, 1) + c.eg * ket(ap, g, 1) + c.ge * ket(am, e, 0) + c.gg * ket(am, g, 0));
    s.psi2 = -(c.gg * ket(g, g, 0) + c.ge * ket(g, e, 0) + c.eg * ket(ap, am, 0) + c.ee * ket(ap, ap, 0));
    s.psi3 = I * c.gg * ket(am, g, 0) + I * c.ge * ket(am, e, 0) + I * c.eg * ket(ap, g, 1) - I * c.ee * ket(ap, e, 1);
    s.psi4 = c.gg * ket(g, g, 0) + c.ge * ket(g, e, 0) + c.eg * ket(e, g, 0) - c.ee * ket(e, e, 0);
    return s;
}

inline double overlap2(const CVector& a, const CVector& b) { return std::norm(a.dot(b)); }

}  // namespace oracle

#endif  // CERTGATE_TESTS_ORACLES_HPP
