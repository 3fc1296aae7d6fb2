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

#include <gtest/gtest.h>

#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "certgate/statespace.hpp"
#include "oracles.hpp"

using namespace certgate;
using oracle::I;
using oracle::pi;

namespace {

PureState qubit(Complex a, Complex b) {
    const StateSpace s(1);
    return make_state(s, {{s.index({IonLevel::Q0}), a}, {s.index({IonLevel::Q1}), b}});
}

}  // namespace

TEST(StateSpace, DimensionsAndOrdering) {
    EXPECT_EQ(StateSpace(1).dimension(), 5u);
    EXPECT_EQ(StateSpace(2, 3).dimension(), 100u);
    EXPECT_EQ(StateSpace(4).dimension(), 625u);
    const StateSpace s(2, 2);
    EXPECT_EQ(s.index({IonLevel::Q0, IonLevel::Q0}, 0), 0u);
    EXPECT_EQ(s.index({IonLevel::Q0, IonLevel::Q0}, 1), 1u);
    EXPECT_EQ(s.index({IonLevel::Q0, IonLevel::Q1}, 0), 3u);
    EXPECT_EQ(s.index({IonLevel::Q1, IonLevel::Q0}, 0), 15u);
    for (std::size_t i = 0; i < s.dimension(); ++i) {
        EXPECT_EQ(s.index({s.level_of(i, 0), s.level_of(i, 1)}, s.fock_of(i)), i);
    }
    EXPECT_EQ(s.label(s.index({IonLevel::AuxPlus, IonLevel::Bright}, 1)), "|A+,B;1>");
    EXPECT_THROW(StateSpace(0), std::invalid_argument);
    EXPECT_THROW(StateSpace(5), std::invalid_argument);
    EXPECT_THROW(s.index({IonLevel::Q0}, 0), std::invalid_argument);
    EXPECT_THROW(s.index({IonLevel::Q0, IonLevel::Q0}, 3), std::out_of_range);
}

TEST(LevelSet, Basics) {
    constexpr LevelSet q = LevelSet::qubit();
    static_assert(q.contains(IonLevel::Q0) && q.contains(IonLevel::Q1) && !q.contains(IonLevel::AuxPlus));
    EXPECT_EQ(q.complement(), (LevelSet{IonLevel::AuxPlus, IonLevel::AuxMinus, IonLevel::Bright}));
    EXPECT_EQ(LevelSet::auxiliary().levels().size(), 2u);
    EXPECT_TRUE(LevelSet{}.empty());
}

TEST(MakeState, Examples) {
    const StateSpace s(1);
    const PureState zero = make_state(s, {{s.index({IonLevel::Q0}), 1.0}});
    EXPECT_NEAR(zero.norm(), 1.0, 1e-15);
    EXPECT_EQ(zero[0], Complex(1.0));

    const PureState plus = qubit(1.0, 1.0);
    EXPECT_NEAR(std::abs(plus[0] - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(plus[1] - 1.0 / std::sqrt(2.0)), 0.0, 1e-15);

    const StateSpace cz(2, 2);
    const std::size_t ee0 = cz.index({IonLevel::Q1, IonLevel::Q1}, 0);
    const PureState ee = make_state(cz, {{ee0, 3.0}});
    EXPECT_NEAR(std::abs(ee[ee0] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(ee.norm(), 1.0, 1e-15);

    EXPECT_THROW(make_state(s, {}), std::invalid_argument);
    EXPECT_THROW(make_state(s, {{7, 1.0}}), std::out_of_range);
}

TEST(PlusMinusN, Examples) {
    auto [p0, m0] = plus_minus_n_states({0.0, 0.0});
    EXPECT_NEAR(std::abs(p0[0] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m0[1] + 1.0), 0.0, 1e-15);  // |-n> = -|1>

    auto [pe, me] = plus_minus_n_states({pi / 2, 0.0});
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(pe[0] - r) + std::abs(pe[1] - r), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(me[0] - r) + std::abs(me[1] + r), 0.0, 1e-15);

    auto [py, my] = plus_minus_n_states({pi / 2, pi / 2});
    EXPECT_NEAR(std::abs(py[0] - r) + std::abs(py[1] - I * r), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(my[0] - r) + std::abs(my[1] + I * r), 0.0, 1e-15);
}

TEST(PlusMinusN, OrthonormalCompleteForRandomAxes) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> th(0, pi), ph(0, 2 * pi);
    for (int k = 0; k < 1000; ++k) {
        const auto [p, m] = plus_minus_n_vectors(th(rng), ph(rng));
        EXPECT_LT(std::abs(p.dot(m)), 1e-12);
        const Eigen::Matrix2cd proj = p * p.adjoint() + m * m.adjoint();
        EXPECT_LT((proj - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(PlusMinusN, EigenvectorsOfAxisOperator) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> th(0, pi), ph(0, 2 * pi);
    for (int k = 0; k < 200; ++k) {
        const BlochAxis axis{th(rng), ph(rng)};
        const Eigen::Vector3d n = axis.unit_vector();
        Eigen::Matrix2cd ns;
        ns << n.z(), Complex(n.x(), -n.y()), Complex(n.x(), n.y()), -n.z();
        const auto [p, m] = plus_minus_n_vectors(axis.theta, axis.phi);
        EXPECT_LT((ns * p - p).norm(), 1e-12);
        EXPECT_LT((ns * m + m).norm(), 1e-12);
    }
}

TEST(ApplyUnitary, Examples) {
    const PureState zero = qubit(1.0, 0.0);
    const PureState same = apply_unitary(zero, CMatrix::Identity(5, 5), {{0}});
    EXPECT_EQ(same.amplitudes(), zero.amplitudes());

    CMatrix x = CMatrix::Identity(5, 5);
    x.topLeftCorner(2, 2) << 0, 1, 1, 0;
    const PureState one = apply_unitary(zero, x, {{0}});
    EXPECT_NEAR(std::abs(one[1] - 1.0), 0.0, 1e-15);

    EXPECT_THROW(apply_unitary(zero, CMatrix::Identity(4, 4), {{0}}), std::invalid_argument);
    EXPECT_THROW(apply_unitary(zero, 2.0 * CMatrix::Identity(5, 5), {{0}}), std::invalid_argument);
    EXPECT_THROW(apply_unitary(zero, CMatrix::Identity(5, 5), {{1}}), std::out_of_range);
}

TEST(ApplyUnitary, PreservesNormOnRandomPairs) {
    std::mt19937_64 rng(13);
    const StateSpace s(2);
    for (int k = 0; k < 10000; ++k) {
        const PureState psi(s, oracle::random_vector(25, rng));
        const CMatrix u = oracle::random_unitary(5, rng);
        const PureState out = apply_unitary(psi, u, {{static_cast<int>(k % 2)}});
        ASSERT_NEAR(out.norm(), 1.0, 1e-12);
    }
}

TEST(ApplyUnitary, MatchesKroneckerEmbedding) {
    std::mt19937_64 rng(14);
    const StateSpace s(2, 1);
    const PureState psi(s, oracle::random_vector(50, rng));
    const CMatrix u = oracle::random_unitary(10, rng);  // ion 1 (x) motion
    const PureState out = apply_unitary(psi, u, {{1}, true});
    const CMatrix full = Eigen::kroneckerProduct(CMatrix::Identity(5, 5), u);
    EXPECT_LT((out.amplitudes() - full * psi.amplitudes()).norm(), 1e-12);

    // ion order in the selector is the operator's tensor order
    const CMatrix a = oracle::random_unitary(5, rng);
    const CMatrix b = oracle::random_unitary(5, rng);
    const CMatrix ab = Eigen::kroneckerProduct(a, b);
    const PureState swapped = apply_unitary(psi, ab, {{1, 0}});
    const CMatrix ref = Eigen::kroneckerProduct(Eigen::kroneckerProduct(b, a).eval(), CMatrix::Identity(2, 2));
    EXPECT_LT((swapped.amplitudes() - ref * psi.amplitudes()).norm(), 1e-12);
}

TEST(ManifoldPopulation, Examples) {
    const StateSpace s(1);
    EXPECT_NEAR(manifold_population(qubit(1.0, 0.0), 0, LevelSet::qubit()), 1.0, 1e-15);
    const PureState mix = make_state(s, {{0, 1.0}, {s.index({IonLevel::AuxPlus}), 1.0}});
    EXPECT_NEAR(manifold_population(mix, 0, LevelSet::auxiliary()), 0.5, 1e-15);
}

TEST(ManifoldPopulation, SumsToOneOverAllLevels) {
    std::mt19937_64 rng(15);
    const StateSpace s(3, 2);
    for (int k = 0; k < 50; ++k) {
        const PureState psi(s, oracle::random_vector(static_cast<Eigen::Index>(s.dimension()), rng));
        for (int ion = 0; ion < 3; ++ion) {
            double total = 0.0;
            for (IonLevel l : LevelSet::all().levels()) total += manifold_population(psi, ion, {l});
            EXPECT_NEAR(total, 1.0, 1e-12);
            EXPECT_NEAR(manifold_population(psi, ion, LevelSet::all()), 1.0, 1e-12);
        }
        EXPECT_NEAR(manifold_population(psi, 0, LevelSet::all(), {0}) + motional_population_outside(psi, 0), 1.0,
                    1e-12);
    }
}

TEST(Fidelity, Examples) {
    std::mt19937_64 rng(16);
    const StateSpace s(2);
    const CVector v = oracle::random_vector(25, rng);
    EXPECT_NEAR(fidelity_up_to_global_phase(PureState(s, v), PureState(s, std::polar(1.0, 0.7) * v)), 1.0, 1e-14);
    EXPECT_EQ(fidelity_up_to_global_phase(qubit(1.0, 0.0), qubit(0.0, 1.0)), 0.0);
    const auto [p, m] = plus_minus_n_states({pi / 3, 0.4});
    EXPECT_NEAR(fidelity_up_to_global_phase(p, qubit(1.0, 0.0)), 0.75, 1e-14);
    EXPECT_THROW(fidelity_up_to_global_phase(p, PureState(s, v)), std::invalid_argument);
}

TEST(EmbedIonOperator, LeavesBrightUntouched) {
    std::mt19937_64 rng(17);
    const Eigen::Matrix4cd u = oracle::random_unitary(4, rng);
    const CMatrix e = embed_ion_operator(u);
    EXPECT_EQ(e(4, 4), Complex(1.0));
    EXPECT_EQ(e.row(4).head(4).norm(), 0.0);
    EXPECT_TRUE(is_unitary(e, 1e-12));
}
