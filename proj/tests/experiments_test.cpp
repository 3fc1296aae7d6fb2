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

#include <cmath>

#include "certgate/experiments.hpp"
#include "oracles.hpp"

using namespace certgate;
using oracle::pi;

namespace {

ExperimentSpec single(AmplitudeErrorModel m, int trials = 1, ExecutionMode mode = ExecutionMode::branch_enumeration) {
    ExperimentSpec s;
    s.protocol = ProtocolKind::single;
    s.gate = {{1.1, 0.3}, 0.9};
    s.error_model = m;
    s.trials = trials;
    s.mode = mode;
    s.master_seed = 2024;
    s.input.kind = InputSpec::Kind::plus_n;
    return s;
}

ExperimentSpec cz(AmplitudeErrorModel m) {
    ExperimentSpec s;
    s.protocol = ProtocolKind::cz;
    s.error_model = m;
    s.input.kind = InputSpec::Kind::bell;
    return s;
}

ExperimentSpec addressing(double r, AmplitudeErrorModel m = {}) {
    ExperimentSpec s;
    s.protocol = ProtocolKind::addressing;
    s.gate = {{0.4, 1.0}, 2.0};
    s.error_model = m;
    s.n_ions = 3;
    s.target = 1;
    s.crosstalk = {r, 1.0, r};
    s.input.label = "010";
    return s;
}

double p_dark(double d) { return 1 - std::pow(std::sin(d / 2), 2); }

}  // namespace

TEST(RunEnsemble, ZeroErrorsEveryProtocol) {
    for (const ExperimentSpec& s : {single({}), cz({}), addressing(0.0)}) {
        const EnsembleStatistics st = run_ensemble(s);
        EXPECT_EQ(st.herald_rate, 0.0);
        ASSERT_TRUE(st.conditional_fidelity);
        EXPECT_NEAR(*st.conditional_fidelity, 1.0, 1e-12);
    }
}

TEST(RunEnsemble, BranchIntervalIsExactForConstantError) {
    const EnsembleStatistics st = run_ensemble(single(AmplitudeErrorModel::constant(0.2), 5));
    EXPECT_EQ(st.herald_rate_se, 0.0);
    EXPECT_EQ(st.wilson_low, st.herald_rate);
    EXPECT_EQ(st.wilson_high, st.herald_rate);
}

TEST(RunEnsemble, MonteCarloConstantError) {
    const EnsembleStatistics st = run_ensemble(single(AmplitudeErrorModel::constant(0.2), 100000, ExecutionMode::monte_carlo), 4);
    const double p = 1 - p_dark(0.2) * p_dark(0.2);
    EXPECT_LT(std::abs(st.herald_rate - p), 3 * st.herald_rate_se);
    EXPECT_LE(st.wilson_low, p);
    EXPECT_GE(st.wilson_high, p);
    EXPECT_NEAR(*st.conditional_fidelity, 1.0, 1e-10);
}

TEST(RunEnsemble, GaussianConditionalFidelityIsOne) {
    const EnsembleStatistics st = run_ensemble(single(AmplitudeErrorModel::gaussian_iid(0.1), 2000), 4);
    EXPECT_GT(*st.min_conditional_fidelity, 1 - 1e-10);
    EXPECT_NEAR(st.herald_rate, st.analytic_flag_probability, 1e-12);
    EXPECT_GT(st.herald_rate, 0.0);
}

TEST(RunEnsemble, EmptyNoFlagSetIsUndefined) {
    ExperimentSpec s = single({}, 200, ExecutionMode::monte_carlo);
    s.selectivity = 0.0;
    const EnsembleStatistics st = run_ensemble(s);
    EXPECT_EQ(st.herald_rate, 1.0);
    EXPECT_FALSE(st.conditional_fidelity.has_value());
}

TEST(RunEnsemble, WorkerCountDoesNotChangeResults) {
    ExperimentSpec s = single(AmplitudeErrorModel::random_walk(0.05, 0.1), 3000, ExecutionMode::monte_carlo);
    const EnsembleRun a = run_ensemble_detailed(s, 1);
    const EnsembleRun b = run_ensemble_detailed(s, 7);
    EXPECT_EQ(a.statistics.herald_rate, b.statistics.herald_rate);
    EXPECT_EQ(a.statistics.conditional_fidelity, b.statistics.conditional_fidelity);
    EXPECT_EQ(a.statistics.unconditional_fidelity, b.statistics.unconditional_fidelity);
    for (std::size_t t = 0; t < a.trajectories.size(); ++t) {
        ASSERT_EQ(a.trajectories[t].errors, b.trajectories[t].errors);
        ASSERT_EQ(a.trajectories[t].flag_probability, b.trajectories[t].flag_probability);
    }
}

TEST(RunEnsemble, CzChannelsAndAnalyticFormula) {
    const EnsembleStatistics st = run_ensemble(cz(AmplitudeErrorModel::constant(0.1)));
    EXPECT_NEAR(st.no_flag_probability, std::pow(p_dark(0.1), 4), 1e-12);
    ASSERT_EQ(st.transfer_flags.size(), 4u);
    double p = 1.0;
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(st.transfer_flags[static_cast<std::size_t>(k)], p * (1 - p_dark(0.1)), 1e-12);
        p *= p_dark(0.1);
    }
}

TEST(RunEnsemble, AddressingNeighborRates) {
    const EnsembleStatistics zero = run_ensemble(addressing(0.0));
    for (const auto& c : zero.channels) EXPECT_EQ(c.flagged, 0.0);
    const EnsembleStatistics st = run_ensemble(addressing(0.1));
    for (const auto& c : st.channels) {
        if (c.key.ion == 1) continue;
        EXPECT_NEAR(c.rate, std::pow(std::sin(0.05 * pi), 2), 1e-12);
    }
}

TEST(HeraldAnalytic, Examples) {
    EXPECT_EQ(herald_probability_analytic(std::vector<double>{0, 0}), 0.0);
    EXPECT_NEAR(herald_probability_analytic(std::vector<double>{0.2, 0.1}),
                1 - (1 - std::pow(std::sin(0.1), 2)) * (1 - std::pow(std::sin(0.05), 2)), 1e-15);
    for (double d : {0.05, 0.3, -0.7}) {
        const EnsembleStatistics st = run_ensemble(cz(AmplitudeErrorModel::constant(d)));
        EXPECT_NEAR(herald_probability_analytic(std::vector<double>(4, d)), st.herald_rate, 1e-10);
    }
}

TEST(Sweep, Examples) {
    const auto one = sweep(single({}), "delta_pi", std::vector<double>{0.0});
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].statistics.herald_rate, 0.0);

    std::vector<double> values;
    for (int k = 0; k < 10; ++k) values.push_back(1e-3 * std::pow(100.0, k / 9.0));
    const auto rows = sweep(single({}), "delta_pi", values);
    double mx = 0, my = 0;
    for (const auto& r : rows) mx += std::log(r.value) / 10, my += std::log(r.statistics.herald_rate) / 10;
    double sxy = 0, sxx = 0;
    for (const auto& r : rows) {
        sxy += (std::log(r.value) - mx) * (std::log(r.statistics.herald_rate) - my);
        sxx += std::pow(std::log(r.value) - mx, 2);
    }
    EXPECT_NEAR(sxy / sxx, 2.0, 0.05);

    const auto sel = sweep(single({}), "selectivity", std::vector<double>{1.0, 0.95, 0.9});
    EXPECT_EQ(sel[0].statistics.herald_rate, 0.0);
    EXPECT_NEAR(sel[1].statistics.herald_rate, 1 - 0.95 * 0.95, 1e-12);
    EXPECT_LT(sel[1].statistics.herald_rate, sel[2].statistics.herald_rate);
    EXPECT_THROW(sweep(single({}), "nonsense", std::vector<double>{1.0}), std::invalid_argument);
    EXPECT_THROW(sweep(single({}), "r_neighbor", std::vector<double>{0.1}), std::invalid_argument);
}

TEST(CompareCertifiedVsBare, Examples) {
    const CertifiedVsBare zero = compare_certified_vs_bare(single({}));
    EXPECT_EQ(zero.certified_herald_rate, 0.0);
    EXPECT_NEAR(zero.bare_infidelity, 0.0, 1e-15);

    const CertifiedVsBare c = compare_certified_vs_bare(single(AmplitudeErrorModel::constant(0.1)));
    EXPECT_NEAR(c.certified_herald_rate, 1 - p_dark(0.1) * p_dark(0.1), 1e-14);
    EXPECT_NEAR(c.certified_herald_rate, 2 * std::pow(std::sin(0.05), 2), 1e-5);
    EXPECT_LT(c.certified_conditional_infidelity, 1e-10);
    EXPECT_GT(c.bare_infidelity, 0.0);
    EXPECT_TRUE(std::isfinite(c.ratio));

    const double sigma = 0.05;
    const CertifiedVsBare g = compare_certified_vs_bare(single(AmplitudeErrorModel::gaussian_iid(sigma), 100000), 4);
    const double e = oracle::gaussian_expectation([](double d) { return p_dark(d); }, sigma);
    const double expect = 1 - e * e;
    EXPECT_LT(std::abs(g.certified_herald_rate - expect), 3 * g.certified_herald_rate_se);
    EXPECT_LT(g.certified_conditional_infidelity, 1e-10);
}

TEST(ExperimentSpec, Validation) {
    ExperimentSpec s = single({});
    s.selectivity = 1.5;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = cz({});
    s.fock_cutoff = 1;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = addressing(0.1);
    s.crosstalk = {0.1, 0.9, 0.1};
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = single({});
    s.input = {InputSpec::Kind::bell, "", {}};
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.input = {InputSpec::Kind::basis, "01", {}};
    EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(PrepareInput, Kinds) {
    ExperimentSpec s = cz({});
    s.input = {InputSpec::Kind::basis, "ge", {}};
    const PureState ge = prepare_input(s);
    EXPECT_EQ(ge[ge.space().index({kGround, kExcited})], Complex(1.0));
    s.input = {InputSpec::Kind::amplitudes, "", {1.0, 0.0, Complex(0, 1), 0.0}};
    const PureState a = prepare_input(s);
    EXPECT_NEAR(std::abs(a[a.space().index({kExcited, kGround})] - Complex(0, 1 / std::sqrt(2.0))), 0.0, 1e-15);
}
