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

#ifndef CERTGATE_NOISE_HPP
#define CERTGATE_NOISE_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace certgate {

using Rng = std::mt19937_64;

/// Independent stream for trajectory `index` of an ensemble with
/// `master_seed`. `stream` separates uses within one trajectory (error
/// draws, herald sampling). Derived by SplitMix64 hashing, so the result
/// does not depend on how trajectories are distributed over workers.
Rng trajectory_rng(std::uint64_t master_seed, std::uint64_t index, std::uint64_t stream = 0);

std::uint64_t splitmix64(std::uint64_t x);

/// Pulse-area error process; every parameter is in radians of pulse area.
struct AmplitudeErrorModel {
    enum class Kind { constant, gaussian_iid, linear_drift, random_walk };

    Kind kind = Kind::constant;
    double delta_pi = 0.0;  // constant value, or starting value for drift / walk
    double sigma = 0.0;     // gaussian_iid std, or random_walk step std
    double slope = 0.0;     // linear_drift increment per step

    static AmplitudeErrorModel constant(double delta) { return {Kind::constant, delta, 0.0, 0.0}; }
    static AmplitudeErrorModel gaussian_iid(double sigma) { return {Kind::gaussian_iid, 0.0, sigma, 0.0}; }
    static AmplitudeErrorModel linear_drift(double start, double slope) {
        return {Kind::linear_drift, start, 0.0, slope};
    }
    static AmplitudeErrorModel random_walk(double sigma_step, double start) {
        return {Kind::random_walk, start, sigma_step, 0.0};
    }

    /// Throws std::invalid_argument on negative or non-finite parameters.
    void validate() const;
};

std::string to_string(AmplitudeErrorModel::Kind kind);
AmplitudeErrorModel::Kind error_kind_from_string(const std::string& name);

struct ErrorDraw {
    std::vector<double> deltas;
    int clamped = 0;  // values pulled back inside (-pi, pi)
};

ErrorDraw sample_errors(const AmplitudeErrorModel& model, int n_steps, Rng& rng);

double rms(std::span<const double> values);

}  // namespace certgate

#endif  // CERTGATE_NOISE_HPP
