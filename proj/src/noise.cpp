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

#include "certgate/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace certgate {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng trajectory_rng(std::uint64_t master_seed, std::uint64_t index, std::uint64_t stream) {
    const std::uint64_t key = splitmix64(splitmix64(splitmix64(master_seed) ^ index) ^ stream);
    return Rng(key);
}

void AmplitudeErrorModel::validate() const {
    if (!std::isfinite(delta_pi) || !std::isfinite(sigma) || !std::isfinite(slope)) {
        throw std::invalid_argument("error model: parameters must be finite");
    }
    if (sigma < 0.0) throw std::invalid_argument("error model: sigma must be non-negative");
}

std::string to_string(AmplitudeErrorModel::Kind kind) {
    switch (kind) {
        case AmplitudeErrorModel::Kind::constant: return "constant";
        case AmplitudeErrorModel::Kind::gaussian_iid: return "gaussian_iid";
        case AmplitudeErrorModel::Kind::linear_drift: return "linear_drift";
        case AmplitudeErrorModel::Kind::random_walk: return "random_walk";
    }
    return "unknown";
}

AmplitudeErrorModel::Kind error_kind_from_string(const std::string& name) {
    using K = AmplitudeErrorModel::Kind;
    for (K k : {K::constant, K::gaussian_iid, K::linear_drift, K::random_walk}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown error model kind '" + name + "' (expected constant, gaussian_iid, linear_drift or random_walk)");
}

ErrorDraw sample_errors(const AmplitudeErrorModel& model, int n_steps, Rng& rng) {
    if (n_steps < 1) throw std::invalid_argument("sample_errors: n_steps must be >= 1");
    model.validate();
    ErrorDraw draw;
    draw.deltas.reserve(static_cast<std::size_t>(n_steps));
    std::normal_distribution<double> normal(0.0, 1.0);
    double walk = model.delta_pi;
    for (int k = 0; k < n_steps; ++k) {
        double d = 0.0;
        switch (model.kind) {
            case AmplitudeErrorModel::Kind::constant: d = model.delta_pi; break;
            case AmplitudeErrorModel::Kind::gaussian_iid: d = model.sigma * normal(rng); break;
            case AmplitudeErrorModel::Kind::linear_drift: d = model.delta_pi + model.slope * k; break;
            case AmplitudeErrorModel::Kind::random_walk:
                if (k > 0) walk += model.sigma * normal(rng);
                d = walk;
                break;
        }
        const double limit = std::nextafter(std::numbers::pi, 0.0);
        if (d > limit || d < -limit) {
            d = std::copysign(limit, d);
            ++draw.clamped;
        }
        draw.deltas.push_back(d);
    }
    return draw;
}

double rms(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double acc = 0.0;
    for (double v : values) acc += v * v;
    return std::sqrt(acc / static_cast<double>(values.size()));
}

}  // namespace certgate
