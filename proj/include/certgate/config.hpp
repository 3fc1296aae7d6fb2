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

#ifndef CERTGATE_CONFIG_HPP
#define CERTGATE_CONFIG_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "certgate/experiments.hpp"

namespace certgate {

/// Configuration problem; `where` is a JSON pointer or "line:column".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& message)
        : std::runtime_error(where + ": " + message), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct OutputOptions {
    std::string dir;
    bool branch_table = true;
    bool trajectory_table = true;
};

struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
};

struct RunConfig {
    ExperimentSpec experiment;
    std::optional<SweepSpec> sweep;
    OutputOptions output;
};

/// Validates `doc` against the schema and the experiment invariants.
/// `protocol_hint` fills in "protocol" when the document omits it.
RunConfig parse_config(const nlohmann::json& doc, const std::string& protocol_hint = "");

/// Reads a config document, or a result summary (its embedded "config").
nlohmann::json load_config_document(const std::string& path);

/// Fully resolved document; output.dir is left out because it only says
/// where results go.
nlohmann::json to_json(const RunConfig& config);

nlohmann::json to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_from_json(const nlohmann::json& doc);

}  // namespace certgate

#endif  // CERTGATE_CONFIG_HPP
