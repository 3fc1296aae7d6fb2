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

#ifndef CERTGATE_CLI_HPP
#define CERTGATE_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace certgate {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

/// Default output directory when neither --out nor output.dir is given.
/// CERTGATE_OUT_DIR overrides it.
std::string default_output_dir();

/// Entry point of the `certgate` tool. `args` excludes the program name.
///
///   certgate single|cz|addressing [--config FILE] [overrides]
///   certgate sweep --config FILE [--parameter NAME --values V,...] [overrides]
///
/// Overrides: --seed, --trials, --mode branch|mc, --out DIR, --workers N,
/// --quiet. Returns kExitOk, kExitRuntime or kExitConfig.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace certgate

#endif  // CERTGATE_CLI_HPP
