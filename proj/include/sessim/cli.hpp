// Copyright 2026 sessim developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

namespace sessim {

/// Process exit statuses of the command-line tool.
enum ExitCode : int {
    kExitSuccess = 0,
    /// Some sessions of a batch failed; the others were written.
    kExitPartialFailure = 1,
    /// Unknown subcommand, bad flags or an invalid configuration.
    kExitUsage = 2,
};

/// Entry point of the `sessim` tool. `args` excludes the program name.
///
///   sessim index    --config PATH [--out DIR]
///   sessim poolgen  --config PATH
///   sessim simulate --config PATH [--out DIR] [--seed N] [--parallel N]
///   sessim evaluate --config PATH [--out DIR]
///   sessim report   --config PATH [--out DIR]
[[nodiscard]] auto run_cli(std::vector<std::string> const& args) -> int;

}  // namespace sessim
