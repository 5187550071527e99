// Copyright 2026 The Authors.
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

#ifndef DYNSENSE_TOOLS_CLI_H_
#define DYNSENSE_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace dynsense::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 1;
inline constexpr int kExitRuntimeFailure = 2;

inline constexpr const char* kToolVersion = "0.1.0";

// Runs one subcommand. Data goes to files under --out (default "."),
// diagnostics to `err`. Nothing is written unless the run succeeds.
int cli_main(const std::vector<std::string>& args, std::ostream& err);

int cli_main(int argc, const char* const* argv, std::ostream& err);

// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace dynsense::cli

#endif  // DYNSENSE_TOOLS_CLI_H_
