// Copyright 2026 The SQPC Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SQPC_CLI_H_
#define SQPC_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace sqpc {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitDetectionAbort = 2;
inline constexpr int kExitInsufficientKey = 3;
inline constexpr int kExitUsage = 64;

// Entry point behind the sqpc command. `args` excludes the program name.
// Documents go to `out` unless --output names a file; diagnostics go to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sqpc

#endif  // SQPC_CLI_H_
