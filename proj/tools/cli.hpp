// Copyright 2026 The cvqkd Authors
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

// Command-line front end: `bounds`, `verify <suite>` and `simulate`.
//
// Exit codes: 0 success or pass, 1 usage or I/O error, 2 infeasible
// parameters or a failed verification.

#ifndef CVQKD_TOOLS_CLI_HPP_
#define CVQKD_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace cvqkd::cli {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailed = 2;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cvqkd::cli

#endif  // CVQKD_TOOLS_CLI_HPP_
