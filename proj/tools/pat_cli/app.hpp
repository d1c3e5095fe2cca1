// Copyright 2026 The PatTree Authors.
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

// Command-line front end. run() parses argv, executes one subcommand and
// returns the process exit code.

#ifndef PAT_CLI_APP_HPP_
#define PAT_CLI_APP_HPP_

#include <ostream>

namespace pat::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kNumericalFailure = 3,
  kVerificationFailure = 4,
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pat::cli

#endif  // PAT_CLI_APP_HPP_
