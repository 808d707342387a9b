// Copyright 2026 The GaP Authors. All Rights Reserved.
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

#ifndef GAP_TOOLS_COMMANDS_HPP
#define GAP_TOOLS_COMMANDS_HPP

#include <ostream>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace gap::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitOracle = 3,
  kExitIo = 4,
};

// Each command prints one "artifact: <path>" line per file it wrote.
int cmd_gen_corpus(const RunConfig& c, std::ostream& out);
int cmd_optimize(const RunConfig& c, std::ostream& out);
int cmd_eval(const RunConfig& c, std::ostream& out);
int cmd_ablate(const RunConfig& c, std::ostream& out);
int cmd_sweep(const RunConfig& c, std::ostream& out);
int cmd_curve(const RunConfig& c, std::ostream& out);
int cmd_export_png(const RunConfig& c, std::ostream& out);

// Full command line (args[0] is the program name). Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gap::cli

#endif  // GAP_TOOLS_COMMANDS_HPP
