// Copyright 2026 The qrep Authors
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

#ifndef QREP_CLI_H
#define QREP_CLI_H

#include <ostream>
#include <string>
#include <vector>

namespace qrep {

constexpr int EXIT_OK = 0;
constexpr int EXIT_INVALID_INPUT = 1;
constexpr int EXIT_RESOURCE_LIMIT = 2;

/// Entry point of the command-line tool. `args` excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace qrep

#endif
