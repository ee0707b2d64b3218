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

#ifndef QREP_CONFIG_H
#define QREP_CONFIG_H

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "qrep/repeater.h"

namespace qrep {

/// Flat `key = value` settings. Blank lines and lines starting with '#' are ignored.
using ConfigMap = std::map<std::string, std::string>;

struct RunConfig {
    RepeaterParams params;
    uint64_t trials = 1000;
};

/// Every recognized key, in documentation order. Command-line flags use the same names with
/// '-' in place of '_'.
const std::vector<std::string> &config_keys();

ConfigMap parse_config(std::istream &in, const std::string &source = "<config>");
ConfigMap load_config(const std::string &path);

/// Applies `map` on top of `run`. Unknown keys and malformed values throw std::invalid_argument.
/// Setting one of L_att_km / loss_db_per_km clears the other.
void apply_config(RunConfig &run, const ConfigMap &map);

/// The long-distance scenario: L0 = 10 km, six connection levels, 0.1 dB/km, eta = 0.99,
/// eta_r = 0.98, F0 = 0.88, two purification rounds on the final pair.
RunConfig published_preset();

/// Round-trippable dump of `run` in config syntax.
std::string describe(const RunConfig &run);

}  // namespace qrep

#endif
