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

#include "qrep/config.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace qrep;

namespace {

std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) {
        return "";
    }
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string &key, const std::string &v) {
    try {
        size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) {
            throw std::invalid_argument(v);
        }
        return x;
    } catch (const std::exception &) {
        throw std::invalid_argument("bad number for " + key + ": '" + v + "'");
    }
}

long long to_int(const std::string &key, const std::string &v) {
    try {
        size_t used = 0;
        long long x = std::stoll(v, &used);
        if (used != v.size()) {
            throw std::invalid_argument(v);
        }
        return x;
    } catch (const std::exception &) {
        throw std::invalid_argument("bad integer for " + key + ": '" + v + "'");
    }
}

uint64_t to_u64(const std::string &key, const std::string &v) {
    try {
        size_t used = 0;
        if (!v.empty() && v[0] == '-') {
            throw std::invalid_argument(v);
        }
        unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) {
            throw std::invalid_argument(v);
        }
        return x;
    } catch (const std::exception &) {
        throw std::invalid_argument("bad unsigned integer for " + key + ": '" + v + "'");
    }
}

bool to_bool(const std::string &key, const std::string &v) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw std::invalid_argument("bad boolean for " + key + ": '" + v + "'");
}

std::vector<int> to_levels(const std::string &key, const std::string &v) {
    std::vector<int> out;
    if (trim(v).empty() || trim(v) == "none") {
        return out;
    }
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back((int)to_int(key, trim(item)));
    }
    return out;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

const std::vector<std::string> &qrep::config_keys() {
    static const std::vector<std::string> keys{
        "chi",
        "eta",
        "eta_r",
        "L0_km",
        "L_att_km",
        "loss_db_per_km",
        "c_km_per_s",
        "j_max",
        "purification_rounds",
        "F0",
        "number_resolving",
        "n_max",
        "truncation_order",
        "seed",
        "swap_model",
        "timing_model",
        "swap_arm_fraction",
        "trials",
    };
    return keys;
}

ConfigMap qrep::parse_config(std::istream &in, const std::string &source) {
    ConfigMap map;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        n++;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(source + ":" + std::to_string(n) + ": expected 'key = value'");
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument(source + ":" + std::to_string(n) + ": empty key");
        }
        map[key] = value;
    }
    return map;
}

ConfigMap qrep::load_config(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw std::invalid_argument("cannot open config file '" + path + "'");
    }
    return parse_config(f, path);
}

void qrep::apply_config(RunConfig &run, const ConfigMap &map) {
    auto &p = run.params;
    for (const auto &[key, v] : map) {
        if (key == "chi") {
            p.chi = to_double(key, v);
        } else if (key == "eta") {
            p.eta = to_double(key, v);
        } else if (key == "eta_r") {
            p.eta_r = to_double(key, v);
        } else if (key == "L0_km") {
            p.L0_km = to_double(key, v);
        } else if (key == "L_att_km") {
            p.L_att_km = to_double(key, v);
            p.loss_db_per_km.reset();
        } else if (key == "loss_db_per_km") {
            p.loss_db_per_km = to_double(key, v);
            p.L_att_km.reset();
        } else if (key == "c_km_per_s") {
            p.c_km_per_s = to_double(key, v);
        } else if (key == "j_max") {
            p.j_max = (int)to_int(key, v);
        } else if (key == "purification_rounds") {
            p.purification_rounds = to_levels(key, v);
        } else if (key == "F0") {
            p.F0 = to_double(key, v);
        } else if (key == "number_resolving") {
            p.number_resolving = to_bool(key, v);
        } else if (key == "n_max") {
            p.n_max = (int)to_int(key, v);
        } else if (key == "truncation_order") {
            p.truncation_order = (int)to_int(key, v);
        } else if (key == "seed") {
            p.seed = to_u64(key, v);
        } else if (key == "swap_model") {
            p.swap_model = parse_swap_model(v);
        } else if (key == "timing_model") {
            p.timing_model = parse_timing_model(v);
        } else if (key == "swap_arm_fraction") {
            p.swap_arm_fraction = to_double(key, v);
        } else if (key == "trials") {
            run.trials = to_u64(key, v);
            if (run.trials == 0) {
                throw std::invalid_argument("trials must be at least 1");
            }
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    p.validate();
}

RunConfig qrep::published_preset() {
    RunConfig run;
    auto &p = run.params;
    p.chi = 0;
    p.eta = 0.99;
    p.eta_r = 0.98;
    p.L0_km = 10;
    p.loss_db_per_km = 0.1;
    p.L_att_km.reset();
    p.c_km_per_s = 3e5;
    p.j_max = 6;
    p.purification_rounds = {6, 6};
    p.F0 = 0.88;
    p.number_resolving = false;
    p.swap_model = SwapModel::approx;
    p.timing_model = TimingModel::independent;
    run.trials = 1000;
    return run;
}

std::string qrep::describe(const RunConfig &run) {
    const auto &p = run.params;
    std::ostringstream o;
    std::string levels;
    for (size_t i = 0; i < p.purification_rounds.size(); i++) {
        levels += (i ? "," : "") + std::to_string(p.purification_rounds[i]);
    }
    o << "chi = " << fmt(p.chi) << "\n";
    o << "eta = " << fmt(p.eta) << "\n";
    o << "eta_r = " << fmt(p.eta_r) << "\n";
    o << "L0_km = " << fmt(p.L0_km) << "\n";
    if (p.L_att_km) {
        o << "L_att_km = " << fmt(*p.L_att_km) << "\n";
    }
    if (p.loss_db_per_km) {
        o << "loss_db_per_km = " << fmt(*p.loss_db_per_km) << "\n";
    }
    o << "c_km_per_s = " << fmt(p.c_km_per_s) << "\n";
    o << "j_max = " << p.j_max << "\n";
    o << "purification_rounds = " << (levels.empty() ? "none" : levels) << "\n";
    o << "F0 = " << fmt(p.F0) << "\n";
    o << "number_resolving = " << (p.number_resolving ? "true" : "false") << "\n";
    o << "n_max = " << p.n_max << "\n";
    o << "truncation_order = " << p.truncation_order << "\n";
    o << "seed = " << p.seed << "\n";
    o << "swap_model = " << to_string(p.swap_model) << "\n";
    o << "timing_model = " << to_string(p.timing_model) << "\n";
    o << "swap_arm_fraction = " << fmt(p.swap_arm_fraction) << "\n";
    o << "trials = " << run.trials << "\n";
    return o.str();
}
