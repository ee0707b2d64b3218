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

// Writes the reference station outputs used by the tests, computed with the dense oracle only.
//
// Usage: make_golden OUTPUT_DIR

#include <cstdio>
#include <fstream>
#include <iostream>

#include "qrep/oracle.h"

using namespace qrep;

namespace {

void write_block(const std::string &path, const std::string &header, const oracle::DenseStation &st) {
    std::ofstream f(path);
    if (!f) {
        throw std::runtime_error("cannot write " + path);
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15e", st.accepted_probability);
    f << "# " << header << "\n# accepted probability " << buf << "\n";
    oracle::write_golden(f, st.basis, oracle::dominant_state(st.rho));
}

}  // namespace

int main(int argc, char **argv) {
    if (argc != 2) {
        std::cerr << "usage: make_golden OUTPUT_DIR\n";
        return 1;
    }
    std::string dir = argv[1];
    EnsembleParams ep;
    ep.chi = 0.01;
    auto gen = oracle::bsm1(ep, 1.0, DetectorModel::ideal(), 4);
    write_block(dir + "/bsm1_ideal.txt", "generation station, chi = 0.01, ideal detectors, n_max = 4", gen);

    std::vector<ModeLabel> right_modes;
    for (uint8_t site : {2, 3}) {
        right_modes.push_back(ModeLabel::atomic(site, Ensemble::u));
        right_modes.push_back(ModeLabel::atomic(site, Ensemble::d));
    }
    // Relabeling sites 0,1 -> 2,3 keeps the relative mode order, so the matrix carries over.
    oracle::Basis right(right_modes, gen.basis.n_max());
    oracle::SwapSettings s;
    s.n_max = 4;
    auto swap = oracle::bsm2(gen.basis, gen.rho, right, gen.rho, s);
    write_block(dir + "/bsm2_ideal.txt", "swapping station on two generation outputs, ideal, n_max = 4", swap);
    return 0;
}
