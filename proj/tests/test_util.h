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

#ifndef QREP_TEST_UTIL_H
#define QREP_TEST_UTIL_H

#include <algorithm>
#include <random>
#include <vector>

#include "qrep/linear_optics.h"

namespace qrep::testing {

inline ModeLabel H(uint8_t site, uint8_t slot = 0) {
    return ModeLabel::photon(site, Field::stokes, Polarization::H, slot);
}

inline ModeLabel V(uint8_t site, uint8_t slot = 0) {
    return ModeLabel::photon(site, Field::stokes, Polarization::V, slot);
}

/// Distinct photonic modes H0, V0, H1, V1, ...
inline std::vector<ModeLabel> photon_modes(size_t n) {
    std::vector<ModeLabel> m;
    for (size_t k = 0; k < n; k++) {
        m.push_back(k % 2 == 0 ? H((uint8_t)(k / 2)) : V((uint8_t)(k / 2)));
    }
    std::sort(m.begin(), m.end());
    return m;
}

/// Fock state built by creation operators, e.g. fock(modes, {1, 0, 2}).
inline PureState fock(const std::vector<ModeLabel> &modes, const std::vector<int> &counts, int n_max) {
    PureState s = vacuum(modes, n_max);
    double norm = 1;
    for (size_t k = 0; k < counts.size(); k++) {
        for (int c = 0; c < counts[k]; c++) {
            s = apply_creation(s, modes[k]);
            norm *= c + 1;
        }
    }
    return s.scaled(1 / std::sqrt(norm));
}

/// Normalized state with Gaussian amplitudes on every occupation tuple of at most `n_max` quanta.
inline PureState random_state(const std::vector<ModeLabel> &modes, int n_max, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    PureState s(modes, n_max);
    Occupation occ(modes.size(), 0);
    while (true) {
        s.add(occ, cd(g(rng), g(rng)));
        size_t k = 0;
        while (k < occ.size()) {
            occ[k]++;
            if (PureState::total(occ) <= n_max) {
                break;
            }
            occ[k] = 0;
            k++;
        }
        if (k == occ.size()) {
            break;
        }
    }
    return s.normalized();
}

}  // namespace qrep::testing

#endif
