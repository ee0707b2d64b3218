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

#include "qrep/ensembles.h"

#include <array>
#include <cmath>

using namespace qrep;

void EnsembleParams::validate() const {
    if (!(chi >= 0) || !std::isfinite(chi)) {
        throw std::invalid_argument("chi must be a non-negative finite number");
    }
    if (truncation_order < 2) {
        throw std::invalid_argument("truncation_order must be at least 2");
    }
}

std::optional<std::string> EnsembleParams::warning() const {
    if (chi > 0.1) {
        return "chi = " + std::to_string(chi) + " is not small; higher-order excitations dominate";
    }
    return std::nullopt;
}

std::vector<double> qrep::write_coefficients(const EnsembleParams &params) {
    params.validate();
    std::vector<double> c{1.0};
    for (int n = 1; n <= params.truncation_order; n++) {
        c.push_back(c.back() * std::sqrt(params.chi) / n);
    }
    return c;
}

PureState qrep::write(const EnsembleParams &params, const ModeLabel &atomic, const ModeLabel &stokes, int n_max) {
    if (!atomic.is_atomic() || stokes.field != Field::stokes) {
        throw std::invalid_argument("write() needs an atomic and a Stokes mode");
    }
    auto coeffs = write_coefficients(params);
    std::array<ModeLabel, 2> modes{atomic, stokes};
    PureState s(std::vector<ModeLabel>(modes.begin(), modes.end()), n_max);
    size_t ia = s.index_of(atomic);
    size_t is = s.index_of(stokes);
    for (int n = 0; n < (int)coeffs.size(); n++) {
        // (S^dag a^dag)^n |0,0> = n! |n,n>.
        double factorial = std::tgamma(n + 1.0);
        Occupation occ(2, 0);
        occ[ia] = (uint8_t)n;
        occ[is] = (uint8_t)n;
        s.add(occ, coeffs[(size_t)n] * factorial);
    }
    return s.normalized();
}

std::vector<ModeLabel> qrep::memory_qubit_modes(uint8_t site, uint8_t slot) {
    return {
        ModeLabel::atomic(site, Ensemble::u, slot),
        ModeLabel::atomic(site, Ensemble::d, slot),
        ModeLabel::photon(site, Field::stokes, Polarization::H, slot),
        ModeLabel::photon(site, Field::stokes, Polarization::V, slot),
    };
}

PureState qrep::write_memory_qubit(const EnsembleParams &params, uint8_t site, int n_max, uint8_t slot) {
    auto m = memory_qubit_modes(site, slot);
    return tensor(write(params, m[0], m[2], n_max), write(params, m[1], m[3], n_max)).normalized();
}

BranchEnsemble qrep::retrieve(
    const BranchEnsemble &state, const ModeLabel &atomic, const ModeLabel &anti_stokes, const RetrievalParams &params) {
    if (!atomic.is_atomic() || anti_stokes.field != Field::anti_stokes) {
        throw std::invalid_argument("retrieve() needs an atomic and an anti-Stokes mode");
    }
    if (!(params.eta_r >= 0 && params.eta_r <= 1)) {
        throw std::invalid_argument("eta_r must lie in [0, 1]");
    }
    std::array<ModeLabel, 1> fresh{anti_stokes};
    std::array<ModeLabel, 2> pair{atomic, anti_stokes};
    auto moved = apply_element(with_modes(state, fresh), elements::swap(), pair);
    return loss_channel(moved, anti_stokes, params.eta_r);
}

BranchEnsemble qrep::retrieve_memory_qubit(
    const BranchEnsemble &state, uint8_t site, const RetrievalParams &params, uint8_t slot) {
    auto u = ModeLabel::atomic(site, Ensemble::u, slot);
    auto d = ModeLabel::atomic(site, Ensemble::d, slot);
    auto out = retrieve(state, u, ModeLabel::photon(site, Field::anti_stokes, Polarization::H, slot), params);
    out = retrieve(out, d, ModeLabel::photon(site, Field::anti_stokes, Polarization::V, slot), params);
    std::array<ModeLabel, 2> emptied{u, d};
    return trace_out(out, emptied);
}
