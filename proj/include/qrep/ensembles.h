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

#ifndef QREP_ENSEMBLES_H
#define QREP_ENSEMBLES_H

#include <optional>
#include <string>
#include <vector>

#include "qrep/linear_optics.h"

namespace qrep {

struct EnsembleParams {
    /// Excitation probability per write pulse.
    double chi = 0.01;
    /// Highest number of Stokes/excitation pairs kept from the exponential series.
    int truncation_order = 2;

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
    /// Non-fatal advisory (chi above 0.1), if any.
    std::optional<std::string> warning() const;
};

struct RetrievalParams {
    double eta_r = 1.0;
};

/// Coefficients c_n of (S^dag a^dag)^n in the unnormalized write state, c_n = chi^{n/2} / n!.
std::vector<double> write_coefficients(const EnsembleParams &params);

/// Spontaneous Raman write on one ensemble: the normalized series sum_n c_n (S^dag a^dag)^n |0>.
/// Orders that do not fit in `n_max` quanta are dropped.
PureState write(const EnsembleParams &params, const ModeLabel &atomic, const ModeLabel &stokes, int n_max = 4);

/// Two ensembles (u, d) at one site written together. Ensemble u emits H Stokes photons and
/// ensemble d emits V, so the first-order term is sqrt(chi)(S_u a_H + S_d a_V)|vac>.
PureState write_memory_qubit(const EnsembleParams &params, uint8_t site, int n_max = 4, uint8_t slot = 0);

/// Atomic (u, d) and Stokes (H, V) labels used by write_memory_qubit.
std::vector<ModeLabel> memory_qubit_modes(uint8_t site, uint8_t slot = 0);

/// Read-out: moves every excitation of `atomic` into the fresh mode `anti_stokes`, then applies a
/// loss channel of transmittance eta_r. The atomic mode stays in the state, in vacuum.
BranchEnsemble retrieve(
    const BranchEnsemble &state, const ModeLabel &atomic, const ModeLabel &anti_stokes, const RetrievalParams &params);

/// Retrieves the u/d pair of a memory qubit into H/V anti-Stokes photons and removes the
/// emptied atomic modes.
BranchEnsemble retrieve_memory_qubit(
    const BranchEnsemble &state, uint8_t site, const RetrievalParams &params, uint8_t slot = 0);

}  // namespace qrep

#endif
