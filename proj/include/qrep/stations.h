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

#ifndef QREP_STATIONS_H
#define QREP_STATIONS_H

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "qrep/ensembles.h"
#include "qrep/linear_optics.h"

namespace qrep {

/// Coarse-grained effective pair: weights of the one-excitation-per-site sector (p2), the
/// single-excitation sector (p1), vacuum (p0) and everything else (ph), plus the fidelity of the
/// p2 sector with phi+.
struct PairState {
    double p2 = 0;
    double p1 = 0;
    double p0 = 0;
    double ph = 0;
    double F = 0;
    int span = 1;

    double sum() const {
        return p2 + p1 + p0 + ph;
    }
};

struct SectorReport {
    PairState pair;
    /// Diagonal weights of the single-excitation sector, ordered (u_left, d_left, u_right, d_right),
    /// as fractions of the whole state.
    std::array<double, 4> single_weights{};
    uint8_t left_site = 0;
    uint8_t right_site = 0;
};

/// Local correction at one site: optional u<->d exchange followed by phases on S_u^dag, S_d^dag.
struct SiteCorrection {
    bool swap_ud = false;
    cd phase_u = 1;
    cd phase_d = 1;
};

struct PatternCorrection {
    SiteCorrection left;
    SiteCorrection right;
};

/// The two detectors (0-based) of an accepted coincidence, if `pattern` is one. Accepted patterns
/// are D1&D4, D1&D3, D2&D3, D2&D4 with exactly two detectors firing once.
std::optional<std::pair<int, int>> accepted_coincidence(const std::vector<int> &pattern);

/// Local corrections mapping each accepted BSM-I outcome onto the canonical entangled-generation
/// state, and each BSM-II outcome onto phi+. Keyed by the detector pair.
const std::map<std::pair<int, int>, PatternCorrection> &bsm1_corrections();
const std::map<std::pair<int, int>, PatternCorrection> &bsm2_corrections();

/// Applies `c` to the atomic modes of `left` and `right`.
BranchEnsemble apply_correction(const BranchEnsemble &state, const PatternCorrection &c, uint8_t left, uint8_t right);

struct Bsm1Config {
    /// End-to-end channel transmittance e^{-L0/L_att}; each arm gets its square root.
    double link_transmittance = 1;
    DetectorModel detector = DetectorModel::ideal();
    bool apply_corrections = true;
};

/// Entanglement generation: Stokes photons from two memory-qubit write states meet at the
/// midpoint, pass PBS+- then PBS, and are detected. Accepted outcomes hold the conditional state
/// of the four atomic modes, corrected to the canonical form.
std::vector<DetectionOutcome> bsm1(const PureState &site_a, const PureState &site_b, const Bsm1Config &config);

struct Bsm2Config {
    uint8_t site_b = 1;
    uint8_t site_c = 2;
    RetrievalParams retrieval;
    DetectorModel detector = DetectorModel::ideal();
    /// Transmittance between each inner site and the midpoint.
    double arm_transmittance = 1;
    bool apply_corrections = true;
};

/// Entanglement swapping: retrieves the memory qubits at the inner sites of `left` (A,B) and
/// `right` (C,D), sends the anti-Stokes photons through PBS then PBS+-, and detects. Accepted
/// outcomes hold the corrected conditional state of the outer sites.
std::vector<DetectionOutcome> bsm2(const BranchEnsemble &left, const BranchEnsemble &right, const Bsm2Config &config);

/// Probability-weighted mixture of all accepted outcomes, with the summed probability.
std::pair<BranchEnsemble, double> accepted_mixture(const std::vector<DetectionOutcome> &outcomes);

PairState classify(const BranchEnsemble &state);
SectorReport sector_report(const BranchEnsemble &state);

/// Sites of the two memory qubits an atomic-only ensemble lives on, ascending.
std::pair<uint8_t, uint8_t> pair_sites(const BranchEnsemble &state);

PureState phi_plus(uint8_t s1, uint8_t s2, int n_max = 4, uint8_t slot = 0);
PureState psi_plus(uint8_t s1, uint8_t s2, int n_max = 4, uint8_t slot = 0);
/// The canonical conditional state of entanglement generation, normalized:
/// (uA uB + dA dB)/2 + (uA^2 + uB^2 - dA^2 - dB^2)/4 acting on vacuum.
PureState generation_state(uint8_t s1, uint8_t s2, int n_max = 4);
/// F |phi+><phi+| + (1-F) |psi+><psi+|.
BranchEnsemble dephased_pair(double F, uint8_t s1, uint8_t s2, int n_max = 4, uint8_t slot = 0);
/// Ensemble with the sector weights of `pair`: dephased entangled part, the four single
/// excitations in equal measure, and vacuum. The ph sector has no microscopic content here and is
/// dropped before renormalizing.
BranchEnsemble effective_pair(const PairState &pair, uint8_t s1, uint8_t s2, int n_max = 4, uint8_t slot = 0);

struct PurifyConfig {
    RetrievalParams retrieval;
    DetectorModel detector = DetectorModel::ideal();
};

struct PurifyResult {
    std::vector<DetectionOutcome> outcomes;
    double success_probability = 0;
    BranchEnsemble state;
    PairState pair;
};

/// Linear-optics purification of two pairs shared by the same two sites. Each site's two
/// retrieved photons meet on a PBS; the b ports are measured in the +/- basis and the a ports are
/// kept when each site registers exactly one click with matching signs, then written back into
/// the slot-0 memories.
PurifyResult purify(const BranchEnsemble &pair1, const BranchEnsemble &pair2, const PurifyConfig &config);

/// F^2 / (F^2 + (1-F)^2).
double purified_fidelity(double F);

}  // namespace qrep

#endif
