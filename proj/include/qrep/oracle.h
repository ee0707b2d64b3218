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

#ifndef QREP_ORACLE_H
#define QREP_ORACLE_H

#include <Eigen/Dense>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "qrep/ensembles.h"
#include "qrep/linear_optics.h"
#include "qrep/stations.h"

/// Brute-force reference mechanics. Everything here builds explicit matrices over the full
/// truncated Fock basis; it is slow by design and shares no code paths with the sparse engine
/// beyond the element matrices and the correction tables, which are conventions.
namespace qrep::oracle {

constexpr size_t MAX_MODES = 8;
constexpr size_t MAX_DIM = 5000;

/// All occupation tuples over `modes` (sorted) with at most `n_max` quanta, in lexicographic
/// order of the tuples.
class Basis {
   public:
    Basis() = default;
    Basis(std::vector<ModeLabel> modes, int n_max);

    size_t dim() const {
        return states_.size();
    }
    const std::vector<ModeLabel> &modes() const {
        return modes_;
    }
    int n_max() const {
        return n_max_;
    }
    const Occupation &state(size_t i) const {
        return states_[i];
    }
    /// Index of `occ`, or dim() if it is outside the basis.
    size_t find(const Occupation &occ) const;
    size_t mode_index(const ModeLabel &m) const;
    /// "|uA=1,dB=2>" style label, using mode names.
    std::string label(size_t i) const;

   private:
    std::vector<ModeLabel> modes_;
    int n_max_ = 0;
    std::vector<Occupation> states_;
    std::map<Occupation, size_t> index_;
};

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

cd permanent(const Matrix &m);

Vector dense_state(const PureState &state, const Basis &basis);
PureState sparse_state(const Vector &v, const Basis &basis);
/// sum_b w_b |b><b|.
Matrix density(const BranchEnsemble &state, const Basis &basis);

/// Fock-space operator of a linear-optical element acting on `modes`, identity elsewhere:
/// <m|U|n> = Per(M[m, n]) / sqrt(prod m! prod n!).
Matrix element_operator(const Basis &basis, const OpticalElement &elem, std::span<const ModeLabel> modes);

/// Kraus operators K_k|n> = sqrt(C(n,k) t^{n-k} (1-t)^k) |n-k> of a loss channel on `mode`.
std::vector<Matrix> loss_kraus(const Basis &basis, const ModeLabel &mode, double transmittance);
Matrix apply_kraus(const std::vector<Matrix> &ops, const Matrix &rho);

struct DenseOutcome {
    std::vector<int> pattern;
    double probability = 0;
    /// Unnormalized conditional state with the detected modes in vacuum.
    Matrix rho;
};

/// Destructive photodetection as an instrument with Kraus operators sqrt(P(pattern|n)) |0><n| on
/// the detected modes. Zero-probability patterns are omitted.
std::vector<DenseOutcome> dense_measure(
    const Basis &basis, const Matrix &rho, std::span<const ModeLabel> detectors, const DetectorModel &model);

/// Traces out every mode of `from` that `to` does not carry.
Matrix partial_trace(const Basis &from, const Matrix &rho, const Basis &to);
/// Product state restricted to `joint` (components above its bound are projected out).
Matrix tensor(const Basis &a, const Matrix &rho_a, const Basis &b, const Matrix &rho_b, const Basis &joint);

/// Sector weights of a state over the u/d modes of two sites, normalized by the trace.
PairState classify(const Basis &basis, const Matrix &rho);

struct DenseStation {
    std::vector<DenseOutcome> outcomes;
    double accepted_probability = 0;
    /// Corrected accepted mixture, normalized, over the four outer atomic modes.
    Basis basis;
    Matrix rho;
    PairState pair;
};

/// Entanglement generation between sites 0 and 1, built directly from the exponential series.
DenseStation bsm1(const EnsembleParams &params, double link_transmittance, const DetectorModel &detector, int n_max = 4);

struct SwapSettings {
    double eta_r = 1;
    double arm_transmittance = 1;
    DetectorModel detector = DetectorModel::ideal();
    int n_max = 4;
};

/// Entanglement swapping of a pair on sites (0,1) with a pair on sites (2,3). Retrieval is a
/// loss on the inner atomic modes, which then stand in for their H/V photons.
DenseStation bsm2(const Basis &left_basis, const Matrix &left, const Basis &right_basis, const Matrix &right,
                  const SwapSettings &settings);

/// Largest-eigenvalue eigenvector with its first significant amplitude made real and positive.
Vector dominant_state(const Matrix &rho);

/// One "label real imag" line per basis state with |amplitude| above 1e-15.
void write_golden(std::ostream &out, const Basis &basis, const Vector &v);

}  // namespace qrep::oracle

#endif
