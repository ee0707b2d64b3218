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

#ifndef QREP_LINEAR_OPTICS_H
#define QREP_LINEAR_OPTICS_H

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qrep {

using cd = std::complex<double>;

/// Raised when a computation would exceed a fixed resource bound (basis size, truncation).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Ensemble : uint8_t { u, d, none };
enum class Field : uint8_t { atomic, stokes, anti_stokes, env };
enum class Polarization : uint8_t { H, V, none };

/// Names one bosonic mode.
///
/// Sites are small integers (0 = A, 1 = B, ...). `slot` distinguishes two memory qubits held at
/// the same site (used by purification). Atomic modes carry no polarization; photonic modes carry
/// no ensemble.
struct ModeLabel {
    uint8_t site = 0;
    Ensemble ensemble = Ensemble::none;
    Field field = Field::atomic;
    Polarization polarization = Polarization::none;
    uint8_t slot = 0;

    static ModeLabel atomic(uint8_t site, Ensemble ensemble, uint8_t slot = 0);
    static ModeLabel photon(uint8_t site, Field field, Polarization polarization, uint8_t slot = 0);

    bool is_atomic() const {
        return field == Field::atomic;
    }
    std::string str() const;

    auto operator<=>(const ModeLabel &) const = default;
};

std::string site_name(uint8_t site);

/// Occupation numbers, one entry per mode, in the owning state's mode order.
using Occupation = std::vector<uint8_t>;

/// Sparse pure state over a sorted list of modes, truncated to at most `n_max` quanta in total.
class PureState {
   public:
    PureState() = default;
    PureState(std::vector<ModeLabel> modes, int n_max);

    const std::vector<ModeLabel> &modes() const {
        return modes_;
    }
    const std::map<Occupation, cd> &amplitudes() const {
        return amps_;
    }
    int n_max() const {
        return n_max_;
    }
    double norm2() const {
        return norm2_;
    }
    bool is_zero() const {
        return amps_.empty();
    }
    size_t num_modes() const {
        return modes_.size();
    }

    /// Position of `mode` in modes(), or throws std::invalid_argument.
    size_t index_of(const ModeLabel &mode) const;
    bool has_mode(const ModeLabel &mode) const;

    cd amplitude(const Occupation &occ) const;
    /// Adds `amp` to the amplitude of `occ`. Entries above n_max are dropped.
    void add(const Occupation &occ, cd amp);

    PureState normalized() const;
    PureState scaled(cd factor) const;
    /// Removes entries with |amplitude| below `tol` and refreshes the cached norm.
    void prune(double tol = 1e-14);
    /// Drops every component with more than `n_max` quanta and lowers the bound.
    PureState truncated(int n_max) const;

    /// Total quanta carried by `occ`.
    static int total(const Occupation &occ);

    std::string str() const;

   private:
    void refresh_norm();

    std::vector<ModeLabel> modes_;
    std::map<Occupation, cd> amps_;
    int n_max_ = 0;
    double norm2_ = 0;
};

/// Weighted mixture of unit-norm pure states sharing one mode list.
struct Branch {
    double weight;
    PureState state;
};

class BranchEnsemble {
   public:
    BranchEnsemble() = default;
    explicit BranchEnsemble(const PureState &pure);

    const std::vector<Branch> &branches() const {
        return branches_;
    }
    bool empty() const {
        return branches_.empty();
    }
    const std::vector<ModeLabel> &modes() const;
    int n_max() const;
    double total_weight() const;

    /// Appends a branch; the state is normalized and the weight scaled by its norm squared.
    void add(double weight, const PureState &state);

    /// Weights rescaled to sum to one.
    BranchEnsemble normalized() const;

    /// Rewrites the mixture as the eigen-decomposition of its density matrix, dropping
    /// eigenvalues below `rel_tol` times the trace. Leaves the represented state unchanged.
    BranchEnsemble compacted(double rel_tol = 1e-15) const;

    /// Dense density matrix over the union of all branch supports.
    Eigen::MatrixXcd density_matrix(std::vector<Occupation> &basis) const;

   private:
    std::vector<Branch> branches_;
};

/// Unitary mode-mixing matrix. Column i holds the output expansion of input mode i:
/// a_i^dag -> sum_j matrix(j, i) a_j^dag.
struct OpticalElement {
    std::string name;
    Eigen::MatrixXcd matrix;

    OpticalElement(std::string name, Eigen::MatrixXcd matrix);
    size_t dim() const {
        return (size_t)matrix.cols();
    }
    /// `this` followed by `next`.
    OpticalElement then(const OpticalElement &next) const;
};

namespace elements {
/// (1/sqrt2)[[1,1],[1,-1]].
OpticalElement beam_splitter_50_50();
/// Beam splitter with power transmittance t: a_0 -> sqrt(t) a_0 + sqrt(1-t) a_1.
OpticalElement beam_splitter(double transmittance);
/// Polarizing beam splitter on [in1_H, in1_V, in2_H, in2_V]. H is transmitted, V reflected with
/// phase +1, so output port 1 (labels of input 1) carries in1_H and in2_V.
OpticalElement pbs();
/// PBS conjugated by the H/V <-> +/- rotation on each port: transmits +, reflects -.
OpticalElement pbs_pm();
/// H/V -> +/- rotation (1/sqrt2)[[1,1],[1,-1]] on one spatial mode; output slot H reads "+".
OpticalElement pm_analyzer();
/// Block-diagonal pm_analyzer() on two spatial modes.
OpticalElement pm_analyzer_pair();
/// Exchanges two modes.
OpticalElement swap();
/// Identity on `dim` modes.
OpticalElement identity(size_t dim);
}  // namespace elements

struct DetectorModel {
    double efficiency = 1.0;
    bool number_resolving = true;

    static DetectorModel ideal() {
        return {1.0, true};
    }
    static DetectorModel threshold(double efficiency) {
        return {efficiency, false};
    }
};

/// One measurement record. `pattern` holds one entry per detector: registered photon count for
/// number-resolving detectors, 0/1 clicks for threshold detectors.
struct DetectionOutcome {
    std::vector<int> pattern;
    double probability = 0;
    BranchEnsemble post_state;
    bool accepted = false;

    std::string pattern_str() const;
};

PureState vacuum(std::span<const ModeLabel> modes, int n_max = 4);
PureState tensor(const PureState &a, const PureState &b);
BranchEnsemble tensor(const BranchEnsemble &a, const BranchEnsemble &b);
cd inner(const PureState &bra, const PureState &ket);

PureState apply_creation(const PureState &state, const ModeLabel &mode);
PureState apply_element(const PureState &state, const OpticalElement &elem, std::span<const ModeLabel> modes);
BranchEnsemble apply_element(const BranchEnsemble &state, const OpticalElement &elem, std::span<const ModeLabel> modes);

/// Appends fresh vacuum modes.
PureState with_modes(const PureState &state, std::span<const ModeLabel> modes);
BranchEnsemble with_modes(const BranchEnsemble &state, std::span<const ModeLabel> modes);

/// Renames modes; labels absent from `mapping` keep their name.
PureState relabel(const PureState &state, const std::map<ModeLabel, ModeLabel> &mapping);
BranchEnsemble relabel(const BranchEnsemble &state, const std::map<ModeLabel, ModeLabel> &mapping);

/// Partial trace over `modes` (branches on their occupation and removes them).
BranchEnsemble trace_out(const BranchEnsemble &state, std::span<const ModeLabel> modes);

/// Truncates every branch to `n_max` quanta; weights of surviving components are kept, so the
/// total weight drops by the discarded part.
BranchEnsemble truncated(const BranchEnsemble &state, int n_max);

/// Couples `mode` to a fresh environment mode through a beam splitter of transmittance `t` and
/// branches on the environment occupation.
BranchEnsemble loss_channel(const BranchEnsemble &state, const ModeLabel &mode, double transmittance);

/// Photodetection on `detector_modes`. Detected modes are left in vacuum. Outcomes are ordered by
/// pattern.
std::vector<DetectionOutcome> measure(
    const BranchEnsemble &state, std::span<const ModeLabel> detector_modes, const DetectorModel &model);

/// Weighted overlap sum_b w_b |<target|b>|^2 / sum_b w_b.
double fidelity(const BranchEnsemble &state, const PureState &target);

}  // namespace qrep

#endif
