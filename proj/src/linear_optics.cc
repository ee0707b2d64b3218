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

#include "qrep/linear_optics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

using namespace qrep;

namespace {

constexpr uint8_t ENV_SLOT = 255;

void require_distinct(std::span<const ModeLabel> modes) {
    std::set<ModeLabel> seen;
    for (const auto &m : modes) {
        if (!seen.insert(m).second) {
            throw std::invalid_argument("duplicate mode label " + m.str());
        }
    }
}

double binomial(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; i++) {
        r = r * (n - k + i) / i;
    }
    return r;
}

}  // namespace

ModeLabel ModeLabel::atomic(uint8_t site, Ensemble ensemble, uint8_t slot) {
    if (ensemble == Ensemble::none) {
        throw std::invalid_argument("atomic modes need an ensemble (u or d)");
    }
    return ModeLabel{site, ensemble, Field::atomic, Polarization::none, slot};
}

ModeLabel ModeLabel::photon(uint8_t site, Field field, Polarization polarization, uint8_t slot) {
    if (field == Field::atomic) {
        throw std::invalid_argument("photon() called with the atomic field");
    }
    return ModeLabel{site, Ensemble::none, field, polarization, slot};
}

std::string qrep::site_name(uint8_t site) {
    if (site < 26) {
        return std::string(1, (char)('A' + site));
    }
    return "S" + std::to_string(site);
}

std::string ModeLabel::str() const {
    std::string out;
    switch (field) {
        case Field::atomic:
            out = (ensemble == Ensemble::u ? "u" : "d") + site_name(site);
            break;
        case Field::stokes:
            out = site_name(site) + "s";
            break;
        case Field::anti_stokes:
            out = site_name(site) + "as";
            break;
        case Field::env:
            out = "env" + site_name(site);
            break;
    }
    if (field != Field::atomic) {
        if (polarization == Polarization::H) {
            out += "H";
        } else if (polarization == Polarization::V) {
            out += "V";
        }
    }
    if (slot != 0 && slot != ENV_SLOT) {
        out += "#" + std::to_string(slot);
    }
    return out;
}

PureState::PureState(std::vector<ModeLabel> modes, int n_max) : modes_(std::move(modes)), n_max_(n_max) {
    if (n_max < 0) {
        throw std::invalid_argument("n_max must be non-negative");
    }
    require_distinct(modes_);
    for (const auto &m : modes_) {
        if (m.is_atomic() && m.polarization != Polarization::none) {
            throw std::invalid_argument("atomic mode " + m.str() + " carries a polarization");
        }
    }
    std::sort(modes_.begin(), modes_.end());
}

size_t PureState::index_of(const ModeLabel &mode) const {
    auto it = std::lower_bound(modes_.begin(), modes_.end(), mode);
    if (it == modes_.end() || *it != mode) {
        throw std::invalid_argument("mode " + mode.str() + " is not part of the state");
    }
    return (size_t)(it - modes_.begin());
}

bool PureState::has_mode(const ModeLabel &mode) const {
    return std::binary_search(modes_.begin(), modes_.end(), mode);
}

int PureState::total(const Occupation &occ) {
    return std::accumulate(occ.begin(), occ.end(), 0);
}

cd PureState::amplitude(const Occupation &occ) const {
    auto it = amps_.find(occ);
    return it == amps_.end() ? cd{0} : it->second;
}

void PureState::add(const Occupation &occ, cd amp) {
    if (occ.size() != modes_.size()) {
        throw std::invalid_argument("occupation size does not match the mode count");
    }
    if (total(occ) > n_max_ || amp == cd{0}) {
        return;
    }
    auto [it, inserted] = amps_.try_emplace(occ, 0);
    norm2_ -= std::norm(it->second);
    it->second += amp;
    norm2_ += std::norm(it->second);
}

void PureState::refresh_norm() {
    norm2_ = 0;
    for (const auto &[occ, a] : amps_) {
        norm2_ += std::norm(a);
    }
}

void PureState::prune(double tol) {
    std::erase_if(amps_, [&](const auto &kv) {
        return std::abs(kv.second) < tol;
    });
    refresh_norm();
}

PureState PureState::normalized() const {
    if (norm2_ <= 0) {
        throw std::domain_error("cannot normalize the zero state");
    }
    return scaled(1.0 / std::sqrt(norm2_));
}

PureState PureState::scaled(cd factor) const {
    PureState out = *this;
    for (auto &[occ, a] : out.amps_) {
        a *= factor;
    }
    out.refresh_norm();
    return out;
}

PureState PureState::truncated(int n_max) const {
    PureState out(modes_, std::min(n_max, n_max_));
    for (const auto &[occ, a] : amps_) {
        out.add(occ, a);
    }
    out.refresh_norm();
    return out;
}

std::string PureState::str() const {
    std::stringstream ss;
    bool first = true;
    for (const auto &[occ, a] : amps_) {
        if (!first) {
            ss << " + ";
        }
        first = false;
        ss << "(" << a.real() << (a.imag() < 0 ? "" : "+") << a.imag() << "i)|";
        bool any = false;
        for (size_t k = 0; k < occ.size(); k++) {
            if (occ[k]) {
                ss << (any ? "," : "") << modes_[k].str() << "=" << (int)occ[k];
                any = true;
            }
        }
        ss << (any ? "" : "vac") << ">";
    }
    return first ? "0" : ss.str();
}

BranchEnsemble::BranchEnsemble(const PureState &pure) {
    add(1.0, pure);
}

const std::vector<ModeLabel> &BranchEnsemble::modes() const {
    if (branches_.empty()) {
        throw std::logic_error("empty ensemble has no modes");
    }
    return branches_.front().state.modes();
}

int BranchEnsemble::n_max() const {
    if (branches_.empty()) {
        throw std::logic_error("empty ensemble has no truncation");
    }
    return branches_.front().state.n_max();
}

double BranchEnsemble::total_weight() const {
    double t = 0;
    for (const auto &b : branches_) {
        t += b.weight;
    }
    return t;
}

void BranchEnsemble::add(double weight, const PureState &state) {
    if (weight < 0) {
        throw std::invalid_argument("negative branch weight");
    }
    if (!branches_.empty() && state.modes() != modes()) {
        throw std::invalid_argument("branch mode list differs from the ensemble's");
    }
    double n2 = state.norm2();
    if (weight == 0 || n2 == 0) {
        return;
    }
    branches_.push_back({weight * n2, state.normalized()});
}

BranchEnsemble BranchEnsemble::normalized() const {
    double t = total_weight();
    if (t <= 0) {
        throw std::domain_error("cannot normalize an ensemble of zero weight");
    }
    BranchEnsemble out = *this;
    for (auto &b : out.branches_) {
        b.weight /= t;
    }
    return out;
}

Eigen::MatrixXcd BranchEnsemble::density_matrix(std::vector<Occupation> &basis) const {
    std::map<Occupation, size_t> index;
    for (const auto &b : branches_) {
        for (const auto &[occ, a] : b.state.amplitudes()) {
            index.try_emplace(occ, 0);
        }
    }
    basis.clear();
    for (auto &[occ, k] : index) {
        k = basis.size();
        basis.push_back(occ);
    }
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero((Eigen::Index)basis.size(), (Eigen::Index)basis.size());
    for (const auto &b : branches_) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero((Eigen::Index)basis.size());
        for (const auto &[occ, a] : b.state.amplitudes()) {
            v[(Eigen::Index)index[occ]] = a;
        }
        rho += b.weight * v * v.adjoint();
    }
    return rho;
}

BranchEnsemble BranchEnsemble::compacted(double rel_tol) const {
    if (branches_.size() <= 1) {
        return *this;
    }
    std::vector<Occupation> basis;
    Eigen::MatrixXcd rho = density_matrix(basis);
    if ((size_t)branches_.size() < basis.size()) {
        return *this;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho);
    double trace = rho.trace().real();
    BranchEnsemble out;
    const auto &eig = solver.eigenvalues();
    // Largest eigenvalues first, for a stable branch order.
    for (Eigen::Index k = eig.size() - 1; k >= 0; k--) {
        if (eig[k] <= rel_tol * trace) {
            continue;
        }
        PureState s(modes(), n_max());
        auto v = solver.eigenvectors().col(k);
        for (size_t i = 0; i < basis.size(); i++) {
            s.add(basis[i], v[(Eigen::Index)i]);
        }
        s.prune(1e-15);
        out.add(eig[k], s);
    }
    return out;
}

OpticalElement::OpticalElement(std::string name, Eigen::MatrixXcd matrix) : name(std::move(name)), matrix(std::move(matrix)) {
    if (this->matrix.rows() != this->matrix.cols()) {
        throw std::invalid_argument("optical element matrix must be square");
    }
    auto n = this->matrix.rows();
    double err = (this->matrix * this->matrix.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (n > 0 && err > 1e-12) {
        throw std::invalid_argument("optical element '" + this->name + "' is not unitary");
    }
}

OpticalElement OpticalElement::then(const OpticalElement &next) const {
    if (next.dim() != dim()) {
        throw std::invalid_argument("cannot compose elements of different dimension");
    }
    return OpticalElement(name + "+" + next.name, next.matrix * matrix);
}

namespace qrep::elements {

OpticalElement beam_splitter_50_50() {
    Eigen::MatrixXcd m(2, 2);
    double r = 1 / std::sqrt(2.0);
    m << r, r, r, -r;
    return OpticalElement("BS", m);
}

OpticalElement beam_splitter(double transmittance) {
    if (!(transmittance >= 0 && transmittance <= 1)) {
        throw std::invalid_argument("transmittance must lie in [0, 1]");
    }
    double a = std::sqrt(transmittance);
    double b = std::sqrt(1 - transmittance);
    Eigen::MatrixXcd m(2, 2);
    m << a, -b, b, a;
    return OpticalElement("BS(t)", m);
}

OpticalElement pbs() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = 1;  // in1_H -> out1_H
    m(3, 1) = 1;  // in1_V -> out2_V
    m(2, 2) = 1;  // in2_H -> out2_H
    m(1, 3) = 1;  // in2_V -> out1_V
    return OpticalElement("PBS", m);
}

OpticalElement pm_analyzer() {
    auto m = beam_splitter_50_50().matrix;
    return OpticalElement("R", m);
}

OpticalElement pm_analyzer_pair() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m.block(0, 0, 2, 2) = pm_analyzer().matrix;
    m.block(2, 2, 2, 2) = pm_analyzer().matrix;
    return OpticalElement("RR", m);
}

OpticalElement pbs_pm() {
    auto r = pm_analyzer_pair().matrix;
    return OpticalElement("PBS+-", r * pbs().matrix * r);
}

OpticalElement swap() {
    Eigen::MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return OpticalElement("SWAP", m);
}

OpticalElement identity(size_t dim) {
    return OpticalElement("I", Eigen::MatrixXcd::Identity((Eigen::Index)dim, (Eigen::Index)dim));
}

}  // namespace qrep::elements

std::string DetectionOutcome::pattern_str() const {
    std::string out;
    for (size_t k = 0; k < pattern.size(); k++) {
        if (pattern[k]) {
            if (!out.empty()) {
                out += "&";
            }
            out += "D" + std::to_string(k + 1);
            if (pattern[k] > 1) {
                out += "x" + std::to_string(pattern[k]);
            }
        }
    }
    return out.empty() ? "none" : out;
}

PureState qrep::vacuum(std::span<const ModeLabel> modes, int n_max) {
    PureState s(std::vector<ModeLabel>(modes.begin(), modes.end()), n_max);
    s.add(Occupation(modes.size(), 0), 1);
    return s;
}

PureState qrep::tensor(const PureState &a, const PureState &b) {
    std::vector<ModeLabel> modes = a.modes();
    modes.insert(modes.end(), b.modes().begin(), b.modes().end());
    PureState out(modes, std::min(a.n_max(), b.n_max()));
    // Position of each factor's modes inside the sorted product.
    std::vector<size_t> pa, pb;
    for (const auto &m : a.modes()) {
        pa.push_back(out.index_of(m));
    }
    for (const auto &m : b.modes()) {
        pb.push_back(out.index_of(m));
    }
    Occupation occ(out.num_modes());
    for (const auto &[oa, xa] : a.amplitudes()) {
        int ta = PureState::total(oa);
        if (ta > out.n_max()) {
            continue;
        }
        for (size_t k = 0; k < pa.size(); k++) {
            occ[pa[k]] = oa[k];
        }
        for (const auto &[ob, xb] : b.amplitudes()) {
            if (ta + PureState::total(ob) > out.n_max()) {
                continue;
            }
            for (size_t k = 0; k < pb.size(); k++) {
                occ[pb[k]] = ob[k];
            }
            out.add(occ, xa * xb);
        }
    }
    return out;
}

BranchEnsemble qrep::tensor(const BranchEnsemble &a, const BranchEnsemble &b) {
    BranchEnsemble out;
    for (const auto &ba : a.branches()) {
        for (const auto &bb : b.branches()) {
            out.add(ba.weight * bb.weight, tensor(ba.state, bb.state));
        }
    }
    return out;
}

cd qrep::inner(const PureState &bra, const PureState &ket) {
    if (bra.modes() != ket.modes()) {
        throw std::invalid_argument("inner product of states over different modes");
    }
    cd r = 0;
    const auto &small = bra.amplitudes().size() < ket.amplitudes().size() ? bra : ket;
    for (const auto &[occ, a] : small.amplitudes()) {
        r += std::conj(bra.amplitude(occ)) * ket.amplitude(occ);
    }
    return r;
}

PureState qrep::apply_creation(const PureState &state, const ModeLabel &mode) {
    size_t k = state.index_of(mode);
    PureState out(state.modes(), state.n_max());
    for (const auto &[occ, a] : state.amplitudes()) {
        Occupation raised = occ;
        raised[k]++;
        out.add(raised, a * std::sqrt((double)raised[k]));
    }
    return out;
}

namespace {

using Image = std::vector<std::pair<Occupation, cd>>;

// Expands prod_i (sum_j M(j,i) a_j^dag)^{n_i} / sqrt(n_i!) |0> over the element's output modes.
Image element_image(const Eigen::MatrixXcd &m, const Occupation &in) {
    size_t k = in.size();
    std::map<Occupation, cd> poly{{Occupation(k, 0), 1}};
    double fact = 1;
    for (size_t i = 0; i < k; i++) {
        for (int r = 0; r < in[i]; r++) {
            fact *= r + 1;
            std::map<Occupation, cd> next;
            for (const auto &[o, a] : poly) {
                for (size_t j = 0; j < k; j++) {
                    cd c = m((Eigen::Index)j, (Eigen::Index)i);
                    if (c == cd{0}) {
                        continue;
                    }
                    Occupation o2 = o;
                    o2[j]++;
                    next[o2] += a * c * std::sqrt((double)o2[j]);
                }
            }
            poly = std::move(next);
        }
    }
    Image out;
    double scale = 1 / std::sqrt(fact);
    for (const auto &[o, a] : poly) {
        if (std::abs(a) > 1e-16) {
            out.emplace_back(o, a * scale);
        }
    }
    return out;
}

}  // namespace

PureState qrep::apply_element(const PureState &state, const OpticalElement &elem, std::span<const ModeLabel> modes) {
    if (modes.size() != elem.dim()) {
        throw std::invalid_argument(
            "element '" + elem.name + "' acts on " + std::to_string(elem.dim()) + " modes, got " +
            std::to_string(modes.size()));
    }
    require_distinct(modes);
    std::vector<size_t> pos;
    for (const auto &m : modes) {
        pos.push_back(state.index_of(m));
    }
    std::map<Occupation, Image> memo;
    PureState out(state.modes(), state.n_max());
    Occupation sub(pos.size());
    for (const auto &[occ, a] : state.amplitudes()) {
        for (size_t k = 0; k < pos.size(); k++) {
            sub[k] = occ[pos[k]];
        }
        auto it = memo.find(sub);
        if (it == memo.end()) {
            it = memo.emplace(sub, element_image(elem.matrix, sub)).first;
        }
        Occupation o = occ;
        for (const auto &[img, c] : it->second) {
            for (size_t k = 0; k < pos.size(); k++) {
                o[pos[k]] = img[k];
            }
            out.add(o, a * c);
        }
    }
    out.prune(1e-14);
    return out;
}

BranchEnsemble qrep::apply_element(const BranchEnsemble &state, const OpticalElement &elem, std::span<const ModeLabel> modes) {
    BranchEnsemble out;
    for (const auto &b : state.branches()) {
        out.add(b.weight, apply_element(b.state, elem, modes));
    }
    return out;
}

PureState qrep::with_modes(const PureState &state, std::span<const ModeLabel> modes) {
    return tensor(state, vacuum(modes, state.n_max()));
}

BranchEnsemble qrep::with_modes(const BranchEnsemble &state, std::span<const ModeLabel> modes) {
    BranchEnsemble out;
    for (const auto &b : state.branches()) {
        out.add(b.weight, with_modes(b.state, modes));
    }
    return out;
}

PureState qrep::relabel(const PureState &state, const std::map<ModeLabel, ModeLabel> &mapping) {
    std::vector<ModeLabel> renamed;
    for (const auto &m : state.modes()) {
        auto it = mapping.find(m);
        renamed.push_back(it == mapping.end() ? m : it->second);
    }
    PureState out(renamed, state.n_max());
    std::vector<size_t> pos;
    for (const auto &m : renamed) {
        pos.push_back(out.index_of(m));
    }
    Occupation o(renamed.size());
    for (const auto &[occ, a] : state.amplitudes()) {
        for (size_t k = 0; k < occ.size(); k++) {
            o[pos[k]] = occ[k];
        }
        out.add(o, a);
    }
    return out;
}

BranchEnsemble qrep::relabel(const BranchEnsemble &state, const std::map<ModeLabel, ModeLabel> &mapping) {
    BranchEnsemble out;
    for (const auto &b : state.branches()) {
        out.add(b.weight, relabel(b.state, mapping));
    }
    return out;
}

BranchEnsemble qrep::trace_out(const BranchEnsemble &state, std::span<const ModeLabel> modes) {
    require_distinct(modes);
    BranchEnsemble out;
    for (const auto &b : state.branches()) {
        std::vector<bool> traced(b.state.num_modes(), false);
        for (const auto &m : modes) {
            traced[b.state.index_of(m)] = true;
        }
        std::vector<ModeLabel> kept;
        for (size_t k = 0; k < traced.size(); k++) {
            if (!traced[k]) {
                kept.push_back(b.state.modes()[k]);
            }
        }
        std::map<Occupation, PureState> groups;
        for (const auto &[occ, a] : b.state.amplitudes()) {
            Occupation key, rest;
            for (size_t k = 0; k < occ.size(); k++) {
                (traced[k] ? key : rest).push_back(occ[k]);
            }
            auto it = groups.try_emplace(key, kept, b.state.n_max()).first;
            it->second.add(rest, a);
        }
        for (const auto &[key, s] : groups) {
            out.add(b.weight, s);
        }
    }
    return out;
}

BranchEnsemble qrep::truncated(const BranchEnsemble &state, int n_max) {
    BranchEnsemble out;
    for (const auto &b : state.branches()) {
        out.add(b.weight, b.state.truncated(n_max));
    }
    return out;
}

BranchEnsemble qrep::loss_channel(const BranchEnsemble &state, const ModeLabel &mode, double transmittance) {
    if (!(transmittance >= 0 && transmittance <= 1)) {
        throw std::invalid_argument("transmittance must lie in [0, 1]");
    }
    if (transmittance == 1) {
        return state;
    }
    ModeLabel env{mode.site, Ensemble::none, Field::env, mode.polarization, ENV_SLOT};
    auto bs = elements::beam_splitter(transmittance);
    std::array<ModeLabel, 2> pair{mode, env};
    std::array<ModeLabel, 1> env_only{env};
    BranchEnsemble out;
    for (const auto &b : state.branches()) {
        if (b.state.has_mode(env)) {
            throw std::logic_error("environment mode already present");
        }
        PureState s = apply_element(with_modes(b.state, env_only), bs, pair);
        BranchEnsemble one;
        one.add(b.weight, s);
        auto traced = trace_out(one, env_only);
        for (const auto &kept : traced.branches()) {
            out.add(kept.weight, kept.state);
        }
    }
    return out;
}

std::vector<DetectionOutcome> qrep::measure(
    const BranchEnsemble &state, std::span<const ModeLabel> detector_modes, const DetectorModel &model) {
    if (!(model.efficiency >= 0 && model.efficiency <= 1)) {
        throw std::invalid_argument("detector efficiency must lie in [0, 1]");
    }
    require_distinct(detector_modes);
    double eta = model.efficiency;
    std::map<std::vector<int>, DetectionOutcome> outcomes;
    for (const auto &b : state.branches()) {
        std::vector<size_t> pos;
        for (const auto &m : detector_modes) {
            pos.push_back(b.state.index_of(m));
        }
        // Conditional (unnormalized) states for each true photon-number pattern.
        std::map<std::vector<int>, PureState> by_count;
        for (const auto &[occ, a] : b.state.amplitudes()) {
            std::vector<int> n;
            Occupation reset = occ;
            for (size_t p : pos) {
                n.push_back(occ[p]);
                reset[p] = 0;
            }
            auto it = by_count.try_emplace(n, b.state.modes(), b.state.n_max()).first;
            it->second.add(reset, a);
        }
        for (const auto &[n, sub] : by_count) {
            if (sub.norm2() == 0) {
                continue;
            }
            // Per-detector registered-value distributions.
            std::vector<std::vector<std::pair<int, double>>> dist(n.size());
            for (size_t i = 0; i < n.size(); i++) {
                if (model.number_resolving) {
                    for (int k = 0; k <= n[i]; k++) {
                        double p = binomial(n[i], k) * std::pow(eta, k) * std::pow(1 - eta, n[i] - k);
                        if (p > 0) {
                            dist[i].emplace_back(k, p);
                        }
                    }
                } else {
                    double none = std::pow(1 - eta, n[i]);
                    if (none > 0) {
                        dist[i].emplace_back(0, none);
                    }
                    if (1 - none > 0) {
                        dist[i].emplace_back(1, 1 - none);
                    }
                }
            }
            std::vector<size_t> idx(n.size(), 0);
            while (true) {
                std::vector<int> pattern;
                // BranchEnsemble::add scales by the conditional state's norm, so p excludes it.
                double p = b.weight;
                for (size_t i = 0; i < n.size(); i++) {
                    pattern.push_back(dist[i][idx[i]].first);
                    p *= dist[i][idx[i]].second;
                }
                auto &o = outcomes[pattern];
                o.pattern = pattern;
                o.post_state.add(p, sub);
                size_t i = 0;
                while (i < idx.size() && ++idx[i] == dist[i].size()) {
                    idx[i] = 0;
                    i++;
                }
                if (i == idx.size()) {
                    break;
                }
            }
        }
    }
    std::vector<DetectionOutcome> result;
    for (auto &[pattern, o] : outcomes) {
        o.probability = o.post_state.total_weight();
        if (o.probability <= 0) {
            continue;
        }
        o.post_state = o.post_state.normalized();
        result.push_back(std::move(o));
    }
    return result;
}

double qrep::fidelity(const BranchEnsemble &state, const PureState &target) {
    if (state.empty()) {
        throw std::invalid_argument("fidelity of an empty ensemble");
    }
    if (state.modes() != target.modes()) {
        throw std::invalid_argument("fidelity: state and target have different modes");
    }
    double total = 0, acc = 0;
    for (const auto &b : state.branches()) {
        acc += b.weight * std::norm(inner(target, b.state)) / target.norm2();
        total += b.weight;
    }
    return acc / total;
}
