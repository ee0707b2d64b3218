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

#include "qrep/stations.h"

#include <algorithm>
#include <cmath>
#include <set>

using namespace qrep;

namespace {

constexpr cd I{0, 1};

ModeLabel u_mode(uint8_t site, uint8_t slot = 0) {
    return ModeLabel::atomic(site, Ensemble::u, slot);
}
ModeLabel d_mode(uint8_t site, uint8_t slot = 0) {
    return ModeLabel::atomic(site, Ensemble::d, slot);
}
ModeLabel photon(uint8_t site, Field f, Polarization p, uint8_t slot = 0) {
    return ModeLabel::photon(site, f, p, slot);
}

std::vector<ModeLabel> photonic_modes(const BranchEnsemble &state) {
    std::vector<ModeLabel> out;
    for (const auto &m : state.modes()) {
        if (!m.is_atomic()) {
            out.push_back(m);
        }
    }
    return out;
}

BranchEnsemble drop_photonic(const BranchEnsemble &state) {
    auto photons = photonic_modes(state);
    return photons.empty() ? state : trace_out(state, photons);
}

uint8_t site_of_memory_qubit_state(const PureState &s) {
    if (s.modes().empty()) {
        throw std::invalid_argument("memory-qubit state has no modes");
    }
    uint8_t site = s.modes().front().site;
    auto expected = memory_qubit_modes(site);
    std::sort(expected.begin(), expected.end());
    if (s.modes() != expected) {
        throw std::invalid_argument("expected the atomic u/d and Stokes H/V modes of one site");
    }
    return site;
}

OpticalElement site_correction_element(const SiteCorrection &c) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    int tu = c.swap_ud ? 1 : 0;
    int td = c.swap_ud ? 0 : 1;
    m(tu, 0) = c.phase_u;
    m(td, 1) = c.phase_d;
    return OpticalElement("local", m);
}

void postprocess(
    std::vector<DetectionOutcome> &outcomes,
    const std::map<std::pair<int, int>, PatternCorrection> &table,
    bool correct,
    uint8_t left,
    uint8_t right) {
    for (auto &o : outcomes) {
        o.post_state = drop_photonic(o.post_state);
        auto pair = accepted_coincidence(o.pattern);
        o.accepted = pair.has_value();
        if (o.accepted && correct) {
            o.post_state = apply_correction(o.post_state, table.at(*pair), left, right);
        }
        o.post_state = o.post_state.compacted();
    }
}

}  // namespace

std::optional<std::pair<int, int>> qrep::accepted_coincidence(const std::vector<int> &pattern) {
    if (pattern.size() != 4) {
        return std::nullopt;
    }
    std::vector<int> fired;
    for (int k = 0; k < 4; k++) {
        if (pattern[(size_t)k] > 1) {
            return std::nullopt;
        }
        if (pattern[(size_t)k] == 1) {
            fired.push_back(k);
        }
    }
    if (fired.size() != 2) {
        return std::nullopt;
    }
    std::pair<int, int> p{fired[0], fired[1]};
    // One detector on each output port: {D1,D2} x {D3,D4}.
    if (p.first <= 1 && p.second >= 2) {
        return p;
    }
    return std::nullopt;
}

const std::map<std::pair<int, int>, PatternCorrection> &qrep::bsm1_corrections() {
    static const std::map<std::pair<int, int>, PatternCorrection> table{
        {{0, 2}, {{}, {}}},
        {{0, 3}, {{false, I, I}, {true, -I, -I}}},
        {{1, 2}, {{}, {true, 1, 1}}},
        {{1, 3}, {{false, I, I}, {false, -I, -I}}},
    };
    return table;
}

const std::map<std::pair<int, int>, PatternCorrection> &qrep::bsm2_corrections() {
    static const std::map<std::pair<int, int>, PatternCorrection> table{
        {{0, 2}, {{}, {}}},
        {{0, 3}, {{}, {false, 1, -1}}},
        {{1, 2}, {{}, {false, 1, -1}}},
        {{1, 3}, {{}, {}}},
    };
    return table;
}

BranchEnsemble qrep::apply_correction(const BranchEnsemble &state, const PatternCorrection &c, uint8_t left, uint8_t right) {
    std::array<ModeLabel, 2> lm{u_mode(left), d_mode(left)};
    std::array<ModeLabel, 2> rm{u_mode(right), d_mode(right)};
    auto out = apply_element(state, site_correction_element(c.left), lm);
    return apply_element(out, site_correction_element(c.right), rm);
}

std::vector<DetectionOutcome> qrep::bsm1(const PureState &site_a, const PureState &site_b, const Bsm1Config &config) {
    if (!(config.link_transmittance >= 0 && config.link_transmittance <= 1)) {
        throw std::invalid_argument("link transmittance must lie in [0, 1]");
    }
    uint8_t a = site_of_memory_qubit_state(site_a);
    uint8_t b = site_of_memory_qubit_state(site_b);
    if (a == b) {
        throw std::invalid_argument("bsm1 needs two different sites");
    }
    std::vector<ModeLabel> ports{
        photon(a, Field::stokes, Polarization::H),
        photon(a, Field::stokes, Polarization::V),
        photon(b, Field::stokes, Polarization::H),
        photon(b, Field::stokes, Polarization::V),
    };
    BranchEnsemble state(tensor(site_a, site_b));
    double arm = std::sqrt(config.link_transmittance);
    for (const auto &m : ports) {
        state = loss_channel(state, m, arm);
    }
    // PBS+- mixes the two arms; the following PBS on each output port separates H and V, which in
    // this mode basis is the identity. Port 1 keeps site a's labels: D1 = H, D2 = V; port 2 keeps
    // site b's: D3 = H, D4 = V.
    state = apply_element(state, elements::pbs_pm(), ports);
    auto outcomes = measure(state, ports, config.detector);
    postprocess(outcomes, bsm1_corrections(), config.apply_corrections, a, b);
    return outcomes;
}

std::pair<uint8_t, uint8_t> qrep::pair_sites(const BranchEnsemble &state) {
    std::set<uint8_t> sites;
    for (const auto &m : state.modes()) {
        if (!m.is_atomic()) {
            throw std::invalid_argument("pair state holds non-atomic mode " + m.str());
        }
        sites.insert(m.site);
    }
    if (sites.size() != 2 || state.modes().size() != 4) {
        throw std::invalid_argument("pair state must hold the u/d modes of exactly two sites");
    }
    return {*sites.begin(), *sites.rbegin()};
}

std::vector<DetectionOutcome> qrep::bsm2(const BranchEnsemble &left, const BranchEnsemble &right, const Bsm2Config &config) {
    if (!(config.arm_transmittance >= 0 && config.arm_transmittance <= 1)) {
        throw std::invalid_argument("arm transmittance must lie in [0, 1]");
    }
    auto [l1, l2] = pair_sites(left);
    auto [r1, r2] = pair_sites(right);
    if ((l1 != config.site_b && l2 != config.site_b) || (r1 != config.site_c && r2 != config.site_c)) {
        throw std::invalid_argument("bsm2: inner sites are not part of the input pairs");
    }
    uint8_t outer_a = l1 == config.site_b ? l2 : l1;
    uint8_t outer_d = r1 == config.site_c ? r2 : r1;
    std::set<uint8_t> all{l1, l2, r1, r2};
    if (all.size() != 4) {
        throw std::invalid_argument("bsm2: the two pairs must live on four distinct sites");
    }

    auto read_out = [&](const BranchEnsemble &pair, uint8_t site) {
        auto s = retrieve_memory_qubit(pair, site, config.retrieval);
        s = loss_channel(s, photon(site, Field::anti_stokes, Polarization::H), config.arm_transmittance);
        s = loss_channel(s, photon(site, Field::anti_stokes, Polarization::V), config.arm_transmittance);
        return s.compacted();
    };
    auto state = tensor(read_out(left, config.site_b), read_out(right, config.site_c));

    std::vector<ModeLabel> ports{
        photon(config.site_b, Field::anti_stokes, Polarization::H),
        photon(config.site_b, Field::anti_stokes, Polarization::V),
        photon(config.site_c, Field::anti_stokes, Polarization::H),
        photon(config.site_c, Field::anti_stokes, Polarization::V),
    };
    // PBS first (port 1 keeps site b's labels), then a +/- analyzer on each output:
    // D1 = port 1 "+", D2 = port 1 "-", D3 = port 2 "+", D4 = port 2 "-".
    state = apply_element(state, elements::pbs().then(elements::pm_analyzer_pair()), ports);
    auto outcomes = measure(state, ports, config.detector);
    postprocess(outcomes, bsm2_corrections(), config.apply_corrections, outer_a, outer_d);
    return outcomes;
}

std::pair<BranchEnsemble, double> qrep::accepted_mixture(const std::vector<DetectionOutcome> &outcomes) {
    BranchEnsemble mix;
    double p = 0;
    for (const auto &o : outcomes) {
        if (!o.accepted) {
            continue;
        }
        p += o.probability;
        for (const auto &b : o.post_state.branches()) {
            mix.add(o.probability * b.weight, b.state);
        }
    }
    if (mix.empty()) {
        return {mix, 0.0};
    }
    return {mix.normalized().compacted(), p};
}

SectorReport qrep::sector_report(const BranchEnsemble &state) {
    auto [s1, s2] = pair_sites(state);
    const auto &modes = state.modes();
    auto pos = [&](const ModeLabel &m) {
        return (size_t)(std::find(modes.begin(), modes.end(), m) - modes.begin());
    };
    size_t u1 = pos(u_mode(s1, modes[0].slot)), d1 = pos(d_mode(s1, modes[0].slot));
    size_t u2 = pos(u_mode(s2, modes[0].slot)), d2 = pos(d_mode(s2, modes[0].slot));
    if (std::max({u1, d1, u2, d2}) >= modes.size()) {
        throw std::invalid_argument("pair state modes must share one slot");
    }

    SectorReport r;
    r.left_site = s1;
    r.right_site = s2;
    double total = 0, overlap = 0;
    for (const auto &b : state.branches()) {
        total += b.weight;
        cd phi = 0;
        for (const auto &[occ, a] : b.state.amplitudes()) {
            int n1 = occ[u1] + occ[d1];
            int n2 = occ[u2] + occ[d2];
            double w = b.weight * std::norm(a);
            if (n1 == 1 && n2 == 1) {
                r.pair.p2 += w;
                if (occ[u1] == occ[u2]) {
                    phi += a;
                }
            } else if (n1 + n2 == 1) {
                r.pair.p1 += w;
                size_t k = occ[u1] ? 0 : occ[d1] ? 1 : occ[u2] ? 2 : 3;
                r.single_weights[k] += w;
            } else if (n1 + n2 == 0) {
                r.pair.p0 += w;
            } else {
                r.pair.ph += w;
            }
        }
        overlap += b.weight * std::norm(phi) / 2;
    }
    r.pair.p2 /= total;
    r.pair.p1 /= total;
    r.pair.p0 /= total;
    r.pair.ph /= total;
    for (auto &w : r.single_weights) {
        w /= total;
    }
    r.pair.F = r.pair.p2 > 0 ? overlap / total / r.pair.p2 : 0;
    return r;
}

PairState qrep::classify(const BranchEnsemble &state) {
    return sector_report(state).pair;
}

namespace {

std::vector<ModeLabel> pair_modes(uint8_t s1, uint8_t s2, uint8_t slot) {
    return {u_mode(s1, slot), d_mode(s1, slot), u_mode(s2, slot), d_mode(s2, slot)};
}

// Occupation over the sorted modes of pair_modes() from (u1, d1, u2, d2) counts.
PureState basis_state(uint8_t s1, uint8_t s2, uint8_t slot, int n_max, std::array<uint8_t, 4> counts, cd amp) {
    auto modes = pair_modes(s1, s2, slot);
    PureState s(modes, n_max);
    Occupation occ(4);
    for (size_t k = 0; k < 4; k++) {
        occ[s.index_of(modes[k])] = counts[k];
    }
    s.add(occ, amp);
    return s;
}

PureState sum(const std::vector<PureState> &terms) {
    PureState out(terms.front().modes(), terms.front().n_max());
    for (const auto &t : terms) {
        for (const auto &[occ, a] : t.amplitudes()) {
            out.add(occ, a);
        }
    }
    return out;
}

}  // namespace

PureState qrep::phi_plus(uint8_t s1, uint8_t s2, int n_max, uint8_t slot) {
    double r = 1 / std::sqrt(2.0);
    return sum({basis_state(s1, s2, slot, n_max, {1, 0, 1, 0}, r), basis_state(s1, s2, slot, n_max, {0, 1, 0, 1}, r)});
}

PureState qrep::psi_plus(uint8_t s1, uint8_t s2, int n_max, uint8_t slot) {
    double r = 1 / std::sqrt(2.0);
    return sum({basis_state(s1, s2, slot, n_max, {1, 0, 0, 1}, r), basis_state(s1, s2, slot, n_max, {0, 1, 1, 0}, r)});
}

PureState qrep::generation_state(uint8_t s1, uint8_t s2, int n_max) {
    // S^dag2 |0> = sqrt2 |2>.
    double sq = std::sqrt(2.0) / 4;
    return sum({
        basis_state(s1, s2, 0, n_max, {1, 0, 1, 0}, 0.5),
        basis_state(s1, s2, 0, n_max, {0, 1, 0, 1}, 0.5),
        basis_state(s1, s2, 0, n_max, {2, 0, 0, 0}, sq),
        basis_state(s1, s2, 0, n_max, {0, 0, 2, 0}, sq),
        basis_state(s1, s2, 0, n_max, {0, 2, 0, 0}, -sq),
        basis_state(s1, s2, 0, n_max, {0, 0, 0, 2}, -sq),
    });
}

BranchEnsemble qrep::dephased_pair(double F, uint8_t s1, uint8_t s2, int n_max, uint8_t slot) {
    if (!(F >= 0 && F <= 1)) {
        throw std::invalid_argument("fidelity must lie in [0, 1]");
    }
    BranchEnsemble out;
    out.add(F, phi_plus(s1, s2, n_max, slot));
    out.add(1 - F, psi_plus(s1, s2, n_max, slot));
    return out;
}

BranchEnsemble qrep::effective_pair(const PairState &pair, uint8_t s1, uint8_t s2, int n_max, uint8_t slot) {
    if (pair.p2 < 0 || pair.p1 < 0 || pair.p0 < 0 || pair.p2 + pair.p1 + pair.p0 <= 0) {
        throw std::invalid_argument("effective_pair: invalid sector weights");
    }
    BranchEnsemble out;
    out.add(pair.p2 * pair.F, phi_plus(s1, s2, n_max, slot));
    out.add(pair.p2 * (1 - pair.F), psi_plus(s1, s2, n_max, slot));
    const std::array<std::array<uint8_t, 4>, 4> singles{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
    for (const auto &c : singles) {
        out.add(pair.p1 / 4, basis_state(s1, s2, slot, n_max, c, 1));
    }
    out.add(pair.p0, basis_state(s1, s2, slot, n_max, {0, 0, 0, 0}, 1));
    return out.normalized();
}

double qrep::purified_fidelity(double F) {
    double good = F * F, bad = (1 - F) * (1 - F);
    return good / (good + bad);
}

PurifyResult qrep::purify(const BranchEnsemble &pair1, const BranchEnsemble &pair2, const PurifyConfig &config) {
    auto sites1 = pair_sites(pair1);
    auto sites2 = pair_sites(pair2);
    if (sites1 != sites2) {
        throw std::invalid_argument("purify: the two pairs must connect the same sites");
    }
    auto [s1, s2] = sites1;
    auto to_slot = [&](const BranchEnsemble &p, uint8_t slot) {
        std::map<ModeLabel, ModeLabel> m;
        for (const auto &mode : p.modes()) {
            ModeLabel r = mode;
            r.slot = slot;
            m[mode] = r;
        }
        return relabel(p, m);
    };
    auto read_out = [&](const BranchEnsemble &p) {
        uint8_t slot = p.modes().front().slot;
        auto s = retrieve_memory_qubit(p, s1, config.retrieval, slot);
        return retrieve_memory_qubit(s, s2, config.retrieval, slot).compacted();
    };
    auto state = tensor(read_out(to_slot(pair1, 0)), read_out(to_slot(pair2, 1)));

    std::vector<ModeLabel> detectors;
    for (uint8_t site : {s1, s2}) {
        std::vector<ModeLabel> ports{
            photon(site, Field::anti_stokes, Polarization::H, 0),
            photon(site, Field::anti_stokes, Polarization::V, 0),
            photon(site, Field::anti_stokes, Polarization::H, 1),
            photon(site, Field::anti_stokes, Polarization::V, 1),
        };
        // Port a keeps the slot-0 labels (slot-0 H and slot-1 V), port b the slot-1 labels.
        state = apply_element(state, elements::pbs(), ports);
        std::array<ModeLabel, 2> b{ports[2], ports[3]};
        state = apply_element(state, elements::pm_analyzer(), b);
        detectors.push_back(ports[2]);
        detectors.push_back(ports[3]);
    }

    PurifyResult result;
    result.outcomes = measure(state, detectors, config.detector);
    std::map<ModeLabel, ModeLabel> store;
    for (uint8_t site : {s1, s2}) {
        store[photon(site, Field::anti_stokes, Polarization::H, 0)] = u_mode(site);
        store[photon(site, Field::anti_stokes, Polarization::V, 0)] = d_mode(site);
    }
    BranchEnsemble kept;
    for (auto &o : result.outcomes) {
        std::array<int, 4> c{o.pattern[0], o.pattern[1], o.pattern[2], o.pattern[3]};
        o.accepted = (c == std::array<int, 4>{1, 0, 1, 0}) || (c == std::array<int, 4>{0, 1, 0, 1});
        o.post_state = relabel(trace_out(o.post_state, detectors), store).compacted();
        if (o.accepted) {
            result.success_probability += o.probability;
            for (const auto &b : o.post_state.branches()) {
                kept.add(o.probability * b.weight, b.state);
            }
        }
    }
    if (!kept.empty()) {
        result.state = kept.normalized().compacted();
        result.pair = classify(result.state);
    }
    return result;
}
