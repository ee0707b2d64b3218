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

#include "qrep/oracle.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

using namespace qrep;
using namespace qrep::oracle;

namespace {

double factorial(int n) {
    double f = 1;
    for (int k = 2; k <= n; k++) {
        f *= k;
    }
    return f;
}

double choose(int n, int k) {
    return factorial(n) / (factorial(k) * factorial(n - k));
}

void enumerate(size_t k, int left, Occupation &cur, std::vector<Occupation> &out) {
    if (k == cur.size()) {
        out.push_back(cur);
        return;
    }
    for (int v = 0; v <= left; v++) {
        cur[k] = (uint8_t)v;
        enumerate(k + 1, left - v, cur, out);
    }
    cur[k] = 0;
}

std::vector<size_t> positions(const Basis &basis, std::span<const ModeLabel> modes) {
    std::vector<size_t> pos;
    for (const auto &m : modes) {
        pos.push_back(basis.mode_index(m));
    }
    return pos;
}

Matrix correction_operator(const Basis &basis, const PatternCorrection &c, uint8_t left, uint8_t right) {
    auto site_matrix = [](const SiteCorrection &s) {
        Matrix m = Matrix::Zero(2, 2);
        m(s.swap_ud ? 1 : 0, 0) = s.phase_u;
        m(s.swap_ud ? 0 : 1, 1) = s.phase_d;
        return OpticalElement("local", m);
    };
    std::array<ModeLabel, 2> l{ModeLabel::atomic(left, Ensemble::u), ModeLabel::atomic(left, Ensemble::d)};
    std::array<ModeLabel, 2> r{ModeLabel::atomic(right, Ensemble::u), ModeLabel::atomic(right, Ensemble::d)};
    return element_operator(basis, site_matrix(c.right), r) * element_operator(basis, site_matrix(c.left), l);
}

void finish(DenseStation &st, const std::map<std::pair<int, int>, PatternCorrection> &table, const Basis &full,
            const Basis &outer, uint8_t left, uint8_t right) {
    st.basis = outer;
    st.rho = Matrix::Zero((Eigen::Index)outer.dim(), (Eigen::Index)outer.dim());
    for (auto &o : st.outcomes) {
        o.rho = partial_trace(full, o.rho, outer);
        auto pair = accepted_coincidence(o.pattern);
        if (!pair) {
            continue;
        }
        Matrix u = correction_operator(outer, table.at(*pair), left, right);
        o.rho = u * o.rho * u.adjoint();
        st.accepted_probability += o.probability;
        st.rho += o.rho;
    }
    if (st.accepted_probability > 0) {
        st.rho /= st.rho.trace().real();
        st.pair = classify(outer, st.rho);
    }
}

std::vector<ModeLabel> sorted(std::vector<ModeLabel> v) {
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<ModeLabel> atomic_modes(std::initializer_list<uint8_t> sites) {
    std::vector<ModeLabel> v;
    for (uint8_t s : sites) {
        v.push_back(ModeLabel::atomic(s, Ensemble::u));
        v.push_back(ModeLabel::atomic(s, Ensemble::d));
    }
    return sorted(v);
}

}  // namespace

Basis::Basis(std::vector<ModeLabel> modes, int n_max) : modes_(std::move(modes)), n_max_(n_max) {
    if (!std::is_sorted(modes_.begin(), modes_.end()) ||
        std::adjacent_find(modes_.begin(), modes_.end()) != modes_.end()) {
        throw std::invalid_argument("oracle basis modes must be sorted and distinct");
    }
    if (modes_.size() > MAX_MODES) {
        throw ResourceError("oracle basis limited to 8 modes");
    }
    if (n_max < 0) {
        throw std::invalid_argument("n_max must be non-negative");
    }
    // C(n_modes + n_max, n_max) states.
    double count = choose((int)modes_.size() + n_max, n_max);
    if (count > (double)MAX_DIM) {
        throw ResourceError("oracle basis would exceed 5000 states");
    }
    Occupation cur(modes_.size(), 0);
    enumerate(0, n_max, cur, states_);
    for (size_t i = 0; i < states_.size(); i++) {
        index_[states_[i]] = i;
    }
}

size_t Basis::find(const Occupation &occ) const {
    auto it = index_.find(occ);
    return it == index_.end() ? states_.size() : it->second;
}

size_t Basis::mode_index(const ModeLabel &m) const {
    auto it = std::find(modes_.begin(), modes_.end(), m);
    if (it == modes_.end()) {
        throw std::invalid_argument("mode " + m.str() + " not in oracle basis");
    }
    return (size_t)(it - modes_.begin());
}

std::string Basis::label(size_t i) const {
    std::string s = "|";
    bool first = true;
    for (size_t k = 0; k < modes_.size(); k++) {
        if (states_[i][k] == 0) {
            continue;
        }
        if (!first) {
            s += ",";
        }
        first = false;
        s += modes_[k].str() + "=" + std::to_string(states_[i][k]);
    }
    return s + ">";
}

cd oracle::permanent(const Matrix &m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("permanent of a non-square matrix");
    }
    int n = (int)m.rows();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    cd total = 0;
    do {
        cd term = 1;
        for (int i = 0; i < n; i++) {
            term *= m(i, perm[i]);
        }
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

Vector oracle::dense_state(const PureState &state, const Basis &basis) {
    if (state.modes() != basis.modes()) {
        throw std::invalid_argument("state and basis modes differ");
    }
    Vector v = Vector::Zero((Eigen::Index)basis.dim());
    for (const auto &[occ, a] : state.amplitudes()) {
        size_t i = basis.find(occ);
        if (i == basis.dim()) {
            throw std::invalid_argument("state component outside the oracle basis");
        }
        v((Eigen::Index)i) = a;
    }
    return v;
}

PureState oracle::sparse_state(const Vector &v, const Basis &basis) {
    PureState s(basis.modes(), basis.n_max());
    for (size_t i = 0; i < basis.dim(); i++) {
        if (v((Eigen::Index)i) != cd{0}) {
            s.add(basis.state(i), v((Eigen::Index)i));
        }
    }
    return s;
}

Matrix oracle::density(const BranchEnsemble &state, const Basis &basis) {
    Matrix rho = Matrix::Zero((Eigen::Index)basis.dim(), (Eigen::Index)basis.dim());
    for (const auto &b : state.branches()) {
        Vector v = dense_state(b.state, basis);
        rho += b.weight * v * v.adjoint();
    }
    return rho;
}

Matrix oracle::element_operator(const Basis &basis, const OpticalElement &elem, std::span<const ModeLabel> modes) {
    if ((size_t)elem.dim() != modes.size()) {
        throw std::invalid_argument("element dimension does not match the mode list");
    }
    auto pos = positions(basis, modes);
    size_t n_modes = basis.modes().size();
    Matrix full = Matrix::Identity((Eigen::Index)n_modes, (Eigen::Index)n_modes);
    for (size_t i = 0; i < pos.size(); i++) {
        full((Eigen::Index)pos[i], (Eigen::Index)pos[i]) = 0;
    }
    for (size_t i = 0; i < pos.size(); i++) {
        for (size_t j = 0; j < pos.size(); j++) {
            full((Eigen::Index)pos[j], (Eigen::Index)pos[i]) = elem.matrix((Eigen::Index)j, (Eigen::Index)i);
        }
    }
    std::vector<bool> acted(n_modes, false);
    for (size_t p : pos) {
        acted[p] = true;
    }

    Matrix U = Matrix::Zero((Eigen::Index)basis.dim(), (Eigen::Index)basis.dim());
    for (size_t c = 0; c < basis.dim(); c++) {
        const auto &n = basis.state(c);
        for (size_t r = 0; r < basis.dim(); r++) {
            const auto &m = basis.state(r);
            bool compatible = true;
            int in_total = 0, out_total = 0;
            for (size_t k = 0; k < n_modes; k++) {
                if (!acted[k] && m[k] != n[k]) {
                    compatible = false;
                    break;
                }
                in_total += n[k];
                out_total += m[k];
            }
            if (!compatible || in_total != out_total) {
                continue;
            }
            std::vector<Eigen::Index> rows, cols;
            double norm = 1;
            for (size_t k = 0; k < n_modes; k++) {
                for (int q = 0; q < m[k]; q++) {
                    rows.push_back((Eigen::Index)k);
                }
                for (int q = 0; q < n[k]; q++) {
                    cols.push_back((Eigen::Index)k);
                }
                norm *= factorial(m[k]) * factorial(n[k]);
            }
            Matrix sub((Eigen::Index)rows.size(), (Eigen::Index)cols.size());
            for (size_t a = 0; a < rows.size(); a++) {
                for (size_t b = 0; b < cols.size(); b++) {
                    sub((Eigen::Index)a, (Eigen::Index)b) = full(rows[a], cols[b]);
                }
            }
            cd amp = rows.empty() ? cd{1} : permanent(sub);
            U((Eigen::Index)r, (Eigen::Index)c) = amp / std::sqrt(norm);
        }
    }
    return U;
}

std::vector<Matrix> oracle::loss_kraus(const Basis &basis, const ModeLabel &mode, double t) {
    if (!(t >= 0 && t <= 1)) {
        throw std::invalid_argument("transmittance must lie in [0, 1]");
    }
    size_t p = basis.mode_index(mode);
    std::vector<Matrix> ops;
    for (int k = 0; k <= basis.n_max(); k++) {
        Matrix K = Matrix::Zero((Eigen::Index)basis.dim(), (Eigen::Index)basis.dim());
        bool any = false;
        for (size_t c = 0; c < basis.dim(); c++) {
            Occupation occ = basis.state(c);
            int n = occ[p];
            if (n < k) {
                continue;
            }
            double a = std::sqrt(choose(n, k) * std::pow(t, n - k) * std::pow(1 - t, k));
            if (a == 0) {
                continue;
            }
            occ[p] = (uint8_t)(n - k);
            K((Eigen::Index)basis.find(occ), (Eigen::Index)c) = a;
            any = true;
        }
        if (any) {
            ops.push_back(K);
        }
    }
    return ops;
}

Matrix oracle::apply_kraus(const std::vector<Matrix> &ops, const Matrix &rho) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto &K : ops) {
        out += K * rho * K.adjoint();
    }
    return out;
}

std::vector<DenseOutcome> oracle::dense_measure(
    const Basis &basis, const Matrix &rho, std::span<const ModeLabel> detectors, const DetectorModel &model) {
    auto pos = positions(basis, detectors);
    double eta = model.efficiency;
    // P(registered | true) for one detector.
    auto response = [&](int reg, int n) {
        if (model.number_resolving) {
            return reg > n ? 0.0 : choose(n, reg) * std::pow(eta, reg) * std::pow(1 - eta, n - reg);
        }
        double none = std::pow(1 - eta, n);
        return reg == 0 ? none : (reg == 1 ? 1 - none : 0.0);
    };
    int top = model.number_resolving ? basis.n_max() : 1;

    std::map<std::vector<int>, DenseOutcome> out;
    std::vector<int> pattern(pos.size(), 0);
    auto visit = [&](const std::vector<int> &pat) {
        Matrix r = Matrix::Zero(rho.rows(), rho.cols());
        for (size_t i = 0; i < basis.dim(); i++) {
            const auto &oi = basis.state(i);
            double w = 1;
            for (size_t k = 0; k < pos.size(); k++) {
                w *= response(pat[k], oi[pos[k]]);
            }
            if (w == 0) {
                continue;
            }
            Occupation ri = oi;
            for (size_t p : pos) {
                ri[p] = 0;
            }
            size_t ti = basis.find(ri);
            for (size_t j = 0; j < basis.dim(); j++) {
                const auto &oj = basis.state(j);
                bool same = true;
                for (size_t p : pos) {
                    same &= oi[p] == oj[p];
                }
                if (!same) {
                    continue;
                }
                Occupation rj = oj;
                for (size_t p : pos) {
                    rj[p] = 0;
                }
                r((Eigen::Index)ti, (Eigen::Index)basis.find(rj)) += w * rho((Eigen::Index)i, (Eigen::Index)j);
            }
        }
        double p = r.trace().real();
        if (p > 0) {
            out[pat] = DenseOutcome{pat, p, r};
        }
    };
    // Odometer over all registered patterns.
    while (true) {
        visit(pattern);
        size_t k = 0;
        while (k < pattern.size() && pattern[k] == top) {
            pattern[k++] = 0;
        }
        if (k == pattern.size()) {
            break;
        }
        pattern[k]++;
    }
    std::vector<DenseOutcome> v;
    for (auto &[k, o] : out) {
        v.push_back(std::move(o));
    }
    return v;
}

Matrix oracle::partial_trace(const Basis &from, const Matrix &rho, const Basis &to) {
    std::vector<size_t> kept, traced;
    for (size_t k = 0; k < from.modes().size(); k++) {
        bool keep = std::find(to.modes().begin(), to.modes().end(), from.modes()[k]) != to.modes().end();
        (keep ? kept : traced).push_back(k);
    }
    if (kept.size() != to.modes().size()) {
        throw std::invalid_argument("target basis holds modes absent from the source");
    }
    auto project = [&](const Occupation &o, const std::vector<size_t> &idx) {
        Occupation r;
        for (size_t k : idx) {
            r.push_back(o[k]);
        }
        return r;
    };
    Matrix out = Matrix::Zero((Eigen::Index)to.dim(), (Eigen::Index)to.dim());
    for (size_t i = 0; i < from.dim(); i++) {
        auto ti = project(from.state(i), traced);
        size_t a = to.find(project(from.state(i), kept));
        for (size_t j = 0; j < from.dim(); j++) {
            if (project(from.state(j), traced) != ti) {
                continue;
            }
            size_t b = to.find(project(from.state(j), kept));
            if (a == to.dim() || b == to.dim()) {
                throw std::invalid_argument("target basis too small for the reduced state");
            }
            out((Eigen::Index)a, (Eigen::Index)b) += rho((Eigen::Index)i, (Eigen::Index)j);
        }
    }
    return out;
}

Matrix oracle::tensor(const Basis &a, const Matrix &rho_a, const Basis &b, const Matrix &rho_b, const Basis &joint) {
    auto pa = positions(joint, a.modes());
    auto pb = positions(joint, b.modes());
    if (pa.size() + pb.size() != joint.modes().size()) {
        throw std::invalid_argument("joint basis must be the union of the factor bases");
    }
    std::vector<std::pair<size_t, size_t>> index;  // (ia, ib) per joint state, or dim markers
    std::vector<size_t> where(a.dim() * b.dim(), joint.dim());
    for (size_t ia = 0; ia < a.dim(); ia++) {
        for (size_t ib = 0; ib < b.dim(); ib++) {
            Occupation occ(joint.modes().size(), 0);
            for (size_t k = 0; k < pa.size(); k++) {
                occ[pa[k]] = a.state(ia)[k];
            }
            for (size_t k = 0; k < pb.size(); k++) {
                occ[pb[k]] = b.state(ib)[k];
            }
            where[ia * b.dim() + ib] = joint.find(occ);
        }
    }
    Matrix out = Matrix::Zero((Eigen::Index)joint.dim(), (Eigen::Index)joint.dim());
    for (size_t x = 0; x < where.size(); x++) {
        if (where[x] == joint.dim()) {
            continue;
        }
        for (size_t y = 0; y < where.size(); y++) {
            if (where[y] == joint.dim()) {
                continue;
            }
            cd v = rho_a((Eigen::Index)(x / b.dim()), (Eigen::Index)(y / b.dim())) *
                   rho_b((Eigen::Index)(x % b.dim()), (Eigen::Index)(y % b.dim()));
            out((Eigen::Index)where[x], (Eigen::Index)where[y]) = v;
        }
    }
    return out;
}

PairState oracle::classify(const Basis &basis, const Matrix &rho) {
    if (basis.modes().size() != 4) {
        throw std::invalid_argument("classify expects the u/d modes of two sites");
    }
    const auto &m = basis.modes();
    uint8_t s1 = m.front().site, s2 = m.back().site;
    size_t u1 = basis.mode_index(ModeLabel::atomic(s1, Ensemble::u)), d1 = basis.mode_index(ModeLabel::atomic(s1, Ensemble::d));
    size_t u2 = basis.mode_index(ModeLabel::atomic(s2, Ensemble::u)), d2 = basis.mode_index(ModeLabel::atomic(s2, Ensemble::d));
    PairState p;
    double tr = rho.trace().real();
    Vector phi = Vector::Zero((Eigen::Index)basis.dim());
    for (size_t i = 0; i < basis.dim(); i++) {
        const auto &o = basis.state(i);
        int n1 = o[u1] + o[d1], n2 = o[u2] + o[d2];
        double w = rho((Eigen::Index)i, (Eigen::Index)i).real() / tr;
        if (n1 == 1 && n2 == 1) {
            p.p2 += w;
            if (o[u1] == o[u2]) {
                phi((Eigen::Index)i) = 1 / std::sqrt(2.0);
            }
        } else if (n1 + n2 == 1) {
            p.p1 += w;
        } else if (n1 + n2 == 0) {
            p.p0 += w;
        } else {
            p.ph += w;
        }
    }
    double overlap = (phi.adjoint() * rho * phi)(0, 0).real() / tr;
    p.F = p.p2 > 0 ? overlap / p.p2 : 0;
    return p;
}

DenseStation oracle::bsm1(const EnsembleParams &params, double link_transmittance, const DetectorModel &detector, int n_max) {
    params.validate();
    std::vector<ModeLabel> modes;
    for (uint8_t s : {0, 1}) {
        auto m = memory_qubit_modes(s);
        modes.insert(modes.end(), m.begin(), m.end());
    }
    Basis full(sorted(modes), n_max);

    // Fock amplitude chi^{n/2} on |n atoms, n photons> for each of the four ensembles. Each site is
    // normalized over the components that fit in n_max; the pair is not renormalized.
    auto ensemble_amp = [&](int n_atoms, int n_photons) -> double {
        if (n_atoms != n_photons || n_atoms > params.truncation_order) {
            return 0;
        }
        return std::pow(params.chi, n_atoms / 2.0);
    };
    auto site_amp = [&](const Occupation &o, uint8_t s) {
        auto idx = [&](const ModeLabel &l) {
            return o[full.mode_index(l)];
        };
        auto m = memory_qubit_modes(s);
        return ensemble_amp(idx(m[0]), idx(m[2])) * ensemble_amp(idx(m[1]), idx(m[3]));
    };
    double site_norm = 0;
    {
        auto m = memory_qubit_modes(0);
        Basis one(sorted(m), n_max);
        for (size_t i = 0; i < one.dim(); i++) {
            const auto &o = one.state(i);
            double a = ensemble_amp(o[one.mode_index(m[0])], o[one.mode_index(m[2])]) *
                       ensemble_amp(o[one.mode_index(m[1])], o[one.mode_index(m[3])]);
            site_norm += a * a;
        }
    }
    Vector v = Vector::Zero((Eigen::Index)full.dim());
    for (size_t i = 0; i < full.dim(); i++) {
        v((Eigen::Index)i) = site_amp(full.state(i), 0) * site_amp(full.state(i), 1) / site_norm;
    }
    Matrix rho = v * v.adjoint();

    std::vector<ModeLabel> ports{
        ModeLabel::photon(0, Field::stokes, Polarization::H),
        ModeLabel::photon(0, Field::stokes, Polarization::V),
        ModeLabel::photon(1, Field::stokes, Polarization::H),
        ModeLabel::photon(1, Field::stokes, Polarization::V),
    };
    for (const auto &p : ports) {
        rho = apply_kraus(loss_kraus(full, p, std::sqrt(link_transmittance)), rho);
    }
    Matrix U = element_operator(full, elements::pbs_pm(), ports);
    rho = U * rho * U.adjoint();

    DenseStation st;
    st.outcomes = dense_measure(full, rho, ports, detector);
    finish(st, bsm1_corrections(), full, Basis(atomic_modes({0, 1}), n_max), 0, 1);
    return st;
}

DenseStation oracle::bsm2(const Basis &left_basis, const Matrix &left, const Basis &right_basis, const Matrix &right,
                          const SwapSettings &s) {
    if (left_basis.modes() != atomic_modes({0, 1}) || right_basis.modes() != atomic_modes({2, 3})) {
        throw std::invalid_argument("oracle bsm2 expects pairs on sites (0,1) and (2,3)");
    }
    auto lossy = [&](const Basis &b, Matrix rho, uint8_t site) {
        for (auto e : {Ensemble::u, Ensemble::d}) {
            rho = apply_kraus(loss_kraus(b, ModeLabel::atomic(site, e), s.eta_r), rho);
            rho = apply_kraus(loss_kraus(b, ModeLabel::atomic(site, e), s.arm_transmittance), rho);
        }
        return rho;
    };
    Basis full(atomic_modes({0, 1, 2, 3}), s.n_max);
    Matrix rho = tensor(left_basis, lossy(left_basis, left, 1), right_basis, lossy(right_basis, right, 2), full);

    // u stands for the H photon and d for the V photon of each retrieved memory.
    std::vector<ModeLabel> ports{
        ModeLabel::atomic(1, Ensemble::u),
        ModeLabel::atomic(1, Ensemble::d),
        ModeLabel::atomic(2, Ensemble::u),
        ModeLabel::atomic(2, Ensemble::d),
    };
    Matrix U = element_operator(full, elements::pbs().then(elements::pm_analyzer_pair()), ports);
    rho = U * rho * U.adjoint();

    DenseStation st;
    st.outcomes = dense_measure(full, rho, ports, s.detector);
    finish(st, bsm2_corrections(), full, Basis(atomic_modes({0, 3}), s.n_max), 0, 3);
    return st;
}

Vector oracle::dominant_state(const Matrix &rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    Vector v = es.eigenvectors().col(es.eigenvectors().cols() - 1);
    for (Eigen::Index i = 0; i < v.size(); i++) {
        if (std::abs(v(i)) > 1e-9) {
            v *= std::conj(v(i)) / std::abs(v(i));
            break;
        }
    }
    return v;
}

void oracle::write_golden(std::ostream &out, const Basis &basis, const Vector &v) {
    char buf[256];
    for (size_t i = 0; i < basis.dim(); i++) {
        cd a = v((Eigen::Index)i);
        if (std::abs(a) <= 1e-15) {
            continue;
        }
        std::snprintf(buf, sizeof(buf), "%s %.15e %.15e\n", basis.label(i).c_str(), a.real(), a.imag());
        out << buf;
    }
}
