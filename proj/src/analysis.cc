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

#include "qrep/analysis.h"

#include <cmath>
#include <stdexcept>

using namespace qrep;

PowerLawFit qrep::scaling_fit(const std::vector<double> &lengths, const std::vector<double> &times) {
    if (lengths.size() != times.size()) {
        throw std::invalid_argument("lengths and times differ in size");
    }
    if (lengths.size() < 4) {
        throw std::invalid_argument("scaling fit needs at least 4 points");
    }
    size_t n = lengths.size();
    double sx = 0, sy = 0;
    std::vector<double> x(n), y(n);
    for (size_t i = 0; i < n; i++) {
        if (!(lengths[i] > 0) || !(times[i] > 0)) {
            throw std::invalid_argument("scaling fit needs positive lengths and times");
        }
        x[i] = std::log(lengths[i]);
        y[i] = std::log(times[i]);
        sx += x[i];
        sy += y[i];
    }
    double mx = sx / (double)n, my = sy / (double)n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; i++) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 1e-300) {
        throw std::invalid_argument("scaling fit needs at least two distinct lengths");
    }
    PowerLawFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (size_t i = 0; i < n; i++) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / (double)n);
    return f;
}

double qrep::stability_ratio(double wavelength_m, double coherence_tolerance_m) {
    if (!(wavelength_m > 0) || !(coherence_tolerance_m > 0)) {
        throw std::invalid_argument("wavelength and tolerance must be positive");
    }
    return std::log10(coherence_tolerance_m / (wavelength_m / 10));
}

namespace {

// Returns (coincidence probability, correlation) for one analysis basis.
std::pair<double, double> analyze(
    const BranchEnsemble &pair, bool pm_basis, const RetrievalParams &retrieval, const DetectorModel &detector) {
    auto [s1, s2] = pair_sites(pair);
    auto photons = retrieve_memory_qubit(retrieve_memory_qubit(pair, s1, retrieval), s2, retrieval);
    std::vector<ModeLabel> ports;
    for (uint8_t s : {s1, s2}) {
        std::array<ModeLabel, 2> m{
            ModeLabel::photon(s, Field::anti_stokes, Polarization::H),
            ModeLabel::photon(s, Field::anti_stokes, Polarization::V),
        };
        if (pm_basis) {
            photons = apply_element(photons, elements::pm_analyzer(), m);
        }
        ports.insert(ports.end(), m.begin(), m.end());
    }
    double same = 0, diff = 0;
    for (const auto &o : measure(photons, ports, detector)) {
        const auto &c = o.pattern;
        if (c[0] + c[1] != 1 || c[2] + c[3] != 1) {
            continue;
        }
        (c[0] == c[2] ? same : diff) += o.probability;
    }
    double total = same + diff;
    return {total, total > 0 ? (same - diff) / total : 0.0};
}

}  // namespace

EkertReport qrep::ekert_check(const BranchEnsemble &pair, const RetrievalParams &retrieval, const DetectorModel &detector) {
    EkertReport r;
    std::tie(r.coincidence_hv, r.correlation_hv) = analyze(pair, false, retrieval, detector);
    std::tie(r.coincidence_pm, r.correlation_pm) = analyze(pair, true, retrieval, detector);
    r.has_coincidences = r.coincidence_hv > 0 && r.coincidence_pm > 0;
    return r;
}
