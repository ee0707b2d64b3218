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

#include <doctest.h>

#include "qrep/ensembles.h"
#include "qrep/stations.h"
#include "test_util.h"

using namespace qrep;

namespace {

std::vector<DetectionOutcome> ideal_generation(double chi = 0.01) {
    EnsembleParams ep;
    ep.chi = chi;
    return bsm1(write_memory_qubit(ep, 0), write_memory_qubit(ep, 1), Bsm1Config{});
}

BranchEnsemble shift_to_cd(const BranchEnsemble &pair) {
    std::map<ModeLabel, ModeLabel> move;
    for (auto e : {Ensemble::u, Ensemble::d}) {
        move[ModeLabel::atomic(0, e)] = ModeLabel::atomic(2, e);
        move[ModeLabel::atomic(1, e)] = ModeLabel::atomic(3, e);
    }
    return relabel(pair, move);
}

/// Operator coefficient of prod_k (S_k^dag)^{n_k} |vac> given the Fock amplitude.
cd operator_coefficient(const PureState &s, const Occupation &occ) {
    double f = 1;
    for (int n : occ) {
        f *= std::tgamma(n + 1);
    }
    return s.amplitude(occ) / std::sqrt(f);
}

}  // namespace

TEST_CASE("classify") {
    auto phi = BranchEnsemble(phi_plus(0, 1));
    auto p = classify(phi);
    CHECK(p.p2 == doctest::Approx(1));
    CHECK(p.p1 == 0);
    CHECK(p.p0 == 0);
    CHECK(p.ph == 0);
    CHECK(p.F == doctest::Approx(1));

    std::vector<ModeLabel> modes;
    for (uint8_t s : {0, 1}) {
        modes.push_back(ModeLabel::atomic(s, Ensemble::u));
        modes.push_back(ModeLabel::atomic(s, Ensemble::d));
    }
    std::sort(modes.begin(), modes.end());
    auto v = classify(BranchEnsemble(vacuum(modes)));
    CHECK(v.p0 == doctest::Approx(1));
    CHECK(v.p2 == 0);

    std::mt19937_64 rng(9);
    for (int k = 0; k < 20; k++) {
        auto r = classify(BranchEnsemble(testing::random_state(modes, 4, rng)));
        CHECK(std::abs(r.sum() - 1) < 1e-9);
    }
}

TEST_CASE("generation station reproduces the two-excitation conditional state") {
    auto outcomes = ideal_generation();
    int accepted = 0;
    std::vector<double> probs;
    for (const auto &o : outcomes) {
        if (!o.accepted) {
            continue;
        }
        accepted++;
        probs.push_back(o.probability);
        REQUIRE(o.post_state.branches().size() == 1);
        const auto &s = o.post_state.branches()[0].state;
        auto idx = [&](uint8_t site, Ensemble e) { return s.index_of(ModeLabel::atomic(site, e)); };
        auto occ = [&](std::vector<std::pair<size_t, int>> entries) {
            Occupation x(4, 0);
            for (auto [i, n] : entries) {
                x[i] = (uint8_t)n;
            }
            return x;
        };
        size_t uA = idx(0, Ensemble::u), dA = idx(0, Ensemble::d), uB = idx(1, Ensemble::u), dB = idx(1, Ensemble::d);
        std::map<Occupation, cd> expected{
            {occ({{uA, 1}, {uB, 1}}), 0.5},  {occ({{dA, 1}, {dB, 1}}), 0.5},  {occ({{uA, 2}}), 0.25},
            {occ({{uB, 2}}), 0.25},          {occ({{dA, 2}}), -0.25},         {occ({{dB, 2}}), -0.25},
        };
        // Global phase fixed by the uA uB coefficient; the overall scale is the state norm.
        cd ref = operator_coefficient(s, occ({{uA, 1}, {uB, 1}}));
        double scale = 0.5 / std::abs(ref);
        cd phase = std::abs(ref) / ref;
        double worst = 0;
        for (const auto &[o_occ, a] : s.amplitudes()) {
            cd want = expected.count(o_occ) ? expected.at(o_occ) : cd(0);
            worst = std::max(worst, std::abs(operator_coefficient(s, o_occ) * phase * scale - want));
        }
        for (const auto &[o_occ, want] : expected) {
            worst = std::max(worst, std::abs(operator_coefficient(s, o_occ) * phase * scale - want));
        }
        CHECK(worst < 1e-10);
    }
    CHECK(accepted == 4);
    for (double p : probs) {
        CHECK(std::abs(p - probs[0]) < 1e-10);
    }
}

TEST_CASE("generation acceptance scales as chi squared") {
    auto p_of = [](double chi) { return accepted_mixture(ideal_generation(chi)).second; };
    double ratio = p_of(1e-4) / p_of(1e-3);
    CHECK(std::abs(ratio - 0.01) < 1e-3);
}

TEST_CASE("swapping station cancels two-excitation terms") {
    auto [gen, p] = accepted_mixture(ideal_generation());
    auto right = shift_to_cd(gen);
    auto outcomes = bsm2(gen, right, Bsm2Config{});
    double total = 0;
    int accepted = 0;
    for (const auto &o : outcomes) {
        if (!o.accepted) {
            continue;
        }
        accepted++;
        total += o.probability;
        CHECK(std::abs(o.probability - 0.03125) < 1e-12);
        CHECK(fidelity(o.post_state, phi_plus(0, 3)) > 1 - 1e-10);
        CHECK(std::abs(classify(o.post_state).p2 - 1) < 1e-10);
    }
    CHECK(accepted == 4);
    CHECK(std::abs(total - 0.125) < 1e-12);

    // Each S^dag^2 term alone, against a full partner pair, never yields an accepted coincidence.
    auto eq2 = generation_state(0, 1);
    for (auto e : {Ensemble::u, Ensemble::d}) {
        for (uint8_t site : {0, 1}) {
            PureState term(eq2.modes(), eq2.n_max());
            Occupation occ(4, 0);
            occ[eq2.index_of(ModeLabel::atomic(site, e))] = 2;
            term.add(occ, 1);
            double p_term = 0;
            for (const auto &o : bsm2(BranchEnsemble(term), right, Bsm2Config{})) {
                if (o.accepted) {
                    p_term += o.probability;
                }
            }
            CHECK(p_term < 1e-12);
        }
    }
}

TEST_CASE("lossy swapping leaves the single-excitation sector maximally mixed") {
    EnsembleParams ep;
    ep.chi = 1e-3;
    Bsm1Config c1;
    c1.link_transmittance = std::pow(10.0, -0.1);
    c1.detector = DetectorModel::threshold(0.99);
    auto [gen, p] = accepted_mixture(bsm1(write_memory_qubit(ep, 0), write_memory_qubit(ep, 1), c1));
    Bsm2Config c2;
    c2.retrieval.eta_r = 0.98;
    c2.detector = DetectorModel::threshold(0.99);
    c2.arm_transmittance = std::pow(10.0, -0.05);
    auto [out, ps] = accepted_mixture(bsm2(gen, shift_to_cd(gen), c2));
    auto r = sector_report(out);
    CHECK(r.pair.p1 > 0.1);
    for (double w : r.single_weights) {
        CHECK(std::abs(w - r.single_weights[0]) < 1e-10);
    }
    CHECK(std::abs(r.pair.sum() - 1) < 1e-9);
}

TEST_CASE("purification") {
    PurifyConfig cfg;
    for (double F : {0.6, 0.75, 0.88, 0.95}) {
        auto pair = dephased_pair(F, 0, 1);
        auto r = purify(pair, pair, cfg);
        CHECK(std::abs(r.pair.F - purified_fidelity(F)) < 1e-9);
        CHECK(std::abs(r.success_probability - (F * F + (1 - F) * (1 - F)) / 4) < 1e-12);
    }
    CHECK(std::abs(purified_fidelity(0.88) - 0.7744 / 0.7888) < 1e-15);
    CHECK(std::abs(purified_fidelity(0.88) - 0.981744) < 1e-6);
    for (double F : {0.5, 1.0}) {
        auto pair = dephased_pair(F, 0, 1);
        CHECK(std::abs(purify(pair, pair, cfg).pair.F - F) < 1e-12);
    }
    CHECK_THROWS_AS(purify(dephased_pair(0.9, 0, 1), dephased_pair(0.9, 0, 2), cfg), std::invalid_argument);
}

TEST_CASE("effective pair carries the requested sector weights") {
    PairState p;
    p.p2 = 0.5;
    p.p1 = 0.3;
    p.p0 = 0.2;
    p.F = 0.9;
    auto r = sector_report(effective_pair(p, 0, 1));
    CHECK(r.pair.p2 == doctest::Approx(0.5));
    CHECK(r.pair.p1 == doctest::Approx(0.3));
    CHECK(r.pair.p0 == doctest::Approx(0.2));
    CHECK(r.pair.F == doctest::Approx(0.9));
    for (double w : r.single_weights) {
        CHECK(w == doctest::Approx(0.075));
    }
}
