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

#include "qrep/repeater.h"

#include <cmath>
#include <stdexcept>

using namespace qrep;

std::string qrep::to_string(SwapModel m) {
    return m == SwapModel::approx ? "approx" : "microscopic";
}

std::string qrep::to_string(TimingModel m) {
    return m == TimingModel::synchronous ? "synchronous" : "independent";
}

SwapModel qrep::parse_swap_model(const std::string &s) {
    if (s == "approx") {
        return SwapModel::approx;
    }
    if (s == "microscopic") {
        return SwapModel::microscopic;
    }
    throw std::invalid_argument("unknown swap model '" + s + "' (expected approx or microscopic)");
}

TimingModel qrep::parse_timing_model(const std::string &s) {
    if (s == "synchronous") {
        return TimingModel::synchronous;
    }
    if (s == "independent") {
        return TimingModel::independent;
    }
    throw std::invalid_argument("unknown timing model '" + s + "' (expected synchronous or independent)");
}

void RepeaterParams::validate() const {
    auto unit = [](double x) {
        return x >= 0 && x <= 1;
    };
    if (!(chi >= 0 && chi < 1)) {
        throw std::invalid_argument("chi must lie in [0, 1)");
    }
    if (!unit(eta) || eta == 0) {
        throw std::invalid_argument("eta must lie in (0, 1]");
    }
    if (!unit(eta_r) || eta_r == 0) {
        throw std::invalid_argument("eta_r must lie in (0, 1]");
    }
    if (!(L0_km > 0) || !(c_km_per_s > 0)) {
        throw std::invalid_argument("L0 and c must be positive");
    }
    if (L_att_km.has_value() == loss_db_per_km.has_value()) {
        throw std::invalid_argument("give exactly one of L_att and loss_db_per_km");
    }
    if (L_att_km && !(*L_att_km > 0)) {
        throw std::invalid_argument("L_att must be positive");
    }
    if (loss_db_per_km && !(*loss_db_per_km >= 0)) {
        throw std::invalid_argument("loss_db_per_km must be non-negative");
    }
    if (j_max < 0 || j_max > 30) {
        throw std::invalid_argument("j_max must lie in [0, 30]");
    }
    for (int level : purification_rounds) {
        if (level < 0 || level > j_max) {
            throw std::invalid_argument("purification level outside [0, j_max]");
        }
    }
    if (!unit(F0)) {
        throw std::invalid_argument("F0 must lie in [0, 1]");
    }
    if (n_max < 2 || n_max > 12) {
        throw std::invalid_argument("n_max must lie in [2, 12]");
    }
    if (truncation_order < 2) {
        throw std::invalid_argument("truncation_order must be at least 2");
    }
    if (!(swap_arm_fraction >= 0)) {
        throw std::invalid_argument("swap_arm_fraction must be non-negative");
    }
}

double qrep::attenuation_length(double loss_db_per_km) {
    if (!(loss_db_per_km > 0)) {
        throw std::invalid_argument("loss must be positive");
    }
    return 10 / (loss_db_per_km * std::log(10.0));
}

double RepeaterParams::attenuation_length() const {
    if (L_att_km) {
        return *L_att_km;
    }
    if (loss_db_per_km && *loss_db_per_km == 0) {
        return INFINITY;
    }
    return qrep::attenuation_length(loss_db_per_km.value());
}

double RepeaterParams::link_transmittance() const {
    return std::exp(-L0_km / attenuation_length());
}

double RepeaterParams::total_length() const {
    return (std::ldexp(1.0, j_max + 1) - 1) * L0_km;
}

double RepeaterParams::chi_value() const {
    return chi > 0 ? chi : L0_km / total_length();
}

double RepeaterParams::T_cc() const {
    return L0_km / c_km_per_s;
}

DetectorModel RepeaterParams::detector() const {
    return {eta, number_resolving};
}

int RepeaterParams::rounds_at(int level) const {
    int n = 0;
    for (int l : purification_rounds) {
        n += l == level;
    }
    return n;
}

double qrep::generation_probability(const RepeaterParams &params) {
    double chi = params.chi_value();
    return chi * chi * params.eta * params.eta * params.link_transmittance();
}

double qrep::generation_time(const RepeaterParams &params) {
    double p = generation_probability(params);
    if (p == 0) {
        throw std::domain_error("generation probability is zero");
    }
    return params.T_cc() / p;
}

double qrep::swap_success_prob_approx(const RepeaterParams &params) {
    double e = params.eta_r * params.eta;
    return e * e * params.link_transmittance();
}

double qrep::connection_time(double T_prev, double p, int j, double T_cc) {
    if (j < 1) {
        throw std::invalid_argument("connection level must be at least 1");
    }
    if (!(p > 0 && p <= 1)) {
        throw std::domain_error("swap probability must lie in (0, 1]");
    }
    return (T_prev + std::ldexp(T_cc, j)) / p;
}

TimingResult qrep::timing_recursion(const RepeaterParams &params, const std::vector<double> &p_sj) {
    TimingResult r;
    r.T0 = generation_time(params);
    r.p_sj = p_sj;
    double T = r.T0;
    for (size_t k = 0; k < p_sj.size(); k++) {
        T = connection_time(T, p_sj[k], (int)k + 1, params.T_cc());
        r.T_sj.push_back(T);
    }
    r.T_tot = T;
    return r;
}

double qrep::total_time_product_form(double T0, const std::vector<double> &p_sj) {
    double T = T0;
    for (double p : p_sj) {
        if (!(p > 0)) {
            throw std::domain_error("swap probability must be positive");
        }
        T /= p;
    }
    return T;
}

double qrep::total_time_closed_form(const RepeaterParams &params, double L_km, double p) {
    if (!(p > 0 && p <= 1)) {
        throw std::domain_error("swap probability must lie in (0, 1]");
    }
    double chi = params.chi_value();
    return params.T_cc() / (chi * chi) / params.link_transmittance() * std::pow(L_km / params.L0_km, std::log2(1 / p));
}

double qrep::scaling_exponent(double p) {
    if (!(p > 0 && p <= 1)) {
        throw std::domain_error("swap probability must lie in (0, 1]");
    }
    return 2 + std::log2(1 / p);
}

namespace {

Bsm2Config swap_station(const RepeaterParams &params, uint8_t b, uint8_t c) {
    Bsm2Config cfg;
    cfg.site_b = b;
    cfg.site_c = c;
    cfg.retrieval.eta_r = params.eta_r;
    cfg.detector = params.detector();
    cfg.arm_transmittance = std::exp(-params.swap_arm_fraction * params.L0_km / params.attenuation_length());
    return cfg;
}

std::map<ModeLabel, ModeLabel> move_site(uint8_t from, uint8_t to) {
    std::map<ModeLabel, ModeLabel> m;
    for (auto e : {Ensemble::u, Ensemble::d}) {
        m[ModeLabel::atomic(from, e)] = ModeLabel::atomic(to, e);
    }
    return m;
}

// Re-expresses every branch under a new excitation bound (raising it keeps all amplitudes).
BranchEnsemble rebound(const BranchEnsemble &state, int n_max) {
    BranchEnsemble out;
    for (const auto &b : state.branches()) {
        PureState s(b.state.modes(), n_max);
        for (const auto &[occ, a] : b.state.amplitudes()) {
            s.add(occ, a);
        }
        if (!s.is_zero()) {
            out.add(b.weight, s);
        }
    }
    return out;
}

// Swaps two copies of `pair` (sites 0-1) through sites 1 and 2; the result lives on sites 0-1.
std::pair<BranchEnsemble, double> swap_copies(const BranchEnsemble &pair, const RepeaterParams &params) {
    auto right = relabel(relabel(pair, move_site(1, 3)), move_site(0, 2));
    auto [mix, p] = accepted_mixture(bsm2(pair, right, swap_station(params, 1, 2)));
    if (mix.empty()) {
        throw std::domain_error("swapping station never accepts for these inputs");
    }
    return {relabel(mix, move_site(3, 1)), p};
}

LevelReport report(int level, const BranchEnsemble &state, double p) {
    LevelReport r;
    r.level = level;
    r.sectors = sector_report(state);
    r.station_probability = p;
    return r;
}

std::pair<BranchEnsemble, double> generation_output(const RepeaterParams &params, int n_max) {
    EnsembleParams ep;
    ep.chi = params.chi_value();
    ep.truncation_order = params.truncation_order;
    Bsm1Config cfg;
    cfg.link_transmittance = params.link_transmittance();
    cfg.detector = params.detector();
    return accepted_mixture(bsm1(write_memory_qubit(ep, 0, n_max), write_memory_qubit(ep, 1, n_max), cfg));
}

}  // namespace

double qrep::swap_success_prob(const PairState &pair, const RepeaterParams &params, SwapModel model) {
    if (model == SwapModel::approx) {
        return swap_success_prob_approx(params);
    }
    return evolve_coefficients(pair, params).station_probability;
}

LevelReport qrep::evolve_coefficients(const PairState &pair, const RepeaterParams &params) {
    auto [mix, p] = swap_copies(effective_pair(pair, 0, 1, params.n_max), params);
    auto r = report(0, mix, p);
    r.sectors.pair.span = 2 * pair.span;
    return r;
}

std::vector<LevelReport> qrep::evolve_coefficients_microscopic(
    const RepeaterParams &params, int levels, const ChainOptions &options) {
    auto [state, p] = generation_output(params, options.station_n_max);
    std::vector<LevelReport> out{report(0, state, p)};
    for (int j = 1; j <= levels; j++) {
        auto kept = rebound(truncated(state, options.pair_truncation), options.station_n_max);
        std::tie(state, p) = swap_copies(kept.normalized().compacted(), params);
        out.push_back(report(j, state, p));
        out.back().sectors.pair.span = 1 << j;
    }
    return out;
}

ChainPlan qrep::plan_chain(const RepeaterParams &params) {
    params.validate();
    ChainPlan plan;
    plan.T_cc = params.T_cc();
    plan.p_gen = generation_probability(params);
    if (plan.p_gen <= 0) {
        throw std::domain_error("generation probability is zero");
    }
    plan.p_swap.assign((size_t)params.j_max + 1, 0.0);

    PurifyConfig pcfg;
    pcfg.retrieval.eta_r = params.eta_r;
    pcfg.detector = params.detector();

    // Level 0 keeps its microscopic two-excitation terms; later levels go through the coarse
    // description, which only has the p2/p1/p0 sectors.
    auto [gen, p_gen_station] = generation_output(params, params.n_max);
    (void)p_gen_station;
    PairState pair = classify(gen);
    bool fidelity_set = false;
    auto enter_purification = [&](int level) {
        if (!fidelity_set && (params.rounds_at(level) > 0 || level == params.j_max)) {
            pair.F = params.F0;
            fidelity_set = true;
        }
        for (int r = 0; r < params.rounds_at(level); r++) {
            auto e = effective_pair(pair, 0, 1, params.n_max);
            auto res = purify(e, e, pcfg);
            if (res.success_probability <= 0) {
                throw std::domain_error("purification never succeeds for these inputs");
            }
            PurificationStep step{level, res.success_probability, res.pair};
            step.pair.span = pair.span;
            plan.purification.push_back(step);
            pair = step.pair;
        }
    };
    enter_purification(0);
    for (int j = 1; j <= params.j_max; j++) {
        LevelReport next;
        if (j == 1 && params.rounds_at(0) == 0) {
            auto [mix, p] = swap_copies(gen, params);
            next = report(1, mix, p);
            next.sectors.pair.span = 2;
        } else {
            next = evolve_coefficients(pair, params);
        }
        plan.p_swap[(size_t)j] =
            params.swap_model == SwapModel::approx ? swap_success_prob_approx(params) : next.station_probability;
        pair = next.sectors.pair;
        enter_purification(j);
    }
    plan.final_pair = pair;
    return plan;
}
