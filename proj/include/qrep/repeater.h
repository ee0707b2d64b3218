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

#ifndef QREP_REPEATER_H
#define QREP_REPEATER_H

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrep/stations.h"

namespace qrep {

enum class SwapModel {
    /// eta_r^2 eta^2 e^{-L0/L_att}, the same at every level.
    approx,
    /// Accepted-coincidence probability of the swapping station fed with the level's pair state.
    microscopic,
};

enum class TimingModel {
    /// Both halves of a level are produced in lockstep; one child sample stands for both. The mean
    /// reproduces the connection-time recursion exactly.
    synchronous,
    /// The two halves are sampled independently and the swap waits for the slower one.
    independent,
};

std::string to_string(SwapModel m);
std::string to_string(TimingModel m);
SwapModel parse_swap_model(const std::string &s);
TimingModel parse_timing_model(const std::string &s);

struct RepeaterParams {
    /// Excitation probability per write. Zero selects L0 / L.
    double chi = 0;
    double eta = 0.99;
    double eta_r = 0.98;
    double L0_km = 10;
    std::optional<double> L_att_km;
    std::optional<double> loss_db_per_km = 0.1;
    double c_km_per_s = 3e5;
    int j_max = 6;
    /// Levels at which one purification round runs; a level listed twice gets two nested rounds.
    std::vector<int> purification_rounds;
    /// Entangled-sector fidelity of the pairs entering the first purification round (or of the
    /// final pair when no round is scheduled).
    double F0 = 1;
    bool number_resolving = false;
    int n_max = 4;
    int truncation_order = 2;
    uint64_t seed = 1;
    SwapModel swap_model = SwapModel::approx;
    TimingModel timing_model = TimingModel::synchronous;
    /// Distance from each inner memory to the swapping station, in units of L0.
    double swap_arm_fraction = 0.5;

    void validate() const;
    double attenuation_length() const;
    /// e^{-L0/L_att}.
    double link_transmittance() const;
    /// (2^{j_max+1} - 1) L0.
    double total_length() const;
    double chi_value() const;
    double T_cc() const;
    DetectorModel detector() const;
    /// Number of purification rounds scheduled at `level`.
    int rounds_at(int level) const;
};

/// 10 / (loss_db_per_km ln 10).
double attenuation_length(double loss_db_per_km);

/// T_cc / (chi^2 eta^2 e^{-L0/L_att}).
double generation_time(const RepeaterParams &params);

/// Per-attempt link generation probability, T_cc / T0.
double generation_probability(const RepeaterParams &params);

/// eta_r^2 eta^2 e^{-L0/L_att}.
double swap_success_prob_approx(const RepeaterParams &params);

/// Swap probability for two copies of `pair`, using `model`.
double swap_success_prob(const PairState &pair, const RepeaterParams &params, SwapModel model);

/// (T_prev + 2^j T_cc) / p.
double connection_time(double T_prev, double p, int j, double T_cc);

struct TimingResult {
    double T0 = 0;
    /// T_sj for j = 1..j_max.
    std::vector<double> T_sj;
    double T_tot = 0;
    std::vector<double> p_sj;
    PairState final_pair;
    double scenario_success_prob = 0;
};

/// Iterates connection_time from T0 over the given per-level probabilities.
TimingResult timing_recursion(const RepeaterParams &params, const std::vector<double> &p_sj);

/// T0 prod_j 1/p_j.
double total_time_product_form(double T0, const std::vector<double> &p_sj);

/// (T_cc / chi^2) e^{L0/L_att} (L/L0)^{log2(1/p)}.
double total_time_closed_form(const RepeaterParams &params, double L_km, double p);

/// 2 + log2(1/p), the distance exponent when chi = L0/L.
double scaling_exponent(double p);

struct LevelReport {
    int level = 0;
    SectorReport sectors;
    /// Acceptance probability of the station that produced this level.
    double station_probability = 0;
};

/// One swap level on the coarse-grained description: two copies of effective_pair(pair) meet at
/// the swapping station.
LevelReport evolve_coefficients(const PairState &pair, const RepeaterParams &params);

struct ChainOptions {
    /// Excitations kept per pair between levels.
    int pair_truncation = 3;
    /// Joint bound inside the swapping station.
    int station_n_max = 6;
};

/// Full microscopic composition: level 0 is the corrected generation output, each later level the
/// corrected swap output of two copies of the previous level, truncated between levels.
std::vector<LevelReport> evolve_coefficients_microscopic(
    const RepeaterParams &params, int levels, const ChainOptions &options = {});

struct PurificationStep {
    int level = 0;
    double success_probability = 0;
    PairState pair;
};

/// Everything the timing simulation needs, computed once per parameter set.
struct ChainPlan {
    double T_cc = 0;
    double p_gen = 0;
    /// p_swap[j] for j = 1..j_max; index 0 unused.
    std::vector<double> p_swap;
    std::vector<PurificationStep> purification;
    PairState final_pair;
};

ChainPlan plan_chain(const RepeaterParams &params);

}  // namespace qrep

#endif
