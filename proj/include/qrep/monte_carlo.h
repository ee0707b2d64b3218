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

#ifndef QREP_MONTE_CARLO_H
#define QREP_MONTE_CARLO_H

#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

#include "qrep/repeater.h"

namespace qrep {

struct TrialRecord {
    uint64_t trial = 0;
    double T_total_s = 0;
    double final_F = 0;
    PairState pair;
    uint64_t n_generation_attempts = 0;
    uint64_t n_swap_failures = 0;
    uint64_t purification_successes = 0;
};

struct MonteCarloSummary {
    uint64_t trials = 0;
    double mean_T = 0;
    double median_T = 0;
    /// Standard error of mean_T.
    double sem_T = 0;
    double mean_F = 0;
    double prob_F_at_least = 0;
    double F_threshold = 0.95;
    double mean_generation_attempts = 0;
    double mean_swap_failures = 0;
};

/// Small deterministic generator: splitmix64-seeded mt19937_64 with hand-rolled draws so that
/// streams do not depend on the standard library's distribution implementations.
class TrialRng {
   public:
    TrialRng(uint64_t seed, uint64_t trial);
    /// Uniform in (0, 1].
    double uniform();
    bool bernoulli(double p);
    /// Number of Bernoulli(p) attempts up to and including the first success.
    uint64_t geometric(double p);

   private:
    std::mt19937_64 engine_;
};

uint64_t splitmix64(uint64_t x);

/// Samples `trials` runs of the nested protocol described by `plan`. Trial k uses its own stream
/// derived from (seed, k), so results do not depend on execution order.
std::vector<TrialRecord> monte_carlo(const ChainPlan &plan, const RepeaterParams &params, uint64_t trials);

MonteCarloSummary summarize(const std::vector<TrialRecord> &records, double F_threshold = 0.95);

void write_csv(std::ostream &out, const std::vector<TrialRecord> &records);

}  // namespace qrep

#endif
