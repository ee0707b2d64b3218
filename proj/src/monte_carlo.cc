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

#include "qrep/monte_carlo.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

using namespace qrep;

uint64_t qrep::splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

TrialRng::TrialRng(uint64_t seed, uint64_t trial) : engine_(splitmix64(splitmix64(seed) ^ trial)) {
}

double TrialRng::uniform() {
    return (double)((engine_() >> 11) + 1) * 0x1.0p-53;
}

bool TrialRng::bernoulli(double p) {
    return uniform() <= p;
}

uint64_t TrialRng::geometric(double p) {
    if (!(p > 0)) {
        throw std::domain_error("geometric draw needs p > 0");
    }
    if (p >= 1) {
        return 1;
    }
    double n = std::ceil(std::log(uniform()) / std::log1p(-p));
    return n < 1 ? 1 : (uint64_t)n;
}

namespace {

class Sampler {
   public:
    Sampler(const ChainPlan &plan, const RepeaterParams &params, TrialRng &rng, TrialRecord &record)
        : plan_(plan), params_(params), rng_(rng), record_(record) {
        rounds_.assign((size_t)params.j_max + 1, {});
        for (const auto &step : plan.purification) {
            rounds_[(size_t)step.level].push_back(step.success_probability);
        }
    }

    double finished_pair(int level) {
        return pair(level, (int)rounds_[(size_t)level].size());
    }

   private:
    // Time to hold one pair at `level` that has been through `round` purification rounds there.
    double pair(int level, int round) {
        double comm = std::ldexp(plan_.T_cc, level);
        double t = 0;
        if (round > 0) {
            // Two pairs are consumed per attempt; a failure discards both.
            double p = rounds_[(size_t)level][(size_t)round - 1];
            while (true) {
                t += pair(level, round - 1) + pair(level, round - 1) + comm;
                if (rng_.bernoulli(p)) {
                    record_.purification_successes++;
                    return t;
                }
            }
        }
        if (level == 0) {
            uint64_t n = rng_.geometric(plan_.p_gen);
            record_.n_generation_attempts += n;
            return (double)n * plan_.T_cc;
        }
        double p = plan_.p_swap[(size_t)level];
        while (true) {
            double child = finished_pair(level - 1);
            if (params_.timing_model == TimingModel::independent) {
                child = std::max(child, finished_pair(level - 1));
            }
            t += child + comm;
            if (rng_.bernoulli(p)) {
                return t;
            }
            record_.n_swap_failures++;
        }
    }

    const ChainPlan &plan_;
    const RepeaterParams &params_;
    TrialRng &rng_;
    TrialRecord &record_;
    std::vector<std::vector<double>> rounds_;
};

}  // namespace

std::vector<TrialRecord> qrep::monte_carlo(const ChainPlan &plan, const RepeaterParams &params, uint64_t trials) {
    if (trials < 1) {
        throw std::invalid_argument("trials must be at least 1");
    }
    if ((int)plan.p_swap.size() != params.j_max + 1) {
        throw std::invalid_argument("chain plan does not match j_max");
    }
    for (size_t j = 1; j < plan.p_swap.size(); j++) {
        if (!(plan.p_swap[j] > 0 && plan.p_swap[j] <= 1)) {
            throw std::domain_error("swap probabilities must lie in (0, 1]");
        }
    }
    const PairState &fin = plan.final_pair;
    double covered = fin.p2 + fin.p1 + fin.p0 + fin.ph;
    double p_entangled = covered > 0 ? fin.p2 / covered : 0;

    std::vector<TrialRecord> out;
    out.reserve(trials);
    for (uint64_t k = 0; k < trials; k++) {
        TrialRecord rec;
        rec.trial = k;
        rec.pair = fin;
        TrialRng rng(params.seed, k);
        Sampler sampler(plan, params, rng, rec);
        rec.T_total_s = sampler.finished_pair(params.j_max);
        rec.final_F = rng.bernoulli(p_entangled) ? fin.F : 0.0;
        out.push_back(rec);
    }
    return out;
}

MonteCarloSummary qrep::summarize(const std::vector<TrialRecord> &records, double F_threshold) {
    MonteCarloSummary s;
    s.F_threshold = F_threshold;
    s.trials = records.size();
    if (records.empty()) {
        return s;
    }
    std::vector<double> times;
    double sum = 0, sum_sq = 0;
    uint64_t hits = 0;
    for (const auto &r : records) {
        times.push_back(r.T_total_s);
        sum += r.T_total_s;
        sum_sq += r.T_total_s * r.T_total_s;
        s.mean_F += r.final_F;
        s.mean_generation_attempts += (double)r.n_generation_attempts;
        s.mean_swap_failures += (double)r.n_swap_failures;
        hits += r.final_F >= F_threshold;
    }
    double n = (double)records.size();
    s.mean_T = sum / n;
    double var = records.size() > 1 ? std::max(0.0, (sum_sq - n * s.mean_T * s.mean_T) / (n - 1)) : 0;
    s.sem_T = std::sqrt(var / n);
    std::sort(times.begin(), times.end());
    size_t mid = times.size() / 2;
    s.median_T = times.size() % 2 ? times[mid] : (times[mid - 1] + times[mid]) / 2;
    s.mean_F /= n;
    s.mean_generation_attempts /= n;
    s.mean_swap_failures /= n;
    s.prob_F_at_least = (double)hits / n;
    return s;
}

void qrep::write_csv(std::ostream &out, const std::vector<TrialRecord> &records) {
    out << "trial,T_total_s,final_F,p2,p1,p0,ph,n_generation_attempts,n_swap_failures,purification_successes\n";
    char buf[512];
    for (const auto &r : records) {
        std::snprintf(
            buf,
            sizeof(buf),
            "%llu,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%llu,%llu,%llu\n",
            (unsigned long long)r.trial,
            r.T_total_s,
            r.final_F,
            r.pair.p2,
            r.pair.p1,
            r.pair.p0,
            r.pair.ph,
            (unsigned long long)r.n_generation_attempts,
            (unsigned long long)r.n_swap_failures,
            (unsigned long long)r.purification_successes);
        out << buf;
    }
}
