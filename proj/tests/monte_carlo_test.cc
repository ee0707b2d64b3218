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

#include <cmath>
#include <sstream>

#include "qrep/monte_carlo.h"

using namespace qrep;

namespace {

RepeaterParams small_chain(int j_max) {
    RepeaterParams p;
    p.j_max = j_max;
    p.seed = 42;
    return p;
}

ChainPlan fixed_plan(const RepeaterParams &p, double p_gen, double p_swap) {
    ChainPlan plan;
    plan.T_cc = p.T_cc();
    plan.p_gen = p_gen;
    plan.p_swap.assign((size_t)p.j_max + 1, p_swap);
    plan.final_pair.p2 = 1;
    plan.final_pair.F = 1;
    return plan;
}

}  // namespace

TEST_CASE("rng draws") {
    TrialRng a(1, 0), b(1, 0), c(1, 1);
    double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x != c.uniform());
    CHECK(x > 0);
    CHECK(x <= 1);
    TrialRng g(3, 0);
    CHECK(g.geometric(1.0) == 1);
    CHECK_THROWS(g.geometric(0.0));
}

TEST_CASE("certain events reproduce the deterministic recursion") {
    auto p = small_chain(5);
    auto plan = fixed_plan(p, 1, 1);
    double expected = plan.T_cc;
    for (int j = 1; j <= p.j_max; j++) {
        expected = connection_time(expected, 1, j, plan.T_cc);
    }
    for (const auto &r : monte_carlo(plan, p, 5)) {
        CHECK(r.T_total_s == doctest::Approx(expected).epsilon(1e-14));
        CHECK(r.n_swap_failures == 0);
    }
}

TEST_CASE("generation attempts are geometric") {
    auto p = small_chain(0);
    double p_gen = 0.01;
    auto s = summarize(monte_carlo(fixed_plan(p, p_gen, 1), p, 10000));
    double sigma = std::sqrt((1 - p_gen) / (p_gen * p_gen) / 10000);
    CHECK(std::abs(s.mean_generation_attempts - 1 / p_gen) < 3 * sigma);
}

TEST_CASE("synchronous mean matches the recursion") {
    auto p = small_chain(3);
    p.chi = 0.05;
    auto plan = plan_chain(p);
    std::vector<double> ps(plan.p_swap.begin() + 1, plan.p_swap.end());
    double expect = timing_recursion(p, ps).T_tot;
    auto s = summarize(monte_carlo(plan, p, 4000));
    CHECK(std::abs(s.mean_T - expect) < 4 * s.sem_T);
}

TEST_CASE("independent halves take longer than lockstep halves") {
    auto p = small_chain(3);
    p.chi = 0.05;
    auto plan = plan_chain(p);
    double sync = summarize(monte_carlo(plan, p, 500)).mean_T;
    p.timing_model = TimingModel::independent;
    double indep = summarize(monte_carlo(plan, p, 500)).mean_T;
    CHECK(indep > sync);
}

TEST_CASE("trials do not depend on how many are run") {
    auto p = small_chain(2);
    p.chi = 0.05;
    auto plan = plan_chain(p);
    auto many = monte_carlo(plan, p, 30);
    auto few = monte_carlo(plan, p, 10);
    for (size_t k = 0; k < few.size(); k++) {
        CHECK(few[k].T_total_s == many[k].T_total_s);
        CHECK(few[k].final_F == many[k].final_F);
    }
    std::ostringstream a, b;
    write_csv(a, monte_carlo(plan, p, 20));
    write_csv(b, monte_carlo(plan, p, 20));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind(
              "trial,T_total_s,final_F,p2,p1,p0,ph,n_generation_attempts,n_swap_failures,purification_successes\n",
              0) == 0);
    p.seed = 43;
    std::ostringstream c;
    write_csv(c, monte_carlo(plan, p, 20));
    CHECK(a.str() != c.str());
}

TEST_CASE("summary") {
    std::vector<TrialRecord> r(4);
    for (size_t k = 0; k < r.size(); k++) {
        r[k].T_total_s = (double)k + 1;
        r[k].final_F = k < 3 ? 0.97 : 0.5;
    }
    auto s = summarize(r);
    CHECK(s.mean_T == 2.5);
    CHECK(s.median_T == 2.5);
    CHECK(s.prob_F_at_least == 0.75);
    CHECK(s.sem_T == doctest::Approx(std::sqrt(5.0 / 3 / 4)));
    CHECK_THROWS(monte_carlo(ChainPlan{}, small_chain(2), 0));
}
