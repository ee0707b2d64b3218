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

#include "qrep/analysis.h"
#include "qrep/repeater.h"

using namespace qrep;

TEST_CASE("scaling fit") {
    std::vector<double> L{310, 630, 1270, 2550}, T;
    for (double l : L) {
        T.push_back(3.7 * std::pow(l, 2.42));
    }
    auto fit = scaling_fit(L, T);
    CHECK(std::abs(fit.slope - 2.42) < 1e-9);
    CHECK(fit.residual < 1e-9);

    CHECK_THROWS_AS(scaling_fit({1, 2, 3}, {1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(scaling_fit({1, 2, 3, 0}, {1, 2, 3, 4}), std::invalid_argument);
    CHECK_THROWS_AS(scaling_fit({1, 2, 3, 4}, {1, 2, -3, 4}), std::invalid_argument);
    CHECK_THROWS_AS(scaling_fit({5, 5, 5, 5}, {1, 2, 3, 4}), std::invalid_argument);
}

TEST_CASE("closed form scales with the expected exponent") {
    for (double p_override : {-1.0, 1.0}) {
        std::vector<double> L, T;
        double p = 0;
        for (int j = 4; j <= 7; j++) {
            RepeaterParams r;
            r.j_max = j;
            p = p_override > 0 ? p_override : swap_success_prob_approx(r);
            L.push_back(r.total_length());
            T.push_back(total_time_closed_form(r, r.total_length(), p));
        }
        CHECK(std::abs(scaling_fit(L, T).slope - scaling_exponent(p)) < 1e-6);
    }
}

TEST_CASE("stability ratio") {
    CHECK(std::abs(stability_ratio(1e-6, 3) - std::log10(3e7)) < 1e-12);
    CHECK(stability_ratio(1e-6, 3) > 7.0);
    CHECK(stability_ratio(1e-6, 3) < 8.0);
    CHECK(std::abs(stability_ratio(1e-6, 1e-7)) < 1e-12);
}

TEST_CASE("post-selected correlations ignore the unentangled sectors") {
    auto phi = ekert_check(BranchEnsemble(phi_plus(0, 1)));
    REQUIRE(phi.has_coincidences);
    CHECK(std::abs(phi.correlation_hv - 1) < 1e-9);
    CHECK(std::abs(phi.correlation_pm - 1) < 1e-9);

    PairState mix;
    mix.p2 = 0.25;
    mix.p1 = 0.5;
    mix.p0 = 0.25;
    mix.F = 1;
    auto m = ekert_check(effective_pair(mix, 0, 1));
    REQUIRE(m.has_coincidences);
    CHECK(std::abs(m.correlation_hv - 1) < 1e-9);
    CHECK(std::abs(m.correlation_pm - 1) < 1e-9);
    CHECK(std::abs(m.coincidence_hv - 0.25) < 1e-12);

    PairState single;
    single.p1 = 1;
    auto s = ekert_check(effective_pair(single, 0, 1));
    CHECK_FALSE(s.has_coincidences);
    CHECK(s.coincidence_hv == 0);

    // A fixed entangled sector with p1 and p0 swept over a grid.
    PairState ref;
    ref.p2 = 1;
    ref.F = 0.9;
    auto base = ekert_check(effective_pair(ref, 0, 1));
    for (double p2 : {0.1, 0.4, 0.7}) {
        for (double frac : {0.0, 0.3, 1.0}) {
            PairState q;
            q.p2 = p2;
            q.p1 = (1 - p2) * frac;
            q.p0 = 1 - p2 - q.p1;
            q.F = 0.9;
            auto r = ekert_check(effective_pair(q, 0, 1));
            CHECK(std::abs(r.correlation_hv - base.correlation_hv) < 1e-9);
            CHECK(std::abs(r.correlation_pm - base.correlation_pm) < 1e-9);
        }
    }
}
