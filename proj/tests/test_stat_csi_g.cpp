// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <doctest.h>

#include <cmath>

#include "eerelay/stat_csi_g.hpp"

using namespace eerelay;

namespace {

LinkBudget budget_db(double snr_db) {
    LinkBudget b;
    b.p_source_max = b.p_relay_max = std::pow(10.0, snr_db / 10.0);
    return b;
}

KroneckerModel model(double rho, int nd, int nr) { return {exp_correlation(rho, nd), exp_correlation(rho, nr)}; }

RVector random_positive(int n, Rng& rng, double scale) {
    RVector v(n);
    for (int i = 0; i < n; ++i) v(i) = scale * (0.1 + rng.uniform());
    return v;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("SAA gradients match central differences") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto st = optimal_structure_g(rng.complex_gaussian(3, 3), model(0.5, 3, 3), budget_db(10.0), 50, rng);
        const auto& in = st.inst;
        int r = in.n_streams;
        RVector q = random_positive(r, rng, 3.0), a = random_positive(r, rng, 1.0);
        RVector gq, ga;
        saa_numerator_g(in, q, a, &gq, &ga);
        const double h = 1e-6;
        for (int i = 0; i < r; ++i) {
            RVector up = q, dn = q;
            up(i) += h;
            dn(i) -= h;
            CHECK(rel_err((saa_numerator_g(in, up, a) - saa_numerator_g(in, dn, a)) / (2 * h), gq(i)) <= 1e-5);
            up = a;
            dn = a;
            up(i) += h;
            dn(i) -= h;
            CHECK(rel_err((saa_numerator_g(in, q, up) - saa_numerator_g(in, q, dn)) / (2 * h), ga(i)) <= 1e-5);
        }
    }
}

TEST_CASE("per-sample rates are non-negative and average to the SAA value") {
    Rng rng(12);
    auto st = optimal_structure_g(rng.complex_gaussian(3, 3), model(0.7, 3, 3), budget_db(10.0), 300, rng);
    RVector q = random_positive(st.inst.n_streams, rng, 3.0), a = random_positive(st.inst.n_streams, rng, 1.0);
    auto per = per_sample_numerator_g(st.inst, q, a);
    REQUIRE(per.size() == 300);
    double s = 0;
    for (double v : per) {
        CHECK(v >= 0.0);
        s += v;
    }
    CHECK(s / 300 == doctest::Approx(saa_numerator_g(st.inst, q, a)).epsilon(1e-12));
    CHECK(saa_gee_g(st.inst, q, a) ==
          doctest::Approx(saa_numerator_g(st.inst, q, a) / denominator_g(st.inst, q, a)).epsilon(1e-14));
}

TEST_CASE("identity correlations, 2x2, 20 dB: fast monotone convergence") {
    Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        auto st = optimal_structure_g(rng.complex_gaussian(2, 2), model(0.0, 2, 2), budget_db(20.0), 300, rng);
        auto ms = multistart(stat_g_blocks(st.inst), 3, rng);
        REQUIRE(ms.feasible);
        for (const auto& r : ms.runs) {
            CHECK(r.trace.iterations <= 30);
            for (size_t k = 1; k < r.trace.gee_per_iteration.size(); ++k)
                CHECK(r.trace.gee_per_iteration[k] >= r.trace.gee_per_iteration[k - 1] - 1e-12);
        }
        auto sol = stat_g_solution(st, ms.best.lam_q, ms.best.lam_a);
        CHECK(sol.q_powers.sum() <= st.inst.budget.p_source_max * (1 + 1e-9));
        CHECK(relay_power_g(st.inst, ms.best.lam_q, ms.best.lam_a) <= st.inst.budget.p_relay_max * (1 + 1e-9));
    }
}

TEST_CASE("rank-deficient source link is refused") {
    Rng rng(14);
    CMatrix h = rng.complex_gaussian(3, 1) * rng.complex_gaussian(1, 3);
    CHECK_THROWS_AS(optimal_structure_g(h, model(0.5, 3, 3), budget_db(10.0), 20, rng), ContractViolation);
}

TEST_CASE("errors") {
    Rng rng(15);
    CHECK_THROWS_AS(optimal_structure_g(rng.complex_gaussian(3, 3), model(0.5, 3, 3), budget_db(0), 0, rng),
                    ParameterError);
    auto st = optimal_structure_g(rng.complex_gaussian(3, 3), model(0.5, 3, 3), budget_db(0), 5, rng);
    CHECK_THROWS_AS(saa_numerator_g(st.inst, RVector::Ones(1), RVector::Ones(3)), ContractViolation);
}
