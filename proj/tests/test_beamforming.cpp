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

#include <algorithm>
#include <cmath>

#include "eerelay/beamforming.hpp"
#include "oracle_values.hpp"

using namespace eerelay;

namespace {

// Two relay dimensions, lambda_t = (2, 1), b = 0.1, c = 0.5, P_c = b, so the
// relay budget c P reaches the power cap P exactly.
BeamInstanceH scan_instance(double p_watts) {
    BeamInstanceH in;
    in.lam_c = RVector::Ones(2);
    in.lam_t = RVector{{2.0, 1.0}};
    in.b = 0.1;
    in.c = 0.5;
    in.d = (in.lam_t.cwiseInverse().array() + in.c).matrix();
    in.p_s_max = 1.0;
    in.p_c = 0.1;
    in.p_r_max = relay_budget_for_cap(in, p_watts);
    return in;
}

BeamInstanceG symmetric_g(double p_relay) {
    BeamInstanceG in;
    in.lam_r_g = RVector::Ones(2);
    in.lam_t_g_eigs = RVector{{1.0, 0.5}};
    in.lam_a = in.lam_t_g_eigs.cwiseInverse();
    in.lam_h = RVector{{2.0, 1.0}};
    in.b = 0.2;
    in.d = ((in.lam_a.array() * in.lam_h.array()).inverse() + 1.0).matrix();
    in.p_s_max = 10.0;
    in.p_c = 0.5;
    in.p_r_max = p_relay;
    return in;
}

}  // namespace

TEST_CASE("power cap takes the tighter of the two budgets") {
    auto in = scan_instance(0.3);
    CHECK(p_cap_h(in) == doctest::Approx(0.3).epsilon(1e-14));
    in.p_s_max = 0.1;  // source side now binds: 0.1 * lambda_t1
    CHECK(p_cap_h(in) == doctest::Approx(0.2).epsilon(1e-14));
    in.p_r_max = in.b - in.p_c - 1.0;
    CHECK_THROWS_AS(p_cap_h(in), ParameterError);
    auto g = symmetric_g(2.0);
    CHECK(p_cap_g(g) == doctest::Approx(2.0 + 0.5 - 0.2).epsilon(1e-14));
}

TEST_CASE("condition matches the quadrature values") {
    const double dbw[] = {-15.0, -10.0, -5.0, 0.0};
    const double ref[] = {oracle_values::kBeamLhsM15, oracle_values::kBeamLhsM10, oracle_values::kBeamLhsM5,
                          oracle_values::kBeamLhs0};
    Rng rng(21);
    for (int k = 0; k < 4; ++k) {
        auto v = fp_condition_h(scan_instance(from_dbw(dbw[k])), 200000, rng);
        CHECK(std::abs(v.condition_lhs - ref[k]) <= 3.0 * v.mc_std_error);
        CHECK(v.p_cap == doctest::Approx(from_dbw(dbw[k])));
    }
}

TEST_CASE("vanishing power makes the condition tight") {
    Rng rng(22);
    auto v = fp_condition_h(scan_instance(from_dbw(-40.0)), 10000, rng);
    CHECK(std::abs(v.condition_lhs - 1.0) < 1e-3);
}

TEST_CASE("C constants: zero without a channel, ordered otherwise") {
    Rng rng(23);
    auto in = scan_instance(0.5);
    in.lam_c = RVector::Zero(2);
    auto z = c_constants_h(in, 100, rng);
    CHECK(z.value.cwiseAbs().maxCoeff() == 0.0);
    auto c = c_constants_h(scan_instance(0.5), 1000, rng);
    CHECK(c.value(0) >= c.value(1));
    auto cg = c_constants_g(symmetric_g(2.0), 1000, rng);
    CHECK(cg.value(0) >= cg.value(1));
}

TEST_CASE("standard error shrinks with the square root of the sample count") {
    Rng a(24), b(25);
    auto small = fp_condition_h(scan_instance(1.0), 20000, a);
    auto large = fp_condition_h(scan_instance(1.0), 80000, b);
    double ratio = small.mc_std_error / large.mc_std_error;
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
}

TEST_CASE("shared draws give the same verdict as fresh draws of the same seed") {
    Rng a(26), b(26);
    auto in = scan_instance(0.2);
    auto v1 = fp_condition_h(in, 5000, a);
    auto v2 = fp_condition_h(in, draw_f1_h(in.lam_c, 5000, b));
    CHECK(v1.condition_lhs == v2.condition_lhs);
}

TEST_CASE("threshold scan is monotone on the reference instance") {
    Rng rng(27);
    std::vector<double> grid;
    for (double db = -15.0; db <= 3.0 + 1e-9; db += 0.5) grid.push_back(from_dbw(db));
    auto s = threshold_scan_h(scan_instance(1.0), grid, 100000, rng);
    CHECK(s.monotonicity_violations == 0);
    REQUIRE(s.threshold_index >= 0);
    CHECK(std::abs(to_dbw(s.threshold_p) - oracle_values::kBeamFlipDbw) <= 0.5 + 1e-9);
    std::vector<double> down = grid;
    std::reverse(down.begin(), down.end());
    CHECK_THROWS_AS(threshold_scan_h(scan_instance(1.0), down, 10, rng), ParameterError);
}

TEST_CASE("verdict agrees with the brute-force solve away from the flip") {
    Rng mc(28), saa(29);
    auto bank = beam_grams_h(scan_instance(1.0), 20000, saa);
    for (double db : {-15.0, 0.0, 3.0}) {
        auto in = scan_instance(from_dbw(db));
        auto v = fp_condition_h(in, 100000, mc);
        auto s = solve_beam_h(in, bank);
        CHECK(v.fp_optimal == (s.rank_one && s.full_power));
        CHECK(s.lambda.sum() <= p_cap_h(in) * (1 + 1e-9));
    }
}

TEST_CASE("correlated-relay instance: verdict and solve agree at low relay power") {
    Rng mc(30), saa(31);
    auto in = symmetric_g(0.05);
    auto bank = beam_grams_g(in, 5000, saa);
    auto v = fp_condition_g(in, 20000, mc);
    auto s = solve_beam_g(in, bank);
    CHECK(v.c2_sign != 0);
    CHECK(v.fp_optimal == (s.rank_one && s.full_power));
}

TEST_CASE("single stream uses the back-off condition") {
    Rng rng(32);
    auto in = scan_instance(0.5);
    in.lam_t = RVector::Constant(1, 2.0);
    in.d = RVector::Constant(1, 1.0);
    auto v = fp_condition_h(in, 1000, rng);
    CHECK(v.c2_sign == 0);
    CHECK(std::isfinite(v.condition_lhs));
    auto g = symmetric_g(1.0);
    g.lam_h = RVector::Constant(1, 2.0);
    g.lam_t_g_eigs = RVector::Constant(1, 1.0);
    g.lam_a = RVector::Constant(1, 1.0);
    g.lam_r_g = RVector::Ones(2);
    g.d = RVector::Constant(1, 1.5);
    auto vg = fp_condition_g(g, 1000, rng);
    CHECK(vg.c2_sign == 0);
}

TEST_CASE("dBW conversions round trip") {
    CHECK(to_dbw(from_dbw(-9.0)) == doctest::Approx(-9.0).epsilon(1e-14));
    CHECK(from_dbw(0.0) == 1.0);
}
