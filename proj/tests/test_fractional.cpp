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
#include <numbers>

#include "eerelay/fractional.hpp"
#include "eerelay/oracle.hpp"
#include "eerelay/rng.hpp"
#include "oracle_values.hpp"

using namespace eerelay;

namespace {

// sum_i log2(1 + g_i x_i)
Objective log_sum(const RVector& gains) {
    Objective o;
    o.value = [gains](const RVector& x) {
        double v = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) v += std::log2(1.0 + gains(i) * x(i));
        return v;
    };
    o.value_grad = [gains](const RVector& x, RVector& g) {
        g.resize(x.size());
        double v = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            v += std::log2(1.0 + gains(i) * x(i));
            g(i) = gains(i) / (1.0 + gains(i) * x(i)) / std::numbers::ln2;
        }
        return v;
    };
    return o;
}

ConstraintSet random_caps(int n, int ncaps, Rng& rng) {
    ConstraintSet cs;
    cs.dimension = n;
    for (int k = 0; k < ncaps; ++k) {
        RVector w(n);
        for (int i = 0; i < n; ++i) w(i) = 0.1 + 2.0 * rng.uniform();
        cs.caps.push_back({w, 0.5 + 3.0 * rng.uniform()});
    }
    return cs;
}

}  // namespace

TEST_CASE("projection is feasible, idempotent and satisfies the obtuse-angle test") {
    Rng rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + trial % 4;
        ConstraintSet cs = random_caps(n, 1 + trial % 2, rng);
        RVector x(n);
        for (int i = 0; i < n; ++i) x(i) = 6.0 * rng.normal();
        RVector p = project_feasible(x, cs);
        CHECK(caps_satisfied(p, cs, 1e-9));
        CHECK((project_feasible(p, cs) - p).norm() < 1e-9);
        for (int k = 0; k < 20; ++k) {
            RVector z = sample_feasible(cs, rng);
            CHECK((x - p).dot(z - p) <= 1e-7 * std::max(1.0, x.norm() * x.norm()));
        }
    }
}

TEST_CASE("projection of a feasible point is the point") {
    ConstraintSet cs;
    cs.dimension = 2;
    cs.caps.push_back({RVector::Ones(2), 3.0});
    RVector x(2);
    x << 1.0, 1.5;
    CHECK((project_feasible(x, cs) - x).norm() == 0.0);
}

TEST_CASE("scalar ratio matches the frozen optimum") {
    FractionalProblem p;
    p.numerator = log_sum(RVector::Ones(1));
    p.den_coef = RVector::Ones(1);
    p.den_offset = 5.0;
    p.cs.dimension = 1;
    p.cs.caps.push_back({RVector::Ones(1), 10.0});
    auto r = dinkelbach_maximize(p, RVector::Constant(1, 1.0));
    CHECK(r.converged);
    CHECK(r.x(0) == doctest::Approx(oracle_values::kScalarRatioArgmax).epsilon(1e-5));
    CHECK(r.mu == doctest::Approx(oracle_values::kScalarRatioMax).epsilon(1e-10));
    CHECK(std::abs(r.f_of_mu) <= 1e-6);
    for (size_t k = 1; k < r.mu_trace.size(); ++k) CHECK(r.mu_trace[k] > r.mu_trace[k - 1]);
}

TEST_CASE("rate target pushes the solution to the constraint") {
    FractionalProblem p;
    p.numerator = log_sum(RVector::Ones(1));
    p.den_coef = RVector::Ones(1);
    p.den_offset = 5.0;
    p.cs.dimension = 1;
    p.cs.caps.push_back({RVector::Ones(1), 10.0});
    p.cs.qos = QosConstraint{std::nullopt, 3.0};  // needs p >= 7
    auto r = dinkelbach_maximize(p, RVector::Constant(1, 1.0));
    CHECK(r.qos_met);
    CHECK(r.x(0) == doctest::Approx(7.0).epsilon(1e-5));
    CHECK(r.mu == doctest::Approx(3.0 / 12.0).epsilon(1e-5));

    p.cs.qos->threshold = 5.0;  // log2(11) < 5: unattainable
    auto bad = dinkelbach_maximize(p, RVector::Constant(1, 1.0));
    CHECK_FALSE(bad.qos_met);
}

TEST_CASE("two-dimensional problems agree with grid search") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        FractionalProblem p;
        RVector gains(2);
        gains << 0.5 + 4.0 * rng.uniform(), 0.5 + 4.0 * rng.uniform();
        p.numerator = log_sum(gains);
        p.den_coef = RVector::Constant(2, 1.0);
        p.den_coef(1) = 0.5 + rng.uniform();
        p.den_offset = 0.5 + 2.0 * rng.uniform();
        p.cs = random_caps(2, 2, rng);
        auto r = dinkelbach_maximize(p, RVector::Zero(2));
        auto g = grid_search_fractional(p, 200);
        CHECK(r.mu >= g.value - 1e-9);
        CHECK(std::abs(r.mu - g.value) <= 1e-3 * g.value);
    }
}

TEST_CASE("subproblem solver errors and infeasible starts") {
    FractionalProblem p;
    p.numerator = log_sum(RVector::Ones(2));
    p.den_coef = RVector::Ones(2);
    p.den_offset = 1.0;
    p.cs.dimension = 2;
    p.cs.caps.push_back({RVector::Ones(2), 1.0});
    CHECK_THROWS_AS(dinkelbach_maximize(p, RVector::Constant(2, 5.0)), SolverFailure);
    CHECK_THROWS_AS(dinkelbach_maximize(p, RVector::Zero(3)), ContractViolation);
}

TEST_CASE("subproblem reaches a stationary point") {
    Objective o = log_sum(RVector::Constant(3, 2.0));
    ConstraintSet cs;
    cs.dimension = 3;
    cs.caps.push_back({RVector::Ones(3), 3.0});
    auto r = solve_subproblem(o, cs, RVector::Zero(3));
    CHECK(r.converged);
    // Symmetric concave objective: equal split.
    for (int i = 0; i < 3; ++i) CHECK(r.x(i) == doctest::Approx(1.0).epsilon(1e-6));
}
