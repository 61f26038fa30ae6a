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

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "eerelay/alternating.hpp"
#include "eerelay/fractional.hpp"
#include "eerelay/rng.hpp"

namespace eerelay {

/// Cartesian grid, points_per_dim points per axis including both ends.
struct GridSpec {
    int points_per_dim = 200;
    int dims = 1;
    std::vector<std::pair<double, double>> bounds;
    /// Also evaluate, for every grid point of the first dims-1 axes, the
    /// largest feasible value of the last coordinate. Optima of these
    /// problems usually sit on a power cap, which a plain grid only
    /// approaches to within one step.
    bool include_boundary = true;
};

inline constexpr double kGridPointGuard = 1e8;

struct GridResult {
    RVector best;
    double value = 0.0;
    long feasible_points = 0;
    bool found = false;
};

/// Exhaustive search over the feasible points of a grid (caps and, when
/// present, the QoS constraint). Ties go to the lowest grid index.
GridResult grid_search_gee(const std::function<double(const RVector&)>& objective, const ConstraintSet& cs,
                           const GridSpec& grid);

/// Grid over [0, max feasible x_i]^n for a fractional problem, maximizing
/// the ratio.
GridResult grid_search_fractional(const FractionalProblem& prob, int points_per_dim, bool include_boundary = true);

/// Outcome of a falsification run.
struct LemmaReport {
    long trials = 0;
    long violations = 0;
    double worst_margin = 0.0;  // most negative slack seen (0 when none)
};

/// tr(T R) is at least its value for commuting T, R with opposite-ordered
/// eigenvalues. Checked for the pair and n_conjugations random unitary
/// rotations of R.
bool check_lemma1(const CMatrix& t, const CMatrix& r, Rng& rng, int n_conjugations = 100);

/// log det(I + T^{-1} R) is at least its value with same-ordered
/// eigenvalues, for the pair and its random rotations.
bool check_lemma2(const CMatrix& t, const CMatrix& r, Rng& rng, int n_conjugations = 100);

/// Concave g invariant under single sign flips: g(diag(X)) >= g(X).
/// Throws ContractViolation when g is not sign-flip symmetric at X.
bool check_lemma3(const std::function<double(const CMatrix&)>& g, const CMatrix& x);

/// Midpoint matrix concavity of f(X) = (I + M X^{-1} M^H)^{-1} over HPD
/// a, b: lambda_min(f(mid) - f(a)/2 - f(b)/2) >= -1e-9.
bool check_lemma4(const CMatrix& m, const CMatrix& a, const CMatrix& b);

/// Same for f(Lambda) = Lambda (nu I + L Lambda)^{-1} on diagonal PSD
/// inputs (given as vectors).
bool check_lemma5(double nu, const RVector& l, const RVector& a, const RVector& b);

/// d/dx log det(M1 + x M2) = tr((M1 + x M2)^{-1} M2) against a central
/// difference with h = 1e-6, relative tolerance 1e-5.
bool check_lemma6(const CMatrix& m1, const CMatrix& m2, double x);

CMatrix random_unitary(int n, Rng& rng);
CMatrix random_hpsd(int n, Rng& rng, double ridge = 0.0);

/// Random-trial drivers used by the falsification suite and the CLI.
LemmaReport falsify_lemma1(long trials, Rng& rng);
LemmaReport falsify_lemma2(long trials, Rng& rng);
LemmaReport falsify_lemma3(long trials, Rng& rng);
LemmaReport falsify_lemma4(long trials, Rng& rng);
LemmaReport falsify_lemma5(long trials, Rng& rng);
LemmaReport falsify_lemma6(long trials, Rng& rng);

/// Random point of {x >= 0, caps}: a uniform simplex direction scaled by a
/// uniform fraction of the largest feasible step.
RVector sample_feasible(const ConstraintSet& cs, Rng& rng);

/// Random joint point: source powers from the box/simplex, relay variable
/// feasible for the relay block at those powers.
std::pair<RVector, RVector> sample_joint_feasible(const BlockPair& bp, Rng& rng);

}  // namespace eerelay
