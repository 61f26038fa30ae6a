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
#include <optional>
#include <stdexcept>
#include <vector>

#include "eerelay/matops.hpp"

namespace eerelay {

/// Concave function with gradient. value_grad writes the gradient into its
/// second argument and returns the value. The optional curvature callback
/// returns |diag of the Hessian|; the subproblem solver uses it to rescale
/// the variables, which matters when stream powers differ by orders of
/// magnitude.
struct Objective {
    std::function<double(const RVector&)> value;
    std::function<double(const RVector&, RVector&)> value_grad;
    std::function<RVector(const RVector&)> curvature;
};

struct LinearCap {
    RVector weights;  // >= 0
    double cap = 0.0;  // >= 0
};

/// Concave rate constraint rate(x) >= threshold. When rate is empty the
/// numerator of the enclosing problem is used.
struct QosConstraint {
    std::optional<Objective> rate;
    double threshold = 0.0;
};

struct ConstraintSet {
    int dimension = 0;
    std::vector<LinearCap> caps;  // at most 2
    std::optional<QosConstraint> qos;
};

/// max N(x) / (d.x + b) over the constraint set.
struct FractionalProblem {
    Objective numerator;
    RVector den_coef;
    double den_offset = 1.0;
    ConstraintSet cs;

    double denominator(const RVector& x) const { return den_coef.dot(x) + den_offset; }
};

struct SolverOptions {
    double armijo_sigma = 1e-4;
    double armijo_shrink = 0.5;
    bool spectral_step = true;  // Barzilai-Borwein trial step instead of 1
    bool diagonal_scaling = true;  // use Objective::curvature when present
    int rescale_every = 10;
    double pg_tol = 1e-7;
    int pg_max_iter = 5000;
    double stall_rel = 1e-14;  // relative gain counted as no progress
    int stall_iters = 20;
    double dinkelbach_tol = 1e-7;
    int dinkelbach_max_iter = 100;
    double qos_tol = 1e-6;
    double feasibility_tol = 1e-10;
};

inline const SolverOptions kDefaultSolverOptions{};

/// Raised when a solve cannot continue (non-finite values, infeasible start).
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SubproblemResult {
    RVector x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    bool qos_met = true;
    double pg_norm = 0.0;
};

struct DinkelbachResult {
    RVector x;
    double mu = 0.0;
    double f_of_mu = 0.0;
    int iterations = 0;
    bool converged = false;
    bool qos_met = true;
    std::vector<double> mu_trace;  // mu_0, mu_1, ...
    std::vector<double> f_trace;   // F(mu_k)
};

/// Euclidean projection onto {x >= 0} and the linear caps.
RVector project_feasible(const RVector& x, const ConstraintSet& cs, const SolverOptions& opt = kDefaultSolverOptions);

bool caps_satisfied(const RVector& x, const ConstraintSet& cs, double tol);

/// Projected-gradient ascent with Armijo backtracking. The QoS field of cs
/// is ignored here.
SubproblemResult solve_subproblem(const Objective& obj, const ConstraintSet& cs, const RVector& x0,
                                  const SolverOptions& opt = kDefaultSolverOptions);

/// F(mu) = max N - mu D, with the QoS constraint handled by a dual
/// bisection when the unconstrained maximizer violates it.
SubproblemResult eval_F(const FractionalProblem& prob, double mu, const RVector& x0,
                        const SolverOptions& opt = kDefaultSolverOptions);

DinkelbachResult dinkelbach_maximize(const FractionalProblem& prob, const RVector& x0,
                                     const SolverOptions& opt = kDefaultSolverOptions);

}  // namespace eerelay
