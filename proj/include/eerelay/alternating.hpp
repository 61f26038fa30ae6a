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
#include <vector>

#include "eerelay/fractional.hpp"
#include "eerelay/rng.hpp"

namespace eerelay {

/// Two power blocks solved in turn: the relay block (given the source
/// powers) and then the source block (given the relay variable). Both block
/// problems share the joint numerator and denominator, so each block ratio
/// equals the joint GEE.
struct BlockPair {
    int dim_q = 0;
    int dim_a = 0;
    double p_source_max = 0.0;
    double rate_min = 0.0;
    std::function<FractionalProblem(const RVector& lam_q)> a_block;
    std::function<FractionalProblem(const RVector& lam_a)> q_block;
    std::function<double(const RVector& lam_q, const RVector& lam_a)> gee;
    std::function<double(const RVector& lam_q, const RVector& lam_a)> rate;
};

struct AlternatingOptions {
    double eps = 1e-3;
    int max_iter = 100;
    SolverOptions solver;
};

struct AlternatingTrace {
    std::vector<double> gee_per_iteration;  // entry 0 is the start when known
    bool converged = false;
    int iterations = 0;
};

struct AlternatingResult {
    RVector lam_q;
    RVector lam_a;
    double gee = 0.0;
    double rate = 0.0;
    bool qos_met = false;
    AlternatingTrace trace;
    std::vector<DinkelbachResult> block_solves;  // kept for monotonicity audits
};

/// Alternating maximization from lam_q0. With lam_a0 the start GEE is
/// known, so a start at a fixed point stops after one iteration.
AlternatingResult alternating_maximize(const BlockPair& bp, const RVector& lam_q0,
                                       const std::optional<RVector>& lam_a0 = std::nullopt,
                                       const AlternatingOptions& opt = {}, bool keep_block_solves = false);

/// Maximum rate (denominator fixed to 1) by alternating block ascent.
AlternatingResult maximize_rate(const BlockPair& bp, const AlternatingOptions& opt = {});

struct MultistartResult {
    bool feasible = false;
    AlternatingResult best;
    std::vector<AlternatingResult> runs;
    int best_index = -1;
    int runs_off_best = 0;  // runs whose fixed point is more than eps below the best
    double max_rate = 0.0;          // only filled when the feasibility solve ran
};

/// Random source allocation: uniform on the simplex times a uniform
/// fraction of p_source_max.
RVector random_source_powers(int dim, double p_source_max, Rng& rng);

/// Runs n_starts alternating maximizations from random feasible starts and
/// keeps the best fixed point. Starts whose relay block cannot reach the
/// rate target are redrawn; after repeated failures the rate-maximizing
/// source powers are used, and if even those miss the target the scenario
/// is reported infeasible.
MultistartResult multistart(const BlockPair& bp, int n_starts, Rng& rng, const AlternatingOptions& opt = {},
                            bool keep_block_solves = false);

}  // namespace eerelay
