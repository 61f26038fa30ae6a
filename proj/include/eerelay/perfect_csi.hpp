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

#include "eerelay/alternating.hpp"
#include "eerelay/system_model.hpp"

namespace eerelay {

/// Diagonalized perfect-CSI problem: squared singular values of H and G
/// trimmed to the r_eff = min(N_S, N_R, N_D) strongest streams.
struct ScalarizedInstance {
    RVector lam_h;
    RVector lam_g;
    LinkBudget budget;
    int r_eff = 0;
};

struct PerfectStructure {
    CMatrix u_q;  // V_H
    CMatrix u_a;  // V_G
    CMatrix v_a;  // U_H
    ScalarizedInstance inst;
};

/// Optimal bases U_Q = V_H, U_A = V_G, V_A = U_H and the scalar instance.
PerfectStructure optimal_eigenstructure(const ChannelRealization& chan, const LinkBudget& budget);

/// Sum over streams of log2(1 + a q h g / (sigma_D^2 + sigma_R^2 a g)).
double perfect_rate(const ScalarizedInstance& inst, const RVector& lam_q, const RVector& lam_a);
double perfect_relay_power(const ScalarizedInstance& inst, const RVector& lam_q, const RVector& lam_a);
double perfect_gee(const ScalarizedInstance& inst, const RVector& lam_q, const RVector& lam_a);

/// Block problems (relay gains at fixed source powers and vice versa).
FractionalProblem perfect_a_block(const ScalarizedInstance& inst, const RVector& lam_q);
FractionalProblem perfect_q_block(const ScalarizedInstance& inst, const RVector& lam_a);

BlockPair perfect_blocks(const ScalarizedInstance& inst);

RVector solve_lambda_a(const ScalarizedInstance& inst, const RVector& lam_q, const SolverOptions& opt = {});
RVector solve_lambda_q(const ScalarizedInstance& inst, const RVector& lam_a, const SolverOptions& opt = {});

AlternatingResult alternating_maximize_perfect(const ScalarizedInstance& inst, const RVector& lam_q0,
                                               const std::optional<RVector>& lam_a0 = std::nullopt,
                                               const AlternatingOptions& opt = {});

MultistartResult multistart_perfect(const ScalarizedInstance& inst, int n_starts, Rng& rng,
                                    const AlternatingOptions& opt = {});

/// Full-size precoder from the bases and the stream powers.
PrecoderSolution perfect_solution(const PerfectStructure& st, const RVector& lam_q, const RVector& lam_a);

}  // namespace eerelay
