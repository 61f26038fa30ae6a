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

#include <vector>

#include "eerelay/alternating.hpp"
#include "eerelay/logdet_kernel.hpp"
#include "eerelay/system_model.hpp"

namespace eerelay {

/// Statistical CSI on the relay-destination link, H known. Streams are
/// trimmed to r = min(N_S, N_R).
struct StatGInstance {
    RVector lam_h;    // squared singular values of H, descending (length r)
    RVector lam_t_g;  // eigenvalues of R_{t,G}, descending (first r)
    RVector lam_r_g;  // eigenvalues of R_{r,G}, descending
    LinkBudget budget;
    GramBank grams;   // F^H F per draw, F = Lambda_{r,G}^{1/2} Z_G[:, :r] / sigma_D
    int n_streams = 0;
};

struct StatGStructure {
    CMatrix u_q;  // V_H
    CMatrix u_a;  // U_{t,G}
    CMatrix v_a;  // U_H
    StatGInstance inst;
};

StatGStructure optimal_structure_g(const CMatrix& h, const KroneckerModel& model_g, const LinkBudget& budget,
                                   int n_samples, Rng& rng);

/// SAA of E[log2 det(I + F diag(e p) F^H) - log2 det(I + sigma_R^2 F diag(e) F^H)]
/// with e = lam_t_g lam_a and p = lam_h lam_q + sigma_R^2.
double saa_numerator_g(const StatGInstance& inst, const RVector& lam_q, const RVector& lam_a,
                       RVector* grad_q = nullptr, RVector* grad_a = nullptr);

/// Per-draw log-det differences (each must be non-negative).
std::vector<double> per_sample_numerator_g(const StatGInstance& inst, const RVector& lam_q, const RVector& lam_a);

double relay_power_g(const StatGInstance& inst, const RVector& lam_q, const RVector& lam_a);
double denominator_g(const StatGInstance& inst, const RVector& lam_q, const RVector& lam_a);
double saa_gee_g(const StatGInstance& inst, const RVector& lam_q, const RVector& lam_a);

FractionalProblem stat_g_a_block(const StatGInstance& inst, const RVector& lam_q);
FractionalProblem stat_g_q_block(const StatGInstance& inst, const RVector& lam_a);
BlockPair stat_g_blocks(const StatGInstance& inst);

AlternatingResult alternating_maximize_g(const StatGInstance& inst, const RVector& lam_q0,
                                         const std::optional<RVector>& lam_a0 = std::nullopt,
                                         const AlternatingOptions& opt = {});

PrecoderSolution stat_g_solution(const StatGStructure& st, const RVector& lam_q, const RVector& lam_a);

}  // namespace eerelay
