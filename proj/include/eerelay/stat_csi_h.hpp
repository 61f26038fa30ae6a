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

/// Statistical CSI on the source-relay link, G known. Relay variables are
/// ty_j (the diagonal of the pushed-forward relay gain), one per active
/// stream j < min(N_R, N_D).
struct StatHInstance {
    RVector lam_t_h;      // eigenvalues of R_{t,H}, descending
    RVector lam_r_h;      // eigenvalues of R_{r,H}, descending
    RVector lam_g;        // squared singular values of G, active streams
    RVector lam_g_tilde;  // 1 / lam_g
    LinkBudget budget;
    std::vector<SmallCMatrix> samples;  // Z_H draws restricted to the active rows
    int n_source = 0;
    int n_active = 0;
    bool scaled_identity_hypothesis = false;  // Lambda_G or Lambda_{r,H} proportional to I
    bool use_jensen = false;                  // deterministic surrogate numerator
};

struct StatHStructure {
    CMatrix u_q;  // U_{t,H}
    CMatrix u_a;  // V_G
    CMatrix v_a;  // U_{r,H}
    StatHInstance inst;
};

/// Bases from the correlation eigenvectors and the known G, plus a bank of
/// n_samples white Z_H draws from rng.
StatHStructure optimal_structure_h(const KroneckerModel& model_h, const CMatrix& g, const LinkBudget& budget,
                                   int n_samples, Rng& rng);

/// c_j = ty_j / (sigma_D^2 + sigma_R^2 ty_j / lam_r_j)
RVector effective_gains_h(const StatHInstance& inst, const RVector& ty);

/// SAA of E log2 det(I + Lambda_Q Lambda_t Z^H C Z). Gradients optional.
double saa_numerator_h(const StatHInstance& inst, const RVector& lam_q, const RVector& ty,
                       RVector* grad_q = nullptr, RVector* grad_ty = nullptr);

/// Closed-form expected consumed power.
double denominator_h(const StatHInstance& inst, const RVector& lam_q, const RVector& ty);

/// Expected relay transmit power (denominator without source and circuit terms).
double relay_power_h(const StatHInstance& inst, const RVector& lam_q, const RVector& ty);

/// log2 det(I + tr(Lambda_Q Lambda_t) C), the Jensen-type surrogate.
double jensen_numerator(const StatHInstance& inst, const RVector& lam_q, const RVector& ty,
                        RVector* grad_q = nullptr, RVector* grad_ty = nullptr);

/// Numerator actually optimized (SAA or surrogate, per use_jensen).
double numerator_h(const StatHInstance& inst, const RVector& lam_q, const RVector& ty);

double saa_gee_h(const StatHInstance& inst, const RVector& lam_q, const RVector& ty);

/// lambda_{A,i} = ty_i / (lam_g_i lam_r_i) and its inverse.
RVector recover_lambda_a_h(const StatHInstance& inst, const RVector& ty);
RVector push_forward_ty(const StatHInstance& inst, const RVector& lam_a);

FractionalProblem stat_h_ty_block(const StatHInstance& inst, const RVector& lam_q);
FractionalProblem stat_h_q_block(const StatHInstance& inst, const RVector& ty);
BlockPair stat_h_blocks(const StatHInstance& inst);

AlternatingResult alternating_maximize_h(const StatHInstance& inst, const RVector& lam_q0,
                                         const std::optional<RVector>& ty0 = std::nullopt,
                                         const AlternatingOptions& opt = {});

PrecoderSolution stat_h_solution(const StatHStructure& st, const RVector& lam_q, const RVector& ty);

}  // namespace eerelay
