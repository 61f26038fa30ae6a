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

#include <optional>

#include "eerelay/matops.hpp"
#include "eerelay/rng.hpp"

namespace eerelay {

struct SystemDims {
    int n_source = 3;
    int n_relay = 3;
    int n_dest = 3;

    void validate() const;
};

/// Power budget and noise levels. Powers in Watts, rate_min in bits/s/Hz.
struct LinkBudget {
    double p_source_max = 100.0;
    double p_relay_max = 100.0;
    double p_circuit = 5.0;
    double sigma2_relay = 1.0;
    double sigma2_dest = 1.0;
    double rate_min = 1.0;
    double amp_eff_source = 1.0;
    double amp_eff_relay = 1.0;

    void validate() const;
};

struct ChannelRealization {
    CMatrix h;  // N_R x N_S
    CMatrix g;  // N_D x N_R
};

/// Throws ContractViolation on non-finite or rank-deficient channels.
void validate_channel(const ChannelRealization& chan);

/// H = R_r^{1/2} Z R_t^{1/2}
struct KroneckerModel {
    CMatrix r_receive;
    CMatrix r_transmit;
};

/// Precomputed correlation square roots for repeated sampling.
struct KroneckerRoots {
    CMatrix rr_sqrt;
    CMatrix rt_sqrt;
};

KroneckerRoots kronecker_roots(const KroneckerModel& model);

/// A link that is either known exactly or described by a Kronecker model.
struct LinkKnowledge {
    std::optional<CMatrix> known;
    std::optional<KroneckerModel> model;
};

/// Q = q_basis diag(q_powers) q_basis^H and
/// A = a_left diag(a_gains)^{1/2} a_right^H. Power vectors may be shorter
/// than the bases; missing entries are zero.
struct PrecoderSolution {
    CMatrix q_basis;
    RVector q_powers;
    CMatrix a_left;
    RVector a_gains;
    CMatrix a_right;
};

struct GEEReport {
    double rate = 0.0;  // log2 det, no 1/2 factor
    double p_source = 0.0;
    double p_relay = 0.0;
    double gee = 0.0;
    bool qos_met = false;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

CMatrix assemble_Q(const PrecoderSolution& sol);
CMatrix assemble_A(const PrecoderSolution& sol);

double achievable_logdet(const CMatrix& h, const CMatrix& g, const CMatrix& q, const CMatrix& a,
                         const LinkBudget& budget);
double achievable_logdet(const ChannelRealization& chan, const PrecoderSolution& sol, const LinkBudget& budget);

double relay_tx_power(const CMatrix& h, const CMatrix& q, const CMatrix& a, const LinkBudget& budget);
double relay_tx_power(const ChannelRealization& chan, const PrecoderSolution& sol, const LinkBudget& budget);

/// Consumed power P_S/zeta_S + P_R/zeta_R + P_c.
double consumed_power(double p_source, double p_relay, const LinkBudget& budget);

GEEReport gee(const ChannelRealization& chan, const PrecoderSolution& sol, const LinkBudget& budget);

CMatrix sample_kronecker(const KroneckerModel& model, Rng& rng);
CMatrix sample_kronecker(const KroneckerRoots& roots, Rng& rng);

/// Sample mean of achievable_logdet over n_samples draws of (H, G).
McEstimate ergodic_logdet_mc(const LinkKnowledge& h, const LinkKnowledge& g, const PrecoderSolution& sol,
                             const LinkBudget& budget, int n_samples, Rng& rng);

/// Sample mean of the relay transmit power over n_samples draws of H.
McEstimate relay_power_mc(const LinkKnowledge& h, const PrecoderSolution& sol, const LinkBudget& budget,
                          int n_samples, Rng& rng);

}  // namespace eerelay
