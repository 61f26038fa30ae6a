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

#include "eerelay/fractional.hpp"
#include "eerelay/rng.hpp"
#include "eerelay/stat_csi_g.hpp"
#include "eerelay/stat_csi_h.hpp"
#include "eerelay/system_model.hpp"

namespace eerelay {

/// Source problem with statistical CSI on H after the change of variables
/// lambda_i = lambda_{Q,i} lambda_{t,i}. Columns f_i of F are CN(0, Lambda_C).
struct BeamInstanceH {
    RVector lam_c;  // diagonal of Lambda_C, one entry per relay dimension
    RVector lam_t;  // transmit correlation eigenvalues, descending
    double b = 0.0;
    double c = 0.0;
    RVector d;      // d_i = c + 1 / lam_t_i
    double p_s_max = 0.0;
    double p_r_max = 0.0;
    double p_c = 0.0;
    void validate() const;
};

/// Same for statistical CSI on G with the relay gains chosen so that
/// lam_t_g * lam_a = 1.
struct BeamInstanceG {
    RVector lam_r_g;
    RVector lam_t_g_eigs;
    RVector lam_a;  // 1 / lam_t_g_eigs
    RVector lam_h;
    double b = 0.0;
    RVector d;      // d_i = 1 + 1 / (lam_a_i lam_h_i)
    double p_s_max = 0.0;
    double p_r_max = 0.0;
    double p_c = 0.0;
    double sigma2_relay = 1.0;
    double sigma2_dest = 1.0;
    void validate() const;
};

struct BeamformingVerdict {
    bool fp_optimal = true;
    double condition_lhs = 1.0;
    double threshold_rhs = 1.0;
    int c2_sign = 0;  // sign of C_2; 0 for a single stream
    double p_cap = 0.0;
    double mc_std_error = 0.0;
};

/// Build the H-side instance from a stat-H instance and relay variables ty.
/// Lambda_C = diag(c_j), b = P_c + sigma_R^2 sum ty/(lam_r lam_g),
/// c = sum ty / lam_g. Only the first min(N_S, ...) source eigenvalues are kept.
BeamInstanceH make_beam_instance_h(const StatHInstance& inst, const RVector& ty);

/// Build the G-side instance from a stat-G instance (lam_a = 1 / lam_t_g).
BeamInstanceG make_beam_instance_g(const StatGInstance& inst);

/// P = min(P_S lam_t_1, (P_R + P_c - b) / c)
double p_cap_h(const BeamInstanceH& inst);

/// P = min(lam_a_1 lam_h_1 P_S, P_R + P_c - b)
double p_cap_g(const BeamInstanceG& inst);

struct CConstants {
    RVector value;
    RVector std_error;
};

/// Monte-Carlo estimates of C_{i,H}, natural logarithm.
CConstants c_constants_h(const BeamInstanceH& inst, int n_mc, Rng& rng);
CConstants c_constants_g(const BeamInstanceG& inst, int n_mc, Rng& rng);

BeamformingVerdict fp_condition_h(const BeamInstanceH& inst, int n_mc, Rng& rng);
BeamformingVerdict fp_condition_g(const BeamInstanceG& inst, int n_mc, Rng& rng);

/// Draws of f_1 for the H case, reusable across instances sharing Lambda_C
/// (common random numbers keep a threshold scan monotone in P).
std::vector<CVector> draw_f1_h(const RVector& lam_c, int n_mc, Rng& rng);
BeamformingVerdict fp_condition_h(const BeamInstanceH& inst, const std::vector<CVector>& f1);

struct ScanRow {
    double p = 0.0;  // Watts
    double p_relay_max = 0.0;
    BeamformingVerdict verdict;
};

struct ThresholdScan {
    std::vector<ScanRow> rows;
    int threshold_index = -1;     // largest grid point with fp_optimal, -1 if none
    double threshold_p = 0.0;
    int monotonicity_violations = 0;  // optimal verdicts above a non-optimal one
};

/// Relay budget that realizes cap P in the H instance: P_R = c P + b - P_c.
double relay_budget_for_cap(const BeamInstanceH& inst, double p);

/// Verdict on every P of an ascending grid, with P_R^max set so that the
/// relay term of the cap equals P. One shared draw of f_1.
ThresholdScan threshold_scan_h(const BeamInstanceH& inst_template, const std::vector<double>& p_grid, int n_mc,
                               Rng& rng);

/// Fractional problem over lambda (one entry per source stream) built on a
/// bank of Gram matrices F^H F. The numerator is in bits; the ratio's
/// maximizer is the same as with natural logs.
FractionalProblem beam_problem_h(const BeamInstanceH& inst, const GramBank& bank);
FractionalProblem beam_problem_g(const BeamInstanceG& inst, const GramBank& bank);

/// Gram banks F^H F for the two regimes (first N_S columns of F).
GramBank beam_grams_h(const BeamInstanceH& inst, int n_samples, Rng& rng);
GramBank beam_grams_g(const BeamInstanceG& inst, int n_samples, Rng& rng);

struct BeamSolve {
    RVector lambda;
    RVector normalized;  // lambda / sum(lambda)
    double value = 0.0;
    bool rank_one = false;       // normalized tail <= 1e-3
    bool full_power = false;     // lambda_1 within 1e-3 of P
};

/// Dinkelbach solve of the relaxed source problem.
BeamSolve solve_beam_h(const BeamInstanceH& inst, const GramBank& bank, const SolverOptions& opt = {});
BeamSolve solve_beam_g(const BeamInstanceG& inst, const GramBank& bank, const SolverOptions& opt = {});

/// 10 log10(P / 1 W)
double to_dbw(double watts);
double from_dbw(double dbw);

}  // namespace eerelay
