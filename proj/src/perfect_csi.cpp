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

#include "eerelay/perfect_csi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace eerelay {

PerfectStructure optimal_eigenstructure(const ChannelRealization& chan, const LinkBudget& budget) {
    validate_channel(chan);
    auto sh = svd_descending(chan.h);
    auto sg = svd_descending(chan.g);
    const int ns = static_cast<int>(chan.h.cols());
    const int nr = static_cast<int>(chan.h.rows());
    const int nd = static_cast<int>(chan.g.rows());
    PerfectStructure st;
    st.u_q = sh.right;
    st.u_a = sg.right;
    st.v_a = sh.left;
    st.inst.budget = budget;
    st.inst.r_eff = std::min({ns, nr, nd});
    st.inst.lam_h = sh.values.head(st.inst.r_eff).cwiseAbs2();
    st.inst.lam_g = sg.values.head(st.inst.r_eff).cwiseAbs2();
    return st;
}

namespace {

// Per-stream SNR a q h g / (sigma_D^2 + sigma_R^2 a g).
double stream_snr(const ScalarizedInstance& inst, int i, double q, double a) {
    const auto& b = inst.budget;
    return a * q * inst.lam_h(i) * inst.lam_g(i) / (b.sigma2_dest + b.sigma2_relay * a * inst.lam_g(i));
}

}  // namespace

double perfect_rate(const ScalarizedInstance& inst, const RVector& lam_q, const RVector& lam_a) {
    double s = 0.0;
    for (int i = 0; i < inst.r_eff; ++i) s += std::log1p(stream_snr(inst, i, lam_q(i), lam_a(i)));
    return s / std::numbers::ln2;
}

double perfect_relay_power(const ScalarizedInstance& inst, const RVector& lam_q, const RVector& lam_a) {
    double s = 0.0;
    for (int i = 0; i < inst.r_eff; ++i) s += lam_a(i) * (inst.lam_h(i) * lam_q(i) + inst.budget.sigma2_relay);
    return s;
}

double perfect_gee(const ScalarizedInstance& inst, const RVector& lam_q, const RVector& lam_a) {
    return perfect_rate(inst, lam_q, lam_a) /
           consumed_power(lam_q.sum(), perfect_relay_power(inst, lam_q, lam_a), inst.budget);
}

FractionalProblem perfect_a_block(const ScalarizedInstance& inst, const RVector& lam_q) {
    const auto& b = inst.budget;
    const int n = inst.r_eff;
    RVector beta(n), cost(n);
    for (int i = 0; i < n; ++i) {
        beta(i) = lam_q(i) * inst.lam_h(i) * inst.lam_g(i);
        cost(i) = inst.lam_h(i) * lam_q(i) + b.sigma2_relay;
    }
    RVector lg = inst.lam_g;
    const double sd = b.sigma2_dest, sr = b.sigma2_relay;
    FractionalProblem p;
    p.numerator.value_grad = [beta, lg, sd, sr, n](const RVector& a, RVector& g) {
        double v = 0.0;
        g.resize(n);
        for (int i = 0; i < n; ++i) {
            double den = sd + sr * a(i) * lg(i);
            double u = a(i) * beta(i) / den;
            v += std::log1p(u);
            g(i) = beta(i) * sd / (den * den) / (1.0 + u) / std::numbers::ln2;
        }
        return v / std::numbers::ln2;
    };
    p.numerator.value = [f = p.numerator.value_grad, n](const RVector& a) {
        RVector g(n);
        return f(a, g);
    };
    p.den_coef = cost / b.amp_eff_relay;
    p.den_offset = lam_q.sum() / b.amp_eff_source + b.p_circuit;
    p.cs.dimension = n;
    p.cs.caps.push_back({cost, b.p_relay_max});
    if (b.rate_min > 0) p.cs.qos = QosConstraint{std::nullopt, b.rate_min};
    return p;
}

FractionalProblem perfect_q_block(const ScalarizedInstance& inst, const RVector& lam_a) {
    const auto& b = inst.budget;
    const int n = inst.r_eff;
    RVector alpha(n), hw(n);
    for (int i = 0; i < n; ++i) {
        alpha(i) = lam_a(i) * inst.lam_h(i) * inst.lam_g(i) / (b.sigma2_dest + b.sigma2_relay * lam_a(i) * inst.lam_g(i));
        hw(i) = lam_a(i) * inst.lam_h(i);
    }
    FractionalProblem p;
    p.numerator.value_grad = [alpha, n](const RVector& q, RVector& g) {
        double v = 0.0;
        g.resize(n);
        for (int i = 0; i < n; ++i) {
            v += std::log1p(alpha(i) * q(i));
            g(i) = alpha(i) / (1.0 + alpha(i) * q(i)) / std::numbers::ln2;
        }
        return v / std::numbers::ln2;
    };
    p.numerator.value = [f = p.numerator.value_grad, n](const RVector& q) {
        RVector g(n);
        return f(q, g);
    };
    p.den_coef = RVector::Constant(n, 1.0 / b.amp_eff_source) + hw / b.amp_eff_relay;
    p.den_offset = b.sigma2_relay * lam_a.sum() / b.amp_eff_relay + b.p_circuit;
    p.cs.dimension = n;
    p.cs.caps.push_back({RVector::Ones(n), b.p_source_max});
    p.cs.caps.push_back({hw, std::max(0.0, b.p_relay_max - b.sigma2_relay * lam_a.sum())});
    if (b.rate_min > 0) p.cs.qos = QosConstraint{std::nullopt, b.rate_min};
    return p;
}

BlockPair perfect_blocks(const ScalarizedInstance& inst) {
    BlockPair bp;
    bp.dim_q = inst.r_eff;
    bp.dim_a = inst.r_eff;
    bp.p_source_max = inst.budget.p_source_max;
    bp.rate_min = inst.budget.rate_min;
    bp.a_block = [inst](const RVector& q) { return perfect_a_block(inst, q); };
    bp.q_block = [inst](const RVector& a) { return perfect_q_block(inst, a); };
    bp.gee = [inst](const RVector& q, const RVector& a) { return perfect_gee(inst, q, a); };
    bp.rate = [inst](const RVector& q, const RVector& a) { return perfect_rate(inst, q, a); };
    return bp;
}

RVector solve_lambda_a(const ScalarizedInstance& inst, const RVector& lam_q, const SolverOptions& opt) {
    return dinkelbach_maximize(perfect_a_block(inst, lam_q), RVector::Zero(inst.r_eff), opt).x;
}

RVector solve_lambda_q(const ScalarizedInstance& inst, const RVector& lam_a, const SolverOptions& opt) {
    return dinkelbach_maximize(perfect_q_block(inst, lam_a), RVector::Zero(inst.r_eff), opt).x;
}

AlternatingResult alternating_maximize_perfect(const ScalarizedInstance& inst, const RVector& lam_q0,
                                               const std::optional<RVector>& lam_a0, const AlternatingOptions& opt) {
    return alternating_maximize(perfect_blocks(inst), lam_q0, lam_a0, opt);
}

MultistartResult multistart_perfect(const ScalarizedInstance& inst, int n_starts, Rng& rng,
                                    const AlternatingOptions& opt) {
    return multistart(perfect_blocks(inst), n_starts, rng, opt);
}

PrecoderSolution perfect_solution(const PerfectStructure& st, const RVector& lam_q, const RVector& lam_a) {
    return {st.u_q, lam_q, st.u_a, lam_a, st.v_a};
}

}  // namespace eerelay
