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

#include "eerelay/stat_csi_g.hpp"

#include <cmath>

namespace eerelay {

namespace {

void check_sizes(const StatGInstance& inst, const RVector& lam_q, const RVector& lam_a) {
    if (lam_q.size() != inst.n_streams || lam_a.size() != inst.n_streams)
        throw ContractViolation("stat-G: power vector has wrong size");
}

RVector signal_weights(const StatGInstance& inst, const RVector& lam_q, const RVector& lam_a) {
    RVector p = inst.lam_h.cwiseProduct(lam_q).array() + inst.budget.sigma2_relay;
    return inst.lam_t_g.cwiseProduct(lam_a).cwiseProduct(p);
}

RVector noise_weights(const StatGInstance& inst, const RVector& lam_a) {
    return inst.budget.sigma2_relay * inst.lam_t_g.cwiseProduct(lam_a);
}

}  // namespace

StatGStructure optimal_structure_g(const CMatrix& h, const KroneckerModel& model_g, const LinkBudget& budget,
                                   int n_samples, Rng& rng) {
    if (n_samples < 1) throw ParameterError("optimal_structure_g: n_samples must be >= 1");
    const int nr = static_cast<int>(h.rows());
    const int ns = static_cast<int>(h.cols());
    if (model_g.r_transmit.rows() != nr) throw ContractViolation("optimal_structure_g: R_{t,G} does not match H");
    const int nd = static_cast<int>(model_g.r_receive.rows());
    if (numerical_rank(h) < std::min(nr, ns)) throw ContractViolation("optimal_structure_g: rank-deficient H");

    auto sh = svd_descending(h);
    auto et = evd_descending(model_g.r_transmit);
    auto er = evd_descending(model_g.r_receive);
    StatGStructure st;
    st.u_q = sh.right;
    st.u_a = et.basis;
    st.v_a = sh.left;
    auto& in = st.inst;
    in.budget = budget;
    in.n_streams = std::min(ns, nr);
    if (in.n_streams > kMaxGramDim) throw ParameterError("stat-G: too many antennas for the SAA kernel");
    in.lam_h = sh.values.head(in.n_streams).cwiseAbs2();
    in.lam_t_g = et.values.head(in.n_streams).cwiseMax(0.0);
    in.lam_r_g = er.values.cwiseMax(0.0);

    RVector rs = in.lam_r_g.cwiseSqrt() / std::sqrt(budget.sigma2_dest);
    std::vector<SmallCMatrix> grams;
    grams.reserve(static_cast<size_t>(n_samples));
    for (int m = 0; m < n_samples; ++m) {
        CMatrix z = rng.complex_gaussian(nd, nr);
        CMatrix f = rs.asDiagonal() * z.leftCols(in.n_streams);
        grams.emplace_back(f.adjoint() * f);
    }
    in.grams = GramBank(std::move(grams));
    return st;
}

double saa_numerator_g(const StatGInstance& inst, const RVector& lam_q, const RVector& lam_a, RVector* grad_q,
                       RVector* grad_a) {
    check_sizes(inst, lam_q, lam_a);
    RVector w1 = signal_weights(inst, lam_q, lam_a);
    RVector w2 = noise_weights(inst, lam_a);
    const bool need = grad_q || grad_a;
    RVector g1, g2;
    double v = inst.grams.value(w1, need ? &g1 : nullptr);
    if (grad_q) *grad_q = g1.cwiseProduct(inst.lam_t_g).cwiseProduct(lam_a).cwiseProduct(inst.lam_h);
    if (grad_a) {
        double v2 = inst.grams.value(w2, &g2);
        RVector p = inst.lam_h.cwiseProduct(lam_q).array() + inst.budget.sigma2_relay;
        *grad_a = inst.lam_t_g.cwiseProduct(g1.cwiseProduct(p) - inst.budget.sigma2_relay * g2);
        return v - v2;
    }
    return v - inst.grams.value(w2);
}

std::vector<double> per_sample_numerator_g(const StatGInstance& inst, const RVector& lam_q, const RVector& lam_a) {
    check_sizes(inst, lam_q, lam_a);
    auto a = inst.grams.per_sample(signal_weights(inst, lam_q, lam_a));
    auto b = inst.grams.per_sample(noise_weights(inst, lam_a));
    for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

double relay_power_g(const StatGInstance& inst, const RVector& lam_q, const RVector& lam_a) {
    check_sizes(inst, lam_q, lam_a);
    return lam_a.dot(inst.lam_h.cwiseProduct(lam_q) + RVector::Constant(inst.n_streams, inst.budget.sigma2_relay));
}

double denominator_g(const StatGInstance& inst, const RVector& lam_q, const RVector& lam_a) {
    return consumed_power(lam_q.sum(), relay_power_g(inst, lam_q, lam_a), inst.budget);
}

double saa_gee_g(const StatGInstance& inst, const RVector& lam_q, const RVector& lam_a) {
    return saa_numerator_g(inst, lam_q, lam_a) / denominator_g(inst, lam_q, lam_a);
}

FractionalProblem stat_g_a_block(const StatGInstance& inst, const RVector& lam_q) {
    const auto& b = inst.budget;
    const int n = inst.n_streams;
    RVector p = inst.lam_h.cwiseProduct(lam_q).array() + b.sigma2_relay;
    RVector q = lam_q;
    FractionalProblem pr;
    pr.numerator.value_grad = [&inst, q](const RVector& a, RVector& g) {
        return saa_numerator_g(inst, q, a, nullptr, &g);
    };
    pr.numerator.value = [&inst, q](const RVector& a) { return saa_numerator_g(inst, q, a); };
    pr.numerator.curvature = [&inst, q, p](const RVector& a) {
        RMatrix h1, h2;
        inst.grams.value(signal_weights(inst, q, a), nullptr, &h1);
        inst.grams.value(noise_weights(inst, a), nullptr, &h2);
        RVector c1 = inst.lam_t_g.cwiseProduct(p);
        RVector c2 = inst.budget.sigma2_relay * inst.lam_t_g;
        return RVector((h1.diagonal().cwiseProduct(c1.cwiseAbs2()) - h2.diagonal().cwiseProduct(c2.cwiseAbs2())).cwiseAbs());
    };
    pr.den_coef = p / b.amp_eff_relay;
    pr.den_offset = lam_q.sum() / b.amp_eff_source + b.p_circuit;
    pr.cs.dimension = n;
    pr.cs.caps.push_back({p, b.p_relay_max});
    if (b.rate_min > 0) pr.cs.qos = QosConstraint{std::nullopt, b.rate_min};
    return pr;
}

FractionalProblem stat_g_q_block(const StatGInstance& inst, const RVector& lam_a) {
    const auto& b = inst.budget;
    const int n = inst.n_streams;
    RVector a = lam_a;
    // The noise term does not depend on lam_q; keep it as a constant.
    const double noise_term = inst.grams.value(noise_weights(inst, lam_a));
    RVector hw = lam_a.cwiseProduct(inst.lam_h);
    FractionalProblem pr;
    pr.numerator.value_grad = [&inst, a, noise_term](const RVector& q, RVector& g) {
        RVector g1;
        double v = inst.grams.value(signal_weights(inst, q, a), &g1);
        g = g1.cwiseProduct(inst.lam_t_g).cwiseProduct(a).cwiseProduct(inst.lam_h);
        return v - noise_term;
    };
    pr.numerator.value = [&inst, a, noise_term](const RVector& q) {
        return inst.grams.value(signal_weights(inst, q, a)) - noise_term;
    };
    pr.numerator.curvature = [&inst, a](const RVector& q) {
        RMatrix h1;
        inst.grams.value(signal_weights(inst, q, a), nullptr, &h1);
        RVector c = inst.lam_t_g.cwiseProduct(a).cwiseProduct(inst.lam_h);
        return RVector(h1.diagonal().cwiseAbs().cwiseProduct(c.cwiseAbs2()));
    };
    pr.den_coef = RVector::Constant(n, 1.0 / b.amp_eff_source) + hw / b.amp_eff_relay;
    pr.den_offset = b.sigma2_relay * lam_a.sum() / b.amp_eff_relay + b.p_circuit;
    pr.cs.dimension = n;
    pr.cs.caps.push_back({RVector::Ones(n), b.p_source_max});
    pr.cs.caps.push_back({hw, std::max(0.0, b.p_relay_max - b.sigma2_relay * lam_a.sum())});
    if (b.rate_min > 0) pr.cs.qos = QosConstraint{std::nullopt, b.rate_min};
    return pr;
}

BlockPair stat_g_blocks(const StatGInstance& inst) {
    BlockPair bp;
    bp.dim_q = inst.n_streams;
    bp.dim_a = inst.n_streams;
    bp.p_source_max = inst.budget.p_source_max;
    bp.rate_min = inst.budget.rate_min;
    bp.a_block = [&inst](const RVector& q) { return stat_g_a_block(inst, q); };
    bp.q_block = [&inst](const RVector& a) { return stat_g_q_block(inst, a); };
    bp.gee = [&inst](const RVector& q, const RVector& a) { return saa_gee_g(inst, q, a); };
    bp.rate = [&inst](const RVector& q, const RVector& a) { return saa_numerator_g(inst, q, a); };
    return bp;
}

AlternatingResult alternating_maximize_g(const StatGInstance& inst, const RVector& lam_q0,
                                         const std::optional<RVector>& lam_a0, const AlternatingOptions& opt) {
    return alternating_maximize(stat_g_blocks(inst), lam_q0, lam_a0, opt);
}

PrecoderSolution stat_g_solution(const StatGStructure& st, const RVector& lam_q, const RVector& lam_a) {
    return {st.u_q, lam_q, st.u_a, lam_a, st.v_a};
}

}  // namespace eerelay
