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

#include "eerelay/stat_csi_h.hpp"

#include <cmath>
#include <memory>
#include <numbers>

namespace eerelay {

namespace {

bool is_scaled_identity(const RVector& v) {
    if (v.size() == 0) return true;
    return (v.maxCoeff() - v.minCoeff()) <= 1e-9 * std::max(1.0, std::abs(v.maxCoeff()));
}

RVector source_weights(const StatHInstance& inst, const RVector& lam_q) {
    return lam_q.cwiseProduct(inst.lam_t_h);
}

RVector gain_slopes(const StatHInstance& inst, const RVector& ty) {
    const auto& b = inst.budget;
    RVector d(inst.n_active);
    for (int j = 0; j < inst.n_active; ++j) {
        double den = b.sigma2_dest + b.sigma2_relay * ty(j) / inst.lam_r_h(j);
        d(j) = b.sigma2_dest / (den * den);
    }
    return d;
}

// Z S Z^H for every sample (relay-side Gram, weights c).
std::vector<SmallCMatrix> relay_grams(const StatHInstance& inst, const RVector& s) {
    std::vector<SmallCMatrix> out;
    out.reserve(inst.samples.size());
    for (const auto& z : inst.samples) out.push_back(z * s.asDiagonal() * z.adjoint());
    return out;
}

// Z^H C Z for every sample (source-side Gram, weights s).
std::vector<SmallCMatrix> source_grams(const StatHInstance& inst, const RVector& c) {
    std::vector<SmallCMatrix> out;
    out.reserve(inst.samples.size());
    for (const auto& z : inst.samples) out.push_back(z.adjoint() * c.asDiagonal() * z);
    return out;
}

void check_sizes(const StatHInstance& inst, const RVector& lam_q, const RVector& ty) {
    if (lam_q.size() != inst.n_source || ty.size() != inst.n_active)
        throw ContractViolation("stat-H: power vector has wrong size");
}

}  // namespace

StatHStructure optimal_structure_h(const KroneckerModel& model_h, const CMatrix& g, const LinkBudget& budget,
                                   int n_samples, Rng& rng) {
    if (n_samples < 1) throw ParameterError("optimal_structure_h: n_samples must be >= 1");
    const int nr = static_cast<int>(model_h.r_receive.rows());
    const int ns = static_cast<int>(model_h.r_transmit.rows());
    if (g.cols() != nr) throw ContractViolation("optimal_structure_h: G does not match R_{r,H}");
    const int nd = static_cast<int>(g.rows());
    if (numerical_rank(g) < std::min(nd, nr)) throw ContractViolation("optimal_structure_h: rank-deficient G");

    auto et = evd_descending(model_h.r_transmit);
    auto er = evd_descending(model_h.r_receive);
    auto sg = svd_descending(g);

    StatHStructure st;
    st.u_q = et.basis;
    st.u_a = sg.right;
    st.v_a = er.basis;
    auto& in = st.inst;
    in.budget = budget;
    in.n_source = ns;
    in.n_active = std::min(nr, nd);
    if (std::max(in.n_active, ns) > kMaxGramDim) throw ParameterError("stat-H: too many antennas for the SAA kernel");
    in.lam_t_h = et.values.cwiseMax(0.0);
    in.lam_r_h = er.values.head(in.n_active).cwiseMax(0.0);
    in.lam_g = sg.values.head(in.n_active).cwiseAbs2();
    in.lam_g_tilde = in.lam_g.cwiseInverse();
    in.scaled_identity_hypothesis = is_scaled_identity(in.lam_g) || is_scaled_identity(er.values);
    in.samples.reserve(static_cast<size_t>(n_samples));
    for (int m = 0; m < n_samples; ++m) {
        CMatrix z = rng.complex_gaussian(nr, ns);
        in.samples.emplace_back(z.topRows(in.n_active));
    }
    return st;
}

RVector effective_gains_h(const StatHInstance& inst, const RVector& ty) {
    const auto& b = inst.budget;
    RVector c(inst.n_active);
    for (int j = 0; j < inst.n_active; ++j) {
        if (!(inst.lam_r_h(j) > 0)) throw ContractViolation("stat-H: zero receive-correlation eigenvalue");
        c(j) = ty(j) / (b.sigma2_dest + b.sigma2_relay * ty(j) / inst.lam_r_h(j));
    }
    return c;
}

double saa_numerator_h(const StatHInstance& inst, const RVector& lam_q, const RVector& ty, RVector* grad_q,
                       RVector* grad_ty) {
    check_sizes(inst, lam_q, ty);
    RVector s = source_weights(inst, lam_q);
    RVector c = effective_gains_h(inst, ty);
    GramBank rb(relay_grams(inst, s));
    RVector gc;
    double v = rb.value(c, grad_ty ? &gc : nullptr);
    if (grad_ty) *grad_ty = gc.cwiseProduct(gain_slopes(inst, ty));
    if (grad_q) {
        GramBank sb(source_grams(inst, c));
        RVector gs;
        sb.value(s, &gs);
        *grad_q = gs.cwiseProduct(inst.lam_t_h);
    }
    return v;
}

double relay_power_h(const StatHInstance& inst, const RVector& lam_q, const RVector& ty) {
    check_sizes(inst, lam_q, ty);
    const double t = lam_q.dot(inst.lam_t_h);
    double p = 0.0;
    for (int j = 0; j < inst.n_active; ++j) {
        if (!(inst.lam_r_h(j) > 0)) throw ContractViolation("stat-H: zero receive-correlation eigenvalue");
        p += ty(j) * inst.lam_g_tilde(j) * (t + inst.budget.sigma2_relay / inst.lam_r_h(j));
    }
    return p;
}

double denominator_h(const StatHInstance& inst, const RVector& lam_q, const RVector& ty) {
    return consumed_power(lam_q.sum(), relay_power_h(inst, lam_q, ty), inst.budget);
}

double jensen_numerator(const StatHInstance& inst, const RVector& lam_q, const RVector& ty, RVector* grad_q,
                        RVector* grad_ty) {
    check_sizes(inst, lam_q, ty);
    const double t = lam_q.dot(inst.lam_t_h);
    RVector c = effective_gains_h(inst, ty);
    double v = 0.0, dt = 0.0;
    RVector dc(inst.n_active);
    for (int j = 0; j < inst.n_active; ++j) {
        v += std::log1p(t * c(j));
        dc(j) = t / (1.0 + t * c(j));
        dt += c(j) / (1.0 + t * c(j));
    }
    if (grad_ty) *grad_ty = dc.cwiseProduct(gain_slopes(inst, ty)) / std::numbers::ln2;
    if (grad_q) *grad_q = inst.lam_t_h * (dt / std::numbers::ln2);
    return v / std::numbers::ln2;
}

double numerator_h(const StatHInstance& inst, const RVector& lam_q, const RVector& ty) {
    return inst.use_jensen ? jensen_numerator(inst, lam_q, ty) : saa_numerator_h(inst, lam_q, ty);
}

double saa_gee_h(const StatHInstance& inst, const RVector& lam_q, const RVector& ty) {
    return numerator_h(inst, lam_q, ty) / denominator_h(inst, lam_q, ty);
}

RVector recover_lambda_a_h(const StatHInstance& inst, const RVector& ty) {
    RVector a(inst.n_active);
    for (int j = 0; j < inst.n_active; ++j) {
        double den = inst.lam_g(j) * inst.lam_r_h(j);
        if (!(den > 0)) {
            if (ty(j) > 0) throw ContractViolation("recover_lambda_a_h: positive ty on a zero-gain stream");
            a(j) = 0.0;
        } else {
            a(j) = std::max(0.0, ty(j)) / den;
        }
    }
    return a;
}

RVector push_forward_ty(const StatHInstance& inst, const RVector& lam_a) {
    return lam_a.head(inst.n_active).cwiseProduct(inst.lam_g).cwiseProduct(inst.lam_r_h);
}

FractionalProblem stat_h_ty_block(const StatHInstance& inst, const RVector& lam_q) {
    const auto& b = inst.budget;
    const int n = inst.n_active;
    const double t = lam_q.dot(inst.lam_t_h);
    RVector cost(n);
    for (int j = 0; j < n; ++j) cost(j) = inst.lam_g_tilde(j) * (t + b.sigma2_relay / inst.lam_r_h(j));

    FractionalProblem p;
    if (inst.use_jensen) {
        RVector q = lam_q;
        p.numerator.value_grad = [&inst, q](const RVector& ty, RVector& g) {
            return jensen_numerator(inst, q, ty, nullptr, &g);
        };
        p.numerator.value = [&inst, q](const RVector& ty) { return jensen_numerator(inst, q, ty); };
    } else {
        auto bank = std::make_shared<GramBank>(relay_grams(inst, source_weights(inst, lam_q)));
        p.numerator.value_grad = [&inst, bank](const RVector& ty, RVector& g) {
            RVector gc;
            double v = bank->value(effective_gains_h(inst, ty), &gc);
            g = gc.cwiseProduct(gain_slopes(inst, ty));
            return v;
        };
        p.numerator.value = [&inst, bank](const RVector& ty) { return bank->value(effective_gains_h(inst, ty)); };
        p.numerator.curvature = [&inst, bank](const RVector& ty) {
            const auto& b = inst.budget;
            RVector gc;
            RMatrix h;
            bank->value(effective_gains_h(inst, ty), &gc, &h);
            RVector d1 = gain_slopes(inst, ty);
            RVector out(inst.n_active);
            for (int j = 0; j < inst.n_active; ++j) {
                double den = b.sigma2_dest + b.sigma2_relay * ty(j) / inst.lam_r_h(j);
                double d2 = -2.0 * b.sigma2_dest * b.sigma2_relay / inst.lam_r_h(j) / (den * den * den);
                out(j) = std::abs(h(j, j) * d1(j) * d1(j) + gc(j) * d2);
            }
            return out;
        };
    }
    p.den_coef = cost / b.amp_eff_relay;
    p.den_offset = lam_q.sum() / b.amp_eff_source + b.p_circuit;
    p.cs.dimension = n;
    p.cs.caps.push_back({cost, b.p_relay_max});
    if (b.rate_min > 0) p.cs.qos = QosConstraint{std::nullopt, b.rate_min};
    return p;
}

FractionalProblem stat_h_q_block(const StatHInstance& inst, const RVector& ty) {
    const auto& b = inst.budget;
    const int n = inst.n_source;
    double csum = 0.0, noise = 0.0;
    for (int j = 0; j < inst.n_active; ++j) {
        csum += ty(j) * inst.lam_g_tilde(j);
        noise += b.sigma2_relay * ty(j) * inst.lam_g_tilde(j) / inst.lam_r_h(j);
    }
    RVector relay_w = inst.lam_t_h * csum;

    FractionalProblem p;
    if (inst.use_jensen) {
        RVector t = ty;
        p.numerator.value_grad = [&inst, t](const RVector& q, RVector& g) {
            return jensen_numerator(inst, q, t, &g, nullptr);
        };
        p.numerator.value = [&inst, t](const RVector& q) { return jensen_numerator(inst, q, t); };
    } else {
        auto bank = std::make_shared<GramBank>(source_grams(inst, effective_gains_h(inst, ty)));
        RVector lt = inst.lam_t_h;
        p.numerator.value_grad = [bank, lt](const RVector& q, RVector& g) {
            RVector gs;
            double v = bank->value(q.cwiseProduct(lt), &gs);
            g = gs.cwiseProduct(lt);
            return v;
        };
        p.numerator.value = [bank, lt](const RVector& q) { return bank->value(q.cwiseProduct(lt)); };
        p.numerator.curvature = [bank, lt](const RVector& q) {
            RMatrix h;
            bank->value(q.cwiseProduct(lt), nullptr, &h);
            return RVector(h.diagonal().cwiseAbs().cwiseProduct(lt.cwiseAbs2()));
        };
    }
    p.den_coef = RVector::Constant(n, 1.0 / b.amp_eff_source) + relay_w / b.amp_eff_relay;
    p.den_offset = noise / b.amp_eff_relay + b.p_circuit;
    p.cs.dimension = n;
    p.cs.caps.push_back({RVector::Ones(n), b.p_source_max});
    p.cs.caps.push_back({relay_w, std::max(0.0, b.p_relay_max - noise)});
    if (b.rate_min > 0) p.cs.qos = QosConstraint{std::nullopt, b.rate_min};
    return p;
}

BlockPair stat_h_blocks(const StatHInstance& inst) {
    BlockPair bp;
    bp.dim_q = inst.n_source;
    bp.dim_a = inst.n_active;
    bp.p_source_max = inst.budget.p_source_max;
    bp.rate_min = inst.budget.rate_min;
    bp.a_block = [&inst](const RVector& q) { return stat_h_ty_block(inst, q); };
    bp.q_block = [&inst](const RVector& ty) { return stat_h_q_block(inst, ty); };
    bp.gee = [&inst](const RVector& q, const RVector& ty) { return saa_gee_h(inst, q, ty); };
    bp.rate = [&inst](const RVector& q, const RVector& ty) { return numerator_h(inst, q, ty); };
    return bp;
}

AlternatingResult alternating_maximize_h(const StatHInstance& inst, const RVector& lam_q0,
                                         const std::optional<RVector>& ty0, const AlternatingOptions& opt) {
    return alternating_maximize(stat_h_blocks(inst), lam_q0, ty0, opt);
}

PrecoderSolution stat_h_solution(const StatHStructure& st, const RVector& lam_q, const RVector& ty) {
    return {st.u_q, lam_q, st.u_a, recover_lambda_a_h(st.inst, ty), st.v_a};
}

}  // namespace eerelay
