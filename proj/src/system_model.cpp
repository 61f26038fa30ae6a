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

#include "eerelay/system_model.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace eerelay {

namespace {

CMatrix weighted_product(const CMatrix& left, const RVector& w, const CMatrix& right) {
    const Eigen::Index k = std::min<Eigen::Index>(w.size(), left.cols());
    return left.leftCols(k) * w.head(k).asDiagonal() * right.leftCols(k).adjoint();
}

McEstimate summarize(const std::vector<double>& xs) {
    McEstimate e;
    const double n = static_cast<double>(xs.size());
    double s = 0.0;
    for (double x : xs) s += x;
    e.mean = s / n;
    if (xs.size() > 1) {
        double v = 0.0;
        for (double x : xs) v += (x - e.mean) * (x - e.mean);
        e.std_error = std::sqrt(v / (n - 1.0) / n);
    }
    return e;
}

}  // namespace

void SystemDims::validate() const {
    if (n_source < 1 || n_relay < 1 || n_dest < 1) throw ParameterError("antenna counts must be >= 1");
}

void LinkBudget::validate() const {
    if (!(p_source_max > 0 && p_relay_max > 0 && p_circuit > 0 && sigma2_relay > 0 && sigma2_dest > 0))
        throw ParameterError("powers and noise variances must be positive");
    if (!(rate_min >= 0)) throw ParameterError("rate_min must be non-negative");
    if (!(amp_eff_source > 0 && amp_eff_source <= 1 && amp_eff_relay > 0 && amp_eff_relay <= 1))
        throw ParameterError("amplifier efficiencies must lie in (0, 1]");
}

void validate_channel(const ChannelRealization& chan) {
    if (chan.h.rows() != chan.g.cols()) throw ContractViolation("channel dimensions do not match");
    if (!all_finite(chan.h) || !all_finite(chan.g)) throw ContractViolation("non-finite channel");
    const auto rh = std::min(chan.h.rows(), chan.h.cols());
    const auto rg = std::min(chan.g.rows(), chan.g.cols());
    if (numerical_rank(chan.h) < rh || numerical_rank(chan.g) < rg)
        throw ContractViolation("rank-deficient channel");
}

KroneckerRoots kronecker_roots(const KroneckerModel& model) {
    return {sqrt_psd(model.r_receive), sqrt_psd(model.r_transmit)};
}

namespace {

// Draws from a LinkKnowledge without recomputing matrix roots.
class LinkDrawer {
public:
    explicit LinkDrawer(const LinkKnowledge& k) : k_(k) {
        if (!k.known && !k.model) throw ContractViolation("link has neither a known matrix nor a model");
        if (!k.known) roots_ = kronecker_roots(*k.model);
    }
    CMatrix draw(Rng& rng) const { return k_.known ? *k_.known : sample_kronecker(roots_, rng); }

private:
    const LinkKnowledge& k_;
    KroneckerRoots roots_;
};

}  // namespace

CMatrix assemble_Q(const PrecoderSolution& sol) {
    return weighted_product(sol.q_basis, sol.q_powers, sol.q_basis);
}

CMatrix assemble_A(const PrecoderSolution& sol) {
    RVector s = sol.a_gains.cwiseMax(0.0).cwiseSqrt();
    return weighted_product(sol.a_left, s, sol.a_right);
}

double achievable_logdet(const CMatrix& h, const CMatrix& g, const CMatrix& q, const CMatrix& a,
                         const LinkBudget& budget) {
    if (h.cols() != q.rows() || a.cols() != h.rows() || g.cols() != a.rows())
        throw ContractViolation("achievable_logdet: dimension mismatch");
    const Eigen::Index nd = g.rows();
    CMatrix ga = g * a;
    CMatrix w = budget.sigma2_dest * CMatrix::Identity(nd, nd) + budget.sigma2_relay * ga * ga.adjoint();
    CMatrix gah = ga * h;
    CMatrix s = gah * q * gah.adjoint();
    CMatrix total = w + s;
    total = 0.5 * (total + total.adjoint());
    w = 0.5 * (w + w.adjoint());
    return (logdet_hpd(total) - logdet_hpd(w)) / std::numbers::ln2;
}

double achievable_logdet(const ChannelRealization& chan, const PrecoderSolution& sol, const LinkBudget& budget) {
    return achievable_logdet(chan.h, chan.g, assemble_Q(sol), assemble_A(sol), budget);
}

double relay_tx_power(const CMatrix& h, const CMatrix& q, const CMatrix& a, const LinkBudget& budget) {
    const Eigen::Index nr = h.rows();
    CMatrix rx = h * q * h.adjoint() + budget.sigma2_relay * CMatrix::Identity(nr, nr);
    return std::max(0.0, (a * rx * a.adjoint()).trace().real());
}

double relay_tx_power(const ChannelRealization& chan, const PrecoderSolution& sol, const LinkBudget& budget) {
    return relay_tx_power(chan.h, assemble_Q(sol), assemble_A(sol), budget);
}

double consumed_power(double p_source, double p_relay, const LinkBudget& budget) {
    return p_source / budget.amp_eff_source + p_relay / budget.amp_eff_relay + budget.p_circuit;
}

GEEReport gee(const ChannelRealization& chan, const PrecoderSolution& sol, const LinkBudget& budget) {
    CMatrix q = assemble_Q(sol);
    CMatrix a = assemble_A(sol);
    GEEReport r;
    r.rate = std::max(0.0, achievable_logdet(chan.h, chan.g, q, a, budget));
    r.p_source = std::max(0.0, q.trace().real());
    r.p_relay = relay_tx_power(chan.h, q, a, budget);
    r.gee = r.rate / consumed_power(r.p_source, r.p_relay, budget);
    r.qos_met = r.rate >= budget.rate_min - 1e-6;
    return r;
}

CMatrix sample_kronecker(const KroneckerRoots& roots, Rng& rng) {
    CMatrix z = rng.complex_gaussian(static_cast<int>(roots.rr_sqrt.rows()), static_cast<int>(roots.rt_sqrt.rows()));
    return roots.rr_sqrt * z * roots.rt_sqrt;
}

CMatrix sample_kronecker(const KroneckerModel& model, Rng& rng) {
    return sample_kronecker(kronecker_roots(model), rng);
}

McEstimate ergodic_logdet_mc(const LinkKnowledge& h, const LinkKnowledge& g, const PrecoderSolution& sol,
                             const LinkBudget& budget, int n_samples, Rng& rng) {
    if (n_samples < 1) throw ParameterError("n_samples must be >= 1");
    CMatrix q = assemble_Q(sol);
    CMatrix a = assemble_A(sol);
    LinkDrawer hd(h), gd(g);
    std::vector<double> xs;
    xs.reserve(static_cast<size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k) {
        CMatrix hk = hd.draw(rng);
        CMatrix gk = gd.draw(rng);
        xs.push_back(achievable_logdet(hk, gk, q, a, budget));
    }
    return summarize(xs);
}

McEstimate relay_power_mc(const LinkKnowledge& h, const PrecoderSolution& sol, const LinkBudget& budget,
                          int n_samples, Rng& rng) {
    if (n_samples < 1) throw ParameterError("n_samples must be >= 1");
    CMatrix q = assemble_Q(sol);
    CMatrix a = assemble_A(sol);
    LinkDrawer hd(h);
    std::vector<double> xs;
    xs.reserve(static_cast<size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k) xs.push_back(relay_tx_power(hd.draw(rng), q, a, budget));
    return summarize(xs);
}

}  // namespace eerelay
