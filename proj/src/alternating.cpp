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

#include "eerelay/alternating.hpp"

#include <cmath>
#include <limits>

namespace eerelay {

namespace {

constexpr double kQosSlack = 1e-6;

bool rate_ok(const BlockPair& bp, const RVector& q, const RVector& a) {
    return bp.rate_min <= 0.0 || bp.rate(q, a) >= bp.rate_min - kQosSlack;
}

FractionalProblem rate_only(FractionalProblem p) {
    p.den_coef.setZero();
    p.den_offset = 1.0;
    p.cs.qos.reset();
    return p;
}

}  // namespace

AlternatingResult alternating_maximize(const BlockPair& bp, const RVector& lam_q0, const std::optional<RVector>& lam_a0,
                                       const AlternatingOptions& opt, bool keep_block_solves) {
    if (lam_q0.size() != bp.dim_q) throw ContractViolation("alternating_maximize: start has wrong size");
    if ((lam_q0.array() < -1e-12).any() || lam_q0.sum() > bp.p_source_max * (1 + 1e-9) + 1e-12)
        throw SolverFailure("alternating_maximize: infeasible start");

    AlternatingResult res;
    RVector q = lam_q0.cwiseMax(0.0);
    RVector a = lam_a0 ? lam_a0->cwiseMax(0.0) : RVector(RVector::Zero(bp.dim_a));
    bool ok = lam_a0 && rate_ok(bp, q, a);
    double cur = ok ? bp.gee(q, a) : -std::numeric_limits<double>::infinity();
    std::optional<double> prev;
    if (lam_a0) {
        prev = bp.gee(q, a);
        res.trace.gee_per_iteration.push_back(*prev);
    }

    // Accepts a block update only if it does not lower the joint GEE, so the
    // trace is monotone even under rounding.
    auto accept = [&](const RVector& q_new, const RVector& a_new) {
        if (!rate_ok(bp, q_new, a_new)) return;
        double g = bp.gee(q_new, a_new);
        if (!ok || g >= cur) {
            q = q_new;
            a = a_new;
            cur = g;
            ok = true;
        }
    };

    for (int it = 1; it <= opt.max_iter; ++it) {
        res.trace.iterations = it;
        FractionalProblem pa = bp.a_block(q);
        RVector a_start = caps_satisfied(a, pa.cs, 1e-8) ? a : RVector(RVector::Zero(bp.dim_a));
        DinkelbachResult da = dinkelbach_maximize(pa, a_start, opt.solver);
        accept(q, da.x);

        FractionalProblem pq = bp.q_block(a);
        RVector q_start = caps_satisfied(q, pq.cs, 1e-8) ? q : project_feasible(q, pq.cs, opt.solver);
        DinkelbachResult dq = dinkelbach_maximize(pq, q_start, opt.solver);
        accept(dq.x, a);

        if (keep_block_solves) {
            res.block_solves.push_back(std::move(da));
            res.block_solves.push_back(std::move(dq));
        }
        if (!ok) break;  // rate target unreachable from this start
        double g = bp.gee(q, a);
        res.trace.gee_per_iteration.push_back(g);
        if (prev && std::abs(g - *prev) <= opt.eps) {
            res.trace.converged = true;
            break;
        }
        prev = g;
    }
    res.lam_q = q;
    res.lam_a = a;
    res.gee = bp.gee(q, a);
    res.rate = bp.rate(q, a);
    res.qos_met = rate_ok(bp, q, a);
    return res;
}

AlternatingResult maximize_rate(const BlockPair& bp, const AlternatingOptions& opt) {
    BlockPair rb = bp;
    rb.rate_min = 0.0;
    rb.a_block = [&bp](const RVector& q) { return rate_only(bp.a_block(q)); };
    rb.q_block = [&bp](const RVector& a) { return rate_only(bp.q_block(a)); };
    rb.gee = bp.rate;
    AlternatingOptions o = opt;
    o.eps = 1e-6;
    RVector q0 = RVector::Constant(bp.dim_q, bp.p_source_max / bp.dim_q);
    return alternating_maximize(rb, q0, std::nullopt, o);
}

RVector random_source_powers(int dim, double p_source_max, Rng& rng) {
    // Uniform on the simplex via normalized exponentials.
    RVector e(dim);
    for (int i = 0; i < dim; ++i) e(i) = -std::log(1.0 - rng.uniform());
    double s = e.sum();
    double frac = rng.uniform();
    return e * (frac * p_source_max / s);
}

MultistartResult multistart(const BlockPair& bp, int n_starts, Rng& rng, const AlternatingOptions& opt,
                            bool keep_block_solves) {
    if (n_starts < 1) throw ParameterError("multistart: n_starts must be >= 1");
    MultistartResult out;
    std::vector<std::uint64_t> seeds(static_cast<size_t>(n_starts));
    for (auto& s : seeds) s = rng.next_u64();

    std::optional<AlternatingResult> rate_max;
    for (int s = 0; s < n_starts; ++s) {
        Rng r(seeds[static_cast<size_t>(s)]);
        std::optional<RVector> q0;
        for (int attempt = 0; attempt < 20 && !q0; ++attempt) {
            RVector q = random_source_powers(bp.dim_q, bp.p_source_max, r);
            if (bp.rate_min <= 0.0) {
                q0 = q;
                break;
            }
            FractionalProblem pa = rate_only(bp.a_block(q));
            SubproblemResult sr = solve_subproblem(pa.numerator, pa.cs, RVector::Zero(bp.dim_a), opt.solver);
            if (pa.numerator.value(sr.x) >= bp.rate_min - kQosSlack) q0 = q;
        }
        if (!q0) {
            if (!rate_max) {
                rate_max = maximize_rate(bp, opt);
                out.max_rate = rate_max->rate;
            }
            if (rate_max->rate < bp.rate_min - kQosSlack) {
                out.feasible = false;
                return out;
            }
            q0 = rate_max->lam_q;
        }
        out.runs.push_back(alternating_maximize(bp, *q0, std::nullopt, opt, keep_block_solves));
    }

    for (size_t i = 0; i < out.runs.size(); ++i) {
        const auto& r = out.runs[i];
        if (!r.qos_met) continue;
        if (out.best_index < 0 || r.gee > out.runs[static_cast<size_t>(out.best_index)].gee)
            out.best_index = static_cast<int>(i);
    }
    if (out.best_index < 0) {
        out.feasible = false;
        return out;
    }
    out.feasible = true;
    out.best = out.runs[static_cast<size_t>(out.best_index)];
    for (const auto& r : out.runs)
        if (r.qos_met && out.best.gee - r.gee > opt.eps) ++out.runs_off_best;
    return out;
}

}  // namespace eerelay
