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

#include "eerelay/beamforming.hpp"

#include <algorithm>
#include <cmath>

namespace eerelay {

namespace {

// Running mean and standard error of a per-sample quantity.
struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    long n = 0;
    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double std_error() const {
        if (n < 2) return 0.0;
        double m = mean();
        double var = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
    }
};

int sign_of(double v) { return (v > 0) - (v < 0); }

// Per-sample ingredients of the G-case expectations.
struct GSample {
    double n1, n2, cross;
};

std::vector<GSample> draw_g_samples(const BeamInstanceG& inst, int n_mc, Rng& rng) {
    const int nd = static_cast<int>(inst.lam_r_g.size());
    const int nr = static_cast<int>(inst.lam_t_g_eigs.size());
    if (nr < 2) return {};
    RVector root = inst.lam_r_g.cwiseMax(0.0).cwiseSqrt();
    std::vector<GSample> out;
    out.reserve(static_cast<size_t>(n_mc));
    for (int m = 0; m < n_mc; ++m) {
        CMatrix x = root.asDiagonal() * rng.complex_gaussian(nd, nr);
        CMatrix w = inst.sigma2_dest * CMatrix::Identity(nd, nd) + inst.sigma2_relay * x * x.adjoint();
        CMatrix f = inv_sqrt_hpd(w) * x;
        out.push_back({f.col(0).squaredNorm(), f.col(1).squaredNorm(), std::norm(f.col(1).dot(f.col(0)))});
    }
    return out;
}

Objective gram_objective(const GramBank& bank, const RVector& scale) {
    Objective o;
    o.value = [&bank, scale](const RVector& x) { return bank.value(scale.cwiseProduct(x)); };
    o.value_grad = [&bank, scale](const RVector& x, RVector& g) {
        double v = bank.value(scale.cwiseProduct(x), &g);
        g = g.cwiseProduct(scale);
        return v;
    };
    o.curvature = [&bank, scale](const RVector& x) {
        RVector g;
        RMatrix h;
        bank.value(scale.cwiseProduct(x), &g, &h);
        return RVector(h.diagonal().cwiseAbs().cwiseProduct(scale.cwiseAbs2()));
    };
    return o;
}

BeamSolve finish_solve(const DinkelbachResult& r, double p_cap) {
    BeamSolve out;
    out.lambda = r.x;
    out.value = r.mu;
    double s = r.x.sum();
    out.normalized = s > 0 ? RVector(r.x / s) : RVector(RVector::Zero(r.x.size()));
    out.rank_one = s > 0 && (1.0 - out.normalized(0)) <= 1e-3;
    out.full_power = r.x(0) >= p_cap * (1.0 - 1e-3);
    return out;
}

}  // namespace

void BeamInstanceH::validate() const {
    if (lam_t.size() < 1 || d.size() != lam_t.size()) throw ContractViolation("BeamInstanceH: size mismatch");
    if (lam_c.size() < 1 || (lam_c.array() < 0).any()) throw ContractViolation("BeamInstanceH: bad Lambda_C");
    if ((lam_t.array() <= 0).any()) throw ContractViolation("BeamInstanceH: lam_t must be positive");
    if (!(b > 0) || !(c > 0)) throw ContractViolation("BeamInstanceH: b and c must be positive");
    for (Eigen::Index i = 1; i < d.size(); ++i)
        if (d(0) > d(i) + 1e-12) throw ContractViolation("BeamInstanceH: d_1 must be the smallest");
}

void BeamInstanceG::validate() const {
    const Eigen::Index ns = lam_h.size();
    if (ns < 1 || d.size() != ns || lam_a.size() < ns || lam_t_g_eigs.size() != lam_a.size())
        throw ContractViolation("BeamInstanceG: size mismatch");
    for (Eigen::Index i = 0; i < lam_a.size(); ++i)
        if (std::abs(lam_a(i) * lam_t_g_eigs(i) - 1.0) > 1e-12)
            throw ContractViolation("BeamInstanceG: lam_t_g lam_a must equal one");
    if (!(b > 0)) throw ContractViolation("BeamInstanceG: b must be positive");
    if (lam_r_g.size() < 1) throw ContractViolation("BeamInstanceG: empty receive correlation");
}

BeamInstanceH make_beam_instance_h(const StatHInstance& inst, const RVector& ty) {
    const auto& bu = inst.budget;
    BeamInstanceH out;
    out.lam_c = effective_gains_h(inst, ty);
    out.lam_t = inst.lam_t_h;
    out.c = ty.dot(inst.lam_g_tilde);
    out.b = bu.p_circuit;
    for (int j = 0; j < inst.n_active; ++j) out.b += bu.sigma2_relay * ty(j) * inst.lam_g_tilde(j) / inst.lam_r_h(j);
    out.d = (out.lam_t.cwiseInverse().array() + out.c).matrix();
    out.p_s_max = bu.p_source_max;
    out.p_r_max = bu.p_relay_max;
    out.p_c = bu.p_circuit;
    return out;
}

BeamInstanceG make_beam_instance_g(const StatGInstance& inst) {
    const auto& bu = inst.budget;
    BeamInstanceG out;
    out.lam_r_g = inst.lam_r_g;
    out.lam_t_g_eigs = inst.lam_t_g;
    out.lam_a = inst.lam_t_g.cwiseInverse();
    out.lam_h = inst.lam_h;
    out.b = bu.sigma2_relay * out.lam_a.sum() + bu.p_circuit;
    const Eigen::Index ns = out.lam_h.size();
    out.d = (out.lam_a.head(ns).cwiseProduct(out.lam_h).cwiseInverse().array() + 1.0).matrix();
    out.p_s_max = bu.p_source_max;
    out.p_r_max = bu.p_relay_max;
    out.p_c = bu.p_circuit;
    out.sigma2_relay = bu.sigma2_relay;
    out.sigma2_dest = bu.sigma2_dest;
    return out;
}

double p_cap_h(const BeamInstanceH& inst) {
    double p = std::min(inst.p_s_max * inst.lam_t(0), (inst.p_r_max + inst.p_c - inst.b) / inst.c);
    if (!(p > 0)) throw ParameterError("p_cap_h: instance is infeasible (non-positive power cap)");
    return p;
}

double p_cap_g(const BeamInstanceG& inst) {
    double p = std::min(inst.lam_a(0) * inst.lam_h(0) * inst.p_s_max, inst.p_r_max + inst.p_c - inst.b);
    if (!(p > 0)) throw ParameterError("p_cap_g: instance is infeasible (non-positive power cap)");
    return p;
}

std::vector<CVector> draw_f1_h(const RVector& lam_c, int n_mc, Rng& rng) {
    if (n_mc < 1) throw ParameterError("draw_f1_h: n_mc must be >= 1");
    RVector root = lam_c.cwiseMax(0.0).cwiseSqrt();
    std::vector<CVector> out;
    out.reserve(static_cast<size_t>(n_mc));
    for (int m = 0; m < n_mc; ++m) out.emplace_back(root.asDiagonal() * rng.complex_gaussian(static_cast<int>(lam_c.size()), 1));
    return out;
}

CConstants c_constants_h(const BeamInstanceH& inst, int n_mc, Rng& rng) {
    inst.validate();
    const double p = p_cap_h(inst);
    const double tr = inst.lam_c.sum();
    const Eigen::Index ns = inst.lam_t.size();
    std::vector<Accumulator> acc(static_cast<size_t>(ns));
    for (const auto& f : draw_f1_h(inst.lam_c, n_mc, rng)) {
        double n = f.squaredNorm();
        double q = f.cwiseAbs2().dot(inst.lam_c);
        double e3 = std::log1p(p * n);
        for (Eigen::Index i = 0; i < ns; ++i)
            acc[static_cast<size_t>(i)].add((tr - p * q / (1.0 + p * n)) * (inst.b + p * inst.d(0)) - inst.d(i) * e3);
    }
    CConstants out{RVector(ns), RVector(ns)};
    for (Eigen::Index i = 0; i < ns; ++i) {
        out.value(i) = acc[static_cast<size_t>(i)].mean();
        out.std_error(i) = acc[static_cast<size_t>(i)].std_error();
    }
    return out;
}

BeamformingVerdict fp_condition_h(const BeamInstanceH& inst, const std::vector<CVector>& f1) {
    inst.validate();
    BeamformingVerdict v;
    const double p = p_cap_h(inst);
    v.p_cap = p;
    const double tr = inst.lam_c.sum();
    const double den = inst.b + p * inst.d(0);
    const bool spread = inst.lam_t.size() >= 2;
    const double d2 = spread ? inst.d(1) : inst.d(0);
    Accumulator c2, lhs1, lhs2;
    for (const auto& f : f1) {
        double n = f.squaredNorm();
        double q = f.cwiseAbs2().dot(inst.lam_c);
        double e1 = q / (1.0 + p * n);
        double e2 = 1.0 / (1.0 + p * n);
        double e3 = std::log1p(p * n);
        c2.add((tr - p * e1) * den - d2 * e3);
        lhs1.add(p * (tr - p * e1) + e2 + p * (inst.d(0) - d2) / den * e3);
        lhs2.add(e2 + p * inst.d(0) / den * e3);
    }
    // With one stream the only perturbation is backing off power, which is
    // the second form of the condition.
    const bool first = spread && c2.mean() >= 0.0;
    v.c2_sign = spread ? sign_of(c2.mean()) : 0;
    const Accumulator& a = first ? lhs1 : lhs2;
    v.condition_lhs = a.mean();
    v.mc_std_error = a.std_error();
    v.fp_optimal = v.condition_lhs <= v.threshold_rhs;
    return v;
}

BeamformingVerdict fp_condition_h(const BeamInstanceH& inst, int n_mc, Rng& rng) {
    return fp_condition_h(inst, draw_f1_h(inst.lam_c, n_mc, rng));
}

CConstants c_constants_g(const BeamInstanceG& inst, int n_mc, Rng& rng) {
    inst.validate();
    const double p = p_cap_g(inst);
    const Eigen::Index ns = inst.lam_h.size();
    const double t1 = inst.lam_t_g_eigs(0);
    std::vector<Accumulator> acc(static_cast<size_t>(ns));
    for (const auto& s : draw_g_samples(inst, n_mc, rng)) {
        double e3 = std::log1p(p * t1 * s.n1);
        double inner = s.n2 - p * t1 * s.cross / (1.0 + p * t1 * s.n1);
        for (Eigen::Index i = 0; i < ns; ++i)
            acc[static_cast<size_t>(i)].add(inst.lam_t_g_eigs(i) * inner * (inst.b + p * inst.d(0)) - inst.d(i) * e3);
    }
    CConstants out{RVector(ns), RVector(ns)};
    for (Eigen::Index i = 0; i < ns; ++i) {
        out.value(i) = acc[static_cast<size_t>(i)].mean();
        out.std_error(i) = acc[static_cast<size_t>(i)].std_error();
    }
    return out;
}

BeamformingVerdict fp_condition_g(const BeamInstanceG& inst, int n_mc, Rng& rng) {
    inst.validate();
    if (n_mc < 1) throw ParameterError("fp_condition_g: n_mc must be >= 1");
    BeamformingVerdict v;
    const double p = p_cap_g(inst);
    v.p_cap = p;
    const bool spread = inst.lam_h.size() >= 2 && inst.lam_t_g_eigs.size() >= 2;
    const double t1 = inst.lam_t_g_eigs(0);
    const double t2 = spread ? inst.lam_t_g_eigs(1) : 0.0;
    const double d2 = spread ? inst.d(1) : inst.d(0);
    const double den = inst.b + p * inst.d(0);
    Accumulator c2, lhs1, lhs2;
    if (spread) {
        for (const auto& s : draw_g_samples(inst, n_mc, rng)) {
            double e2 = 1.0 / (1.0 + p * t1 * s.n1);
            double e3 = std::log1p(p * t1 * s.n1);
            double inner = s.n2 - p * t1 * s.cross * e2;
            c2.add(t2 * inner * den - d2 * e3);
            lhs1.add(p * t2 * inner + e2 + p * (inst.d(0) - d2) / den * e3);
            lhs2.add(e2 + p * inst.d(0) / den * e3);
        }
    } else {
        // f_1 alone: draw the full F and keep its first column.
        const int nd = static_cast<int>(inst.lam_r_g.size());
        const int nr = static_cast<int>(inst.lam_t_g_eigs.size());
        RVector root = inst.lam_r_g.cwiseMax(0.0).cwiseSqrt();
        for (int m = 0; m < n_mc; ++m) {
            CMatrix x = root.asDiagonal() * rng.complex_gaussian(nd, nr);
            CMatrix w = inst.sigma2_dest * CMatrix::Identity(nd, nd) + inst.sigma2_relay * x * x.adjoint();
            double n1 = (inv_sqrt_hpd(w) * x).col(0).squaredNorm();
            lhs2.add(1.0 / (1.0 + p * t1 * n1) + p * inst.d(0) / den * std::log1p(p * t1 * n1));
        }
    }
    const bool first = spread && c2.mean() >= 0.0;
    v.c2_sign = spread ? sign_of(c2.mean()) : 0;
    const Accumulator& a = first ? lhs1 : lhs2;
    v.condition_lhs = a.mean();
    v.mc_std_error = a.std_error();
    v.fp_optimal = v.condition_lhs <= v.threshold_rhs;
    return v;
}

double relay_budget_for_cap(const BeamInstanceH& inst, double p) { return inst.c * p + inst.b - inst.p_c; }

ThresholdScan threshold_scan_h(const BeamInstanceH& inst_template, const std::vector<double>& p_grid, int n_mc,
                               Rng& rng) {
    if (!std::is_sorted(p_grid.begin(), p_grid.end())) throw ParameterError("threshold_scan_h: grid must ascend");
    auto f1 = draw_f1_h(inst_template.lam_c, n_mc, rng);
    ThresholdScan out;
    bool seen_bad = false;
    for (size_t k = 0; k < p_grid.size(); ++k) {
        BeamInstanceH inst = inst_template;
        inst.p_r_max = relay_budget_for_cap(inst, p_grid[k]);
        ScanRow row{p_grid[k], inst.p_r_max, fp_condition_h(inst, f1)};
        if (row.verdict.fp_optimal) {
            out.threshold_index = static_cast<int>(k);
            out.threshold_p = p_grid[k];
            if (seen_bad) ++out.monotonicity_violations;
        } else {
            seen_bad = true;
        }
        out.rows.push_back(row);
    }
    return out;
}

GramBank beam_grams_h(const BeamInstanceH& inst, int n_samples, Rng& rng) {
    inst.validate();
    const int nr = static_cast<int>(inst.lam_c.size());
    const int ns = static_cast<int>(inst.lam_t.size());
    if (ns > kMaxGramDim) throw ParameterError("beam_grams_h: too many streams");
    RVector root = inst.lam_c.cwiseSqrt();
    std::vector<SmallCMatrix> g;
    g.reserve(static_cast<size_t>(n_samples));
    for (int m = 0; m < n_samples; ++m) {
        CMatrix f = root.asDiagonal() * rng.complex_gaussian(nr, ns);
        g.emplace_back(f.adjoint() * f);
    }
    return GramBank(std::move(g));
}

GramBank beam_grams_g(const BeamInstanceG& inst, int n_samples, Rng& rng) {
    inst.validate();
    const int nd = static_cast<int>(inst.lam_r_g.size());
    const int nr = static_cast<int>(inst.lam_t_g_eigs.size());
    const int ns = static_cast<int>(inst.lam_h.size());
    if (ns > nr || ns > kMaxGramDim) throw ParameterError("beam_grams_g: stream count exceeds relay dimension");
    RVector root = inst.lam_r_g.cwiseMax(0.0).cwiseSqrt();
    std::vector<SmallCMatrix> g;
    g.reserve(static_cast<size_t>(n_samples));
    for (int m = 0; m < n_samples; ++m) {
        CMatrix x = root.asDiagonal() * rng.complex_gaussian(nd, nr);
        CMatrix w = inst.sigma2_dest * CMatrix::Identity(nd, nd) + inst.sigma2_relay * x * x.adjoint();
        CMatrix f = (inv_sqrt_hpd(w) * x).leftCols(ns);
        g.emplace_back(f.adjoint() * f);
    }
    return GramBank(std::move(g));
}

FractionalProblem beam_problem_h(const BeamInstanceH& inst, const GramBank& bank) {
    inst.validate();
    const Eigen::Index ns = inst.lam_t.size();
    FractionalProblem p;
    p.numerator = gram_objective(bank, RVector::Ones(ns));
    p.den_coef = inst.d;
    p.den_offset = inst.b;
    p.cs.dimension = static_cast<int>(ns);
    p.cs.caps.push_back({RVector::Ones(ns), std::max(0.0, (inst.p_r_max + inst.p_c - inst.b) / inst.c)});
    p.cs.caps.push_back({inst.lam_t.cwiseInverse(), inst.p_s_max});
    return p;
}

FractionalProblem beam_problem_g(const BeamInstanceG& inst, const GramBank& bank) {
    inst.validate();
    const Eigen::Index ns = inst.lam_h.size();
    FractionalProblem p;
    p.numerator = gram_objective(bank, inst.lam_t_g_eigs.head(ns));
    p.den_coef = inst.d;
    p.den_offset = inst.b;
    p.cs.dimension = static_cast<int>(ns);
    p.cs.caps.push_back({RVector::Ones(ns), std::max(0.0, inst.p_r_max + inst.p_c - inst.b)});
    p.cs.caps.push_back({inst.lam_a.head(ns).cwiseProduct(inst.lam_h).cwiseInverse(), inst.p_s_max});
    return p;
}

BeamSolve solve_beam_h(const BeamInstanceH& inst, const GramBank& bank, const SolverOptions& opt) {
    auto prob = beam_problem_h(inst, bank);
    RVector x0 = project_feasible(RVector::Constant(prob.cs.dimension, 0.5 * p_cap_h(inst)), prob.cs, opt);
    return finish_solve(dinkelbach_maximize(prob, x0, opt), p_cap_h(inst));
}

BeamSolve solve_beam_g(const BeamInstanceG& inst, const GramBank& bank, const SolverOptions& opt) {
    auto prob = beam_problem_g(inst, bank);
    RVector x0 = project_feasible(RVector::Constant(prob.cs.dimension, 0.5 * p_cap_g(inst)), prob.cs, opt);
    return finish_solve(dinkelbach_maximize(prob, x0, opt), p_cap_g(inst));
}

double to_dbw(double watts) { return 10.0 * std::log10(watts); }
double from_dbw(double dbw) { return std::pow(10.0, dbw / 10.0); }

}  // namespace eerelay
