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

#include "eerelay/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eerelay {

namespace {

// Largest t >= 0 with t * dir inside the caps.
double max_step(const ConstraintSet& cs, const RVector& dir) {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& c : cs.caps) {
        double w = c.weights.dot(dir);
        if (w > 0) t = std::min(t, c.cap / w);
    }
    return t;
}

// Largest feasible value of coordinate k with the others fixed.
double max_coordinate(const ConstraintSet& cs, const RVector& x, int k) {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& c : cs.caps) {
        double w = c.weights(k);
        double used = c.weights.dot(x) - w * x(k);
        if (w > 0) t = std::min(t, (c.cap - used) / w);
    }
    return t;
}

bool qos_feasible(const ConstraintSet& cs, const RVector& x) {
    return !cs.qos || cs.qos->rate->value(x) >= cs.qos->threshold;
}

RVector sorted(RVector v, bool descending) {
    if (descending)
        std::sort(v.data(), v.data() + v.size(), std::greater<>());
    else
        std::sort(v.data(), v.data() + v.size());
    return v;
}

double min_eig(const CMatrix& m) { return evd_descending(0.5 * (m + m.adjoint())).values.minCoeff(); }

CMatrix f_lemma4(const CMatrix& m, const CMatrix& x) {
    const auto n = m.rows();
    CMatrix inner = CMatrix::Identity(n, n) + m * x.inverse() * m.adjoint();
    return inner.inverse();
}

RVector f_lemma5(double nu, const RVector& l, const RVector& lam) {
    RVector out(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        double den = nu + l(i) * lam(i);
        out(i) = den > 0 ? lam(i) / den : 0.0;
    }
    return out;
}

void record(LemmaReport& rep, bool ok, double margin) {
    ++rep.trials;
    if (!ok) ++rep.violations;
    rep.worst_margin = std::min(rep.worst_margin, margin);
}

}  // namespace

GridResult grid_search_gee(const std::function<double(const RVector&)>& objective, const ConstraintSet& cs,
                           const GridSpec& grid) {
    if (grid.dims < 1 || grid.dims > 4) throw ParameterError("grid_search_gee: dims must be in 1..4");
    if (grid.points_per_dim < 2) throw ParameterError("grid_search_gee: need at least 2 points per axis");
    if (static_cast<int>(grid.bounds.size()) != grid.dims || cs.dimension != grid.dims)
        throw ContractViolation("grid_search_gee: bounds do not match the dimension");
    if (std::pow(static_cast<double>(grid.points_per_dim), grid.dims) > kGridPointGuard)
        throw ParameterError("grid_search_gee: grid exceeds the point guard");
    if (cs.qos && !cs.qos->rate) throw ContractViolation("grid_search_gee: QoS needs an explicit rate function");

    const int n = grid.dims;
    const long per = grid.points_per_dim;
    long total = 1;
    for (int k = 0; k < n; ++k) total *= per;
    GridResult res;
    RVector x(n);
    auto consider = [&](const RVector& p) {
        if (!caps_satisfied(p, cs, 0.0) || !qos_feasible(cs, p)) return;
        ++res.feasible_points;
        double v = objective(p);
        if (!res.found || v > res.value) {
            res.found = true;
            res.value = v;
            res.best = p;
        }
    };
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (int k = n - 1; k >= 0; --k) {
            long i = rem % per;
            rem /= per;
            const auto& [lo, hi] = grid.bounds[static_cast<size_t>(k)];
            x(k) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(per - 1);
        }
        consider(x);
        // One boundary point per line along the last axis.
        if (grid.include_boundary && idx % per == per - 1) {
            RVector y = x;
            y(n - 1) = grid.bounds.back().first;
            double t = max_coordinate(cs, y, n - 1);
            if (std::isfinite(t) && t >= grid.bounds.back().first) {
                y(n - 1) = std::min(t, grid.bounds.back().second);
                consider(y);
            }
        }
    }
    return res;
}

GridResult grid_search_fractional(const FractionalProblem& prob, int points_per_dim, bool include_boundary) {
    GridSpec g;
    g.points_per_dim = points_per_dim;
    g.dims = prob.cs.dimension;
    g.include_boundary = include_boundary;
    for (int k = 0; k < g.dims; ++k) {
        RVector e = RVector::Unit(g.dims, k);
        double hi = max_step(prob.cs, e);
        if (!std::isfinite(hi)) throw ContractViolation("grid_search_fractional: unbounded coordinate");
        g.bounds.emplace_back(0.0, hi);
    }
    ConstraintSet cs = prob.cs;
    if (cs.qos && !cs.qos->rate) cs.qos->rate = prob.numerator;
    return grid_search_gee([&prob](const RVector& x) { return prob.numerator.value(x) / prob.denominator(x); }, cs,
                           g);
}

CMatrix random_unitary(int n, Rng& rng) {
    // QR of a complex Gaussian matrix with the phases of R's diagonal
    // removed gives a Haar unitary.
    CMatrix z = rng.complex_gaussian(n, n);
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        cplx d = r(i, i);
        double a = std::abs(d);
        if (a > 0) q.col(i) *= d / a;
    }
    return q;
}

CMatrix random_hpsd(int n, Rng& rng, double ridge) {
    CMatrix z = rng.complex_gaussian(n, n);
    return z * z.adjoint() + ridge * CMatrix::Identity(n, n);
}

bool check_lemma1(const CMatrix& t, const CMatrix& r, Rng& rng, int n_conjugations) {
    if (t.rows() != r.rows() || t.rows() != t.cols() || r.rows() != r.cols())
        throw ContractViolation("check_lemma1: dimension mismatch");
    // Commuting pair with opposite order: sum t_i (descending) r_i (ascending).
    const double lo = evd_descending(t).values.dot(sorted(evd_descending(r).values, false));
    const double tol = 1e-10 * std::max(1.0, t.norm() * r.norm());
    if ((t * r).trace().real() < lo - tol) return false;
    for (int k = 0; k < n_conjugations; ++k) {
        CMatrix u = random_unitary(static_cast<int>(t.rows()), rng);
        if ((t * u * r * u.adjoint()).trace().real() < lo - tol) return false;
    }
    return true;
}

bool check_lemma2(const CMatrix& t, const CMatrix& r, Rng& rng, int n_conjugations) {
    if (t.rows() != r.rows() || t.rows() != t.cols() || r.rows() != r.cols())
        throw ContractViolation("check_lemma2: dimension mismatch");
    const auto n = t.rows();
    RVector et = evd_descending(t).values;
    if (et.minCoeff() <= 0) throw ContractViolation("check_lemma2: T must be positive definite");
    RVector er = evd_descending(r).values;
    double lo = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) lo += std::log1p(std::max(er(i), 0.0) / et(i));
    const double tol = 1e-10 * std::max(1.0, std::abs(lo));
    // T^{-1/2} R T^{-1/2} is Hermitian with the same determinant.
    CMatrix s = inv_sqrt_hpd(t);
    auto value = [&](const CMatrix& rr) {
        return logdet_hpd(CMatrix::Identity(n, n) + s * rr * s);
    };
    if (value(r) < lo - tol) return false;
    for (int k = 0; k < n_conjugations; ++k) {
        CMatrix u = random_unitary(static_cast<int>(n), rng);
        if (value(u * r * u.adjoint()) < lo - tol) return false;
    }
    return true;
}

bool check_lemma3(const std::function<double(const CMatrix&)>& g, const CMatrix& x) {
    const auto n = x.rows();
    const double gx = g(x);
    const double tol = 1e-10 * std::max(1.0, std::abs(gx));
    for (Eigen::Index i = 0; i < n; ++i) {
        CMatrix gam = CMatrix::Identity(n, n);
        gam(i, i) = -1.0;
        if (std::abs(g(gam * x * gam) - gx) > tol)
            throw ContractViolation("check_lemma3: g is not invariant under sign flips");
    }
    CMatrix d = x.diagonal().asDiagonal();
    return g(d) >= gx - tol;
}

bool check_lemma4(const CMatrix& m, const CMatrix& a, const CMatrix& b) {
    CMatrix mid = 0.5 * (a + b);
    CMatrix gap = f_lemma4(m, mid) - 0.5 * f_lemma4(m, a) - 0.5 * f_lemma4(m, b);
    return min_eig(gap) >= -1e-9;
}

bool check_lemma5(double nu, const RVector& l, const RVector& a, const RVector& b) {
    if (nu < 0 || (l.array() < 0).any() || (a.array() < 0).any() || (b.array() < 0).any())
        throw ContractViolation("check_lemma5: inputs must be non-negative");
    RVector gap = f_lemma5(nu, l, 0.5 * (a + b)) - 0.5 * f_lemma5(nu, l, a) - 0.5 * f_lemma5(nu, l, b);
    return gap.minCoeff() >= -1e-9;
}

bool check_lemma6(const CMatrix& m1, const CMatrix& m2, double x) {
    const double h = 1e-6;
    CMatrix m = m1 + x * m2;
    CMatrix minv = m.inverse();
    const double analytic = (minv * m2).trace().real();
    const double fd = (logdet_hpd(m1 + (x + h) * m2) - logdet_hpd(m1 + (x - h) * m2)) / (2.0 * h);
    // Scale of the derivative: |tr(M^{-1} M2)| <= ||M^{-1}||_F ||M2||_F.
    const double scale = std::max(std::abs(analytic), minv.norm() * m2.norm());
    return std::abs(analytic - fd) <= 1e-5 * std::max(scale, 1e-300) || (scale == 0.0 && fd == 0.0);
}

LemmaReport falsify_lemma1(long trials, Rng& rng) {
    LemmaReport rep;
    for (long k = 0; k < trials; ++k) {
        int n = 2 + static_cast<int>(rng.uniform() * 3);
        CMatrix t = random_hpsd(n, rng), r = random_hpsd(n, rng);
        record(rep, check_lemma1(t, r, rng, 1), 0.0);
    }
    return rep;
}

LemmaReport falsify_lemma2(long trials, Rng& rng) {
    LemmaReport rep;
    for (long k = 0; k < trials; ++k) {
        int n = 2 + static_cast<int>(rng.uniform() * 3);
        CMatrix t = random_hpsd(n, rng, 0.1), r = random_hpsd(n, rng);
        record(rep, check_lemma2(t, r, rng, 1), 0.0);
    }
    return rep;
}

LemmaReport falsify_lemma3(long trials, Rng& rng) {
    LemmaReport rep;
    // log det(I + X) on PSD X is concave and invariant under sign flips.
    auto g = [](const CMatrix& x) { return logdet_hpd(CMatrix::Identity(x.rows(), x.cols()) + x); };
    for (long k = 0; k < trials; ++k) {
        int n = 2 + static_cast<int>(rng.uniform() * 3);
        CMatrix x = random_hpsd(n, rng);
        CMatrix d = x.diagonal().asDiagonal();
        record(rep, check_lemma3(g, x), g(d) - g(x));
    }
    return rep;
}

LemmaReport falsify_lemma4(long trials, Rng& rng) {
    LemmaReport rep;
    for (long k = 0; k < trials; ++k) {
        int n = 2 + static_cast<int>(rng.uniform() * 3);
        int mcols = 2 + static_cast<int>(rng.uniform() * 3);
        CMatrix m = rng.complex_gaussian(n, mcols);
        CMatrix a = random_hpsd(mcols, rng, 0.05), b = random_hpsd(mcols, rng, 0.05);
        CMatrix mid = 0.5 * (a + b);
        CMatrix gap = f_lemma4(m, mid) - 0.5 * f_lemma4(m, a) - 0.5 * f_lemma4(m, b);
        double margin = min_eig(gap);
        record(rep, check_lemma4(m, a, b), std::min(0.0, margin + 1e-9));
    }
    return rep;
}

LemmaReport falsify_lemma5(long trials, Rng& rng) {
    LemmaReport rep;
    for (long k = 0; k < trials; ++k) {
        int n = 1 + static_cast<int>(rng.uniform() * 4);
        double nu = rng.uniform() < 0.1 ? 0.0 : 2.0 * rng.uniform();
        RVector l(n), a(n), b(n);
        for (int i = 0; i < n; ++i) {
            l(i) = 3.0 * rng.uniform();
            a(i) = 5.0 * rng.uniform();
            b(i) = 5.0 * rng.uniform();
        }
        RVector gap = f_lemma5(nu, l, 0.5 * (a + b)) - 0.5 * f_lemma5(nu, l, a) - 0.5 * f_lemma5(nu, l, b);
        record(rep, check_lemma5(nu, l, a, b), std::min(0.0, gap.minCoeff() + 1e-9));
    }
    return rep;
}

LemmaReport falsify_lemma6(long trials, Rng& rng) {
    LemmaReport rep;
    for (long k = 0; k < trials; ++k) {
        int n = 2 + static_cast<int>(rng.uniform() * 3);
        CMatrix m1 = random_hpsd(n, rng, 0.5);
        CMatrix z = rng.complex_gaussian(n, n);
        CMatrix m2 = 0.5 * (z + z.adjoint());
        // Keep M1 + x M2 well inside the positive definite cone.
        double lmin = evd_descending(m1).values.minCoeff();
        double spread = evd_descending(m2).values.cwiseAbs().maxCoeff();
        double x = 0.5 * rng.uniform() * lmin / std::max(spread, 1e-12);
        record(rep, check_lemma6(m1, m2, x), 0.0);
    }
    return rep;
}

RVector sample_feasible(const ConstraintSet& cs, Rng& rng) {
    const int n = cs.dimension;
    RVector e(n);
    for (int i = 0; i < n; ++i) e(i) = -std::log(1.0 - rng.uniform());
    e /= e.sum();
    double t = max_step(cs, e);
    if (!std::isfinite(t)) throw ContractViolation("sample_feasible: unbounded feasible set");
    return e * (t * rng.uniform());
}

std::pair<RVector, RVector> sample_joint_feasible(const BlockPair& bp, Rng& rng) {
    RVector q = random_source_powers(bp.dim_q, bp.p_source_max, rng);
    FractionalProblem pa = bp.a_block(q);
    RVector a = sample_feasible(pa.cs, rng);
    return {q, a};
}

}  // namespace eerelay
