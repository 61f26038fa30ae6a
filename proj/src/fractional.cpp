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

#include "eerelay/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace eerelay {

namespace {

// Root nu >= 0 of w . max(0, x - nu w) = c for a single cap (the map is
// piecewise linear and non-increasing). Returns 0 when already feasible.
double single_cap_multiplier(const RVector& x, const RVector& w, double c) {
    const Eigen::Index n = x.size();
    double h0 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (x(i) > 0) h0 += w(i) * x(i);
    if (h0 <= c) return 0.0;
    // Breakpoints where a coordinate hits zero.
    std::vector<double> bp;
    for (Eigen::Index i = 0; i < n; ++i)
        if (w(i) > 0 && x(i) > 0) bp.push_back(x(i) / w(i));
    std::sort(bp.begin(), bp.end());
    double prev = 0.0;
    double h = h0;
    for (double b : bp) {
        // On [prev, b] the active set is constant; slope = -sum w_i^2.
        double slope = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (w(i) > 0 && x(i) - prev * w(i) > 0) slope += w(i) * w(i);
        double hb = h - slope * (b - prev);
        if (hb <= c) return slope > 0 ? prev + (h - c) / slope : prev;
        prev = b;
        h = hb;
    }
    return prev;
}

RVector clip_shift(const RVector& x, const RVector& w, double nu) {
    return (x - nu * w).cwiseMax(0.0);
}

}  // namespace

bool caps_satisfied(const RVector& x, const ConstraintSet& cs, double tol) {
    if ((x.array() < -tol).any()) return false;
    for (const auto& c : cs.caps)
        if (c.weights.dot(x) > c.cap + tol) return false;
    return true;
}

RVector project_feasible(const RVector& x, const ConstraintSet& cs, const SolverOptions& opt) {
    if (cs.caps.size() > 2) throw ContractViolation("project_feasible: at most two linear caps");
    for (const auto& c : cs.caps) {
        if (c.cap < 0) throw ContractViolation("project_feasible: empty feasible set (negative cap)");
        if ((c.weights.array() < 0).any()) throw ContractViolation("project_feasible: negative cap weights");
    }
    RVector y = x.cwiseMax(0.0);
    if (caps_satisfied(y, cs, 0.0)) return y;

    if (cs.caps.size() == 1) {
        const auto& c = cs.caps[0];
        y = clip_shift(x, c.weights, single_cap_multiplier(x, c.weights, c.cap));
    } else {
        const auto& c1 = cs.caps[0];
        const auto& c2 = cs.caps[1];
        // For fixed nu1 the optimal nu2 is exact; the outer dual derivative
        // w1 . y(nu1) - c1 is non-increasing in nu1, so bisect on it.
        auto inner = [&](double nu1) {
            RVector xs = x - nu1 * c1.weights;
            return clip_shift(xs, c2.weights, single_cap_multiplier(xs, c2.weights, c2.cap));
        };
        y = inner(0.0);
        if (c1.weights.dot(y) > c1.cap) {
            double lo = 0.0, hi = 1.0;
            while (c1.weights.dot(inner(hi)) > c1.cap && hi < 1e300) hi *= 2.0;
            for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
                double mid = 0.5 * (lo + hi);
                if (c1.weights.dot(inner(mid)) > c1.cap) lo = mid;
                else hi = mid;
            }
            y = inner(hi);
        }
    }
    // Pull residual violations back by scaling the coordinates a cap touches;
    // weights are non-negative so no other constraint gets worse.
    for (const auto& c : cs.caps) {
        double s = c.weights.dot(y);
        if (s > c.cap + opt.feasibility_tol * 1e-2 || (c.cap == 0.0 && s > 0.0)) {
            double f = s > 0 ? c.cap / s : 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i)
                if (c.weights(i) > 0) y(i) *= f;
        }
    }
    return y;
}

SubproblemResult solve_subproblem(const Objective& obj, const ConstraintSet& cs, const RVector& x0,
                                  const SolverOptions& opt) {
    SubproblemResult r;
    const Eigen::Index n = x0.size();
    RVector x = project_feasible(x0, cs, opt);
    RVector g(n);
    double f = obj.value_grad(x, g);
    if (!std::isfinite(f) || !g.allFinite()) throw SolverFailure("solve_subproblem: non-finite objective at start");

    // Iterate in y = x / s. With s_i = |H_ii|^{-1/2} the scaled Hessian has
    // a unit diagonal; the caps are rewritten for y.
    const bool scaled = opt.diagonal_scaling && static_cast<bool>(obj.curvature);
    RVector s = RVector::Ones(n);
    ConstraintSet ycs = cs;
    double step = 1.0;
    auto rescale = [&]() {
        RVector h = obj.curvature(x).cwiseAbs();
        const double hmax = h.size() ? h.maxCoeff() : 0.0;
        if (!(hmax > 0) || !h.allFinite()) {
            s.setOnes();
        } else {
            for (Eigen::Index i = 0; i < n; ++i) s(i) = 1.0 / std::sqrt(std::max(h(i), 1e-12 * hmax));
        }
        for (size_t k = 0; k < cs.caps.size(); ++k) ycs.caps[k].weights = cs.caps[k].weights.cwiseProduct(s);
        step = 1.0;
    };

    RVector y(n), xn(n), gn(n);
    int stalled = 0;
    for (r.iterations = 0; r.iterations < opt.pg_max_iter; ++r.iterations) {
        r.pg_norm = (project_feasible(x + g, cs, opt) - x).norm();
        if (r.pg_norm <= opt.pg_tol) {
            r.converged = true;
            break;
        }
        if (scaled && r.iterations % opt.rescale_every == 0) rescale();
        y = x.cwiseQuotient(s);
        RVector gy = g.cwiseProduct(s);
        double t = opt.spectral_step ? step : 1.0;
        bool accepted = false;
        double fn = 0.0;
        RVector yn(n);
        for (int bt = 0; bt < 80; ++bt) {
            yn = project_feasible(y + t * gy, ycs, opt);
            xn = yn.cwiseProduct(s);
            fn = obj.value_grad(xn, gn);
            if (std::isfinite(fn) && fn >= f + opt.armijo_sigma * g.dot(xn - x)) {
                accepted = true;
                break;
            }
            t *= opt.armijo_shrink;
        }
        if (!accepted) break;  // no ascent left at machine precision
        RVector sy = yn - y;
        if (sy.squaredNorm() == 0.0) break;
        double curv = sy.dot(gn.cwiseProduct(s) - gy);
        step = curv < 0 ? std::clamp(sy.squaredNorm() / -curv, 1e-12, 1e12) : std::min(1e12, 4.0 * t);
        // Near a kink of the feasible set the PG norm can sit just above
        // pg_tol while the objective no longer moves in double precision.
        stalled = fn - f <= opt.stall_rel * std::max(1.0, std::abs(f)) ? stalled + 1 : 0;
        x = xn;
        f = fn;
        g = gn;
        if (stalled >= opt.stall_iters) break;
    }
    r.x = x;
    r.value = f;
    return r;
}

namespace {

double rate_of(const FractionalProblem& prob, const RVector& x) {
    const auto& q = *prob.cs.qos;
    return q.rate ? q.rate->value(x) : prob.numerator.value(x);
}

bool qos_ok(const FractionalProblem& prob, const RVector& x, double tol) {
    return !prob.cs.qos || rate_of(prob, x) >= prob.cs.qos->threshold - tol;
}

Objective lagrangian(const FractionalProblem& prob, double mu, double theta) {
    Objective o;
    const bool shared = !(prob.cs.qos && prob.cs.qos->rate);
    const double thr = prob.cs.qos ? prob.cs.qos->threshold : 0.0;
    o.value_grad = [&prob, mu, theta, shared, thr](const RVector& x, RVector& g) {
        double v = prob.numerator.value_grad(x, g);
        if (theta != 0.0) {
            if (shared) {
                v += theta * (v - thr);
                g *= 1.0 + theta;
            } else {
                RVector gr(x.size());
                double rv = prob.cs.qos->rate->value_grad(x, gr);
                v += theta * (rv - thr);
                g += theta * gr;
            }
        }
        g -= mu * prob.den_coef;
        return v - mu * prob.denominator(x);
    };
    o.value = [o](const RVector& x) {
        RVector g(x.size());
        return o.value_grad(x, g);
    };
    if (prob.numerator.curvature && (shared || theta == 0.0 || prob.cs.qos->rate->curvature)) {
        o.curvature = [&prob, theta, shared](const RVector& x) {
            RVector h = prob.numerator.curvature(x);
            if (theta != 0.0) {
                if (shared) h *= 1.0 + theta;
                else h += theta * prob.cs.qos->rate->curvature(x);
            }
            return h;
        };
    }
    return o;
}

}  // namespace

SubproblemResult eval_F(const FractionalProblem& prob, double mu, const RVector& x0, const SolverOptions& opt) {
    auto finish = [&](SubproblemResult r) {
        r.value = prob.numerator.value(r.x) - mu * prob.denominator(r.x);
        return r;
    };
    SubproblemResult r = solve_subproblem(lagrangian(prob, mu, 0.0), prob.cs, x0, opt);
    if (qos_ok(prob, r.x, opt.qos_tol)) return finish(r);

    // Dualize the rate constraint and bisect the multiplier.
    double lo = 0.0, hi = 1.0;
    SubproblemResult rhi = solve_subproblem(lagrangian(prob, mu, hi), prob.cs, r.x, opt);
    while (!qos_ok(prob, rhi.x, opt.qos_tol) && hi < 1e12) {
        hi *= 2.0;
        rhi = solve_subproblem(lagrangian(prob, mu, hi), prob.cs, rhi.x, opt);
    }
    if (!qos_ok(prob, rhi.x, opt.qos_tol)) {
        rhi.qos_met = false;
        return finish(rhi);
    }
    for (int it = 0; it < 60 && hi - lo > 1e-9 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        SubproblemResult rm = solve_subproblem(lagrangian(prob, mu, mid), prob.cs, rhi.x, opt);
        if (qos_ok(prob, rm.x, opt.qos_tol)) {
            hi = mid;
            rhi = rm;
        } else {
            lo = mid;
        }
    }
    return finish(rhi);
}

DinkelbachResult dinkelbach_maximize(const FractionalProblem& prob, const RVector& x0, const SolverOptions& opt) {
    if (x0.size() != prob.cs.dimension || prob.den_coef.size() != prob.cs.dimension)
        throw ContractViolation("dinkelbach_maximize: dimension mismatch");
    if (!caps_satisfied(x0, prob.cs, 1e-8)) throw SolverFailure("dinkelbach_maximize: infeasible start");

    DinkelbachResult res;
    RVector x = project_feasible(x0, prob.cs, opt);
    const bool start_ok = qos_ok(prob, x, opt.qos_tol);
    double mu = start_ok ? prob.numerator.value(x) / prob.denominator(x) : 0.0;
    if (!std::isfinite(mu)) throw SolverFailure("dinkelbach_maximize: non-finite ratio at start");

    RVector best = x;
    double best_ratio = start_ok ? mu : -std::numeric_limits<double>::infinity();
    bool have_feasible = start_ok;

    for (res.iterations = 1; res.iterations <= opt.dinkelbach_max_iter; ++res.iterations) {
        SubproblemResult sr = eval_F(prob, mu, x, opt);
        if (!std::isfinite(sr.value)) {
            throw SolverFailure("dinkelbach_maximize: non-finite F at mu=" + std::to_string(mu) +
                                " iteration " + std::to_string(res.iterations));
        }
        res.mu_trace.push_back(mu);
        res.f_trace.push_back(sr.value);
        if (!sr.qos_met) break;  // QoS unattainable in this block
        double ratio = prob.numerator.value(sr.x) / prob.denominator(sr.x);
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = sr.x;
            have_feasible = true;
        }
        if (sr.value <= opt.dinkelbach_tol || !(ratio > mu)) {
            res.converged = true;
            break;
        }
        mu = ratio;
        x = sr.x;
    }
    if (res.iterations > opt.dinkelbach_max_iter) res.iterations = opt.dinkelbach_max_iter;
    res.x = best;
    res.qos_met = have_feasible;
    res.mu = have_feasible ? best_ratio : 0.0;
    res.f_of_mu = res.f_trace.empty() ? 0.0 : res.f_trace.back();
    return res;
}

}  // namespace eerelay
