# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------
"""Reference values for the C++ tests, computed with scipy quadrature and
optimizers independently of the library. Output is pasted into
tests/oracle_values.hpp; rerun only to audit, never to match the code."""

import math

import numpy as np
from scipy import integrate, optimize, special


def scalar_ratio():
    f = lambda p: -math.log2(1 + p) / (p + 5)
    r = optimize.minimize_scalar(f, bounds=(0, 10), method="bounded", options={"xatol": 1e-12})
    return r.x, -r.fun


def exp_log_gamma(k, a):
    # E ln(1 + a X), X ~ Gamma(k, 1)
    g = lambda x: math.log1p(a * x) * x ** (k - 1) * math.exp(-x) / math.gamma(k)
    return integrate.quad(g, 0, np.inf, epsabs=1e-13, epsrel=1e-12)[0]


def exp_log_exp1(a):
    # E ln(1 + a X), X ~ Exp(1), closed form e^{1/a} E1(1/a)
    return math.exp(1 / a) * special.exp1(1 / a)


def fig5_lhs(p):
    # Lambda_C = I_2, lambda_t = (2, 1), b = 0.1, c = 0.5, ||f1||^2 ~ Gamma(2, 1)
    b, c = 0.1, 0.5
    d1, d2 = c + 0.5, c + 1.0
    pdf = lambda x: x * math.exp(-x)
    e1 = integrate.quad(lambda x: x / (1 + p * x) * pdf(x), 0, np.inf, epsrel=1e-12)[0]
    e2 = integrate.quad(lambda x: 1 / (1 + p * x) * pdf(x), 0, np.inf, epsrel=1e-12)[0]
    e3 = integrate.quad(lambda x: math.log1p(p * x) * pdf(x), 0, np.inf, epsrel=1e-12)[0]
    den = b + p * d1
    c2 = (2 - p * e1) * den - d2 * e3
    if c2 >= 0:
        return p * (2 - p * e1) + e2 + p * (d1 - d2) / den * e3, c2
    return e2 + p * d1 / den * e3, c2


def fig5_flip():
    f = lambda db: fig5_lhs(10 ** (db / 10))[0] - 1
    return optimize.brentq(f, -8, -3, xtol=1e-10)


def perfect_single_stream(h, g, ps, pr, pc):
    # max log2(1 + a q h g / (1 + a g)) / (q + a (h q + 1) + pc)
    def neg(x):
        q, a = x
        return -math.log2(1 + a * q * h * g / (1 + a * g)) / (q + a * (h * q + 1) + pc)

    cons = [{"type": "ineq", "fun": lambda x: pr - x[1] * (h * x[0] + 1)}]
    best = None
    for q0 in np.linspace(0.05, ps, 12):
        for a0 in np.linspace(0.01, pr / (h * q0 + 1), 12):
            r = optimize.minimize(neg, [q0, a0], bounds=[(0, ps), (0, None)], constraints=cons, method="SLSQP",
                                  options={"ftol": 1e-15, "maxiter": 500})
            if r.success and (best is None or r.fun < best.fun):
                best = r
    return best.x, -best.fun


if __name__ == "__main__":
    x, v = scalar_ratio()
    print(f"scalar ratio argmax {x:.15g} value {v:.15g}")
    for k, a in [(1, 2.0), (2, 0.5), (3, 4.0)]:
        print(f"E ln(1+{a} Gamma({k})) = {exp_log_gamma(k, a):.15g}")
    print(f"E ln(1+2 Exp) closed form = {exp_log_exp1(2.0):.15g}")
    for db in [-15.0, -10.0, -5.0, 0.0]:
        lhs, c2 = fig5_lhs(10 ** (db / 10))
        print(f"fig5 lhs at {db} dBW = {lhs:.15g} (C2 {c2:.6g})")
    print(f"fig5 flip dBW = {fig5_flip():.12g}")
    xq, val = perfect_single_stream(2.0, 1.5, 10.0, 10.0, 1.0)
    print(f"perfect 1-stream h=2 g=1.5 ps=pr=10 pc=1: q {xq[0]:.12g} a {xq[1]:.12g} gee {val:.15g}")
