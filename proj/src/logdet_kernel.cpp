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

#include "eerelay/logdet_kernel.hpp"

#include <cmath>
#include <numbers>

namespace eerelay {

GramBank::GramBank(std::vector<SmallCMatrix> grams) : grams_(std::move(grams)) {
    if (grams_.empty()) throw ContractViolation("GramBank: empty sample bank");
    dim_ = static_cast<int>(grams_.front().rows());
    if (dim_ > kMaxGramDim) throw ParameterError("GramBank: dimension above the supported maximum");
    for (const auto& g : grams_)
        if (g.rows() != dim_ || g.cols() != dim_) throw ContractViolation("GramBank: inconsistent sample sizes");
}

double logdet_weighted(const SmallCMatrix& g, const RVector& w, RVector* grad, RMatrix* hess) {
    constexpr int N = kMaxGramDim;
    const int n = static_cast<int>(g.rows());
    double d[N];
    cplx l[N][N];  // lower Cholesky factor of I + D G D
    for (int i = 0; i < n; ++i) d[i] = std::sqrt(std::max(0.0, w(i)));
    double ld = 0.0;
    for (int j = 0; j < n; ++j) {
        double s = 1.0 + d[j] * d[j] * g(j, j).real();
        for (int k = 0; k < j; ++k) s -= std::norm(l[j][k]);
        const double ljj = std::sqrt(s);
        l[j][j] = ljj;
        ld += std::log(ljj);
        for (int i = j + 1; i < n; ++i) {
            cplx v = d[i] * d[j] * g(i, j);
            for (int k = 0; k < j; ++k) v -= l[i][k] * std::conj(l[j][k]);
            l[i][j] = v / ljj;
        }
    }
    if (grad || hess) {
        // X = L^{-1} D G column by column; K = G - X^H X.
        cplx x[N][N];
        for (int c = 0; c < n; ++c) {
            for (int i = 0; i < n; ++i) {
                cplx v = d[i] * g(i, c);
                for (int k = 0; k < i; ++k) v -= l[i][k] * x[k][c];
                x[i][c] = v / l[i][i].real();
            }
        }
        constexpr double inv_ln2 = 1.0 / std::numbers::ln2;
        for (int a = 0; a < n; ++a) {
            for (int b = (hess ? 0 : a); b < (hess ? n : a + 1); ++b) {
                if (hess && b < a) continue;
                cplx k = g(a, b);
                for (int i = 0; i < n; ++i) k -= std::conj(x[i][a]) * x[i][b];
                if (a == b && grad) (*grad)(a) += k.real() * inv_ln2;
                if (hess) {
                    double h = -std::norm(k) * inv_ln2;
                    (*hess)(a, b) += h;
                    if (a != b) (*hess)(b, a) += h;
                }
            }
        }
    }
    return 2.0 * ld / std::numbers::ln2;
}

double GramBank::value(const RVector& w, RVector* grad, RMatrix* hess) const {
    if (w.size() != dim_) throw ContractViolation("GramBank::value: weight size mismatch");
    if (grad) grad->setZero(dim_);
    if (hess) hess->setZero(dim_, dim_);
    double acc = 0.0;
    for (const auto& g : grams_) acc += logdet_weighted(g, w, grad, hess);
    const double inv = 1.0 / static_cast<double>(grams_.size());
    if (grad) *grad *= inv;
    if (hess) *hess *= inv;
    return acc * inv;
}

std::vector<double> GramBank::per_sample(const RVector& w) const {
    std::vector<double> out;
    out.reserve(grams_.size());
    for (const auto& g : grams_) out.push_back(logdet_weighted(g, w));
    return out;
}

}  // namespace eerelay
