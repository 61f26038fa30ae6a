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

#pragma once

#include <vector>

#include "eerelay/matops.hpp"

namespace eerelay {

/// Small complex matrix with a fixed upper size so per-sample work stays
/// on the stack. Antenna counts above kMaxGramDim are rejected.
inline constexpr int kMaxGramDim = 8;
using SmallCMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxGramDim, kMaxGramDim>;

/// Sample average of log2 det(I + diag(w) G_m) over a bank of Hermitian
/// PSD matrices G_m. The gradient uses d/dw_i log det(I + W G) =
/// [G (I + W G)^{-1}]_ii, evaluated through the Hermitian form
/// K = G - G D (I + D G D)^{-1} D G with D = diag(sqrt(w)).
class GramBank {
public:
    GramBank() = default;
    explicit GramBank(std::vector<SmallCMatrix> grams);

    int dim() const { return dim_; }
    size_t size() const { return grams_.size(); }
    const std::vector<SmallCMatrix>& grams() const { return grams_; }

    /// Mean value; fills grad (size dim) and the Hessian -|K_ij|^2 when
    /// non-null. Weights must be >= 0.
    double value(const RVector& w, RVector* grad = nullptr, RMatrix* hess = nullptr) const;

    /// Per-sample values (for standard errors and sign checks).
    std::vector<double> per_sample(const RVector& w) const;

private:
    std::vector<SmallCMatrix> grams_;
    int dim_ = 0;
};

/// log2 det(I + diag(w) G) for one matrix. grad and hess, when non-null,
/// are incremented (not overwritten) so callers can accumulate sums.
double logdet_weighted(const SmallCMatrix& g, const RVector& w, RVector* grad = nullptr, RMatrix* hess = nullptr);

}  // namespace eerelay
