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

#include "eerelay/matops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace eerelay {

namespace {

// Permutation sorting values descending; stable so ties keep solver order.
std::vector<int> descending_order(const RVector& v) {
    std::vector<int> idx(static_cast<size_t>(v.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v(a) > v(b); });
    return idx;
}

}  // namespace

double hermitian_asymmetry(const CMatrix& m) {
    if (m.rows() != m.cols()) return INFINITY;
    return (m - m.adjoint()).norm() / std::max(1.0, m.norm());
}

double unitarity_residual(const CMatrix& u) {
    return (u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols())).norm();
}

bool all_finite(const CMatrix& m) {
    return m.allFinite();
}

SpectralDecomposition evd_descending(const CMatrix& m, const MatTolerances& tol) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw ContractViolation("evd_descending: matrix must be square and non-empty");
    if (!all_finite(m)) throw ContractViolation("evd_descending: non-finite entries");
    if (hermitian_asymmetry(m) > tol.hermitian_asymmetry)
        throw ContractViolation("evd_descending: matrix is not Hermitian");

    CMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
    if (es.info() != Eigen::Success) throw ContractViolation("evd_descending: eigensolver failed");

    // Eigen returns ascending values; reverse first so ties stay in the
    // (reversed) solver order, then stable-sort for safety.
    const Eigen::Index n = m.rows();
    RVector asc = es.eigenvalues();
    RVector rev(n);
    CMatrix rev_basis(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        rev(k) = asc(n - 1 - k);
        rev_basis.col(k) = es.eigenvectors().col(n - 1 - k);
    }
    auto idx = descending_order(rev);
    SpectralDecomposition out{CMatrix(n, n), RVector(n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = rev(idx[k]);
        out.basis.col(k) = rev_basis.col(idx[k]);
    }
    return out;
}

SingularDecomposition svd_descending(const CMatrix& m) {
    if (!all_finite(m)) throw ContractViolation("svd_descending: non-finite entries");
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    // JacobiSVD already sorts decreasingly; re-sort defensively.
    RVector s = svd.singularValues();
    auto idx = descending_order(s);
    SingularDecomposition out{svd.matrixU(), RVector(s.size()), svd.matrixV()};
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        out.values(k) = s(idx[k]);
        out.left.col(k) = svd.matrixU().col(idx[k]);
        out.right.col(k) = svd.matrixV().col(idx[k]);
    }
    return out;
}

CMatrix pseudo_inverse(const CMatrix& m, const MatTolerances& tol) {
    auto d = svd_descending(m);
    const Eigen::Index k = d.values.size();
    CMatrix out = CMatrix::Zero(m.cols(), m.rows());
    if (k == 0 || d.values(0) == 0.0) return out;
    const double cut = tol.rank_cutoff * d.values(0);
    for (Eigen::Index i = 0; i < k; ++i) {
        if (d.values(i) <= cut) break;
        out += (1.0 / d.values(i)) * d.right.col(i) * d.left.col(i).adjoint();
    }
    return out;
}

int numerical_rank(const CMatrix& m, const MatTolerances& tol) {
    auto d = svd_descending(m);
    if (d.values.size() == 0 || d.values(0) == 0.0) return 0;
    const double cut = tol.rank_cutoff * d.values(0);
    int r = 0;
    for (Eigen::Index i = 0; i < d.values.size(); ++i)
        if (d.values(i) > cut) ++r;
    return r;
}

CMatrix exp_correlation(double rho, int n) {
    if (!(rho >= 0.0 && rho < 1.0)) throw ParameterError("exp_correlation: rho must lie in [0, 1)");
    if (n < 1) throw ParameterError("exp_correlation: n must be positive");
    CMatrix r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = std::pow(rho, std::abs(i - j));
    return r;
}

CMatrix sqrt_psd(const CMatrix& m, const MatTolerances& tol) {
    auto d = evd_descending(m, tol);
    const Eigen::Index n = d.values.size();
    RVector s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double v = d.values(i);
        if (v < tol.psd_floor * std::max(1.0, std::abs(d.values(0))))
            throw ContractViolation("sqrt_psd: matrix is indefinite");
        s(i) = std::sqrt(std::max(v, 0.0));
    }
    return d.basis * s.asDiagonal() * d.basis.adjoint();
}

CMatrix inv_sqrt_hpd(const CMatrix& m) {
    auto d = evd_descending(m);
    const Eigen::Index n = d.values.size();
    if (n == 0 || d.values(n - 1) <= 0.0) throw ContractViolation("inv_sqrt_hpd: matrix not positive definite");
    RVector s = d.values.array().rsqrt();
    return d.basis * s.asDiagonal() * d.basis.adjoint();
}

double logdet_hpd(const CMatrix& m) {
    Eigen::LLT<CMatrix> llt(m);
    if (llt.info() != Eigen::Success) throw ContractViolation("logdet_hpd: matrix not positive definite");
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::log(llt.matrixL()(i, i).real());
    return 2.0 * s;
}

}  // namespace eerelay
