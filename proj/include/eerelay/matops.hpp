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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace eerelay {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Raised when an input breaks a documented precondition.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a model or solver parameter is out of range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical tolerances shared by the decomposition routines. The defaults
/// are the module constants; callers may pass a modified copy.
struct MatTolerances {
    double hermitian_asymmetry = 1e-10;
    double psd_floor = -1e-12;
    double rank_cutoff = 1e-12;  // relative to the largest singular value
};

inline const MatTolerances kDefaultTolerances{};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues non-increasing.
struct SpectralDecomposition {
    CMatrix basis;
    RVector values;
};

/// Singular value decomposition M = left * diag(values) * right^H with
/// full unitary factors and non-increasing singular values.
struct SingularDecomposition {
    CMatrix left;
    RVector values;
    CMatrix right;
};

/// Eigenvalues in descending order. Equal eigenvalues keep the order
/// produced by the underlying solver, so only U diag(v) U^H is unique.
SpectralDecomposition evd_descending(const CMatrix& m, const MatTolerances& tol = kDefaultTolerances);

SingularDecomposition svd_descending(const CMatrix& m);

/// Moore-Penrose pseudo-inverse; singular values below rank_cutoff * s_max
/// are treated as zero.
CMatrix pseudo_inverse(const CMatrix& m, const MatTolerances& tol = kDefaultTolerances);

/// Exponential correlation matrix with entries rho^|i-j|, 0 <= rho < 1.
CMatrix exp_correlation(double rho, int n);

/// Principal square root of a Hermitian PSD matrix. Eigenvalue dust above
/// psd_floor is clamped to zero.
CMatrix sqrt_psd(const CMatrix& m, const MatTolerances& tol = kDefaultTolerances);

/// Inverse square root of a Hermitian positive definite matrix.
CMatrix inv_sqrt_hpd(const CMatrix& m);

/// ||M - M^H||_F / max(1, ||M||_F)
double hermitian_asymmetry(const CMatrix& m);

/// ||U^H U - I||_F
double unitarity_residual(const CMatrix& u);

/// Number of singular values above rank_cutoff * s_max.
int numerical_rank(const CMatrix& m, const MatTolerances& tol = kDefaultTolerances);

bool all_finite(const CMatrix& m);

/// Natural log-determinant of a Hermitian positive definite matrix.
double logdet_hpd(const CMatrix& m);

}  // namespace eerelay
