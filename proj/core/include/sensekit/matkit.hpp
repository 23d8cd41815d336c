// Copyright 2026 The sensekit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string_view>

#include <Eigen/Dense>

/// Dense linear-algebra kernel shared by every other module.
///
/// All routines are pure functions of their arguments. Inputs are validated
/// for finiteness at the boundary; a non-finite entry raises ValidationError.
namespace sensekit::matkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Singular values below rank_tol * sigma_1 are treated as zero.
inline constexpr double kDefaultRankTol = 1e-12;

struct SvdResult {
  Matrix left;       ///< m x k, orthonormal columns
  Vector singulars;  ///< k = min(m, n), non-increasing
  Matrix right;      ///< n x k, orthonormal columns
};

struct Norms {
  double spectral = 0.0;
  double frobenius = 0.0;
  double nuclear = 0.0;
};

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
struct SymEig {
  Vector values;
  Matrix vectors;
};

void require_finite(const Matrix& m, std::string_view what);
bool all_finite(const Matrix& m);

/// Thin SVD (two-sided Jacobi). Deterministic for fixed input.
SvdResult svd(const Matrix& m);
Vector singular_values(const Matrix& m);

Norms norms(const Matrix& m);
double spectral_norm(const Matrix& m);
double nuclear_norm(const Matrix& m);

/// Number of singular values above rank_tol * sigma_1 (0 for the zero matrix).
int numerical_rank(const Matrix& m, double rank_tol = kDefaultRankTol);

Matrix pseudo_inverse(const Matrix& m, double rank_tol = kDefaultRankTol);

/// Orthonormal basis of the column span (left singular vectors above tolerance).
/// Returns a rows x 0 matrix for the zero matrix.
Matrix orthonormal_basis(const Matrix& m, double rank_tol = kDefaultRankTol);

/// Orthogonal projector onto the column span of m.
Matrix col_projector(const Matrix& m, double rank_tol = kDefaultRankTol);

/// Largest principal-angle sine between col(a) and col(b):
/// ||(I - P_b) Q_a|| with Q_a an orthonormal basis of col(a). Result in [0, 1].
double principal_angle_sin(const Matrix& a, const Matrix& b);

/// Householder QR; returns the thin orthonormal factor (rows x cols).
Matrix qr_orthonormalize(const Matrix& m);

/// Symmetric eigen-decomposition. Rejects asymmetry above tolerance.
SymEig sym_eig(const Matrix& m);

/// Frobenius-nearest PSD matrix: clamp negative eigenvalues to zero.
/// Inputs with max|M - M^T| <= 1e-10 * max(1, max|M|) are symmetrized first;
/// larger asymmetry is rejected.
Matrix psd_project(const Matrix& m);

/// Best rank-k approximation of a symmetric matrix by magnitude of eigenvalues.
Matrix sym_truncate(const Matrix& m, int k);

Matrix symmetrize(const Matrix& m);
double inner(const Matrix& a, const Matrix& b);
double max_asymmetry(const Matrix& m);

}  // namespace sensekit::matkit
