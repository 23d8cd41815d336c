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

#include "sensekit/matkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sensekit/errors.hpp"

namespace sensekit::matkit {

namespace {

constexpr double kSymmetryTol = 1e-10;

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols())
    throw ValidationError(std::string(what) + ": expected a square matrix, got " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

Matrix checked_symmetric(const Matrix& m, std::string_view what) {
  require_square(m, what);
  require_finite(m, what);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (max_asymmetry(m) > kSymmetryTol * scale)
    throw ValidationError(std::string(what) + ": matrix is not symmetric");
  return symmetrize(m);
}

}  // namespace

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) throw ValidationError(std::string(what) + ": non-finite entry");
}

SvdResult svd(const Matrix& m) {
  require_finite(m, "svd");
  Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdResult{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

Vector singular_values(const Matrix& m) {
  require_finite(m, "singular_values");
  if (m.size() == 0) return Vector();
  Eigen::JacobiSVD<Matrix> solver(m);
  return solver.singularValues();
}

Norms norms(const Matrix& m) {
  const Vector s = singular_values(m);
  Norms out;
  if (s.size() == 0) return out;
  out.spectral = s(0);
  out.frobenius = m.norm();
  out.nuclear = s.sum();
  return out;
}

double spectral_norm(const Matrix& m) {
  const Vector s = singular_values(m);
  return s.size() == 0 ? 0.0 : s(0);
}

double nuclear_norm(const Matrix& m) { return singular_values(m).sum(); }

int numerical_rank(const Matrix& m, double rank_tol) {
  const Vector s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cutoff = rank_tol * s(0);
  return static_cast<int>((s.array() > cutoff).count());
}

Matrix pseudo_inverse(const Matrix& m, double rank_tol) {
  if (!(rank_tol > 0.0)) throw ValidationError("pseudo_inverse: rank_tol must be positive");
  const SvdResult d = svd(m);
  Matrix out = Matrix::Zero(m.cols(), m.rows());
  if (d.singulars.size() == 0 || d.singulars(0) == 0.0) return out;
  const double cutoff = rank_tol * d.singulars(0);
  for (Eigen::Index k = 0; k < d.singulars.size(); ++k) {
    if (d.singulars(k) <= cutoff) break;
    out.noalias() += (d.right.col(k) / d.singulars(k)) * d.left.col(k).transpose();
  }
  return out;
}

Matrix orthonormal_basis(const Matrix& m, double rank_tol) {
  const SvdResult d = svd(m);
  if (d.singulars.size() == 0 || d.singulars(0) == 0.0) return Matrix(m.rows(), 0);
  const double cutoff = rank_tol * d.singulars(0);
  const Eigen::Index k = (d.singulars.array() > cutoff).count();
  return d.left.leftCols(k);
}

Matrix col_projector(const Matrix& m, double rank_tol) {
  if (!(rank_tol > 0.0)) throw ValidationError("col_projector: rank_tol must be positive");
  const Matrix q = orthonormal_basis(m, rank_tol);
  return q * q.transpose();
}

double principal_angle_sin(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw ValidationError("principal_angle_sin: operands have different row counts");
  const Matrix qa = orthonormal_basis(a);
  const Matrix qb = orthonormal_basis(b);
  if (qa.cols() == 0 || qb.cols() == 0)
    throw ValidationError("principal_angle_sin: zero column span");
  const Matrix residual = qa - qb * (qb.transpose() * qa);
  return std::clamp(spectral_norm(residual), 0.0, 1.0);
}

Matrix qr_orthonormalize(const Matrix& m) {
  require_finite(m, "qr_orthonormalize");
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  // Fix signs so that diag(R) >= 0; makes the basis a function of the span and
  // the input ordering only.
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < std::min(m.rows(), m.cols()); ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

SymEig sym_eig(const Matrix& m) {
  const Matrix s = checked_symmetric(m, "sym_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  return SymEig{solver.eigenvalues(), solver.eigenvectors()};
}

Matrix psd_project(const Matrix& m) {
  const SymEig e = sym_eig(m);
  const Vector clamped = e.values.cwiseMax(0.0);
  Matrix out = e.vectors * clamped.asDiagonal() * e.vectors.transpose();
  return symmetrize(out);
}

Matrix sym_truncate(const Matrix& m, int k) {
  const SymEig e = sym_eig(m);
  const Eigen::Index n = e.values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return std::abs(e.values(x)) > std::abs(e.values(y));
  });
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (int j = 0; j < std::min<Eigen::Index>(k, n); ++j) {
    const Eigen::Index idx = order[static_cast<std::size_t>(j)];
    out.noalias() += e.values(idx) * e.vectors.col(idx) * e.vectors.col(idx).transpose();
  }
  return symmetrize(out);
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("inner: shape mismatch");
  return a.cwiseProduct(b).sum();
}

double max_asymmetry(const Matrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace sensekit::matkit
