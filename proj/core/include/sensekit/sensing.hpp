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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sensekit/matkit.hpp"

namespace sensekit::sensing {

using matkit::Matrix;
using matkit::Vector;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// How a ground truth is drawn.
///   kSpec: Haar-random orthonormal U*, Sigma* linearly spaced from 1 to 1/kappa,
///          so ||X*|| = 1 and kappa is exact.
///   kExperiment: Gaussian U* with unit-norm columns, X* = U* U*^T; kappa emerges.
enum class TruthMode { kSpec, kExperiment };

/// Planted PSD matrix X* = U* Sigma* U*^T of rank r.
struct GroundTruth {
  int d = 0;
  int r = 0;
  Matrix ustar;      ///< d x r, orthonormal columns (eigenvectors of X*)
  Vector sigmastar;  ///< r eigenvalues, non-increasing
  Matrix factor;     ///< d x r with factor * factor^T = X* (the generating weights)
  Matrix xstar;      ///< d x d
  double kappa = 1;  ///< sigma_1(X*) / sigma_r(X*)

  /// tau = ||factor||_F^2 = trace(X*).
  double trace() const { return xstar.trace(); }
  /// Unit vector u* for rank-1 truths. Throws unless r == 1.
  Vector rank1_vector() const;
};

GroundTruth sample_ground_truth(int d, int r, double kappa, TruthMode mode, std::uint64_t seed);

/// Builds a ground truth from an explicit factor (X* = factor * factor^T).
GroundTruth ground_truth_from_factor(const Matrix& factor);

enum class SensorKind : std::uint8_t { kDenseSymmetric = 0, kRankOne = 1 };

/// Symmetric measurement matrices A_1..A_m and labels y.
///
/// Dense sensors are stored packed: one row per sensor holding the upper
/// triangle (diagonal first, then off-diagonals row by row). Rank-one sensors
/// A_i = x_i x_i^T store only x_i. All reductions over i run sequentially in
/// index order, so results are bit-reproducible for a fixed build.
class MeasurementEnsemble {
 public:
  /// Largest dense ensemble accepted (dimension, count).
  static constexpr int kMaxDenseDim = 128;
  static constexpr int kMaxDenseCount = 50000;

  MeasurementEnsemble() = default;

  /// Sensors must be d x d and symmetric within 1e-12 (relative to max entry).
  static MeasurementEnsemble dense(const std::vector<Matrix>& sensors, Vector labels);
  /// Rows of `vectors` are the x_i.
  static MeasurementEnsemble rank_one(Matrix vectors, Vector labels);

  int dim() const { return d_; }
  int size() const { return static_cast<int>(labels_.size()); }
  SensorKind kind() const { return kind_; }
  const Vector& labels() const { return labels_; }
  /// m x d matrix of rank-one vectors. Throws for dense ensembles.
  const Matrix& vectors() const;

  /// Materialized A_i.
  Matrix sensor(int i) const;
  /// <A_i, q>; q need not be symmetric (only its symmetric part is seen).
  double inner(int i, const Matrix& q) const;
  /// <A_i, q> for every i.
  Vector inner_all(const Matrix& q) const;
  /// sum_i coef_i A_i (no normalization).
  Matrix combine(const Vector& coef) const;

  /// (1/|idx|) sum_{i in idx} (<A_i, x> - y_i) A_i over the given rows (all rows
  /// when idx is empty), in a single fused pass. If residuals is non-null it
  /// receives <A_i, x> - y_i for the visited rows, in visiting order.
  Matrix residual_map(const Matrix& x, std::span<const int> idx = {},
                      Vector* residuals = nullptr) const;

  /// (1/m) sum_i <A_i, q> A_i over all rows.
  Matrix apply(const Matrix& q) const;

  MeasurementEnsemble with_labels(Vector labels) const;

 private:
  Matrix map_impl(const Matrix& x, bool subtract_labels, std::span<const int> idx,
                  Vector* residuals) const;
  void check_square(const Matrix& q, const char* what) const;
  Vector pack_weighted(const Matrix& q) const;
  Matrix unpack(const Vector& packed) const;

  int d_ = 0;
  SensorKind kind_ = SensorKind::kDenseSymmetric;
  RowMatrix packed_;  // dense: m x d(d+1)/2
  Matrix vectors_;    // rank-one: m x d
  Vector labels_;
};

/// A_i = (Q_i + Q_i^T)/2 with Q_i i.i.d. standard Gaussian; y_i = <A_i, X*>
/// plus optional N(0, noise_sigma^2) label noise (drawn only when sigma > 0).
MeasurementEnsemble sample_gaussian_ensemble(const GroundTruth& gt, int m, std::uint64_t seed,
                                             double noise_sigma = 0.0);

/// M(Q) = (1/m) sum_i <A_i, Q> A_i.
Matrix apply_map(const MeasurementEnsemble& ens, const Matrix& q);

/// M(U U^T - X*) = (1/m) sum_i (<A_i, U U^T> - y_i) A_i, using stored labels.
Matrix residual_operator(const MeasurementEnsemble& ens, const Matrix& u);

/// Factorized objective (1/4m) sum_i (y_i - <A_i, U U^T>)^2.
///
/// The 1/4m normalization makes the gradient exactly M(U U^T - X*) U, the
/// direction used by the update U <- (I - eta M) U. The conventional
/// 1/2m mean-squared objective is twice this value.
double loss(const MeasurementEnsemble& ens, const Matrix& u);
Matrix gradient(const MeasurementEnsemble& ens, const Matrix& u);

struct Metrics {
  /// sqrt(sum (<A_i, X> - y_i)^2 / sum y_i^2); empty when every label is zero.
  std::optional<double> train_error;
  double test_error = 0.0;       ///< ||X - X*||_F / ||X*||_F
  double population_risk = 0.0;  ///< ||X - X*||_F^2
};

Metrics metrics(const MeasurementEnsemble& ens, const GroundTruth& gt, const Matrix& x_hat);
/// Test error and population risk only (no ensemble needed).
Metrics truth_metrics(const GroundTruth& gt, const Matrix& x_hat);
/// Relative training error from precomputed residuals.
std::optional<double> train_error_from_residuals(const Vector& residuals, const Vector& labels);

}  // namespace sensekit::sensing
