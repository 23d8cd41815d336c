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

#include <nlohmann/json.hpp>

#include "sensekit/matkit.hpp"
#include "sensekit/sensing.hpp"
#include "sensekit/trajectory.hpp"

/// Quadratic-activation network y = 1^T q(U^T x), q(z) = z^2 elementwise,
/// with unit second-layer weights.
namespace sensekit::quadnet {

using matkit::Matrix;
using matkit::Vector;
using sensing::GroundTruth;

struct QuadDataset {
  Matrix inputs;  ///< n x d, one example per row
  Vector labels;  ///< y_i = ||W*^T x_i||^2 for the generating weights W* = gt.factor

  int dim() const { return static_cast<int>(inputs.cols()); }
  int size() const { return static_cast<int>(inputs.rows()); }
  /// The same data as a rank-one sensing ensemble {x_i x_i^T}.
  sensing::MeasurementEnsemble ensemble() const;
};

/// Standard-Gaussian inputs labelled by the ground truth's factor.
QuadDataset gen_quad_data(const GroundTruth& gt, int n, std::uint64_t seed);

/// ||U^T x||^2.
double predict(const Matrix& u, const Vector& x);

struct TruncatedValue {
  double loss = 0.0;
  Matrix gradient;
  int kept = 0;  ///< examples with ||U^T x_i||^2 <= rcut
  bool all_truncated() const { return kept == 0; }
};

/// (1/n) sum (yhat_i - y_i)^2 1{||U^T x_i||^2 <= rcut}. rcut may be +infinity.
double truncated_loss(const Matrix& u, const QuadDataset& data, double rcut);
/// (4/n) sum (yhat_i - y_i) x_i x_i^T U 1{||U^T x_i||^2 <= rcut}; the indicator is
/// held fixed. All-truncated input gives a zero gradient with kept == 0.
TruncatedValue truncated_gradient(const Matrix& u, const QuadDataset& data, double rcut);

enum class TauMode { kExact, kEstimated };

struct QuadConfig {
  double alpha = 1e-3;
  double eta = 0.01;
  long iterations = 2000;
  std::uint64_t seed = 0;
  long record_every = 100;
  /// Truncation radius; unset means 20 log d.
  std::optional<double> rcut;
  TauMode tau_mode = TauMode::kExact;
  /// Skip the rescaling step (plain truncated gradient descent).
  bool rescale = true;

  void validate() const;
  double resolved_rcut(int d) const;
  nlohmann::json to_json() const;
};

/// tau = ||W*||_F^2 (exact) or the mean label (estimated).
double resolve_tau(const GroundTruth& gt, const QuadDataset& data, TauMode mode);

/// One step of the rescaled trainer:
///   U~ = U - eta grad f~(U);  U' = U~ / (1 - eta (||U||_F^2 - tau)).
/// Throws NumericalError when the denominator is within 1e-12 of zero.
Matrix algorithm1_step(const Matrix& u, const QuadDataset& data, const QuadConfig& cfg, double tau);

/// Runs the rescaled trainer from alpha * I. Checkpoints record the relative
/// training error, the relative test error ||U U^T - X*||_F / ||X*||_F, the
/// squared error ||U U^T - X*||_F^2 and the truncated loss. The observer sees
/// U_{t+1} proportional to (I - eta * 4 M~_t) U_t, M~_t the truncated residual map.
Trajectory run_algorithm1(const GroundTruth& gt, const QuadDataset& data, const QuadConfig& cfg,
                          StepObserver* observer = nullptr);

}  // namespace sensekit::quadnet
