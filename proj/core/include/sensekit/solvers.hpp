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

namespace sensekit::solvers {

using matkit::Matrix;
using sensing::GroundTruth;
using sensing::MeasurementEnsemble;

enum class InitBasis { kIdentity, kHaar };
enum class Mode { kEmpirical, kPopulation };

struct SolverConfig {
  double alpha = 1e-3;  ///< initialization scale
  double eta = 0.0025;  ///< step size
  long iterations = 10000;
  std::uint64_t seed = 0;
  InitBasis init_basis = InitBasis::kIdentity;
  Mode mode = Mode::kEmpirical;
  /// Sensors per SGD step. Unset means one.
  std::optional<int> batch;
  /// Draw SGD batches as random subsets instead of independent uniform indices.
  bool without_replacement = false;
  long record_every = 100;
  std::optional<double> stop_train_error;
  /// Columns of U. Unset means d (fully over-parameterized).
  std::optional<int> width;

  /// Throws ValidationError on non-positive or non-finite parameters.
  void validate() const;
  nlohmann::json to_json() const;
};

/// U_0 = alpha * B, with B the identity or a Haar-random orthonormal d x width matrix.
Matrix init_factor(int d, const SolverConfig& cfg);

/// U - eta * M(U U^T - X*) U. Bit-identical to U - eta * sensing::gradient(ens, U).
Matrix gd_step(const Matrix& u, const MeasurementEnsemble& ens, double eta);

/// (I - eta (U U^T - X*)) U.
Matrix population_gd_step(const Matrix& u, const GroundTruth& gt, double eta);

/// Factorized gradient descent. In population mode `ens` is ignored and the
/// trajectory carries no training error.
///
/// Divergence (non-finite iterate or ||U||_F > 1e3 * max(1, ||X*||_F^(1/2)))
/// ends the run early: the trajectory keeps the checkpoints recorded so far
/// and `abort` is set.
Trajectory run_gd(const GroundTruth& gt, const MeasurementEnsemble& ens, const SolverConfig& cfg,
                  StepObserver* observer = nullptr);
Trajectory run_population_gd(const GroundTruth& gt, const SolverConfig& cfg,
                             StepObserver* observer = nullptr);

/// Stochastic gradient descent with cfg.batch sensors per step (default 1).
/// Uses an explicit initial factor when one is given.
Trajectory run_sgd(const GroundTruth& gt, const MeasurementEnsemble& ens, const SolverConfig& cfg,
                   StepObserver* observer = nullptr, const std::optional<Matrix>& u0 = std::nullopt);

/// Projected gradient descent on the PSD cone for f(X) = (1/m) sum (<A_i, X> - y_i)^2,
/// starting from X_0 = 0 unless x0 is given. Stops once the training error
/// falls below cfg.stop_train_error, or after cfg.iterations steps.
Trajectory run_pgd(const GroundTruth& gt, const MeasurementEnsemble& ens, const SolverConfig& cfg,
                   const std::optional<Matrix>& x0 = std::nullopt);

/// Divergence threshold on ||U||_F used by the factorized solvers.
double divergence_bound(const GroundTruth& gt);

}  // namespace sensekit::solvers
