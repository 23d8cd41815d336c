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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensekit/matkit.hpp"

namespace sensekit {

/// Inequality flags evaluated at a checkpoint. These are logged,
/// never asserted: the constants behind them are not specified.
struct DiagFlags {
  bool sin_small = false;          ///< sin(Z_t, U*) <= 1/3
  bool error_bounded = false;      ///< ||E_t|| <= 4 ||E_0||
  bool signal_dominates = false;   ///< sigma_min(U*^T Z_t) >= ||E_t||
  bool signal_bounded = false;     ///< ||Z_t|| <= 5
  bool sandwich_applies = false;   ///< ||F_t|| < 1/3
  bool sandwich_holds = false;     ///< ||F|| - ||F||^3 <= sin <= ||F|| (1e-8 slack)
};

/// Per-checkpoint proof quantities.
struct DiagRecord {
  long t = 0;
  double sigma_rp1 = 0.0;  ///< sigma_{r+1}(U_t), 0 when r >= cols
  double sin_zu = 0.0;     ///< sin(Z_t, U*)
  double norm_e = 0.0;     ///< ||E_t||
  double sigmin_r = 0.0;   ///< sigma_min(U*^T Z_t)
  double norm_z = 0.0;     ///< ||Z_t||
  double norm_f = 0.0;     ///< ||F_t||
  double split_residual = 0.0;   ///< ||U_t - Z_t - E_t||_F
  double projection_leak = 0.0;  ///< ||P_{S_t} E_t||_F
  bool rank_deficient = false;   ///< U*^T Z_t below full rank
  bool subspace_degenerate = false;
  /// Rank-one split (only for rank-1 truths): ||r_t|| with r_t = U_t^T u*,
  /// and ||E_t|| for E_t = (I - u* u*^T) U_t.
  std::optional<double> rank1_signal;
  std::optional<double> rank1_error;
  DiagFlags flags;
};

struct Checkpoint {
  long t = 0;
  std::optional<double> train_error;
  double test_error = 0.0;
  double population_risk = 0.0;
  /// Solver objective at this iterate, when the solver tracks one.
  std::optional<double> objective;
  std::optional<DiagRecord> diag;
};

struct AbortInfo {
  long iteration = 0;
  std::string reason;
};

struct Trajectory {
  std::vector<Checkpoint> checkpoints;
  matkit::Matrix final_factor;    ///< U_T (empty for X-space solvers)
  matkit::Matrix final_estimate;  ///< X_T = U_T U_T^T, or the PGD iterate
  nlohmann::json config;          ///< resolved configuration echo
  double wall_time = 0.0;         ///< seconds; not written to CSV
  std::optional<AbortInfo> abort;

  const Checkpoint& final_checkpoint() const { return checkpoints.back(); }
};

/// Hooks invoked by the iterative solvers.
///
/// `on_step` receives the linear map of the step: the next iterate is
/// proportional to (I - eta * step_map) U_t. `at_checkpoint` may attach a
/// diagnostics record.
class StepObserver {
 public:
  virtual ~StepObserver() = default;
  virtual void on_step(long t, const matkit::Matrix& step_map, double eta) = 0;
  virtual std::optional<DiagRecord> at_checkpoint(long t, const matkit::Matrix& u) = 0;
};

/// Checkpoint iterations for a run of `iterations` steps: 0, the 1-2-5
/// sequence below `stride`, every multiple of `stride`, and `iterations`.
std::vector<long> checkpoint_schedule(long iterations, long stride);

inline constexpr const char* kTrajectoryCsvHeader =
    "t,train_error,test_error,population_risk,sigma_rp1,sin_zu,norm_E,sigmin_R,norm_Z,norm_F";

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
std::string trajectory_csv(const Trajectory& traj);

/// Parses the CSV written by write_trajectory_csv (diagnostics flags are not stored).
Trajectory read_trajectory_csv(std::istream& in);

}  // namespace sensekit
