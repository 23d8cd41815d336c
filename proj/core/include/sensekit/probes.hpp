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

#include <optional>
#include <vector>

#include "sensekit/matkit.hpp"
#include "sensekit/sensing.hpp"
#include "sensekit/trajectory.hpp"

namespace sensekit::probes {

using matkit::Matrix;
using matkit::Vector;
using sensing::GroundTruth;

/// Orthonormal basis of the adaptive subspace S_t.
struct SubspaceState {
  Matrix basis;
  long t = 0;
  bool degenerate_map = false;  ///< some step had eta * ||M|| >= 1
  bool collapsed = false;       ///< dimension dropped below the starting rank
};

/// S_0 = span(U*).
SubspaceState initial_subspace(const GroundTruth& gt);

/// S_{t+1} = (I - eta M) S_t, re-orthonormalized by QR.
SubspaceState advance_subspace(const SubspaceState& s, const Matrix& m, double eta);

struct ZESplit {
  Matrix z;  ///< P_S U
  Matrix e;  ///< (I - P_S) U
};
ZESplit split_ze(const Matrix& u, const SubspaceState& s);

struct FRSplit {
  Matrix r;  ///< U*^T Z (r x k)
  Matrix f;  ///< (I - P_U*) Z R^+ (d x r)
  bool rank_deficient = false;
};
FRSplit split_fr(const Matrix& z, const GroundTruth& gt);

struct Rank1Split {
  Vector r;  ///< U^T u*
  Matrix e;  ///< (I - u* u*^T) U
};
/// Requires a rank-1 ground truth.
Rank1Split split_rank1(const Matrix& u, const GroundTruth& gt);

/// All tracked quantities at one iterate. `e0_norm` enables the ||E_t|| <= 4 ||E_0|| flag.
DiagRecord diagnostics(const Matrix& u, const SubspaceState& s, const GroundTruth& gt,
                       std::optional<double> e0_norm = std::nullopt);

/// Observer that carries S_t along a run and attaches diagnostics at checkpoints.
class SubspaceProbe : public StepObserver {
 public:
  explicit SubspaceProbe(const GroundTruth& gt);

  void on_step(long t, const Matrix& step_map, double eta) override;
  std::optional<DiagRecord> at_checkpoint(long t, const Matrix& u) override;

  const SubspaceState& state() const { return state_; }
  const std::vector<DiagRecord>& records() const { return records_; }

 private:
  const GroundTruth& gt_;
  SubspaceState state_;
  std::optional<double> e0_norm_;
  std::vector<DiagRecord> records_;
};

}  // namespace sensekit::probes
