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
#include <random>

#include <Eigen/Dense>

namespace sensekit {

/// Named substreams. Every consumer of randomness draws from its own stream so
/// that adding draws in one component never shifts another component's numbers.
enum class Stream : std::uint32_t {
  kGroundTruth = 1,
  kEnsemble = 2,
  kProbes = 3,
  kSgdIndices = 4,
  kInitBasis = 5,
  kQuadData = 6,
  kLabelNoise = 7,
  kTest = 99,
};

/// Seeded generator for one (seed, stream, substream) triple.
///
/// Bits come from mt19937_64 seeded through std::seed_seq, both of which are
/// fully specified by the standard. Gaussians and bounded integers are derived
/// here instead of through <random> distributions, whose outputs are
/// implementation-defined, so a seed reproduces the same numbers with any
/// conforming standard library.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream, std::uint64_t substream = 0);

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal (Box-Muller, both outputs consumed).
  double gaussian();
  /// Uniform integer in [0, n). Requires n > 0.
  std::uint64_t index(std::uint64_t n);

  /// rows x cols matrix of i.i.d. standard normals, filled row by row.
  Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols);
  Eigen::VectorXd gaussian_vector(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sensekit
