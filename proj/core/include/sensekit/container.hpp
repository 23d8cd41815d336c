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
#include <filesystem>
#include <iosfwd>

#include "sensekit/sensing.hpp"

/// Binary container for ground truths and measurement ensembles.
///
/// Layout (all integers and doubles little-endian):
///
///   offset  size  field
///   0       8     magic "SENSEKIT"
///   8       4     u32 version (= 1)
///   12      4     u32 kind (1 ground truth, 2 dense ensemble, 3 rank-one ensemble)
///   16      8     u64 d
///   24      8     u64 r   (planted rank; 0 when unknown)
///   32      8     u64 m   (sensor count; 0 for a ground truth)
///   40      8     u64 seed
///   48      ...   payload of IEEE-754 binary64 values
///
/// Payloads, every matrix row-major:
///   ground truth     : ustar (d x r), sigmastar (r), factor (d x r), xstar (d x d), kappa (1)
///   dense ensemble   : A_1 .. A_m (each d x d), labels (m)
///   rank-one ensemble: x_1 .. x_m (each d), labels (m)
namespace sensekit::container {

inline constexpr std::uint32_t kVersion = 1;

enum class Kind : std::uint32_t { kGroundTruth = 1, kDenseEnsemble = 2, kRankOneEnsemble = 3 };

struct Header {
  std::uint32_t version = kVersion;
  Kind kind = Kind::kGroundTruth;
  std::uint64_t d = 0;
  std::uint64_t r = 0;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
};

void write_ground_truth(std::ostream& out, const sensing::GroundTruth& gt, std::uint64_t seed);
sensing::GroundTruth read_ground_truth(std::istream& in, Header* header = nullptr);

void write_ensemble(std::ostream& out, const sensing::MeasurementEnsemble& ens, std::uint64_t r,
                    std::uint64_t seed);
sensing::MeasurementEnsemble read_ensemble(std::istream& in, Header* header = nullptr);

void save_ground_truth(const std::filesystem::path& path, const sensing::GroundTruth& gt,
                       std::uint64_t seed);
sensing::GroundTruth load_ground_truth(const std::filesystem::path& path, Header* header = nullptr);
void save_ensemble(const std::filesystem::path& path, const sensing::MeasurementEnsemble& ens,
                   std::uint64_t r, std::uint64_t seed);
sensing::MeasurementEnsemble load_ensemble(const std::filesystem::path& path,
                                           Header* header = nullptr);

}  // namespace sensekit::container
