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

#include "sensekit/container.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "sensekit/errors.hpp"

namespace sensekit::container {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'E', 'N', 'S', 'E', 'K', 'I', 'T'};
// Guards against absurd allocations from corrupted headers.
constexpr std::uint64_t kMaxDim = 1u << 16;
constexpr std::uint64_t kMaxCount = 1u << 26;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int k = 0; k < 8; ++k) bytes[static_cast<std::size_t>(k)] = static_cast<char>((v >> (8 * k)) & 0xffu);
  out.write(bytes.data(), 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> bytes{};
  for (int k = 0; k < 4; ++k) bytes[static_cast<std::size_t>(k)] = static_cast<char>((v >> (8 * k)) & 0xffu);
  out.write(bytes.data(), 4);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 8))
    throw ValidationError("container: truncated input");
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) v = (v << 8) | bytes[static_cast<std::size_t>(k)];
  return v;
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 4))
    throw ValidationError("container: truncated input");
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | bytes[static_cast<std::size_t>(k)];
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void put_matrix(std::ostream& out, const matkit::Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put_f64(out, m(i, j));
}

matkit::Matrix get_matrix(std::istream& in, std::uint64_t rows, std::uint64_t cols) {
  matkit::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = get_f64(in);
  return m;
}

void put_vector(std::ostream& out, const matkit::Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v(i));
}

matkit::Vector get_vector(std::istream& in, std::uint64_t n) {
  matkit::Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = get_f64(in);
  return v;
}

void put_header(std::ostream& out, const Header& h) {
  out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
  put_u32(out, h.version);
  put_u32(out, static_cast<std::uint32_t>(h.kind));
  put_u64(out, h.d);
  put_u64(out, h.r);
  put_u64(out, h.m);
  put_u64(out, h.seed);
}

Header get_header(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), 8) || magic != kMagic)
    throw ValidationError("container: bad magic (not a sensekit container)");
  Header h;
  h.version = get_u32(in);
  if (h.version != kVersion)
    throw ValidationError("container: unsupported version " + std::to_string(h.version));
  const std::uint32_t kind = get_u32(in);
  if (kind < 1 || kind > 3) throw ValidationError("container: unknown kind " + std::to_string(kind));
  h.kind = static_cast<Kind>(kind);
  h.d = get_u64(in);
  h.r = get_u64(in);
  h.m = get_u64(in);
  h.seed = get_u64(in);
  if (h.d == 0 || h.d > kMaxDim || h.r > h.d || h.m > kMaxCount)
    throw ValidationError("container: header dimensions out of range");
  return h;
}

void require_good(std::ostream& out) {
  if (!out) throw ValidationError("container: write failed");
}

}  // namespace

void write_ground_truth(std::ostream& out, const sensing::GroundTruth& gt, std::uint64_t seed) {
  Header h;
  h.kind = Kind::kGroundTruth;
  h.d = static_cast<std::uint64_t>(gt.d);
  h.r = static_cast<std::uint64_t>(gt.r);
  h.seed = seed;
  put_header(out, h);
  put_matrix(out, gt.ustar);
  put_vector(out, gt.sigmastar);
  put_matrix(out, gt.factor);
  put_matrix(out, gt.xstar);
  put_f64(out, gt.kappa);
  require_good(out);
}

sensing::GroundTruth read_ground_truth(std::istream& in, Header* header) {
  const Header h = get_header(in);
  if (h.kind != Kind::kGroundTruth) throw ValidationError("container: not a ground truth");
  if (h.r == 0) throw ValidationError("container: ground truth with rank 0");
  sensing::GroundTruth gt;
  gt.d = static_cast<int>(h.d);
  gt.r = static_cast<int>(h.r);
  gt.ustar = get_matrix(in, h.d, h.r);
  gt.sigmastar = get_vector(in, h.r);
  gt.factor = get_matrix(in, h.d, h.r);
  gt.xstar = get_matrix(in, h.d, h.d);
  gt.kappa = get_f64(in);
  if (header != nullptr) *header = h;
  return gt;
}

void write_ensemble(std::ostream& out, const sensing::MeasurementEnsemble& ens, std::uint64_t r,
                    std::uint64_t seed) {
  Header h;
  h.kind = ens.kind() == sensing::SensorKind::kRankOne ? Kind::kRankOneEnsemble
                                                        : Kind::kDenseEnsemble;
  h.d = static_cast<std::uint64_t>(ens.dim());
  h.r = r;
  h.m = static_cast<std::uint64_t>(ens.size());
  h.seed = seed;
  put_header(out, h);
  if (h.kind == Kind::kRankOneEnsemble) {
    put_matrix(out, ens.vectors());
  } else {
    for (int i = 0; i < ens.size(); ++i) put_matrix(out, ens.sensor(i));
  }
  put_vector(out, ens.labels());
  require_good(out);
}

sensing::MeasurementEnsemble read_ensemble(std::istream& in, Header* header) {
  const Header h = get_header(in);
  if (h.kind == Kind::kGroundTruth) throw ValidationError("container: not an ensemble");
  if (h.m == 0) throw ValidationError("container: empty ensemble");
  sensing::MeasurementEnsemble ens;
  if (h.kind == Kind::kRankOneEnsemble) {
    matkit::Matrix xs = get_matrix(in, h.m, h.d);
    matkit::Vector labels = get_vector(in, h.m);
    ens = sensing::MeasurementEnsemble::rank_one(std::move(xs), std::move(labels));
  } else {
    std::vector<matkit::Matrix> sensors;
    sensors.reserve(h.m);
    for (std::uint64_t i = 0; i < h.m; ++i) sensors.push_back(get_matrix(in, h.d, h.d));
    matkit::Vector labels = get_vector(in, h.m);
    ens = sensing::MeasurementEnsemble::dense(sensors, std::move(labels));
  }
  if (header != nullptr) *header = h;
  return ens;
}

void save_ground_truth(const std::filesystem::path& path, const sensing::GroundTruth& gt,
                       std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("container: cannot open " + path.string() + " for writing");
  write_ground_truth(out, gt, seed);
}

sensing::GroundTruth load_ground_truth(const std::filesystem::path& path, Header* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("container: cannot open " + path.string());
  return read_ground_truth(in, header);
}

void save_ensemble(const std::filesystem::path& path, const sensing::MeasurementEnsemble& ens,
                   std::uint64_t r, std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("container: cannot open " + path.string() + " for writing");
  write_ensemble(out, ens, r, seed);
}

sensing::MeasurementEnsemble load_ensemble(const std::filesystem::path& path, Header* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("container: cannot open " + path.string());
  return read_ensemble(in, header);
}

}  // namespace sensekit::container
