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

#include "sensekit/sensing.hpp"

#include <cmath>
#include <string>

#include "sensekit/errors.hpp"
#include "sensekit/rng.hpp"

namespace sensekit::sensing {

namespace {

Eigen::Index packed_size(int d) { return static_cast<Eigen::Index>(d) * (d + 1) / 2; }

}  // namespace

Vector GroundTruth::rank1_vector() const {
  if (r != 1) throw ValidationError("rank1_vector: ground truth has rank " + std::to_string(r));
  return ustar.col(0);
}

GroundTruth ground_truth_from_factor(const Matrix& factor) {
  matkit::require_finite(factor, "ground_truth_from_factor");
  if (factor.rows() < 1 || factor.cols() < 1)
    throw ValidationError("ground_truth_from_factor: empty factor");
  GroundTruth gt;
  gt.d = static_cast<int>(factor.rows());
  gt.r = static_cast<int>(factor.cols());
  gt.factor = factor;
  gt.xstar = matkit::symmetrize(factor * factor.transpose());
  const matkit::SymEig eig = matkit::sym_eig(gt.xstar);
  // Top-r eigenpairs, descending.
  gt.ustar.resize(gt.d, gt.r);
  gt.sigmastar.resize(gt.r);
  for (int k = 0; k < gt.r; ++k) {
    const Eigen::Index src = gt.d - 1 - k;
    gt.sigmastar(k) = std::max(eig.values(src), 0.0);
    gt.ustar.col(k) = eig.vectors.col(src);
  }
  const double smallest = gt.sigmastar(gt.r - 1);
  gt.kappa = smallest > 0.0 ? gt.sigmastar(0) / smallest : INFINITY;
  return gt;
}

GroundTruth sample_ground_truth(int d, int r, double kappa, TruthMode mode, std::uint64_t seed) {
  if (d < 1) throw ValidationError("sample_ground_truth: d must be positive");
  if (r < 1 || r > d)
    throw ValidationError("sample_ground_truth: rank must satisfy 1 <= r <= d (r=" +
                          std::to_string(r) + ", d=" + std::to_string(d) + ")");
  Rng rng(seed, Stream::kGroundTruth);
  if (mode == TruthMode::kExperiment) {
    Matrix g = rng.gaussian_matrix(d, r);
    for (int k = 0; k < r; ++k) g.col(k) /= g.col(k).norm();
    return ground_truth_from_factor(g);
  }
  if (!(kappa >= 1.0) || !std::isfinite(kappa))
    throw ValidationError("sample_ground_truth: kappa must be finite and >= 1");
  GroundTruth gt;
  gt.d = d;
  gt.r = r;
  gt.ustar = matkit::qr_orthonormalize(rng.gaussian_matrix(d, r));
  gt.sigmastar.resize(r);
  for (int k = 0; k < r; ++k) {
    const double frac = r == 1 ? 0.0 : static_cast<double>(k) / (r - 1);
    gt.sigmastar(k) = 1.0 - frac * (1.0 - 1.0 / kappa);
  }
  gt.factor = gt.ustar * gt.sigmastar.cwiseSqrt().asDiagonal();
  gt.xstar = matkit::symmetrize(gt.ustar * gt.sigmastar.asDiagonal() * gt.ustar.transpose());
  gt.kappa = kappa;
  return gt;
}

MeasurementEnsemble MeasurementEnsemble::dense(const std::vector<Matrix>& sensors, Vector labels) {
  if (sensors.empty()) throw ValidationError("ensemble: at least one sensor required");
  if (static_cast<std::size_t>(labels.size()) != sensors.size())
    throw ValidationError("ensemble: label count does not match sensor count");
  const Eigen::Index d = sensors.front().rows();
  if (d < 1 || d > kMaxDenseDim || static_cast<int>(sensors.size()) > kMaxDenseCount)
    throw ValidationError("ensemble: dense ensembles are limited to d <= " +
                          std::to_string(kMaxDenseDim) + " and m <= " +
                          std::to_string(kMaxDenseCount));
  MeasurementEnsemble ens;
  ens.d_ = static_cast<int>(d);
  ens.kind_ = SensorKind::kDenseSymmetric;
  ens.packed_.resize(static_cast<Eigen::Index>(sensors.size()), packed_size(ens.d_));
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const Matrix& a = sensors[i];
    if (a.rows() != d || a.cols() != d) throw ValidationError("ensemble: sensor shape mismatch");
    matkit::require_finite(a, "ensemble sensor");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (matkit::max_asymmetry(a) > 1e-12 * scale)
      throw ValidationError("ensemble: sensor " + std::to_string(i) + " is not symmetric");
    auto row = ens.packed_.row(static_cast<Eigen::Index>(i));
    Eigen::Index p = 0;
    for (Eigen::Index j = 0; j < d; ++j) row(p++) = a(j, j);
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = j + 1; k < d; ++k) row(p++) = a(j, k);
  }
  matkit::require_finite(labels, "ensemble labels");
  ens.labels_ = std::move(labels);
  return ens;
}

MeasurementEnsemble MeasurementEnsemble::rank_one(Matrix vectors, Vector labels) {
  if (vectors.rows() < 1 || vectors.cols() < 1)
    throw ValidationError("ensemble: at least one rank-one sensor required");
  if (labels.size() != vectors.rows())
    throw ValidationError("ensemble: label count does not match sensor count");
  matkit::require_finite(vectors, "ensemble vectors");
  matkit::require_finite(labels, "ensemble labels");
  MeasurementEnsemble ens;
  ens.d_ = static_cast<int>(vectors.cols());
  ens.kind_ = SensorKind::kRankOne;
  ens.vectors_ = std::move(vectors);
  ens.labels_ = std::move(labels);
  return ens;
}

const Matrix& MeasurementEnsemble::vectors() const {
  if (kind_ != SensorKind::kRankOne) throw ValidationError("ensemble: not a rank-one ensemble");
  return vectors_;
}

void MeasurementEnsemble::check_square(const Matrix& q, const char* what) const {
  if (q.rows() != d_ || q.cols() != d_)
    throw ValidationError(std::string(what) + ": expected " + std::to_string(d_) + "x" +
                          std::to_string(d_) + " matrix, got " + std::to_string(q.rows()) +
                          "x" + std::to_string(q.cols()));
}

Vector MeasurementEnsemble::pack_weighted(const Matrix& q) const {
  Vector out(packed_size(d_));
  Eigen::Index p = 0;
  for (Eigen::Index j = 0; j < d_; ++j) out(p++) = q(j, j);
  for (Eigen::Index j = 0; j < d_; ++j)
    for (Eigen::Index k = j + 1; k < d_; ++k) out(p++) = q(j, k) + q(k, j);
  return out;
}

Matrix MeasurementEnsemble::unpack(const Vector& packed) const {
  Matrix out(d_, d_);
  Eigen::Index p = 0;
  for (Eigen::Index j = 0; j < d_; ++j) out(j, j) = packed(p++);
  for (Eigen::Index j = 0; j < d_; ++j)
    for (Eigen::Index k = j + 1; k < d_; ++k) {
      out(j, k) = packed(p);
      out(k, j) = packed(p);
      ++p;
    }
  return out;
}

Matrix MeasurementEnsemble::sensor(int i) const {
  if (i < 0 || i >= size()) throw ValidationError("ensemble: sensor index out of range");
  if (kind_ == SensorKind::kRankOne) {
    const Vector x = vectors_.row(i).transpose();
    return x * x.transpose();
  }
  return unpack(packed_.row(i).transpose());
}

double MeasurementEnsemble::inner(int i, const Matrix& q) const {
  check_square(q, "inner");
  if (i < 0 || i >= size()) throw ValidationError("ensemble: sensor index out of range");
  if (kind_ == SensorKind::kRankOne) {
    const Vector x = vectors_.row(i).transpose();
    return x.dot(q * x);
  }
  return packed_.row(i).dot(pack_weighted(q).transpose());
}

Vector MeasurementEnsemble::inner_all(const Matrix& q) const {
  check_square(q, "inner_all");
  matkit::require_finite(q, "inner_all");
  if (kind_ == SensorKind::kRankOne) {
    const Matrix w = vectors_ * q;
    return w.cwiseProduct(vectors_).rowwise().sum();
  }
  const Vector qp = pack_weighted(q);
  Vector out(size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = packed_.row(i).dot(qp.transpose());
  return out;
}

Matrix MeasurementEnsemble::combine(const Vector& coef) const {
  if (coef.size() != size()) throw ValidationError("combine: coefficient count mismatch");
  if (kind_ == SensorKind::kRankOne)
    return matkit::symmetrize(vectors_.transpose() * coef.asDiagonal() * vectors_);
  Vector acc = Vector::Zero(packed_.cols());
  for (Eigen::Index i = 0; i < coef.size(); ++i) acc.noalias() += coef(i) * packed_.row(i).transpose();
  return unpack(acc);
}

Matrix MeasurementEnsemble::residual_map(const Matrix& x, std::span<const int> idx,
                                         Vector* residuals) const {
  return map_impl(x, true, idx, residuals);
}

Matrix MeasurementEnsemble::apply(const Matrix& q) const { return map_impl(q, false, {}, nullptr); }

Matrix MeasurementEnsemble::map_impl(const Matrix& x, bool subtract_labels,
                                     std::span<const int> idx, Vector* residuals) const {
  check_square(x, "residual_map");
  matkit::require_finite(x, "residual_map");
  const bool all = idx.empty();
  const Eigen::Index count = all ? size() : static_cast<Eigen::Index>(idx.size());
  if (residuals != nullptr) residuals->resize(count);
  const auto row_of = [&](Eigen::Index k) -> Eigen::Index {
    if (all) return k;
    const int i = idx[static_cast<std::size_t>(k)];
    if (i < 0 || i >= size()) throw ValidationError("residual_map: index out of range");
    return i;
  };

  if (kind_ == SensorKind::kRankOne) {
    Matrix rows(count, d_);
    Vector y(count);
    if (all) {
      rows = vectors_;
      y = labels_;
    } else {
      for (Eigen::Index k = 0; k < count; ++k) {
        rows.row(k) = vectors_.row(row_of(k));
        y(k) = labels_(row_of(k));
      }
    }
    const Matrix w = rows * x;
    Vector c = w.cwiseProduct(rows).rowwise().sum();
    if (subtract_labels) c -= y;
    if (residuals != nullptr) *residuals = c;
    Matrix out = rows.transpose() * c.asDiagonal() * rows;
    return matkit::symmetrize(out) / static_cast<double>(count);
  }

  const Vector qp = pack_weighted(x);
  Vector acc = Vector::Zero(packed_.cols());
  for (Eigen::Index k = 0; k < count; ++k) {
    const Eigen::Index i = row_of(k);
    const auto row = packed_.row(i);
    const double c = row.dot(qp.transpose()) - (subtract_labels ? labels_(i) : 0.0);
    if (residuals != nullptr) (*residuals)(k) = c;
    acc.noalias() += c * row.transpose();
  }
  return unpack(acc / static_cast<double>(count));
}

MeasurementEnsemble MeasurementEnsemble::with_labels(Vector labels) const {
  if (labels.size() != size()) throw ValidationError("with_labels: label count mismatch");
  matkit::require_finite(labels, "with_labels");
  MeasurementEnsemble out = *this;
  out.labels_ = std::move(labels);
  return out;
}

MeasurementEnsemble sample_gaussian_ensemble(const GroundTruth& gt, int m, std::uint64_t seed,
                                             double noise_sigma) {
  if (m < 1) throw ValidationError("sample_gaussian_ensemble: m must be positive");
  if (!(noise_sigma >= 0.0)) throw ValidationError("sample_gaussian_ensemble: noise_sigma < 0");
  if (gt.d > MeasurementEnsemble::kMaxDenseDim || m > MeasurementEnsemble::kMaxDenseCount)
    throw ValidationError("sample_gaussian_ensemble: configuration exceeds in-memory limits (d <= " +
                          std::to_string(MeasurementEnsemble::kMaxDenseDim) + ", m <= " +
                          std::to_string(MeasurementEnsemble::kMaxDenseCount) + ")");
  Rng rng(seed, Stream::kEnsemble);
  std::vector<Matrix> sensors;
  sensors.reserve(static_cast<std::size_t>(m));
  Vector labels(m);
  for (int i = 0; i < m; ++i) {
    const Matrix q = rng.gaussian_matrix(gt.d, gt.d);
    Matrix a = matkit::symmetrize(q);
    labels(i) = matkit::inner(a, gt.xstar);
    sensors.push_back(std::move(a));
  }
  if (noise_sigma > 0.0) {
    Rng noise(seed, Stream::kLabelNoise);
    for (int i = 0; i < m; ++i) labels(i) += noise_sigma * noise.gaussian();
  }
  return MeasurementEnsemble::dense(sensors, std::move(labels));
}

Matrix apply_map(const MeasurementEnsemble& ens, const Matrix& q) {
  return ens.apply(q);
}

Matrix residual_operator(const MeasurementEnsemble& ens, const Matrix& u) {
  if (u.rows() != ens.dim()) throw ValidationError("residual_operator: factor row count mismatch");
  return ens.residual_map(u * u.transpose());
}

double loss(const MeasurementEnsemble& ens, const Matrix& u) {
  if (u.rows() != ens.dim()) throw ValidationError("loss: factor row count mismatch");
  const Vector c = ens.inner_all(u * u.transpose()) - ens.labels();
  return c.squaredNorm() / (4.0 * ens.size());
}

Matrix gradient(const MeasurementEnsemble& ens, const Matrix& u) {
  return residual_operator(ens, u) * u;
}

std::optional<double> train_error_from_residuals(const Vector& residuals, const Vector& labels) {
  const double denom = labels.squaredNorm();
  if (denom == 0.0) return std::nullopt;
  return std::sqrt(residuals.squaredNorm() / denom);
}

Metrics truth_metrics(const GroundTruth& gt, const Matrix& x_hat) {
  if (x_hat.rows() != gt.d || x_hat.cols() != gt.d)
    throw ValidationError("metrics: estimate shape mismatch");
  Metrics out;
  const double diff = (x_hat - gt.xstar).norm();
  const double scale = gt.xstar.norm();
  out.test_error = scale > 0.0 ? diff / scale : diff;
  out.population_risk = diff * diff;
  return out;
}

Metrics metrics(const MeasurementEnsemble& ens, const GroundTruth& gt, const Matrix& x_hat) {
  Metrics out = truth_metrics(gt, x_hat);
  const Vector c = ens.inner_all(x_hat) - ens.labels();
  out.train_error = train_error_from_residuals(c, ens.labels());
  return out;
}

}  // namespace sensekit::sensing
