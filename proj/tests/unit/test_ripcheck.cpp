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

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "sensekit/errors.hpp"
#include "sensekit/matkit.hpp"
#include "sensekit/ripcheck.hpp"

namespace sensekit::ripcheck {
namespace {

MeasurementEnsemble gaussian(int d, int m, std::uint64_t seed) {
  const auto gt = sensing::sample_ground_truth(d, 1, 1.0, sensing::TruthMode::kExperiment, seed);
  return sensing::sample_gaussian_ensemble(gt, m, seed);
}

Matrix sym_rank(int d, int r, std::uint64_t sub) {
  Rng rng(41, Stream::kTest, sub);
  return random_probe(d, r, ProbeKind::kSymmetric, rng);
}

TEST(Rip, OrthogonalSingleSensorHasUnitDeviation) {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 1.0;
  const MeasurementEnsemble ens = MeasurementEnsemble::dense({a}, Vector::Zero(1));
  Matrix x = Matrix::Zero(3, 3);
  x(1, 1) = 1.0;
  EXPECT_DOUBLE_EQ(isometry_deviation(ens, x), -1.0);
  const std::vector<Matrix> probes{x};
  EXPECT_DOUBLE_EQ(max_deviation(ens, probes), 1.0);
}

TEST(Rip, DuplicatedSensorsLeaveEstimateUnchanged) {
  const MeasurementEnsemble ens = gaussian(6, 40, 1);
  std::vector<Matrix> twice;
  for (int i = 0; i < ens.size(); ++i) {
    twice.push_back(ens.sensor(i));
    twice.push_back(ens.sensor(i));
  }
  const MeasurementEnsemble dup = MeasurementEnsemble::dense(twice, Vector::Zero(80));
  const RipOptions opt{2, 50, 3};
  EXPECT_NEAR(estimate_rip(ens, opt).delta_hat, estimate_rip(dup, opt).delta_hat, 1e-12);
}

TEST(Rip, ProbesAreUnitAndSymmetric) {
  Rng rng(2, Stream::kTest);
  for (int k = 0; k < 20; ++k) {
    const Matrix x = random_probe(8, 3, ProbeKind::kSymmetric, rng);
    EXPECT_NEAR(x.norm(), 1.0, 1e-12);
    EXPECT_EQ(matkit::max_asymmetry(x), 0.0);
    EXPECT_LE(matkit::numerical_rank(x, 1e-10), 3);
    const Matrix y = random_probe(8, 2, ProbeKind::kAsymmetric, rng);
    EXPECT_NEAR(y.norm(), 1.0, 1e-12);
    EXPECT_EQ(matkit::numerical_rank(y, 1e-10), 2);
  }
}

TEST(Rip, CalibratedThresholds) {
  const RipOptions opt{2, 500, 7};
  EXPECT_LT(estimate_rip(gaussian(30, 6000, 11), opt).delta_hat, 0.35);
  EXPECT_GT(estimate_rip(gaussian(30, 100, 11), opt).delta_hat, 0.5);
}

TEST(Rip, EstimateShrinksAsSampleCountGrows) {
  const std::vector<int> ms{100, 400, 1600};
  std::vector<double> mean(ms.size(), 0.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    for (std::size_t k = 0; k < ms.size(); ++k)
      mean[k] += estimate_rip(gaussian(12, ms[k], seed), RipOptions{2, 100, seed}).delta_hat / 5;
  EXPECT_GT(mean[0], mean[1]);
  EXPECT_GT(mean[1], mean[2]);
}

TEST(Rip, AscentNeverLowersTheEstimate) {
  const MeasurementEnsemble ens = gaussian(10, 200, 4);
  RipOptions plain{2, 80, 5};
  plain.ascent_starts = 0;
  RipOptions refined = plain;
  refined.ascent_starts = 8;
  const RipReport a = estimate_rip(ens, plain);
  const RipReport b = estimate_rip(ens, refined);
  EXPECT_GE(b.delta_hat, a.delta_hat);
  EXPECT_EQ(a.samples, 80);
  EXPECT_GT(b.samples, 80);
  EXPECT_DOUBLE_EQ(b.delta_hat, std::max(b.over, b.under));
}

TEST(Rip, RejectsBadOptions) {
  const MeasurementEnsemble ens = gaussian(4, 10, 1);
  EXPECT_THROW(estimate_rip(ens, RipOptions{1, 0, 0}), ValidationError);
  EXPECT_THROW(estimate_rip(ens, RipOptions{5, 10, 0}), ValidationError);
  EXPECT_THROW(isometry_deviation(ens, Matrix::Zero(4, 4)), ValidationError);
}

TEST(Lemmas, TrivialCases) {
  const MeasurementEnsemble ens = gaussian(6, 50, 2);
  const Matrix x = sym_rank(6, 2, 1);
  EXPECT_EQ(lemma_ip_residual(ens, x, Matrix::Zero(6, 6), 2).value, 0.0);
  EXPECT_EQ(lemma_opnorm_residual(ens, x, Matrix::Zero(6, 3), 2).value, 0.0);
  EXPECT_EQ(lemma_nuclear_ip_residual(ens, Matrix::Zero(6, 6), x, 2).value, 0.0);
  EXPECT_EQ(lemma_nuclear_op_residual(ens, Matrix::Zero(6, 6), Matrix::Identity(6, 6)).value, 0.0);
}

TEST(Lemmas, Reductions) {
  const MeasurementEnsemble ens = gaussian(6, 50, 3);
  const Matrix x = sym_rank(6, 2, 2);
  EXPECT_NEAR(lemma_ip_residual(ens, x, x, 2).value, std::abs(isometry_deviation(ens, x)), 1e-14);
  const Matrix id = Matrix::Identity(6, 6);
  EXPECT_NEAR(lemma_opnorm_residual(ens, x, id, 2).value, matkit::spectral_norm(ens.apply(x) - x), 1e-14);
  const Matrix y = sym_rank(6, 1, 3);
  const Matrix x1 = sym_rank(6, 1, 4);
  EXPECT_EQ(lemma_nuclear_ip_residual(ens, x1, y).value, lemma_ip_residual(ens, x1, y, 1).value);
  const Matrix full = matkit::symmetrize(Rng(5, Stream::kTest).gaussian_matrix(6, 6));
  EXPECT_NEAR(lemma_nuclear_op_residual(ens, full, id, id).value,
              lemma_nuclear_op_residual(ens, full, id).value, 1e-13);
}

TEST(Lemmas, RankWarnings) {
  const MeasurementEnsemble ens = gaussian(6, 50, 4);
  const Matrix x3 = sym_rank(6, 3, 5);
  const Matrix x1 = sym_rank(6, 1, 6);
  EXPECT_TRUE(lemma_ip_residual(ens, x3, x1, 2).rank_warning);
  EXPECT_FALSE(lemma_ip_residual(ens, x1, x1, 2).rank_warning);
  EXPECT_TRUE(lemma_opnorm_residual(ens, x3, Matrix::Identity(6, 6), 1).rank_warning);
  EXPECT_TRUE(lemma_nuclear_ip_residual(ens, x1, x3, 1).rank_warning);
}

TEST(Lemmas, BoundsHoldWithSlackAtModerateScale) {
  const int d = 12, r = 2;
  const MeasurementEnsemble ens = gaussian(d, 3000, 8);
  const double delta = estimate_rip(ens, RipOptions{r, 200, 9}).delta_hat;
  const double delta1 = estimate_rip(ens, RipOptions{1, 200, 9}).delta_hat;
  Rng rng(10, Stream::kTest);
  int ip = 0, op = 0, nip = 0, nop = 0;
  for (int k = 0; k < 20; ++k) {
    const Matrix x = random_probe(d, r, ProbeKind::kSymmetric, rng) * 2.0;
    const Matrix y = random_probe(d, r, ProbeKind::kSymmetric, rng);
    const Matrix rmat = rng.gaussian_matrix(d, 3);
    const Matrix full = matkit::symmetrize(rng.gaussian_matrix(d, d));
    const Matrix y1 = random_probe(d, 1, ProbeKind::kSymmetric, rng);
    ip += lemma_ip_residual(ens, x, y, r).value <= kLemmaSlack * delta * x.norm() * y.norm();
    op += lemma_opnorm_residual(ens, x, rmat, r).value <=
          kLemmaSlack * delta * x.norm() * matkit::spectral_norm(rmat);
    nip += lemma_nuclear_ip_residual(ens, full, y1).value <=
           kLemmaSlack * delta1 * matkit::nuclear_norm(full) * y1.norm();
    nop += lemma_nuclear_op_residual(ens, full, rmat).value <=
           kLemmaSlack * delta1 * matkit::nuclear_norm(full) * matkit::spectral_norm(rmat);
  }
  EXPECT_GE(ip, 19);
  EXPECT_GE(op, 19);
  EXPECT_GE(nip, 19);
  EXPECT_GE(nop, 19);
}

TEST(Truncation, TrivialCases) {
  Rng rng(6, Stream::kTest);
  const Matrix xs = rng.gaussian_matrix(40, 5);
  EXPECT_EQ(truncated_rank1_deviation(xs, Matrix::Zero(5, 5), 1.0), 0.0);
  const Matrix x = sym_rank(5, 2, 7);
  const Matrix target = 2.0 * x + x.trace() * Matrix::Identity(5, 5);
  EXPECT_NEAR(truncated_rank1_deviation(xs, x, 1e-300), matkit::spectral_norm(target), 1e-12);
}

TEST(Truncation, MatchesNaiveLoop) {
  Rng rng(7, Stream::kTest);
  const Matrix xs = rng.gaussian_matrix(30, 4);
  const Matrix x = sym_rank(4, 2, 8);
  const double rcut = 1.0;
  Matrix sum = Matrix::Zero(4, 4);
  for (int i = 0; i < 30; ++i) {
    const Vector v = xs.row(i).transpose();
    const double c = v.dot(x * v);
    if (std::abs(c) <= rcut) sum += c * v * v.transpose();
  }
  sum /= 30.0;
  const Matrix expected = sum - 2.0 * x - x.trace() * Matrix::Identity(4, 4);
  EXPECT_NEAR(truncated_rank1_deviation(xs, x, rcut), matkit::spectral_norm(expected), 1e-12);
}

TEST(Truncation, ConcentratesWithLargeRadius) {
  Rng rng(8, Stream::kTest);
  const Matrix xs = rng.gaussian_matrix(20000, 10);
  Vector a = rng.gaussian_vector(10);
  a.normalize();
  const Matrix x = a * a.transpose();
  EXPECT_LE(truncated_rank1_deviation(xs, x, 25.0), 0.3);
  EXPECT_THROW(truncated_rank1_deviation(xs, x, 0.0), ValidationError);
}

TEST(Truncation, UntruncatedScaledIdentity) {
  Rng rng(9, Stream::kTest);
  const Matrix xs = rng.gaussian_matrix(50000, 25);
  const Matrix x = Matrix::Identity(25, 25) / 25.0;
  const double dev = truncated_rank1_deviation(xs, x, std::numeric_limits<double>::infinity());
  EXPECT_TRUE(std::isfinite(dev));
  EXPECT_LE(dev, 0.5);
}

TEST(Truncation, DefaultRadius) {
  EXPECT_NEAR(default_truncation_radius(0.1), std::log(10.0), 1e-15);
  EXPECT_THROW(default_truncation_radius(1.0), ValidationError);
}

}  // namespace
}  // namespace sensekit::ripcheck
