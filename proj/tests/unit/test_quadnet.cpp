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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sensekit/errors.hpp"
#include "sensekit/matkit.hpp"
#include "sensekit/quadnet.hpp"

namespace sensekit::quadnet {
namespace {

using sensing::sample_ground_truth;
using sensing::TruthMode;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(Data, LabelsAreSquaredProjections) {
  const GroundTruth gt = sample_ground_truth(6, 2, 1.0, TruthMode::kExperiment, 1);
  const QuadDataset data = gen_quad_data(gt, 50, 2);
  ASSERT_EQ(data.size(), 50);
  ASSERT_EQ(data.dim(), 6);
  for (int i = 0; i < 50; ++i) {
    const Vector x = data.inputs.row(i).transpose();
    double y = 0.0;
    for (int j = 0; j < 2; ++j) y += std::pow(gt.factor.col(j).dot(x), 2);
    EXPECT_NEAR(data.labels(i), y, 1e-12);
    EXPECT_GE(data.labels(i), 0.0);
  }
  EXPECT_EQ(gen_quad_data(gt, 50, 2).inputs, data.inputs);
}

TEST(Data, EnsembleViewHasOuterProductSensors) {
  const GroundTruth gt = sample_ground_truth(4, 1, 1.0, TruthMode::kExperiment, 3);
  const QuadDataset data = gen_quad_data(gt, 10, 4);
  const auto ens = data.ensemble();
  const Vector x = data.inputs.row(3).transpose();
  EXPECT_LE((ens.sensor(3) - x * x.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(ens.labels(), data.labels);
}

TEST(Predict, EqualsInnerProductWithOuterProduct) {
  Rng rng(5, Stream::kTest);
  for (int k = 0; k < 100; ++k) {
    const Matrix u = rng.gaussian_matrix(7, 3);
    const Vector x = rng.gaussian_vector(7);
    const double expected = oracle::inner_loop(oracle::matmul_loop(x, x.transpose()),
                                               oracle::matmul_loop(u, u.transpose()));
    EXPECT_NEAR(predict(u, x), expected, 1e-10 * std::max(1.0, std::abs(expected)));
  }
  EXPECT_EQ(predict(Matrix::Zero(7, 3), rng.gaussian_vector(7)), 0.0);
}

TEST(Truncated, InfiniteRadiusReducesToSensingOperator) {
  const GroundTruth gt = sample_ground_truth(8, 2, 1.0, TruthMode::kExperiment, 6);
  const QuadDataset data = gen_quad_data(gt, 200, 7);
  Rng rng(6, Stream::kTest);
  const Matrix u = 0.5 * rng.gaussian_matrix(8, 8);
  const TruncatedValue g = truncated_gradient(u, data, kInf);
  const Matrix expected = 4.0 * sensing::residual_operator(data.ensemble(), u) * u;
  EXPECT_LE((g.gradient - expected).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, expected.norm()));
  EXPECT_EQ(g.kept, 200);
}

TEST(Truncated, GradientMatchesFiniteDifferences) {
  const GroundTruth gt = sample_ground_truth(5, 1, 1.0, TruthMode::kExperiment, 8);
  const QuadDataset data = gen_quad_data(gt, 60, 9);
  Rng rng(7, Stream::kTest);
  for (int k = 0; k < 10; ++k) {
    const Matrix u = 0.3 * rng.gaussian_matrix(5, 5);
    const Matrix fd = oracle::fd_gradient([&](const Matrix& v) { return truncated_loss(v, data, kInf); }, u);
    const Matrix g = truncated_gradient(u, data, kInf).gradient;
    EXPECT_LE((g - fd).norm() / g.norm(), 1e-5);
  }
}

TEST(Truncated, MaskDropsLargePredictions) {
  const GroundTruth gt = sample_ground_truth(5, 1, 1.0, TruthMode::kExperiment, 10);
  const QuadDataset data = gen_quad_data(gt, 80, 11);
  const Matrix u = Matrix::Identity(5, 5);
  const double rcut = 4.0;
  int kept = 0;
  Matrix expected = Matrix::Zero(5, 5);
  for (int i = 0; i < 80; ++i) {
    const Vector x = data.inputs.row(i).transpose();
    const double yhat = x.squaredNorm();
    if (yhat > rcut) continue;
    ++kept;
    expected += 4.0 / 80 * (yhat - data.labels(i)) * x * x.transpose();
  }
  const TruncatedValue g = truncated_gradient(u, data, rcut);
  EXPECT_EQ(g.kept, kept);
  EXPECT_LE((g.gradient - expected).cwiseAbs().maxCoeff(), 1e-12);
  const TruncatedValue none = truncated_gradient(u, data, 1e-9);
  EXPECT_TRUE(none.all_truncated());
  EXPECT_EQ(none.gradient, Matrix::Zero(5, 5));
  EXPECT_THROW(truncated_gradient(u, data, 0.0), ValidationError);
}

TEST(Step, MatchesNaiveRescaledUpdate) {
  const GroundTruth gt = sample_ground_truth(5, 1, 1.0, TruthMode::kExperiment, 12);
  const QuadDataset data = gen_quad_data(gt, 40, 13);
  QuadConfig cfg;
  cfg.eta = 0.02;
  cfg.rcut = kInf;
  const Matrix u = 0.2 * Matrix::Identity(5, 5);
  const double tau = gt.factor.squaredNorm();
  Matrix grad = Matrix::Zero(5, 5);
  for (int i = 0; i < 40; ++i) {
    const Vector x = data.inputs.row(i).transpose();
    grad += 4.0 / 40 * (predict(u, x) - data.labels(i)) * x * x.transpose() * u;
  }
  const Matrix expected = (u - 0.02 * grad) / (1.0 - 0.02 * (u.squaredNorm() - tau));
  EXPECT_LE((algorithm1_step(u, data, cfg, tau) - expected).cwiseAbs().maxCoeff(), 1e-13);
  cfg.rescale = false;
  EXPECT_LE((algorithm1_step(u, data, cfg, tau) - (u - 0.02 * grad)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Step, VanishingDenominatorIsNumericalError) {
  const GroundTruth gt = sample_ground_truth(3, 1, 1.0, TruthMode::kExperiment, 14);
  const QuadDataset data = gen_quad_data(gt, 10, 15);
  QuadConfig cfg;
  cfg.eta = 1.0;
  const Matrix u = Matrix::Identity(3, 3);
  EXPECT_THROW(algorithm1_step(u, data, cfg, u.squaredNorm() - 1.0), NumericalError);
}

TEST(Tau, ExactAndEstimated) {
  const GroundTruth gt = sample_ground_truth(6, 2, 1.0, TruthMode::kExperiment, 16);
  const QuadDataset data = gen_quad_data(gt, 20000, 17);
  EXPECT_DOUBLE_EQ(resolve_tau(gt, data, TauMode::kExact), gt.factor.squaredNorm());
  EXPECT_NEAR(resolve_tau(gt, data, TauMode::kEstimated), gt.factor.squaredNorm(), 0.1);
}

TEST(Config, DefaultsAndValidation) {
  QuadConfig cfg;
  EXPECT_NEAR(cfg.resolved_rcut(30), 20.0 * std::log(30.0), 1e-12);
  cfg.rcut = kInf;
  EXPECT_NO_THROW(cfg.validate());
  cfg.rcut = -1.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.rcut.reset();
  cfg.alpha = 0.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Algorithm1, RunMatchesRepeatedSteps) {
  const GroundTruth gt = sample_ground_truth(5, 1, 1.0, TruthMode::kExperiment, 18);
  const QuadDataset data = gen_quad_data(gt, 100, 19);
  QuadConfig cfg;
  cfg.iterations = 30;
  cfg.record_every = 10;
  const Trajectory traj = run_algorithm1(gt, data, cfg);
  Matrix u = cfg.alpha * Matrix::Identity(5, 5);
  for (int t = 0; t < 30; ++t) u = algorithm1_step(u, data, cfg, gt.factor.squaredNorm());
  EXPECT_LE((traj.final_factor - u).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(traj.checkpoints.size(), 7u);
}

TEST(Algorithm1, RecoversAndScalesWithInitialization) {
  const GroundTruth gt = sample_ground_truth(12, 1, 1.0, TruthMode::kExperiment, 20);
  const QuadDataset data = gen_quad_data(gt, 480, 21);
  QuadConfig cfg;
  cfg.iterations = 1500;
  cfg.record_every = 500;
  cfg.alpha = 1e-3;
  const double small = run_algorithm1(gt, data, cfg).final_checkpoint().test_error;
  cfg.alpha = 1e-1;
  const double large = run_algorithm1(gt, data, cfg).final_checkpoint().test_error;
  EXPECT_LT(small, 0.05);
  EXPECT_LE(small, large);
  cfg.tau_mode = TauMode::kEstimated;
  cfg.alpha = 1e-3;
  EXPECT_LT(run_algorithm1(gt, data, cfg).final_checkpoint().test_error, 2.0 * small + 0.05);
}

}  // namespace
}  // namespace sensekit::quadnet
