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

#include <gtest/gtest.h>

#include "sensekit/errors.hpp"
#include "sensekit/matkit.hpp"
#include "sensekit/probes.hpp"
#include "sensekit/rng.hpp"
#include "sensekit/solvers.hpp"

namespace sensekit::probes {
namespace {

using sensing::sample_ground_truth;
using sensing::TruthMode;

TEST(Subspace, InitialStateIsTruthColumnSpace) {
  const GroundTruth gt = sample_ground_truth(8, 2, 2.0, TruthMode::kSpec, 1);
  const SubspaceState s = initial_subspace(gt);
  EXPECT_EQ(s.t, 0);
  EXPECT_EQ(s.basis, gt.ustar);
  EXPECT_FALSE(s.degenerate_map);
}

TEST(Subspace, ZeroMapKeepsSpan) {
  const GroundTruth gt = sample_ground_truth(8, 2, 1.0, TruthMode::kSpec, 2);
  const SubspaceState s = advance_subspace(initial_subspace(gt), Matrix::Zero(8, 8), 0.1);
  EXPECT_EQ(s.t, 1);
  EXPECT_LE(matkit::principal_angle_sin(s.basis, gt.ustar), 1e-14);
  EXPECT_LE((s.basis.transpose() * s.basis - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Subspace, TracksProductOfStepMaps) {
  const GroundTruth gt = sample_ground_truth(6, 2, 1.0, TruthMode::kSpec, 3);
  Rng rng(3, Stream::kTest);
  SubspaceState s = initial_subspace(gt);
  Matrix prod = gt.ustar;
  for (int t = 0; t < 5; ++t) {
    const Matrix m = matkit::symmetrize(rng.gaussian_matrix(6, 6));
    s = advance_subspace(s, m, 0.05);
    prod = (Matrix::Identity(6, 6) - 0.05 * m) * prod;
  }
  EXPECT_LE(matkit::principal_angle_sin(s.basis, prod), 1e-12);
  EXPECT_FALSE(s.degenerate_map);
}

TEST(Subspace, DegenerateAndCollapsedMaps) {
  const GroundTruth gt = sample_ground_truth(4, 1, 1.0, TruthMode::kSpec, 4);
  const Vector u = gt.rank1_vector();
  const SubspaceState s = advance_subspace(initial_subspace(gt), 12.0 * u * u.transpose(), 1.0 / 12.0);
  EXPECT_TRUE(s.collapsed);
  EXPECT_EQ(s.basis.cols(), 0);
  const SubspaceState big = advance_subspace(initial_subspace(gt), 20.0 * Matrix::Identity(4, 4), 0.1);
  EXPECT_TRUE(big.degenerate_map);
  EXPECT_FALSE(big.collapsed);
}

TEST(Splits, ZeSplitIsExactAndOrthogonal) {
  const GroundTruth gt = sample_ground_truth(9, 3, 1.0, TruthMode::kSpec, 5);
  Rng rng(5, Stream::kTest);
  const Matrix u = rng.gaussian_matrix(9, 9);
  const ZESplit ze = split_ze(u, initial_subspace(gt));
  EXPECT_LE((u - ze.z - ze.e).norm(), 1e-12);
  EXPECT_LE((gt.ustar.transpose() * ze.e).norm(), 1e-12);
  EXPECT_LE((ze.z.transpose() * ze.e).norm(), 1e-12);
}

TEST(Splits, FrSplitReconstructsZ) {
  const GroundTruth gt = sample_ground_truth(9, 2, 1.0, TruthMode::kSpec, 6);
  Rng rng(6, Stream::kTest);
  const Matrix z = rng.gaussian_matrix(9, 2) * rng.gaussian_matrix(2, 9);
  const FRSplit fr = split_fr(z, gt);
  EXPECT_FALSE(fr.rank_deficient);
  EXPECT_LE(((gt.ustar + fr.f) * fr.r - z).norm(), 1e-10 * z.norm());
  EXPECT_LE((gt.ustar.transpose() * fr.f).norm(), 1e-10);
}

TEST(Splits, RankDeficientSignal) {
  const GroundTruth gt = sample_ground_truth(6, 2, 1.0, TruthMode::kSpec, 7);
  const Matrix z = gt.ustar.col(0) * Vector::Ones(6).transpose();
  EXPECT_TRUE(split_fr(z, gt).rank_deficient);
}

TEST(Splits, SandwichHoldsForSmallF) {
  const GroundTruth gt = sample_ground_truth(10, 2, 1.0, TruthMode::kSpec, 8);
  Rng rng(8, Stream::kTest);
  const Matrix perp = Matrix::Identity(10, 10) - gt.ustar * gt.ustar.transpose();
  for (int k = 0; k < 100; ++k) {
    Matrix f = perp * rng.gaussian_matrix(10, 2);
    f *= (0.3 * rng.uniform()) / matkit::spectral_norm(f);
    const Matrix z = (gt.ustar + f) * rng.gaussian_matrix(2, 10);
    const FRSplit fr = split_fr(z, gt);
    const double nf = matkit::spectral_norm(fr.f);
    const double s = matkit::principal_angle_sin(z, gt.ustar);
    EXPECT_LE(nf - nf * nf * nf, s + 1e-8);
    EXPECT_LE(s, nf + 1e-8);
  }
}

TEST(Splits, RankOneErrorIdentity) {
  const GroundTruth gt = sample_ground_truth(7, 1, 1.0, TruthMode::kSpec, 9);
  Rng rng(9, Stream::kTest);
  for (int k = 0; k < 20; ++k) {
    const Matrix u = 0.5 * rng.gaussian_matrix(7, 7);
    const Rank1Split s = split_rank1(u, gt);
    const double lhs = (u * u.transpose() - gt.xstar).squaredNorm();
    const double rhs = std::pow(1.0 - s.r.squaredNorm(), 2) + 2.0 * (s.e * s.r).squaredNorm() +
                       (s.e * s.e.transpose()).squaredNorm();
    EXPECT_NEAR(lhs, rhs, 1e-9);
  }
  const GroundTruth gt2 = sample_ground_truth(7, 2, 1.0, TruthMode::kSpec, 9);
  EXPECT_THROW(split_rank1(Matrix::Identity(7, 7), gt2), ValidationError);
}

TEST(Diagnostics, SmallIdentityInitialization) {
  const GroundTruth gt = sample_ground_truth(8, 2, 1.0, TruthMode::kSpec, 10);
  const double alpha = 1e-2;
  const DiagRecord d = diagnostics(alpha * Matrix::Identity(8, 8), initial_subspace(gt), gt);
  EXPECT_NEAR(d.norm_e, alpha, 1e-14);
  EXPECT_NEAR(d.norm_z, alpha, 1e-14);
  EXPECT_NEAR(d.sigmin_r, alpha, 1e-14);
  EXPECT_NEAR(d.sin_zu, 0.0, 1e-7);
  EXPECT_NEAR(d.norm_f, 0.0, 1e-12);
  EXPECT_NEAR(d.sigma_rp1, alpha, 1e-14);
  EXPECT_TRUE(d.flags.sin_small);
  EXPECT_TRUE(d.flags.sandwich_holds);
  EXPECT_FALSE(d.rank1_signal.has_value());
}

TEST(Diagnostics, ZeroSignalHasUnitSine) {
  const GroundTruth gt = sample_ground_truth(5, 1, 1.0, TruthMode::kSpec, 11);
  const Vector u = gt.rank1_vector();
  const Matrix perp = (Matrix::Identity(5, 5) - u * u.transpose()) * 0.3;
  const DiagRecord d = diagnostics(perp, initial_subspace(gt), gt);
  EXPECT_EQ(d.sin_zu, 1.0);
  EXPECT_NEAR(*d.rank1_signal, 0.0, 1e-15);
}

TEST(Probe, AttachedToGdRecordsEveryCheckpoint) {
  const GroundTruth gt = sample_ground_truth(8, 1, 1.0, TruthMode::kExperiment, 12);
  const auto ens = sensing::sample_gaussian_ensemble(gt, 160, 12);
  solvers::SolverConfig cfg;
  cfg.iterations = 400;
  cfg.record_every = 100;
  cfg.eta = 0.02;
  SubspaceProbe probe(gt);
  const Trajectory traj = solvers::run_gd(gt, ens, cfg, &probe);
  ASSERT_EQ(probe.records().size(), traj.checkpoints.size());
  EXPECT_EQ(probe.state().t, 400);
  for (const Checkpoint& c : traj.checkpoints) {
    ASSERT_TRUE(c.diag.has_value());
    EXPECT_EQ(c.diag->t, c.t);
    EXPECT_LE(c.diag->split_residual, 1e-9);
    EXPECT_LE(c.diag->projection_leak, 1e-9);
  }
  EXPECT_TRUE(traj.checkpoints[0].diag->flags.error_bounded);
}

TEST(Probe, RejectsOutOfOrderDelivery) {
  const GroundTruth gt = sample_ground_truth(4, 1, 1.0, TruthMode::kSpec, 13);
  SubspaceProbe probe(gt);
  EXPECT_THROW(probe.on_step(1, Matrix::Zero(4, 4), 0.1), ValidationError);
  EXPECT_THROW(probe.at_checkpoint(2, Matrix::Identity(4, 4)), ValidationError);
}

}  // namespace
}  // namespace sensekit::probes
