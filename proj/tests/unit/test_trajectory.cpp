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

#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "sensekit/errors.hpp"
#include "sensekit/trajectory.hpp"

namespace sensekit {
namespace {

TEST(Schedule, LogPrefixThenStride) {
  EXPECT_EQ(checkpoint_schedule(1000, 100),
            (std::vector<long>{0, 1, 2, 5, 10, 20, 50, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000}));
  EXPECT_EQ(checkpoint_schedule(250, 100), (std::vector<long>{0, 1, 2, 5, 10, 20, 50, 100, 200, 250}));
  EXPECT_EQ(checkpoint_schedule(0, 10), (std::vector<long>{0}));
  EXPECT_EQ(checkpoint_schedule(3, 1), (std::vector<long>{0, 1, 2, 3}));
  EXPECT_THROW(checkpoint_schedule(10, 0), ValidationError);
}

Trajectory sample() {
  Trajectory traj;
  Checkpoint a;
  a.t = 0;
  a.train_error = 1.0;
  a.test_error = 0.5;
  a.population_risk = 0.25;
  Checkpoint b;
  b.t = 10;
  b.test_error = 0.1;
  b.population_risk = 1.0 / 3.0;
  DiagRecord d;
  d.t = 10;
  d.sigma_rp1 = 1e-3;
  d.sin_zu = 0.2;
  d.norm_e = 2e-3;
  d.sigmin_r = 0.9;
  d.norm_z = 1.1;
  d.norm_f = 0.21;
  b.diag = d;
  traj.checkpoints = {a, b};
  return traj;
}

TEST(Csv, HeaderAndEmptyFields) {
  const std::string csv = trajectory_csv(sample());
  std::istringstream in(csv);
  std::string header, row0, row1;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  EXPECT_EQ(header, kTrajectoryCsvHeader);
  EXPECT_EQ(row0, "0,1,0.5,0.25,,,,,,");
  EXPECT_EQ(row1.substr(0, 4), "10,,");
}

TEST(Csv, RoundTripIsExact) {
  const Trajectory traj = sample();
  std::istringstream in(trajectory_csv(traj));
  const Trajectory back = read_trajectory_csv(in);
  ASSERT_EQ(back.checkpoints.size(), 2u);
  EXPECT_EQ(back.checkpoints[1].population_risk, 1.0 / 3.0);
  EXPECT_FALSE(back.checkpoints[1].train_error.has_value());
  ASSERT_TRUE(back.checkpoints[1].diag.has_value());
  EXPECT_EQ(back.checkpoints[1].diag->norm_f, 0.21);
  EXPECT_FALSE(back.checkpoints[0].diag.has_value());
  EXPECT_EQ(trajectory_csv(back), trajectory_csv(traj));
}

TEST(Csv, FormatIsShortestExact) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Csv, RejectsWrongHeader) {
  std::istringstream in("t,foo\n0,1\n");
  EXPECT_THROW(read_trajectory_csv(in), ValidationError);
}

}  // namespace
}  // namespace sensekit
