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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#ifndef SENSEKIT_CLI
#define SENSEKIT_CLI ""
#endif

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    if (std::string(SENSEKIT_CLI).empty()) GTEST_SKIP() << "command-line tool not built";
    dir_ = fs::temp_directory_path() /
           ("sensekit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) const {
    const fs::path log = dir_ / "stdout.txt";
    const std::string cmd = std::string(SENSEKIT_CLI) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(log);
    return r;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

TEST_F(Cli, MissingConfigFileExitsWithOne) {
  const Result r = run("sweep --config " + (dir_ / "absent.json").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("absent.json"), std::string::npos);
}

TEST_F(Cli, UnknownFlagPrintsUsage) {
  const Result r = run("rip --frobnicate 3");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("--frobnicate"), std::string::npos);
  EXPECT_NE(r.out.find("Usage"), std::string::npos);
}

TEST_F(Cli, RipReportsCalibratedEstimate) {
  const Result r = run("rip --d 30 --r 2 --m 6000 --probes 500 --seed 1");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LT(j.at("delta_hat").get<double>(), 0.35);
  EXPECT_EQ(j.at("r").get<int>(), 2);
}

TEST_F(Cli, SweepIsDeterministic) {
  const fs::path cfg = dir_ / "cfg.json";
  std::ofstream(cfg) << R"({"schema_version": 1, "preset": "fig1", "desk_scale": true, "repeats": 2,
    "overrides": {"d": 10, "r": 1, "m": 100, "iterations": 50, "record_every": 10}})";
  ASSERT_EQ(run("sweep --config " + cfg.string() + " --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(run("sweep --config " + cfg.string() + " --out " + (dir_ / "b").string() + " --workers 2").code, 0);
  for (const char* f : {"summary.csv", "curves.csv", "chart.svg", "runs/c3_rep1.csv"}) {
    const std::string a = slurp(dir_ / "a" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(Cli, GenThenRunFromFiles) {
  ASSERT_EQ(run("gen --d 6 --r 1 --m 60 --seed 3 --out " + dir_.string()).code, 0);
  const fs::path cfg = dir_ / "run.json";
  std::ofstream(cfg) << R"({"schema_version": 1, "cells": [{"solver": "gd", "d": 6, "r": 1, "m": 60,
    "iterations": 20, "record_every": 10}]})";
  const Result r = run("run --config " + cfg.string() + " --truth " + (dir_ / "truth.bin").string() +
                       " --ensemble " + (dir_ / "ensemble.bin").string() + " --out " + (dir_ / "o").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(slurp(dir_ / "o" / "trajectory.csv").rfind("t,train_error", 0), 0u);
}

TEST_F(Cli, DivergentRunExitsWithTwo) {
  const fs::path cfg = dir_ / "run.json";
  std::ofstream(cfg) << R"({"schema_version": 1, "cells": [{"solver": "gd", "d": 6, "r": 1, "m": 60,
    "alpha": 5.0, "eta": 10.0, "iterations": 20}]})";
  EXPECT_EQ(run("run --config " + cfg.string() + " --out " + (dir_ / "o").string()).code, 2);
}

TEST_F(Cli, PlotRendersCurves) {
  const fs::path cfg = dir_ / "cfg.json";
  std::ofstream(cfg) << R"({"schema_version": 1, "repeats": 1, "cells": [{"solver": "gd", "d": 6, "r": 1,
    "m": 60, "iterations": 20, "record_every": 10}]})";
  ASSERT_EQ(run("sweep --config " + cfg.string() + " --out " + (dir_ / "s").string()).code, 0);
  const Result r = run("plot --in " + (dir_ / "s" / "curves.csv").string() + " --out " + (dir_ / "p.svg").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(slurp(dir_ / "p.svg").find("<circle"), std::string::npos);
}

}  // namespace
