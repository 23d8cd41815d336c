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

#include <benchmark/benchmark.h>

#include "sensekit/matkit.hpp"
#include "sensekit/quadnet.hpp"
#include "sensekit/ripcheck.hpp"
#include "sensekit/sensing.hpp"
#include "sensekit/solvers.hpp"

namespace {

using namespace sensekit;

struct Fixture {
  sensing::GroundTruth gt;
  sensing::MeasurementEnsemble ens;
  matkit::Matrix u;
};

Fixture make(int d, int r) {
  Fixture f;
  f.gt = sensing::sample_ground_truth(d, r, 1.0, sensing::TruthMode::kExperiment, 1);
  f.ens = sensing::sample_gaussian_ensemble(f.gt, 5 * d * r, 1);
  Rng rng(1, Stream::kTest);
  f.u = 0.1 * rng.gaussian_matrix(d, d);
  return f;
}

void BM_ResidualMap(benchmark::State& state) {
  const Fixture f = make(static_cast<int>(state.range(0)), 5);
  const matkit::Matrix x = f.u * f.u.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(f.ens.residual_map(x));
}
BENCHMARK(BM_ResidualMap)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_GdStep(benchmark::State& state) {
  const Fixture f = make(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(solvers::gd_step(f.u, f.ens, 0.0025));
}
BENCHMARK(BM_GdStep)->Arg(20)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_SgdSteps(benchmark::State& state) {
  const Fixture f = make(static_cast<int>(state.range(0)), 5);
  solvers::SolverConfig cfg;
  cfg.alpha = 1.0;
  cfg.eta = 8e-5;
  cfg.batch = 1;
  cfg.iterations = 1000;
  cfg.record_every = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(solvers::run_sgd(f.gt, f.ens, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.iterations);
}
BENCHMARK(BM_SgdSteps)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Svd(benchmark::State& state) {
  Rng rng(2, Stream::kTest);
  const matkit::Matrix m = rng.gaussian_matrix(state.range(0), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(matkit::svd(m));
}
BENCHMARK(BM_Svd)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_PsdProject(benchmark::State& state) {
  Rng rng(3, Stream::kTest);
  const matkit::Matrix m = matkit::symmetrize(rng.gaussian_matrix(state.range(0), state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(matkit::psd_project(m));
}
BENCHMARK(BM_PsdProject)->Arg(50)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_EstimateRip(benchmark::State& state) {
  const Fixture f = make(30, 2);
  ripcheck::RipOptions opt;
  opt.rank = 2;
  opt.n_probes = 100;
  for (auto _ : state) benchmark::DoNotOptimize(ripcheck::estimate_rip(f.ens, opt));
}
BENCHMARK(BM_EstimateRip)->Unit(benchmark::kMillisecond);

void BM_TruncatedGradient(benchmark::State& state) {
  const auto gt = sensing::sample_ground_truth(30, 2, 1.0, sensing::TruthMode::kExperiment, 4);
  const auto data = quadnet::gen_quad_data(gt, 1200, 4);
  const matkit::Matrix u = 1e-3 * matkit::Matrix::Identity(30, 30);
  for (auto _ : state) benchmark::DoNotOptimize(quadnet::truncated_gradient(u, data, 68.0));
}
BENCHMARK(BM_TruncatedGradient)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
