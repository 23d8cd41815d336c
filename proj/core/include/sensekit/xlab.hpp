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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensekit/chart.hpp"
#include "sensekit/quadnet.hpp"
#include "sensekit/sensing.hpp"
#include "sensekit/solvers.hpp"
#include "sensekit/trajectory.hpp"

/// Experiment presets, sweeps, and their on-disk artifacts.
namespace sensekit::xlab {

inline constexpr int kSchemaVersion = 1;

enum class Preset { kFig1, kFig2, kFig3, kFig4, kFig5, kCustom };
enum class SolverKind { kGd, kSgd, kPgd, kAlgorithm1 };
enum class SensorDesign { kGaussian, kRankOne };

std::string to_string(Preset p);
Preset preset_from_string(const std::string& s);

/// One configuration of a sweep; it is run `repeats` times.
struct CellSpec {
  std::string label;
  SolverKind solver = SolverKind::kGd;
  int d = 50;
  int r = 5;
  int m = 1250;  ///< sensors, or examples for Algorithm 1
  SensorDesign sensors = SensorDesign::kGaussian;
  solvers::SolverConfig config;  ///< used by gd, sgd and pgd
  quadnet::QuadConfig quad;  ///< used by Algorithm 1 only
};

struct ExperimentSpec {
  std::string name = "custom";
  Preset preset = Preset::kCustom;
  bool desk_scale = false;
  int repeats = 3;
  std::uint64_t seed_base = 0;
  std::string output_dir = "out";
  /// Worker threads; 0 picks the hardware concurrency.
  int workers = 0;
  sensing::TruthMode truth_mode = sensing::TruthMode::kExperiment;
  double kappa = 1.0;  ///< spec-mode truths only
  bool probes = false;
  double skip_initial = 0.0;  ///< chart option
  std::vector<CellSpec> cells;

  void validate() const;
};

/// Resolved parameters of a preset. Desk scale maps d = 100 to 50 for
/// fig1-3 and fig5, and uses d in {40, 60} for fig4.
ExperimentSpec preset_spec(Preset preset, bool desk_scale);

/// Parses a versioned JSON config. Unknown keys are rejected. A preset name
/// fills every field the config leaves out; "cells" replaces the preset's
/// cells and "overrides" patches every cell.
ExperimentSpec spec_from_json(const nlohmann::json& j);
ExperimentSpec load_spec(const std::string& path);
nlohmann::json spec_to_json(const ExperimentSpec& spec);
nlohmann::json cell_to_json(const CellSpec& cell);

struct Stat {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation (0 for one value)
  int count = 0;
};
Stat summarize(const std::vector<double>& values);

struct CurvePoint {
  long t = 0;
  Stat train;
  Stat test;
};

struct RunRecord {
  int repeat = 0;
  std::uint64_t seed = 0;
  std::optional<Trajectory> trajectory;
  std::string error;  ///< non-empty when the run threw
  bool numerical = false;  ///< the error was a NumericalError
};

struct CellSummary {
  CellSpec cell;
  std::vector<RunRecord> runs;
  int completed = 0;  ///< runs that finished without abort or error
  Stat train;         ///< final training error over completed runs
  Stat test;
  Stat risk;
  std::vector<CurvePoint> curve;
};

struct SummaryTable {
  std::vector<CellSummary> cells;
};

/// Runs a single repeat of one cell. The truth comes from seed_base; the
/// ensemble, dataset, SGD indices and init basis use seed_base + repeat.
RunRecord run_cell(const ExperimentSpec& spec, const CellSpec& cell, int repeat);

/// Runs every cell `repeats` times on a worker pool and folds results in
/// config order. Writes nothing.
SummaryTable run_experiment(const ExperimentSpec& spec);

/// Writes resolved.json, runs/<cell>_rep<k>.csv, summary.csv, curves.csv and
/// chart.svg under spec.output_dir.
void write_artifacts(const ExperimentSpec& spec, const SummaryTable& table);

void write_summary_csv(std::ostream& out, const SummaryTable& table);
void write_curves_csv(std::ostream& out, const SummaryTable& table);

/// Test-error (solid) and train-error (dashed) series per cell.
std::vector<chart::Series> curve_series(const SummaryTable& table);
/// Rebuilds chart series from a curves.csv file.
std::vector<chart::Series> series_from_curves_csv(std::istream& in);

/// Ground truth for a cell, shared by all repeats.
sensing::GroundTruth cell_truth(const ExperimentSpec& spec, const CellSpec& cell);

}  // namespace sensekit::xlab
