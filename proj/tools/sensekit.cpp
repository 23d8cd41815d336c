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

// sensekit command-line driver.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 numerical abort.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sensekit/chart.hpp"
#include "sensekit/container.hpp"
#include "sensekit/errors.hpp"
#include "sensekit/probes.hpp"
#include "sensekit/quadnet.hpp"
#include "sensekit/ripcheck.hpp"
#include "sensekit/sensing.hpp"
#include "sensekit/solvers.hpp"
#include "sensekit/xlab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sensekit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNumerical = 2;

sensing::TruthMode parse_truth(const std::string& s) {
  if (s == "spec") return sensing::TruthMode::kSpec;
  if (s == "experiment") return sensing::TruthMode::kExperiment;
  throw ValidationError("unknown truth mode '" + s + "'");
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + p.string() + "'");
  f << text;
}

json final_json(const Trajectory& traj) {
  const Checkpoint& c = traj.final_checkpoint();
  json j{{"t", c.t}, {"test_error", c.test_error}, {"population_risk", c.population_risk}};
  j["train_error"] = c.train_error ? json(*c.train_error) : json(nullptr);
  if (traj.abort) j["abort"] = {{"iteration", traj.abort->iteration}, {"reason", traj.abort->reason}};
  return j;
}

int persist_run(const fs::path& out, const Trajectory& traj) {
  fs::create_directories(out);
  write_text(out / "trajectory.csv", trajectory_csv(traj));
  json echo = traj.config;
  echo["final"] = final_json(traj);
  write_text(out / "run.json", echo.dump(2) + "\n");
  std::cout << final_json(traj).dump() << '\n';
  if (traj.abort) {
    std::cerr << "numerical abort at iteration " << traj.abort->iteration << ": " << traj.abort->reason << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

xlab::ExperimentSpec resolve_spec(const std::string& config, const std::string& preset, bool desk) {
  if (!config.empty() && !preset.empty()) throw ValidationError("give either --config or --preset, not both");
  if (!config.empty()) return xlab::load_spec(config);
  if (preset.empty()) throw ValidationError("one of --config or --preset is required");
  const xlab::Preset p = xlab::preset_from_string(preset);
  if (p == xlab::Preset::kCustom) throw ValidationError("the custom preset needs --config");
  return xlab::preset_spec(p, desk);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sensekit: over-parameterized matrix sensing experiments"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Sample a ground truth and a measurement ensemble");
  int gen_d = 0, gen_r = 1, gen_m = 0;
  double gen_kappa = 1.0;
  std::string gen_truth = "experiment", gen_sensors = "gaussian", gen_out = ".";
  std::uint64_t gen_seed = 0;
  gen->add_option("--d", gen_d, "Dimension")->required();
  gen->add_option("--r", gen_r, "Rank");
  gen->add_option("--m", gen_m, "Number of sensors")->required();
  gen->add_option("--kappa", gen_kappa, "Condition number (spec truth)");
  gen->add_option("--truth", gen_truth, "Ground-truth mode: experiment or spec");
  gen->add_option("--sensors", gen_sensors, "gaussian or rank_one");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--out", gen_out, "Output directory");

  // run
  auto* run = app.add_subcommand("run", "Run one configuration once");
  std::string run_config, run_preset, run_out = "run_out", run_truth, run_ens;
  bool run_desk = false, run_probes = false;
  std::uint64_t run_seed = 0;
  std::size_t run_cell = 0;
  run->add_option("--config", run_config, "JSON config");
  run->add_option("--preset", run_preset, "fig1..fig5");
  run->add_flag("--desk-scale", run_desk, "Desk-scale dimensions");
  run->add_option("--seed", run_seed, "Seed");
  run->add_option("--cell", run_cell, "Index of the configuration to run");
  run->add_option("--truth", run_truth, "Ground truth container (from gen)");
  run->add_option("--ensemble", run_ens, "Ensemble container (from gen)");
  run->add_flag("--probes", run_probes, "Attach subspace diagnostics");
  run->add_option("--out", run_out, "Output directory");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run an experiment with repeats and write artifacts");
  std::string sw_config, sw_preset, sw_out;
  bool sw_desk = false, sw_probes = false;
  std::optional<std::uint64_t> sw_seed;
  std::optional<int> sw_repeats, sw_workers;
  std::optional<double> sw_skip;
  sweep->add_option("--config", sw_config, "JSON config");
  sweep->add_option("--preset", sw_preset, "fig1..fig5");
  sweep->add_flag("--desk-scale", sw_desk, "Desk-scale dimensions");
  sweep->add_option("--seed", sw_seed, "Base seed");
  sweep->add_option("--repeats", sw_repeats, "Runs per configuration");
  sweep->add_option("--workers", sw_workers, "Worker threads (0 = all cores)");
  sweep->add_option("--skip-initial", sw_skip, "Chart: hide iterations below this value");
  sweep->add_flag("--probes", sw_probes, "Attach subspace diagnostics");
  sweep->add_option("--out", sw_out, "Output directory");

  // rip
  auto* rip = app.add_subcommand("rip", "Estimate the RIP constant of a Gaussian ensemble");
  int rip_d = 0, rip_r = 1, rip_m = 0, rip_probes = 100, rip_starts = 8, rip_steps = 20;
  std::uint64_t rip_seed = 0;
  std::string rip_kind = "symmetric", rip_ens;
  rip->add_option("--d", rip_d, "Dimension");
  rip->add_option("--r", rip_r, "Probe rank");
  rip->add_option("--m", rip_m, "Number of sensors");
  rip->add_option("--probes", rip_probes, "Random probes");
  rip->add_option("--seed", rip_seed, "Seed");
  rip->add_option("--probe", rip_kind, "symmetric or asymmetric");
  rip->add_option("--ascent-starts", rip_starts, "Probes refined by power ascent");
  rip->add_option("--ascent-steps", rip_steps, "Ascent iterations per start");
  rip->add_option("--ensemble", rip_ens, "Ensemble container instead of sampling");

  // quadnet
  auto* quad = app.add_subcommand("quadnet", "Train a quadratic network with the rescaled trainer");
  std::string q_config, q_out = "quadnet_out", q_tau = "exact";
  int q_d = 30, q_r = 2;
  std::optional<int> q_n;
  double q_alpha = 1e-3, q_eta = 0.01;
  long q_iters = 2000, q_every = 100;
  std::optional<double> q_rcut;
  std::uint64_t q_seed = 0;
  bool q_probes = false;
  quad->add_option("--config", q_config, "JSON config (algorithm1 cell)");
  quad->add_option("--d", q_d, "Input dimension");
  quad->add_option("--r", q_r, "Hidden units of the teacher");
  quad->add_option("--n", q_n, "Training examples (default 20 d r)");
  quad->add_option("--alpha", q_alpha, "Initialization scale");
  quad->add_option("--eta", q_eta, "Step size");
  quad->add_option("--iterations", q_iters, "Iterations");
  quad->add_option("--record-every", q_every, "Checkpoint stride");
  quad->add_option("--rcut", q_rcut, "Truncation radius (default 20 log d)");
  quad->add_option("--tau", q_tau, "exact or estimated");
  quad->add_option("--seed", q_seed, "Seed");
  quad->add_flag("--probes", q_probes, "Attach subspace diagnostics");
  quad->add_option("--out", q_out, "Output directory");

  // plot
  auto* plot = app.add_subcommand("plot", "Render a chart from curves.csv");
  std::string p_in, p_out, p_title;
  double p_skip = 0.0;
  bool p_linear = false;
  plot->add_option("--in", p_in, "curves.csv or an experiment directory")->required();
  plot->add_option("--out", p_out, "SVG path (default alongside the input)");
  plot->add_option("--title", p_title, "Chart title");
  plot->add_option("--skip-initial", p_skip, "Hide iterations below this value");
  plot->add_flag("--linear", p_linear, "Linear y axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  try {
    if (*gen) {
      const sensing::GroundTruth gt =
          sensing::sample_ground_truth(gen_d, gen_r, gen_kappa, parse_truth(gen_truth), gen_seed);
      sensing::MeasurementEnsemble ens;
      if (gen_sensors == "gaussian") ens = sensing::sample_gaussian_ensemble(gt, gen_m, gen_seed);
      else if (gen_sensors == "rank_one") ens = quadnet::gen_quad_data(gt, gen_m, gen_seed).ensemble();
      else throw ValidationError("unknown sensors '" + gen_sensors + "'");
      fs::create_directories(gen_out);
      container::save_ground_truth(fs::path(gen_out) / "truth.bin", gt, gen_seed);
      container::save_ensemble(fs::path(gen_out) / "ensemble.bin", ens, static_cast<std::uint64_t>(gen_r), gen_seed);
      const json echo{{"d", gen_d}, {"r", gen_r}, {"m", gen_m}, {"kappa", gt.kappa},
                      {"truth", gen_truth}, {"sensors", gen_sensors}, {"seed", gen_seed}};
      write_text(fs::path(gen_out) / "gen.json", echo.dump(2) + "\n");
      std::cout << echo.dump() << '\n';
      return kExitOk;
    }

    if (*run) {
      xlab::ExperimentSpec spec = resolve_spec(run_config, run_preset, run_desk);
      if (run_cell >= spec.cells.size()) throw ValidationError("--cell is out of range");
      spec.seed_base = run_seed;
      spec.probes = spec.probes || run_probes;
      const xlab::CellSpec& cell = spec.cells[run_cell];
      if (run_truth.empty() != run_ens.empty())
        throw ValidationError("--truth and --ensemble must be given together");
      if (run_truth.empty()) {
        xlab::RunRecord rec = xlab::run_cell(spec, cell, 0);
        if (rec.numerical) throw NumericalError(rec.error, -1);
        if (!rec.trajectory) throw ValidationError(rec.error);
        return persist_run(run_out, *rec.trajectory);
      }
      const sensing::GroundTruth gt = container::load_ground_truth(run_truth);
      const sensing::MeasurementEnsemble ens = container::load_ensemble(run_ens);
      solvers::SolverConfig cfg = cell.config;
      cfg.seed = run_seed;
      std::optional<probes::SubspaceProbe> probe;
      if (spec.probes && cell.solver != xlab::SolverKind::kPgd) probe.emplace(gt);
      StepObserver* obs = probe ? &*probe : nullptr;
      Trajectory traj;
      switch (cell.solver) {
        case xlab::SolverKind::kGd: traj = solvers::run_gd(gt, ens, cfg, obs); break;
        case xlab::SolverKind::kSgd: traj = solvers::run_sgd(gt, ens, cfg, obs); break;
        case xlab::SolverKind::kPgd: traj = solvers::run_pgd(gt, ens, cfg); break;
        case xlab::SolverKind::kAlgorithm1:
          throw ValidationError("use the quadnet subcommand for algorithm1 runs");
      }
      traj.config["truth_file"] = run_truth;
      traj.config["ensemble_file"] = run_ens;
      return persist_run(run_out, traj);
    }

    if (*sweep) {
      xlab::ExperimentSpec spec = resolve_spec(sw_config, sw_preset, sw_desk);
      if (sw_seed) spec.seed_base = *sw_seed;
      if (sw_repeats) spec.repeats = *sw_repeats;
      if (sw_workers) spec.workers = *sw_workers;
      if (sw_skip) spec.skip_initial = *sw_skip;
      if (sw_probes) spec.probes = true;
      if (!sw_out.empty()) spec.output_dir = sw_out;
      spec.validate();
      const xlab::SummaryTable table = xlab::run_experiment(spec);
      xlab::write_artifacts(spec, table);
      std::ostringstream summary;
      xlab::write_summary_csv(summary, table);
      std::cout << summary.str();
      bool aborted = false;
      for (const xlab::CellSummary& cs : table.cells)
        for (const xlab::RunRecord& rec : cs.runs) {
          if (!rec.error.empty()) std::cerr << cs.cell.label << " repeat " << rec.repeat << ": " << rec.error << '\n';
          if (rec.trajectory && rec.trajectory->abort) aborted = true;
          if (!rec.error.empty()) aborted = true;
        }
      return aborted ? kExitNumerical : kExitOk;
    }

    if (*rip) {
      sensing::MeasurementEnsemble ens;
      if (!rip_ens.empty()) {
        ens = container::load_ensemble(rip_ens);
      } else {
        if (rip_d < 1 || rip_m < 1) throw ValidationError("rip needs --d and --m (or --ensemble)");
        const sensing::GroundTruth gt = sensing::sample_ground_truth(
            rip_d, std::min(rip_r, rip_d), 1.0, sensing::TruthMode::kExperiment, rip_seed);
        ens = sensing::sample_gaussian_ensemble(gt, rip_m, rip_seed);
      }
      ripcheck::RipOptions opt;
      opt.rank = rip_r;
      opt.n_probes = rip_probes;
      opt.seed = rip_seed;
      opt.ascent_starts = rip_starts;
      opt.ascent_steps = rip_steps;
      if (rip_kind == "symmetric") opt.probe = ripcheck::ProbeKind::kSymmetric;
      else if (rip_kind == "asymmetric") opt.probe = ripcheck::ProbeKind::kAsymmetric;
      else throw ValidationError("unknown probe kind '" + rip_kind + "'");
      json report = ripcheck::estimate_rip(ens, opt).to_json();
      report["d"] = ens.dim();
      report["m"] = ens.size();
      report["seed"] = rip_seed;
      std::cout << report.dump(2) << '\n';
      return kExitOk;
    }

    if (*quad) {
      xlab::ExperimentSpec spec;
      xlab::CellSpec cell;
      if (!q_config.empty()) {
        spec = xlab::load_spec(q_config);
        if (spec.cells.size() != 1 || spec.cells[0].solver != xlab::SolverKind::kAlgorithm1)
          throw ValidationError("quadnet config must hold exactly one algorithm1 cell");
        cell = spec.cells[0];
      } else {
        cell.label = "algorithm1";
        cell.solver = xlab::SolverKind::kAlgorithm1;
        cell.d = q_d;
        cell.r = q_r;
        cell.m = q_n.value_or(20 * q_d * q_r);
        cell.quad.alpha = q_alpha;
        cell.quad.eta = q_eta;
        cell.quad.iterations = q_iters;
        cell.quad.record_every = q_every;
        cell.quad.rcut = q_rcut;
        if (q_tau == "exact") cell.quad.tau_mode = quadnet::TauMode::kExact;
        else if (q_tau == "estimated") cell.quad.tau_mode = quadnet::TauMode::kEstimated;
        else throw ValidationError("unknown --tau '" + q_tau + "'");
        spec.cells = {cell};
      }
      spec.seed_base = q_seed;
      spec.probes = spec.probes || q_probes;
      spec.validate();
      xlab::RunRecord rec = xlab::run_cell(spec, cell, 0);
      if (rec.numerical) throw NumericalError(rec.error, -1);
      if (!rec.trajectory) throw ValidationError(rec.error);
      return persist_run(q_out, *rec.trajectory);
    }

    if (*plot) {
      fs::path in(p_in);
      if (fs::is_directory(in)) in /= "curves.csv";
      std::ifstream f(in);
      if (!f) throw ValidationError("cannot open '" + in.string() + "'");
      const auto series = xlab::series_from_curves_csv(f);
      chart::ChartStyle style;
      style.title = p_title;
      style.skip_initial = p_skip;
      style.log_y = !p_linear;
      const fs::path out = p_out.empty() ? in.parent_path() / "chart.svg" : fs::path(p_out);
      write_text(out, chart::emit_chart(series, style));
      std::cout << out.string() << '\n';
      return kExitOk;
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}
