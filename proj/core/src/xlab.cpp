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

#include "sensekit/xlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "sensekit/errors.hpp"
#include "sensekit/probes.hpp"

namespace sensekit::xlab {

using nlohmann::json;

namespace {

const char* solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::kGd: return "gd";
    case SolverKind::kSgd: return "sgd";
    case SolverKind::kPgd: return "pgd";
    case SolverKind::kAlgorithm1: return "algorithm1";
  }
  return "?";
}

SolverKind solver_from_string(const std::string& s) {
  if (s == "gd") return SolverKind::kGd;
  if (s == "sgd") return SolverKind::kSgd;
  if (s == "pgd") return SolverKind::kPgd;
  if (s == "algorithm1") return SolverKind::kAlgorithm1;
  throw ValidationError("config: unknown solver '" + s + "'");
}

std::string format_alpha(double alpha) {
  std::ostringstream o;
  o << alpha;
  return o.str();
}

CellSpec gd_cell(int d, int r, int m, double alpha, double eta, long iterations, long record_every) {
  CellSpec c;
  c.label = "alpha=" + format_alpha(alpha);
  c.d = d;
  c.r = r;
  c.m = m;
  c.config.alpha = alpha;
  c.config.eta = eta;
  c.config.iterations = iterations;
  c.config.record_every = record_every;
  return c;
}

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config: bad value for '" + key + "'");
  }
}

double get_double(const json& v, const std::string& key) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return INFINITY;
    throw ValidationError("config: bad value for '" + key + "'");
  }
  if (!v.is_number()) throw ValidationError("config: '" + key + "' must be a number");
  return v.get<double>();
}

long get_long(const json& v, const std::string& key) {
  const double x = get_double(v, key);
  if (!std::isfinite(x) || x != std::floor(x) || std::abs(x) > 9.0e15)
    throw ValidationError("config: '" + key + "' must be an integer");
  return static_cast<long>(x);
}

void apply_cell_keys(CellSpec& c, const json& obj, bool allow_label, const std::string& where) {
  if (!obj.is_object()) throw ValidationError("config: " + where + " must be an object");
  for (const auto& [key, v] : obj.items()) {
    if (key == "label" && allow_label) {
      c.label = get_as<std::string>(v, key);
    } else if (key == "solver") {
      c.solver = solver_from_string(get_as<std::string>(v, key));
    } else if (key == "d") {
      c.d = static_cast<int>(get_long(v, key));
    } else if (key == "r") {
      c.r = static_cast<int>(get_long(v, key));
    } else if (key == "m") {
      c.m = static_cast<int>(get_long(v, key));
    } else if (key == "sensors") {
      const auto s = get_as<std::string>(v, key);
      if (s == "gaussian") c.sensors = SensorDesign::kGaussian;
      else if (s == "rank_one") c.sensors = SensorDesign::kRankOne;
      else throw ValidationError("config: unknown sensors '" + s + "'");
    } else if (key == "alpha") {
      c.config.alpha = c.quad.alpha = get_double(v, key);
    } else if (key == "eta") {
      c.config.eta = c.quad.eta = get_double(v, key);
    } else if (key == "iterations") {
      c.config.iterations = c.quad.iterations = get_long(v, key);
    } else if (key == "record_every") {
      c.config.record_every = c.quad.record_every = get_long(v, key);
    } else if (key == "init_basis") {
      const auto s = get_as<std::string>(v, key);
      if (s == "identity") c.config.init_basis = solvers::InitBasis::kIdentity;
      else if (s == "haar") c.config.init_basis = solvers::InitBasis::kHaar;
      else throw ValidationError("config: unknown init_basis '" + s + "'");
    } else if (key == "mode") {
      const auto s = get_as<std::string>(v, key);
      if (s == "empirical") c.config.mode = solvers::Mode::kEmpirical;
      else if (s == "population") c.config.mode = solvers::Mode::kPopulation;
      else throw ValidationError("config: unknown mode '" + s + "'");
    } else if (key == "batch") {
      if (v.is_null()) c.config.batch.reset();
      else c.config.batch = static_cast<int>(get_long(v, key));
    } else if (key == "without_replacement") {
      c.config.without_replacement = get_as<bool>(v, key);
    } else if (key == "stop_train_error") {
      if (v.is_null()) c.config.stop_train_error.reset();
      else c.config.stop_train_error = get_double(v, key);
    } else if (key == "width") {
      if (v.is_null()) c.config.width.reset();
      else c.config.width = static_cast<int>(get_long(v, key));
    } else if (key == "rcut") {
      if (v.is_null()) c.quad.rcut.reset();
      else c.quad.rcut = get_double(v, key);
    } else if (key == "tau_mode") {
      const auto s = get_as<std::string>(v, key);
      if (s == "exact") c.quad.tau_mode = quadnet::TauMode::kExact;
      else if (s == "estimated") c.quad.tau_mode = quadnet::TauMode::kEstimated;
      else throw ValidationError("config: unknown tau_mode '" + s + "'");
    } else if (key == "rescale") {
      c.quad.rescale = get_as<bool>(v, key);
    } else {
      throw ValidationError("config: unknown key '" + key + "' in " + where);
    }
  }
}

bool is_factor_solver(SolverKind s) { return s != SolverKind::kPgd; }

}  // namespace

std::string to_string(Preset p) {
  switch (p) {
    case Preset::kFig1: return "fig1";
    case Preset::kFig2: return "fig2";
    case Preset::kFig3: return "fig3";
    case Preset::kFig4: return "fig4";
    case Preset::kFig5: return "fig5";
    case Preset::kCustom: return "custom";
  }
  return "custom";
}

Preset preset_from_string(const std::string& s) {
  for (const Preset p : {Preset::kFig1, Preset::kFig2, Preset::kFig3, Preset::kFig4, Preset::kFig5,
                         Preset::kCustom})
    if (to_string(p) == s) return p;
  throw ValidationError("unknown preset '" + s + "'");
}

void ExperimentSpec::validate() const {
  if (repeats < 1) throw ValidationError("experiment: repeats must be >= 1");
  if (workers < 0) throw ValidationError("experiment: workers must be >= 0");
  if (!(kappa >= 1.0)) throw ValidationError("experiment: kappa must be >= 1");
  if (cells.empty()) throw ValidationError("experiment: no cells to run");
  for (const CellSpec& c : cells) {
    if (c.d < 1) throw ValidationError("cell '" + c.label + "': d must be positive");
    if (c.r < 1 || c.r > c.d) throw ValidationError("cell '" + c.label + "': need 1 <= r <= d");
    if (c.m < 1) throw ValidationError("cell '" + c.label + "': m must be positive");
    c.config.validate();
    c.quad.validate();
  }
}

ExperimentSpec preset_spec(Preset preset, bool desk_scale) {
  ExperimentSpec spec;
  spec.preset = preset;
  spec.name = to_string(preset);
  spec.desk_scale = desk_scale;
  const int d = desk_scale ? 50 : 100;
  const int r = 5;
  const int m = 5 * d * r;
  switch (preset) {
    case Preset::kFig1:
      for (const double a : {1.0, 1e-1, 1e-2, 1e-3}) spec.cells.push_back(gd_cell(d, r, m, a, 0.0025, 10000, 100));
      break;
    case Preset::kFig2:
      for (const double a : {1.0, 1e-3}) spec.cells.push_back(gd_cell(d, r, m, a, 0.0025, 100000, 500));
      spec.skip_initial = 500;
      break;
    case Preset::kFig3:
      spec.cells.push_back(gd_cell(d, r, m, 0.01, 0.0025, 100000, 1000));
      break;
    case Preset::kFig4: {
      const std::vector<int> dims = desk_scale ? std::vector<int>{40, 60} : std::vector<int>{100, 150};
      for (const int dd : dims)
        for (int k = 5; k <= 35; k += 5)
          for (const SolverKind s : {SolverKind::kGd, SolverKind::kPgd}) {
            CellSpec c = gd_cell(dd, 1, k * dd, 1e-3, 0.0025, 10000, 100);
            c.solver = s;
            c.config.stop_train_error = 1e-3;
            c.label = std::string(solver_name(s)) + " d=" + std::to_string(dd) + " m=" + std::to_string(k) + "d";
            spec.cells.push_back(std::move(c));
          }
      break;
    }
    case Preset::kFig5: {
      CellSpec sgd = gd_cell(d, r, m, 1.0, 8e-5, desk_scale ? 20000000 : 40000000, 100000);
      sgd.solver = SolverKind::kSgd;
      sgd.config.batch = 1;
      sgd.label = "sgd U0=I";
      CellSpec gd = gd_cell(d, r, m, 1.0, 0.0025, 100000, 1000);
      gd.label = "gd U0=I";
      spec.cells = {sgd, gd};
      break;
    }
    case Preset::kCustom:
      break;
  }
  return spec;
}

nlohmann::json cell_to_json(const CellSpec& c) {
  json j{{"label", c.label},
         {"solver", solver_name(c.solver)},
         {"d", c.d},
         {"r", c.r},
         {"m", c.m},
         {"sensors", c.sensors == SensorDesign::kGaussian ? "gaussian" : "rank_one"}};
  if (c.solver == SolverKind::kAlgorithm1) {
    j.update(c.quad.to_json());
    j.erase("seed");
    j["rcut_resolved"] = c.quad.resolved_rcut(c.d);
  } else {
    j.update(c.config.to_json());
    j.erase("seed");
    if (c.solver == SolverKind::kPgd) j["x0"] = "zero";
  }
  return j;
}

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  json cells = json::array();
  for (const CellSpec& c : spec.cells) cells.push_back(cell_to_json(c));
  return json{{"schema_version", kSchemaVersion},
              {"name", spec.name},
              {"preset", to_string(spec.preset)},
              {"desk_scale", spec.desk_scale},
              {"repeats", spec.repeats},
              {"seed_base", spec.seed_base},
              {"output_dir", spec.output_dir},
              {"workers", spec.workers},
              {"truth",
               {{"mode", spec.truth_mode == sensing::TruthMode::kSpec ? "spec" : "experiment"},
                {"kappa", spec.kappa}}},
              {"probes", spec.probes},
              {"skip_initial", spec.skip_initial},
              {"cells", cells}};
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  if (!j.contains("schema_version")) throw ValidationError("config: missing schema_version");
  if (get_long(j.at("schema_version"), "schema_version") != kSchemaVersion)
    throw ValidationError("config: unsupported schema_version");

  Preset preset = Preset::kCustom;
  bool desk = false;
  if (j.contains("preset")) preset = preset_from_string(get_as<std::string>(j.at("preset"), "preset"));
  if (j.contains("desk_scale")) desk = get_as<bool>(j.at("desk_scale"), "desk_scale");
  ExperimentSpec spec = preset_spec(preset, desk);

  for (const auto& [key, v] : j.items()) {
    if (key == "schema_version" || key == "preset" || key == "desk_scale" || key == "cells" ||
        key == "overrides") {
      continue;
    } else if (key == "name") {
      spec.name = get_as<std::string>(v, key);
    } else if (key == "repeats") {
      spec.repeats = static_cast<int>(get_long(v, key));
    } else if (key == "seed_base") {
      const long s = get_long(v, key);
      if (s < 0) throw ValidationError("config: seed_base must be non-negative");
      spec.seed_base = static_cast<std::uint64_t>(s);
    } else if (key == "output_dir") {
      spec.output_dir = get_as<std::string>(v, key);
    } else if (key == "workers") {
      spec.workers = static_cast<int>(get_long(v, key));
    } else if (key == "probes") {
      spec.probes = get_as<bool>(v, key);
    } else if (key == "skip_initial") {
      spec.skip_initial = get_double(v, key);
    } else if (key == "truth") {
      if (!v.is_object()) throw ValidationError("config: truth must be an object");
      for (const auto& [tk, tv] : v.items()) {
        if (tk == "mode") {
          const auto s = get_as<std::string>(tv, tk);
          if (s == "spec") spec.truth_mode = sensing::TruthMode::kSpec;
          else if (s == "experiment") spec.truth_mode = sensing::TruthMode::kExperiment;
          else throw ValidationError("config: unknown truth mode '" + s + "'");
        } else if (tk == "kappa") {
          spec.kappa = get_double(tv, tk);
        } else {
          throw ValidationError("config: unknown key '" + tk + "' in truth");
        }
      }
    } else {
      throw ValidationError("config: unknown key '" + key + "'");
    }
  }

  if (j.contains("cells")) {
    const json& cells = j.at("cells");
    if (!cells.is_array()) throw ValidationError("config: cells must be an array");
    spec.cells.clear();
    for (std::size_t k = 0; k < cells.size(); ++k) {
      CellSpec c;
      c.label = "cell" + std::to_string(k);
      apply_cell_keys(c, cells[k], true, "cells[" + std::to_string(k) + "]");
      spec.cells.push_back(std::move(c));
    }
  }
  if (j.contains("overrides"))
    for (CellSpec& c : spec.cells) apply_cell_keys(c, j.at("overrides"), false, "overrides");
  spec.validate();
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path + "': " + e.what());
  }
  return spec_from_json(j);
}

Stat summarize(const std::vector<double>& values) {
  Stat s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (const double v : values) sum += v;
  s.mean = sum / s.count;
  if (s.count > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (s.count - 1));
  }
  return s;
}

sensing::GroundTruth cell_truth(const ExperimentSpec& spec, const CellSpec& cell) {
  return sensing::sample_ground_truth(cell.d, cell.r, spec.kappa, spec.truth_mode, spec.seed_base);
}

RunRecord run_cell(const ExperimentSpec& spec, const CellSpec& cell, int repeat) {
  RunRecord rec;
  rec.repeat = repeat;
  rec.seed = spec.seed_base + static_cast<std::uint64_t>(repeat);
  try {
    const sensing::GroundTruth gt = cell_truth(spec, cell);
    std::optional<probes::SubspaceProbe> probe;
    if (spec.probes && is_factor_solver(cell.solver)) probe.emplace(gt);
    StepObserver* observer = probe ? &*probe : nullptr;

    Trajectory traj;
    if (cell.solver == SolverKind::kAlgorithm1) {
      quadnet::QuadConfig qc = cell.quad;
      qc.seed = rec.seed;
      traj = quadnet::run_algorithm1(gt, quadnet::gen_quad_data(gt, cell.m, rec.seed), qc, observer);
    } else {
      solvers::SolverConfig cfg = cell.config;
      cfg.seed = rec.seed;
      if (cell.solver == SolverKind::kGd && cfg.mode == solvers::Mode::kPopulation) {
        traj = solvers::run_population_gd(gt, cfg, observer);
      } else {
        const sensing::MeasurementEnsemble ens =
            cell.sensors == SensorDesign::kGaussian
                ? sensing::sample_gaussian_ensemble(gt, cell.m, rec.seed)
                : quadnet::gen_quad_data(gt, cell.m, rec.seed).ensemble();
        switch (cell.solver) {
          case SolverKind::kGd: traj = solvers::run_gd(gt, ens, cfg, observer); break;
          case SolverKind::kSgd: traj = solvers::run_sgd(gt, ens, cfg, observer); break;
          case SolverKind::kPgd: traj = solvers::run_pgd(gt, ens, cfg); break;
          case SolverKind::kAlgorithm1: break;
        }
      }
    }
    traj.config["cell"] = cell.label;
    traj.config["repeat"] = repeat;
    traj.config["truth_seed"] = spec.seed_base;
    traj.config["run_seed"] = rec.seed;
    traj.config["kappa"] = gt.kappa;
    rec.trajectory = std::move(traj);
  } catch (const NumericalError& e) {
    rec.error = e.what();
    rec.numerical = true;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

SummaryTable run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::size_t n_cells = spec.cells.size();
  const std::size_t jobs = n_cells * static_cast<std::size_t>(spec.repeats);
  std::vector<RunRecord> results(jobs);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < jobs; k = next++) {
      const std::size_t cell = k / static_cast<std::size_t>(spec.repeats);
      const int rep = static_cast<int>(k % static_cast<std::size_t>(spec.repeats));
      results[k] = run_cell(spec, spec.cells[cell], rep);
    }
  };
  unsigned n_workers = spec.workers > 0 ? static_cast<unsigned>(spec.workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, jobs));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  SummaryTable table;
  for (std::size_t c = 0; c < n_cells; ++c) {
    CellSummary cs;
    cs.cell = spec.cells[c];
    std::vector<double> train, test, risk;
    std::map<long, std::pair<std::vector<double>, std::vector<double>>> by_t;
    for (int k = 0; k < spec.repeats; ++k) {
      RunRecord& rec = results[c * static_cast<std::size_t>(spec.repeats) + static_cast<std::size_t>(k)];
      if (rec.trajectory) {
        const Trajectory& tr = *rec.trajectory;
        for (const Checkpoint& cp : tr.checkpoints) {
          auto& slot = by_t[cp.t];
          if (cp.train_error) slot.first.push_back(*cp.train_error);
          slot.second.push_back(cp.test_error);
        }
        if (!tr.abort && !tr.checkpoints.empty()) {
          ++cs.completed;
          const Checkpoint& last = tr.final_checkpoint();
          if (last.train_error) train.push_back(*last.train_error);
          test.push_back(last.test_error);
          risk.push_back(last.population_risk);
        }
      }
      cs.runs.push_back(std::move(rec));
    }
    cs.train = summarize(train);
    cs.test = summarize(test);
    cs.risk = summarize(risk);
    for (const auto& [t, vals] : by_t) cs.curve.push_back(CurvePoint{t, summarize(vals.first), summarize(vals.second)});
    table.cells.push_back(std::move(cs));
  }
  return table;
}

namespace {

std::string stat_fields(const Stat& s) {
  if (s.count == 0) return ",";
  return format_double(s.mean) + "," + format_double(s.std);
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_summary_csv(std::ostream& out, const SummaryTable& table) {
  out << "cell,label,solver,d,r,m,repeats,completed,train_error_mean,train_error_std,"
         "test_error_mean,test_error_std,population_risk_mean,population_risk_std\n";
  for (std::size_t c = 0; c < table.cells.size(); ++c) {
    const CellSummary& cs = table.cells[c];
    out << c << ',' << csv_text(cs.cell.label) << ',' << solver_name(cs.cell.solver) << ',' << cs.cell.d
        << ',' << cs.cell.r << ',' << cs.cell.m << ',' << cs.runs.size() << ',' << cs.completed << ','
        << stat_fields(cs.train) << ',' << stat_fields(cs.test) << ',' << stat_fields(cs.risk) << '\n';
  }
}

void write_curves_csv(std::ostream& out, const SummaryTable& table) {
  out << "cell,label,t,runs,train_error_mean,train_error_std,test_error_mean,test_error_std\n";
  for (std::size_t c = 0; c < table.cells.size(); ++c) {
    const CellSummary& cs = table.cells[c];
    for (const CurvePoint& p : cs.curve)
      out << c << ',' << csv_text(cs.cell.label) << ',' << p.t << ',' << p.test.count << ','
          << stat_fields(p.train) << ',' << stat_fields(p.test) << '\n';
  }
}

std::vector<chart::Series> curve_series(const SummaryTable& table) {
  std::vector<chart::Series> out;
  for (const CellSummary& cs : table.cells) {
    chart::Series test{cs.cell.label + " test", {}, false};
    chart::Series train{cs.cell.label + " train", {}, true};
    for (const CurvePoint& p : cs.curve) {
      if (p.test.count > 0) test.points.push_back({static_cast<double>(p.t), p.test.mean, p.test.std});
      if (p.train.count > 0) train.points.push_back({static_cast<double>(p.t), p.train.mean, p.train.std});
    }
    out.push_back(std::move(test));
    if (!train.points.empty()) out.push_back(std::move(train));
  }
  return out;
}

std::vector<chart::Series> series_from_curves_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "cell,label,t,runs,train_error_mean,train_error_std,test_error_mean,test_error_std")
    throw ValidationError("curves csv: unexpected header");
  std::vector<std::string> order;
  std::map<std::string, std::pair<chart::Series, chart::Series>> groups;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 8) throw ValidationError("curves csv: bad row '" + line + "'");
    const std::string key = f[0];
    if (!groups.count(key)) {
      order.push_back(key);
      groups[key] = {chart::Series{f[1] + " test", {}, false}, chart::Series{f[1] + " train", {}, true}};
    }
    try {
      const double t = std::stod(f[2]);
      if (!f[4].empty()) groups[key].second.points.push_back({t, std::stod(f[4]), std::stod(f[5])});
      if (!f[6].empty()) groups[key].first.points.push_back({t, std::stod(f[6]), std::stod(f[7])});
    } catch (const std::logic_error&) {
      throw ValidationError("curves csv: bad number in row '" + line + "'");
    }
  }
  std::vector<chart::Series> out;
  for (const std::string& k : order) {
    out.push_back(groups[k].first);
    if (!groups[k].second.points.empty()) out.push_back(groups[k].second);
  }
  return out;
}

void write_artifacts(const ExperimentSpec& spec, const SummaryTable& table) {
  namespace fs = std::filesystem;
  const fs::path root(spec.output_dir);
  fs::create_directories(root / "runs");
  const auto open = [](const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + p.string() + "'");
    return f;
  };
  {
    std::ofstream f = open(root / "resolved.json");
    f << spec_to_json(spec).dump(2) << '\n';
  }
  for (std::size_t c = 0; c < table.cells.size(); ++c)
    for (const RunRecord& rec : table.cells[c].runs) {
      const std::string stem = "c" + std::to_string(c) + "_rep" + std::to_string(rec.repeat);
      if (rec.trajectory) {
        std::ofstream f = open(root / "runs" / (stem + ".csv"));
        write_trajectory_csv(f, *rec.trajectory);
        std::ofstream e = open(root / "runs" / (stem + ".json"));
        json echo = rec.trajectory->config;
        if (rec.trajectory->abort)
          echo["abort"] = {{"iteration", rec.trajectory->abort->iteration},
                           {"reason", rec.trajectory->abort->reason}};
        e << echo.dump(2) << '\n';
      } else {
        std::ofstream e = open(root / "runs" / (stem + ".error.txt"));
        e << rec.error << '\n';
      }
    }
  {
    std::ofstream f = open(root / "summary.csv");
    write_summary_csv(f, table);
  }
  {
    std::ofstream f = open(root / "curves.csv");
    write_curves_csv(f, table);
  }
  const std::vector<chart::Series> series = curve_series(table);
  chart::ChartStyle style;
  style.title = spec.name;
  style.skip_initial = spec.skip_initial;
  std::ofstream f = open(root / "chart.svg");
  f << chart::emit_chart(series, style);
}

}  // namespace sensekit::xlab
