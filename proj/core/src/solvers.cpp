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

#include "sensekit/solvers.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "sensekit/errors.hpp"
#include "sensekit/rng.hpp"

namespace sensekit::solvers {

using matkit::Vector;

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

const char* basis_name(InitBasis b) { return b == InitBasis::kIdentity ? "identity" : "haar"; }
const char* mode_name(Mode m) { return m == Mode::kEmpirical ? "empirical" : "population"; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Checkpoint of a factorized iterate. Training quantities need an ensemble.
Checkpoint factor_checkpoint(long t, const Matrix& u, const GroundTruth& gt,
                             const MeasurementEnsemble* ens, StepObserver* observer) {
  const Matrix x = u * u.transpose();
  const sensing::Metrics met = sensing::truth_metrics(gt, x);
  Checkpoint c;
  c.t = t;
  c.test_error = met.test_error;
  c.population_risk = met.population_risk;
  if (ens != nullptr) {
    const Vector res = ens->inner_all(x) - ens->labels();
    c.train_error = sensing::train_error_from_residuals(res, ens->labels());
    c.objective = res.squaredNorm() / (4.0 * ens->size());
  }
  if (observer != nullptr) c.diag = observer->at_checkpoint(t, u);
  return c;
}

struct StepOut {
  Matrix next;
  Matrix map;  // filled only when requested
  std::optional<double> train_error;  // of the pre-step iterate, when cheap to get
};

using StepFn = std::function<StepOut(long t, const Matrix& u, bool want_map)>;

// Shared driver for the factorized solvers.
Trajectory factor_loop(const GroundTruth& gt, const MeasurementEnsemble* ens,
                       const SolverConfig& cfg, StepObserver* observer, Matrix u,
                       const StepFn& step, nlohmann::json echo) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<long> schedule = checkpoint_schedule(cfg.iterations, cfg.record_every);
  std::size_t next_cp = 0;
  const double bound = divergence_bound(gt);

  Trajectory traj;
  for (long t = 0;; ++t) {
    const bool due = next_cp < schedule.size() && schedule[next_cp] == t;
    if (due) {
      ++next_cp;
      traj.checkpoints.push_back(factor_checkpoint(t, u, gt, ens, observer));
      if (cfg.stop_train_error && traj.checkpoints.back().train_error &&
          *traj.checkpoints.back().train_error < *cfg.stop_train_error)
        break;
    }
    if (t == cfg.iterations) break;
    StepOut s = step(t, u, observer != nullptr);
    if (cfg.stop_train_error && s.train_error && *s.train_error < *cfg.stop_train_error) {
      if (!due) traj.checkpoints.push_back(factor_checkpoint(t, u, gt, ens, observer));
      break;
    }
    if (observer != nullptr) observer->on_step(t, s.map, cfg.eta);
    const bool finite = matkit::all_finite(s.next);
    if (!finite || s.next.norm() > bound) {
      traj.abort = AbortInfo{t + 1, finite ? "iterate norm exceeded divergence bound"
                                           : "non-finite iterate"};
      break;
    }
    u = std::move(s.next);
  }
  traj.final_factor = u;
  traj.final_estimate = u * u.transpose();
  traj.config = std::move(echo);
  traj.wall_time = seconds_since(start);
  return traj;
}

void check_ensemble(const GroundTruth& gt, const MeasurementEnsemble& ens) {
  if (ens.dim() != gt.d) throw ValidationError("solver: ensemble dimension does not match ground truth");
  if (ens.size() < 1) throw ValidationError("solver: empty ensemble");
}

}  // namespace

void SolverConfig::validate() const {
  if (!positive_finite(alpha)) throw ValidationError("solver config: alpha must be positive and finite");
  if (!std::isfinite(eta) || eta < 0.0)
    throw ValidationError("solver config: eta must be non-negative and finite");
  if (iterations < 0) throw ValidationError("solver config: iterations must be non-negative");
  if (record_every < 1) throw ValidationError("solver config: record_every must be >= 1");
  if (batch && *batch < 1) throw ValidationError("solver config: batch must be >= 1");
  if (width && *width < 1) throw ValidationError("solver config: width must be >= 1");
  if (stop_train_error && !positive_finite(*stop_train_error))
    throw ValidationError("solver config: stop_train_error must be positive");
}

nlohmann::json SolverConfig::to_json() const {
  nlohmann::json j{{"alpha", alpha},
                   {"eta", eta},
                   {"iterations", iterations},
                   {"seed", seed},
                   {"init_basis", basis_name(init_basis)},
                   {"mode", mode_name(mode)},
                   {"without_replacement", without_replacement},
                   {"record_every", record_every}};
  j["batch"] = batch ? nlohmann::json(*batch) : nlohmann::json(nullptr);
  j["stop_train_error"] = stop_train_error ? nlohmann::json(*stop_train_error) : nlohmann::json(nullptr);
  j["width"] = width ? nlohmann::json(*width) : nlohmann::json(nullptr);
  return j;
}

double divergence_bound(const GroundTruth& gt) {
  return 1e3 * std::max(1.0, std::sqrt(gt.xstar.norm()));
}

Matrix init_factor(int d, const SolverConfig& cfg) {
  cfg.validate();
  if (d < 1) throw ValidationError("init_factor: dimension must be positive");
  const int k = cfg.width.value_or(d);
  if (k > d) throw ValidationError("init_factor: width exceeds dimension");
  if (cfg.init_basis == InitBasis::kIdentity) return cfg.alpha * Matrix::Identity(d, k);
  Rng rng(cfg.seed, Stream::kInitBasis);
  return cfg.alpha * matkit::qr_orthonormalize(rng.gaussian_matrix(d, k));
}

Matrix gd_step(const Matrix& u, const MeasurementEnsemble& ens, double eta) {
  return u - eta * sensing::gradient(ens, u);
}

Matrix population_gd_step(const Matrix& u, const GroundTruth& gt, double eta) {
  if (u.rows() != gt.d) throw ValidationError("population_gd_step: factor row count mismatch");
  const Matrix m = u * u.transpose() - gt.xstar;
  return u - eta * (m * u);
}

Trajectory run_gd(const GroundTruth& gt, const MeasurementEnsemble& ens, const SolverConfig& cfg,
                  StepObserver* observer) {
  if (cfg.mode == Mode::kPopulation) return run_population_gd(gt, cfg, observer);
  cfg.validate();
  check_ensemble(gt, ens);
  const StepFn step = [&](long, const Matrix& u, bool) {
    StepOut s;
    Vector res;
    // Same expression as gd_step: residual_operator(ens, u) is residual_map(u u^T).
    s.map = ens.residual_map(u * u.transpose(), {}, &res);
    s.next = u - cfg.eta * (s.map * u);
    s.train_error = sensing::train_error_from_residuals(res, ens.labels());
    return s;
  };
  nlohmann::json echo{{"solver", "gd"}, {"d", gt.d}, {"r", gt.r}, {"m", ens.size()},
                      {"config", cfg.to_json()}};
  return factor_loop(gt, &ens, cfg, observer, init_factor(gt.d, cfg), step, std::move(echo));
}

Trajectory run_population_gd(const GroundTruth& gt, const SolverConfig& cfg, StepObserver* observer) {
  cfg.validate();
  const StepFn step = [&](long, const Matrix& u, bool) {
    StepOut s;
    s.map = u * u.transpose() - gt.xstar;
    s.next = u - cfg.eta * (s.map * u);
    return s;
  };
  SolverConfig echo_cfg = cfg;
  echo_cfg.mode = Mode::kPopulation;
  nlohmann::json echo{{"solver", "gd"}, {"d", gt.d}, {"r", gt.r}, {"config", echo_cfg.to_json()}};
  return factor_loop(gt, nullptr, cfg, observer, init_factor(gt.d, cfg), step, std::move(echo));
}

Trajectory run_sgd(const GroundTruth& gt, const MeasurementEnsemble& ens, const SolverConfig& cfg,
                   StepObserver* observer, const std::optional<Matrix>& u0) {
  cfg.validate();
  check_ensemble(gt, ens);
  const int m = ens.size();
  const int batch = std::min(cfg.batch.value_or(1), m);
  const bool full = cfg.without_replacement && batch == m;
  Rng rng(cfg.seed, Stream::kSgdIndices);
  std::vector<int> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> idx(static_cast<std::size_t>(batch));

  const StepFn step = [&](long, const Matrix& u, bool want_map) {
    if (!full) {
      if (cfg.without_replacement) {
        for (int j = 0; j < batch; ++j) {
          const auto k = j + static_cast<int>(rng.index(static_cast<std::uint64_t>(m - j)));
          std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(k)]);
          idx[static_cast<std::size_t>(j)] = pool[static_cast<std::size_t>(j)];
        }
      } else {
        for (int& i : idx) i = static_cast<int>(rng.index(static_cast<std::uint64_t>(m)));
      }
    }
    StepOut s;
    if (ens.kind() == sensing::SensorKind::kRankOne) {
      // A_i = x_i x_i^T: <A_i, U U^T> = ||U^T x_i||^2 and A_i U = x_i (U^T x_i)^T.
      Matrix rows(batch, gt.d);
      Vector y(batch);
      for (int j = 0; j < batch; ++j) {
        const int i = full ? j : idx[static_cast<std::size_t>(j)];
        rows.row(j) = ens.vectors().row(i);
        y(j) = ens.labels()(i);
      }
      const Matrix w = rows * u;
      const Vector c = w.rowwise().squaredNorm() - y;
      s.next = u - (cfg.eta / batch) * (rows.transpose() * (c.asDiagonal() * w));
      if (want_map) s.map = matkit::symmetrize(rows.transpose() * c.asDiagonal() * rows) / batch;
    } else if (full) {
      s.map = ens.residual_map(u * u.transpose());
      s.next = u - cfg.eta * (s.map * u);
    } else {
      // One product A_i U per sensor: <A_i, U U^T> = <U, A_i U>.
      Matrix g = Matrix::Zero(u.rows(), u.cols());
      Vector c(batch);
      for (int j = 0; j < batch; ++j) {
        const int i = idx[static_cast<std::size_t>(j)];
        const Matrix au = ens.sensor(i) * u;
        c(j) = u.cwiseProduct(au).sum() - ens.labels()(i);
        g.noalias() += c(j) * au;
      }
      s.next = u - (cfg.eta / batch) * g;
      if (want_map) {
        Vector coef = Vector::Zero(m);
        for (int j = 0; j < batch; ++j) coef(idx[static_cast<std::size_t>(j)]) += c(j);
        s.map = ens.combine(coef) / batch;
      }
    }
    return s;
  };

  Matrix start = u0 ? *u0 : init_factor(gt.d, cfg);
  if (start.rows() != gt.d) throw ValidationError("run_sgd: initial factor row count mismatch");
  matkit::require_finite(start, "run_sgd initial factor");
  nlohmann::json echo{{"solver", "sgd"}, {"d", gt.d}, {"r", gt.r}, {"m", m},
                      {"config", cfg.to_json()}};
  echo["config"]["batch"] = batch;
  echo["init"] = u0 ? "explicit" : "alpha*basis";
  return factor_loop(gt, &ens, cfg, observer, std::move(start), step, std::move(echo));
}

Trajectory run_pgd(const GroundTruth& gt, const MeasurementEnsemble& ens, const SolverConfig& cfg,
                   const std::optional<Matrix>& x0) {
  cfg.validate();
  check_ensemble(gt, ens);
  const auto start = std::chrono::steady_clock::now();
  Matrix x = x0 ? *x0 : Matrix::Zero(gt.d, gt.d);
  if (x.rows() != gt.d || x.cols() != gt.d) throw ValidationError("run_pgd: initial point shape mismatch");
  matkit::require_finite(x, "run_pgd initial point");
  const std::vector<long> schedule = checkpoint_schedule(cfg.iterations, cfg.record_every);
  std::size_t next_cp = 0;

  Trajectory traj;
  for (long t = 0;; ++t) {
    Vector res;
    const Matrix g = ens.residual_map(x, {}, &res);
    const std::optional<double> train = sensing::train_error_from_residuals(res, ens.labels());
    const bool due = next_cp < schedule.size() && schedule[next_cp] == t;
    if (due) ++next_cp;
    const bool stop = cfg.stop_train_error && train && *train < *cfg.stop_train_error;
    if (due || stop || t == cfg.iterations) {
      const sensing::Metrics met = sensing::truth_metrics(gt, x);
      Checkpoint c;
      c.t = t;
      c.train_error = train;
      c.test_error = met.test_error;
      c.population_risk = met.population_risk;
      c.objective = res.squaredNorm() / ens.size();
      traj.checkpoints.push_back(std::move(c));
    }
    if (stop || t == cfg.iterations) break;
    const Matrix moved = x - (2.0 * cfg.eta) * g;
    if (!matkit::all_finite(moved)) {
      traj.abort = AbortInfo{t + 1, "non-finite iterate"};
      break;
    }
    x = matkit::psd_project(moved);
  }
  traj.final_estimate = x;
  traj.config = nlohmann::json{{"solver", "pgd"}, {"d", gt.d}, {"r", gt.r}, {"m", ens.size()},
                               {"x0", x0 ? "explicit" : "zero"}, {"config", cfg.to_json()}};
  traj.wall_time = seconds_since(start);
  return traj;
}

}  // namespace sensekit::solvers
