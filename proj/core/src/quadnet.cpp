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

#include "sensekit/quadnet.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "sensekit/errors.hpp"
#include "sensekit/rng.hpp"
#include "sensekit/solvers.hpp"

namespace sensekit::quadnet {

namespace {

void check_factor(const Matrix& u, const QuadDataset& data, const char* what) {
  if (u.rows() != data.dim()) throw ValidationError(std::string(what) + ": factor row count mismatch");
  matkit::require_finite(u, what);
}

void check_rcut(double rcut) {
  if (!(rcut > 0.0)) throw ValidationError("truncation radius must be positive");
}

// Residuals yhat - y with truncated examples zeroed, plus the kept count.
Vector masked_residuals(const Matrix& w, const QuadDataset& data, double rcut, int* kept) {
  const Vector yhat = w.rowwise().squaredNorm();
  Vector c(yhat.size());
  *kept = 0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const bool keep = yhat(i) <= rcut;
    c(i) = keep ? yhat(i) - data.labels(i) : 0.0;
    *kept += keep ? 1 : 0;
  }
  return c;
}

}  // namespace

sensing::MeasurementEnsemble QuadDataset::ensemble() const {
  return sensing::MeasurementEnsemble::rank_one(inputs, labels);
}

QuadDataset gen_quad_data(const GroundTruth& gt, int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("gen_quad_data: n must be positive");
  Rng rng(seed, Stream::kQuadData);
  QuadDataset data;
  data.inputs = rng.gaussian_matrix(n, gt.d);
  data.labels = (data.inputs * gt.factor).rowwise().squaredNorm();
  return data;
}

double predict(const Matrix& u, const Vector& x) {
  if (u.rows() != x.size()) throw ValidationError("predict: dimension mismatch");
  return (u.transpose() * x).squaredNorm();
}

double truncated_loss(const Matrix& u, const QuadDataset& data, double rcut) {
  check_factor(u, data, "truncated_loss");
  check_rcut(rcut);
  int kept = 0;
  const Vector c = masked_residuals(data.inputs * u, data, rcut, &kept);
  return c.squaredNorm() / data.size();
}

TruncatedValue truncated_gradient(const Matrix& u, const QuadDataset& data, double rcut) {
  check_factor(u, data, "truncated_gradient");
  check_rcut(rcut);
  const Matrix w = data.inputs * u;
  TruncatedValue out;
  const Vector c = masked_residuals(w, data, rcut, &out.kept);
  out.loss = c.squaredNorm() / data.size();
  out.gradient = (4.0 / data.size()) * (data.inputs.transpose() * (c.asDiagonal() * w));
  return out;
}

void QuadConfig::validate() const {
  if (!std::isfinite(alpha) || alpha <= 0.0) throw ValidationError("quad config: alpha must be positive");
  if (!std::isfinite(eta) || eta < 0.0) throw ValidationError("quad config: eta must be non-negative");
  if (iterations < 0) throw ValidationError("quad config: iterations must be non-negative");
  if (record_every < 1) throw ValidationError("quad config: record_every must be >= 1");
  if (rcut) check_rcut(*rcut);
}

double QuadConfig::resolved_rcut(int d) const {
  return rcut.value_or(20.0 * std::log(static_cast<double>(std::max(d, 2))));
}

nlohmann::json QuadConfig::to_json() const {
  nlohmann::json j{{"alpha", alpha},
                   {"eta", eta},
                   {"iterations", iterations},
                   {"seed", seed},
                   {"record_every", record_every},
                   {"tau_mode", tau_mode == TauMode::kExact ? "exact" : "estimated"},
                   {"rescale", rescale}};
  if (rcut) {
    if (std::isinf(*rcut)) j["rcut"] = "inf";
    else j["rcut"] = *rcut;
  } else {
    j["rcut"] = nullptr;
  }
  return j;
}

double resolve_tau(const GroundTruth& gt, const QuadDataset& data, TauMode mode) {
  if (mode == TauMode::kExact) return gt.factor.squaredNorm();
  return data.labels.mean();
}

Matrix algorithm1_step(const Matrix& u, const QuadDataset& data, const QuadConfig& cfg, double tau) {
  const TruncatedValue g = truncated_gradient(u, data, cfg.resolved_rcut(data.dim()));
  const Matrix tilde = u - cfg.eta * g.gradient;
  if (!cfg.rescale) return tilde;
  const double denom = 1.0 - cfg.eta * (u.squaredNorm() - tau);
  if (std::abs(denom) <= 1e-12) throw NumericalError("algorithm1_step: rescaling denominator vanished", -1);
  return tilde / denom;
}

Trajectory run_algorithm1(const GroundTruth& gt, const QuadDataset& data, const QuadConfig& cfg,
                          StepObserver* observer) {
  cfg.validate();
  if (data.dim() != gt.d) throw ValidationError("run_algorithm1: data dimension does not match ground truth");
  const auto start = std::chrono::steady_clock::now();
  const double tau = resolve_tau(gt, data, cfg.tau_mode);
  const double rcut = cfg.resolved_rcut(gt.d);
  const double bound = solvers::divergence_bound(gt);
  const std::vector<long> schedule = checkpoint_schedule(cfg.iterations, cfg.record_every);
  std::size_t next_cp = 0;

  Trajectory traj;
  Matrix u = cfg.alpha * Matrix::Identity(gt.d, gt.d);
  for (long t = 0;; ++t) {
    const Matrix w = data.inputs * u;
    int kept = 0;
    const Vector c = masked_residuals(w, data, rcut, &kept);
    if (next_cp < schedule.size() && schedule[next_cp] == t) {
      ++next_cp;
      const Matrix x = u * u.transpose();
      const sensing::Metrics met = sensing::truth_metrics(gt, x);
      Checkpoint cp;
      cp.t = t;
      cp.train_error = sensing::train_error_from_residuals(w.rowwise().squaredNorm() - data.labels,
                                                           data.labels);
      cp.test_error = met.test_error;
      cp.population_risk = met.population_risk;
      cp.objective = c.squaredNorm() / data.size();
      if (observer != nullptr) cp.diag = observer->at_checkpoint(t, u);
      traj.checkpoints.push_back(std::move(cp));
    }
    if (t == cfg.iterations) break;

    // Same arithmetic as algorithm1_step, reusing the residuals computed above.
    const Matrix grad = (4.0 / data.size()) * (data.inputs.transpose() * (c.asDiagonal() * w));
    Matrix next = u - cfg.eta * grad;
    if (cfg.rescale) {
      const double denom = 1.0 - cfg.eta * (u.squaredNorm() - tau);
      if (std::abs(denom) <= 1e-12) {
        traj.abort = AbortInfo{t, "rescaling denominator vanished"};
        break;
      }
      next /= denom;
    }
    if (observer != nullptr) {
      const Matrix map = matkit::symmetrize(data.inputs.transpose() * c.asDiagonal() * data.inputs) *
                         (4.0 / data.size());
      observer->on_step(t, map, cfg.eta);
    }
    const bool finite = matkit::all_finite(next);
    if (!finite || next.norm() > bound) {
      traj.abort = AbortInfo{t + 1, finite ? "iterate norm exceeded divergence bound"
                                           : "non-finite iterate"};
      break;
    }
    u = std::move(next);
  }
  traj.final_factor = u;
  traj.final_estimate = u * u.transpose();
  traj.config = nlohmann::json{{"solver", "algorithm1"}, {"d", gt.d}, {"r", gt.r}, {"n", data.size()},
                               {"tau", tau}, {"rcut", rcut}, {"config", cfg.to_json()}};
  traj.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

}  // namespace sensekit::quadnet
