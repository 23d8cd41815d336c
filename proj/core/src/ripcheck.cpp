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

#include "sensekit/ripcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sensekit/errors.hpp"

namespace sensekit::ripcheck {

namespace {

// Rank checks look at singular values above this fraction of sigma_1.
constexpr double kRankCheckTol = 1e-9;

bool exceeds_rank(const Matrix& m, int rank) {
  return matkit::numerical_rank(m, kRankCheckTol) > rank;
}

void check_dim(const MeasurementEnsemble& ens, const Matrix& m, const char* what) {
  if (m.rows() != ens.dim() || m.cols() != ens.dim())
    throw ValidationError(std::string(what) + ": expected a d x d matrix");
}

const char* probe_name(ProbeKind kind) {
  return kind == ProbeKind::kSymmetric ? "symmetric" : "asymmetric";
}

}  // namespace

nlohmann::json RipReport::to_json() const {
  return nlohmann::json{{"r", r},
                        {"delta_hat", delta_hat},
                        {"over", over},
                        {"under", under},
                        {"two_sided", two_sided},
                        {"samples", samples},
                        {"n_probes", n_probes},
                        {"probe", probe_name(probe)},
                        {"worst_witness", worst_witness},
                        {"lower_bound", true}};
}

Matrix random_probe(int d, int r, ProbeKind kind, Rng& rng) {
  if (r < 1 || r > d) throw ValidationError("random_probe: rank must satisfy 1 <= r <= d");
  Matrix x;
  do {
    const Matrix g = rng.gaussian_matrix(d, r);
    if (kind == ProbeKind::kSymmetric) {
      const Matrix w = matkit::symmetrize(rng.gaussian_matrix(r, r));
      x = matkit::symmetrize(g * w * g.transpose());
    } else {
      x = g * rng.gaussian_matrix(d, r).transpose();
    }
  } while (x.norm() == 0.0);
  return x / x.norm();
}

double isometry_deviation(const MeasurementEnsemble& ens, const Matrix& x) {
  check_dim(ens, x, "isometry_deviation");
  const double fro2 = x.squaredNorm();
  if (fro2 == 0.0) throw ValidationError("isometry_deviation: zero probe");
  const Vector c = ens.inner_all(x);
  return c.squaredNorm() / ens.size() / fro2 - 1.0;
}

double max_deviation(const MeasurementEnsemble& ens, std::span<const Matrix> probes) {
  double best = 0.0;
  for (const Matrix& p : probes) best = std::max(best, std::abs(isometry_deviation(ens, p)));
  return best;
}

RipReport estimate_rip(const MeasurementEnsemble& ens, const RipOptions& options) {
  if (options.n_probes < 1) throw ValidationError("estimate_rip: n_probes must be >= 1");
  if (options.rank < 1 || options.rank > ens.dim())
    throw ValidationError("estimate_rip: rank must satisfy 1 <= r <= d");
  if (options.ascent_starts < 0 || options.ascent_steps < 0)
    throw ValidationError("estimate_rip: ascent parameters must be non-negative");

  RipReport report;
  report.r = options.rank;
  report.n_probes = options.n_probes;
  report.probe = options.probe;

  const auto record = [&](double dev, const std::string& witness) {
    ++report.samples;
    if (dev > report.over) report.over = dev;
    if (-dev > report.under) report.under = -dev;
    if (std::abs(dev) > report.delta_hat) {
      report.delta_hat = std::abs(dev);
      report.worst_witness = witness;
    }
  };

  Rng rng(options.seed, Stream::kProbes);
  std::vector<Matrix> probes;
  std::vector<double> devs;
  probes.reserve(static_cast<std::size_t>(options.n_probes));
  for (int p = 0; p < options.n_probes; ++p) {
    Matrix x = random_probe(ens.dim(), options.rank, options.probe, rng);
    const double dev = isometry_deviation(ens, x);
    record(dev, "seed " + std::to_string(options.seed) + " probe " + std::to_string(p));
    probes.push_back(std::move(x));
    devs.push_back(dev);
  }

  if (options.probe == ProbeKind::kSymmetric && options.ascent_starts > 0 &&
      options.ascent_steps > 0) {
    // Shifted projected power iteration on +-(M - I) restricted to rank-r
    // symmetric matrices, started from the worst random probes. Every iterate
    // is itself a valid probe, so the estimate stays a lower bound.
    std::vector<int> order(devs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(devs[static_cast<std::size_t>(a)]) > std::abs(devs[static_cast<std::size_t>(b)]);
    });
    const int starts = std::min<int>(options.ascent_starts, static_cast<int>(order.size()));
    constexpr double kShift = 2.0;
    for (int s = 0; s < starts; ++s) {
      const int origin = order[static_cast<std::size_t>(s)];
      for (const double sign : {1.0, -1.0}) {
        Matrix y = probes[static_cast<std::size_t>(origin)];
        for (int step = 0; step < options.ascent_steps; ++step) {
          const Matrix my = ens.apply(y);
          const Matrix z = sign * (my - y) + kShift * y;
          Matrix next = matkit::sym_truncate(z, options.rank);
          const double norm = next.norm();
          if (norm == 0.0) break;
          y = next / norm;
          record(isometry_deviation(ens, y),
                 "seed " + std::to_string(options.seed) + " probe " + std::to_string(origin) +
                     (sign > 0 ? " ascent(upper) step " : " ascent(lower) step ") +
                     std::to_string(step + 1));
        }
      }
    }
  }
  report.two_sided = report.delta_hat;
  return report;
}

LemmaResidual lemma_ip_residual(const MeasurementEnsemble& ens, const Matrix& x, const Matrix& y,
                                int rank) {
  check_dim(ens, x, "lemma_ip_residual");
  check_dim(ens, y, "lemma_ip_residual");
  LemmaResidual out;
  out.rank_warning = exceeds_rank(x, rank) || exceeds_rank(y, rank);
  const Vector a = ens.inner_all(x);
  const Vector b = ens.inner_all(y);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc += a(i) * b(i);
  out.value = std::abs(acc / ens.size() - x.cwiseProduct(y).sum());
  return out;
}

LemmaResidual lemma_opnorm_residual(const MeasurementEnsemble& ens, const Matrix& x,
                                    const Matrix& r, int rank) {
  check_dim(ens, x, "lemma_opnorm_residual");
  if (r.rows() != ens.dim()) throw ValidationError("lemma_opnorm_residual: R row count mismatch");
  LemmaResidual out;
  out.rank_warning = exceeds_rank(x, rank);
  out.value = matkit::spectral_norm(ens.apply(x) * r - x * r);
  return out;
}

LemmaResidual lemma_nuclear_ip_residual(const MeasurementEnsemble& ens, const Matrix& x,
                                        const Matrix& y, int rank) {
  check_dim(ens, x, "lemma_nuclear_ip_residual");
  check_dim(ens, y, "lemma_nuclear_ip_residual");
  LemmaResidual out = lemma_ip_residual(ens, x, y, ens.dim());
  out.rank_warning = exceeds_rank(y, rank);
  return out;
}

LemmaResidual lemma_nuclear_op_residual(const MeasurementEnsemble& ens, const Matrix& x,
                                        const Matrix& r, const std::optional<Matrix>& left) {
  check_dim(ens, x, "lemma_nuclear_op_residual");
  if (r.rows() != ens.dim())
    throw ValidationError("lemma_nuclear_op_residual: R row count mismatch");
  const Matrix diff = ens.apply(x) - x;
  LemmaResidual out;
  if (left) {
    if (left->cols() != ens.dim())
      throw ValidationError("lemma_nuclear_op_residual: U column count mismatch");
    out.value = matkit::spectral_norm(*left * diff * r);
  } else {
    out.value = matkit::spectral_norm(diff * r);
  }
  return out;
}

double truncated_rank1_deviation(const Matrix& xs, const Matrix& x, double rcut) {
  if (!(rcut > 0.0)) throw ValidationError("truncated_rank1_deviation: rcut must be positive");
  if (x.rows() != xs.cols() || x.cols() != xs.cols())
    throw ValidationError("truncated_rank1_deviation: shape mismatch");
  if (xs.rows() < 1) throw ValidationError("truncated_rank1_deviation: no samples");
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  if (matkit::max_asymmetry(x) > 1e-10 * scale)
    throw ValidationError("truncated_rank1_deviation: X must be symmetric");
  const Matrix w = xs * x;
  Vector c = w.cwiseProduct(xs).rowwise().sum();
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (!(std::abs(c(i)) <= rcut)) c(i) = 0.0;
  const Matrix sum = matkit::symmetrize(xs.transpose() * c.asDiagonal() * xs) /
                     static_cast<double>(xs.rows());
  const Eigen::Index d = x.rows();
  const Matrix target = 2.0 * x + x.trace() * Matrix::Identity(d, d);
  return matkit::spectral_norm(sum - target);
}

double default_truncation_radius(double delta_target) {
  if (!(delta_target > 0.0 && delta_target < 1.0))
    throw ValidationError("default_truncation_radius: delta must lie in (0, 1)");
  return std::log(1.0 / delta_target);
}

}  // namespace sensekit::ripcheck
