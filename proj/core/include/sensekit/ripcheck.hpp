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
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "sensekit/rng.hpp"
#include "sensekit/sensing.hpp"

/// Empirical restricted-isometry estimates and residual checks for the RIP
/// consequences used in the convergence analysis.
///
/// Certifying RIP is intractable, so every estimate here is a lower bound on
/// the true constant: the maximum isometry deviation over the probes actually
/// evaluated. Reports always carry the number of evaluated probes.
namespace sensekit::ripcheck {

using matkit::Matrix;
using matkit::Vector;
using sensing::MeasurementEnsemble;

/// Statistical headroom applied to delta_hat when checking lemma bounds.
inline constexpr double kLemmaSlack = 1.5;

enum class ProbeKind {
  kSymmetric,   ///< X = G W G^T, G Gaussian d x r, W symmetric Gaussian r x r
  kAsymmetric,  ///< X = G H^T, G and H Gaussian d x r
};

struct RipOptions {
  int rank = 1;
  int n_probes = 100;
  std::uint64_t seed = 0;
  ProbeKind probe = ProbeKind::kSymmetric;
  /// Number of the worst random probes refined by projected power iteration
  /// (symmetric probes only). Zero disables refinement.
  int ascent_starts = 8;
  int ascent_steps = 20;
};

struct RipReport {
  int r = 0;
  double delta_hat = 0.0;  ///< max(over, under); lower bound on the RIP constant
  double over = 0.0;       ///< largest (1/m) sum <A_i,X>^2 - 1 seen, ||X||_F = 1
  double under = 0.0;      ///< largest 1 - (1/m) sum <A_i,X>^2 seen
  double two_sided = 0.0;  ///< same as delta_hat, kept for report readers
  long samples = 0;        ///< probe matrices evaluated (random + refined)
  int n_probes = 0;        ///< random probes drawn
  ProbeKind probe = ProbeKind::kSymmetric;
  std::string worst_witness;

  nlohmann::json to_json() const;
};

/// Frobenius-normalized random probe of rank <= r.
Matrix random_probe(int d, int r, ProbeKind kind, Rng& rng);

/// Signed deviation (1/m) sum <A_i, X>^2 / ||X||_F^2 - 1. X must be nonzero.
double isometry_deviation(const MeasurementEnsemble& ens, const Matrix& x);

/// max |isometry_deviation| over an explicit probe set.
double max_deviation(const MeasurementEnsemble& ens, std::span<const Matrix> probes);

RipReport estimate_rip(const MeasurementEnsemble& ens, const RipOptions& options);

/// Residual of one lemma check plus a flag raised when an input exceeds the
/// rank the bound is stated for (the bound may then not apply).
struct LemmaResidual {
  double value = 0.0;
  bool rank_warning = false;
};

/// |(1/m) sum <A_i,X><A_i,Y> - <X,Y>|, compare with delta ||X||_F ||Y||_F.
LemmaResidual lemma_ip_residual(const MeasurementEnsemble& ens, const Matrix& x, const Matrix& y,
                                int rank);

/// ||(1/m) sum <A_i,X> A_i R - X R||, compare with delta ||X||_F ||R||.
LemmaResidual lemma_opnorm_residual(const MeasurementEnsemble& ens, const Matrix& x,
                                    const Matrix& r, int rank);

/// Arbitrary-rank X, rank <= `rank` Y: compare with delta ||X||_* ||Y||_F.
LemmaResidual lemma_nuclear_ip_residual(const MeasurementEnsemble& ens, const Matrix& x,
                                        const Matrix& y, int rank = 1);

/// ||(1/m) sum <A_i,X> U A_i R - U X R|| (U = I when absent), compare with
/// delta ||X||_* ||U|| ||R||.
LemmaResidual lemma_nuclear_op_residual(const MeasurementEnsemble& ens, const Matrix& x,
                                        const Matrix& r,
                                        const std::optional<Matrix>& left = std::nullopt);

/// For rank-one sensors A_i = x_i x_i^T (rows of xs):
/// ||(1/m) sum <A_i,X> A_i 1{|<A_i,X>| <= rcut} - 2X - trace(X) I||.
/// rcut may be +infinity.
double truncated_rank1_deviation(const Matrix& xs, const Matrix& x, double rcut);

/// log(1/delta), the default truncation radius for a target accuracy delta.
double default_truncation_radius(double delta_target);

}  // namespace sensekit::ripcheck
