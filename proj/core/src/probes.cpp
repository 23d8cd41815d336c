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

#include "sensekit/probes.hpp"

#include <algorithm>
#include <cmath>

#include "sensekit/errors.hpp"

namespace sensekit::probes {

namespace {

// Below this relative singular value the propagated subspace counts as collapsed.
constexpr double kCollapseTol = 1e-10;
constexpr double kSandwichSlack = 1e-8;

}  // namespace

SubspaceState initial_subspace(const GroundTruth& gt) {
  SubspaceState s;
  s.basis = gt.ustar;
  return s;
}

SubspaceState advance_subspace(const SubspaceState& s, const Matrix& m, double eta) {
  const Eigen::Index d = s.basis.rows();
  if (m.rows() != d || m.cols() != d) throw ValidationError("advance_subspace: map shape mismatch");
  SubspaceState out;
  out.t = s.t + 1;
  out.degenerate_map = s.degenerate_map;
  out.collapsed = s.collapsed;
  // Frobenius norm bounds the spectral norm; only pay for the latter when needed.
  if (eta * m.norm() >= 1.0 && eta * matkit::spectral_norm(m) >= 1.0) out.degenerate_map = true;
  const Matrix moved = s.basis - eta * (m * s.basis);
  // The previous basis is orthonormal, so singular values of the moved basis
  // are compared on an absolute scale.
  const matkit::SvdResult sv = matkit::svd(moved);
  const auto kept = (sv.singulars.array() > kCollapseTol).count();
  if (kept < s.basis.cols()) {
    out.collapsed = true;
    out.basis = sv.left.leftCols(kept);
  } else {
    out.basis = matkit::qr_orthonormalize(moved);
  }
  return out;
}

ZESplit split_ze(const Matrix& u, const SubspaceState& s) {
  if (u.rows() != s.basis.rows()) throw ValidationError("split_ze: factor row count mismatch");
  ZESplit out;
  out.z = s.basis * (s.basis.transpose() * u);
  out.e = u - out.z;
  return out;
}

FRSplit split_fr(const Matrix& z, const GroundTruth& gt) {
  if (z.rows() != gt.d) throw ValidationError("split_fr: row count mismatch");
  FRSplit out;
  out.r = gt.ustar.transpose() * z;
  const Matrix outside = z - gt.ustar * out.r;
  out.f = outside * matkit::pseudo_inverse(out.r);
  out.rank_deficient = matkit::numerical_rank(out.r, 1e-10) < gt.r;
  return out;
}

Rank1Split split_rank1(const Matrix& u, const GroundTruth& gt) {
  if (gt.r != 1) throw ValidationError("split_rank1: ground truth must have rank 1");
  if (u.rows() != gt.d) throw ValidationError("split_rank1: factor row count mismatch");
  const Vector ustar = gt.rank1_vector();
  Rank1Split out;
  out.r = u.transpose() * ustar;
  out.e = u - ustar * out.r.transpose();
  return out;
}

DiagRecord diagnostics(const Matrix& u, const SubspaceState& s, const GroundTruth& gt,
                       std::optional<double> e0_norm) {
  DiagRecord d;
  d.t = s.t;
  d.subspace_degenerate = s.degenerate_map || s.collapsed;

  const Vector sv = matkit::singular_values(u);
  d.sigma_rp1 = gt.r < sv.size() ? sv(gt.r) : 0.0;

  const ZESplit ze = split_ze(u, s);
  d.split_residual = (u - ze.z - ze.e).norm();
  d.projection_leak = (s.basis * (s.basis.transpose() * ze.e)).norm();
  d.norm_e = matkit::spectral_norm(ze.e);
  d.norm_z = matkit::spectral_norm(ze.z);
  const bool no_signal = d.norm_z <= kCollapseTol * std::max(1.0, matkit::spectral_norm(u));
  d.sin_zu = no_signal ? 1.0 : matkit::principal_angle_sin(ze.z, gt.ustar);

  const FRSplit fr = split_fr(ze.z, gt);
  const Vector rsv = matkit::singular_values(fr.r);
  d.sigmin_r = rsv.size() >= gt.r ? rsv(gt.r - 1) : 0.0;
  d.rank_deficient = fr.rank_deficient;
  d.norm_f = matkit::spectral_norm(fr.f);

  if (gt.r == 1) {
    const Rank1Split r1 = split_rank1(u, gt);
    d.rank1_signal = r1.r.norm();
    d.rank1_error = matkit::spectral_norm(r1.e);
  }

  d.flags.sin_small = d.sin_zu <= 1.0 / 3.0;
  d.flags.error_bounded = e0_norm.has_value() && d.norm_e <= 4.0 * *e0_norm;
  d.flags.signal_dominates = d.sigmin_r >= d.norm_e;
  d.flags.signal_bounded = d.norm_z <= 5.0;
  d.flags.sandwich_applies = !d.rank_deficient && d.norm_f < 1.0 / 3.0;
  const double f = d.norm_f;
  d.flags.sandwich_holds = !d.flags.sandwich_applies ||
                           (f - f * f * f - kSandwichSlack <= d.sin_zu && d.sin_zu <= f + kSandwichSlack);
  return d;
}

SubspaceProbe::SubspaceProbe(const GroundTruth& gt) : gt_(gt), state_(initial_subspace(gt)) {}

void SubspaceProbe::on_step(long t, const Matrix& step_map, double eta) {
  if (t != state_.t) throw ValidationError("SubspaceProbe: steps delivered out of order");
  state_ = advance_subspace(state_, step_map, eta);
}

std::optional<DiagRecord> SubspaceProbe::at_checkpoint(long t, const Matrix& u) {
  if (t != state_.t) throw ValidationError("SubspaceProbe: checkpoint does not match subspace index");
  DiagRecord rec = diagnostics(u, state_, gt_, e0_norm_);
  if (!e0_norm_) {
    e0_norm_ = rec.norm_e;
    rec.flags.error_bounded = true;
  }
  records_.push_back(rec);
  return rec;
}

}  // namespace sensekit::probes
