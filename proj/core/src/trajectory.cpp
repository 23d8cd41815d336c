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

#include "sensekit/trajectory.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "sensekit/errors.hpp"

namespace sensekit {

std::vector<long> checkpoint_schedule(long iterations, long stride) {
  if (iterations < 0) throw ValidationError("checkpoint_schedule: negative iteration count");
  if (stride < 1) throw ValidationError("checkpoint_schedule: stride must be >= 1");
  std::vector<long> out{0};
  for (long decade = 1; decade < stride; decade *= 10)
    for (const long mult : {1L, 2L, 5L}) {
      const long t = decade * mult;
      if (t < stride && t <= iterations) out.push_back(t);
    }
  for (long t = stride; t <= iterations; t += stride) out.push_back(t);
  out.push_back(iterations);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << kTrajectoryCsvHeader << '\n';
  for (const Checkpoint& c : traj.checkpoints) {
    out << c.t << ',' << opt_field(c.train_error) << ',' << format_double(c.test_error) << ','
        << format_double(c.population_risk);
    if (c.diag) {
      const DiagRecord& d = *c.diag;
      for (const double v : {d.sigma_rp1, d.sin_zu, d.norm_e, d.sigmin_r, d.norm_z, d.norm_f})
        out << ',' << format_double(v);
    } else {
      out << ",,,,,,";
    }
    out << '\n';
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  return out.str();
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryCsvHeader)
    throw ValidationError("trajectory csv: unexpected header");
  Trajectory traj;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    while (fields.size() < 10) fields.emplace_back();
    if (fields.size() != 10) throw ValidationError("trajectory csv: bad row '" + line + "'");
    const auto num = [&](const std::string& s) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw ValidationError("trajectory csv: bad number '" + s + "'");
        return v;
      } catch (const std::logic_error&) {
        throw ValidationError("trajectory csv: bad number '" + s + "'");
      }
    };
    Checkpoint c;
    c.t = static_cast<long>(num(fields[0]));
    if (!fields[1].empty()) c.train_error = num(fields[1]);
    c.test_error = num(fields[2]);
    c.population_risk = num(fields[3]);
    if (!fields[4].empty()) {
      DiagRecord d;
      d.t = c.t;
      d.sigma_rp1 = num(fields[4]);
      d.sin_zu = num(fields[5]);
      d.norm_e = num(fields[6]);
      d.sigmin_r = num(fields[7]);
      d.norm_z = num(fields[8]);
      d.norm_f = num(fields[9]);
      c.diag = d;
    }
    traj.checkpoints.push_back(std::move(c));
  }
  return traj;
}

}  // namespace sensekit
