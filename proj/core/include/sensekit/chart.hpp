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

#include <iosfwd>
#include <string>
#include <vector>

namespace sensekit::chart {

struct SeriesPoint {
  double x = 0.0;
  double y = 0.0;
  double err = 0.0;  ///< half-length of the error bar
};

struct Series {
  std::string label;
  std::vector<SeriesPoint> points;
  bool dashed = false;
};

struct ChartStyle {
  std::string title;
  std::string x_label = "iteration";
  std::string y_label = "error";
  bool log_y = true;
  /// Points with x below this value are not drawn.
  double skip_initial = 0.0;
  int width = 720;
  int height = 460;
};

/// Line chart with one <circle> marker per drawn point and vertical error bars.
/// Output depends only on the inputs. On a log axis, non-positive values are
/// dropped and error bars are clipped at the lower edge.
std::string emit_chart(const std::vector<Series>& series, const ChartStyle& style);

}  // namespace sensekit::chart
