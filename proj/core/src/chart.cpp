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

#include "sensekit/chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "sensekit/errors.hpp"

namespace sensekit::chart {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
constexpr int kLeft = 78, kRight = 170, kTop = 40, kBottom = 56;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double span) {
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (const double m : {1.0, 2.0, 5.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

}  // namespace

std::string emit_chart(const std::vector<Series>& series, const ChartStyle& style) {
  // Keep only drawable points.
  std::vector<Series> kept;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series) {
    Series f{s.label, {}, s.dashed};
    for (const SeriesPoint& p : s.points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < style.skip_initial) continue;
      if (style.log_y && p.y <= 0.0) continue;
      f.points.push_back(p);
      const double err = std::isfinite(p.err) ? std::abs(p.err) : 0.0;
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      const double lo = style.log_y && p.y - err <= 0.0 ? p.y : p.y - err;
      ymin = std::min(ymin, lo);
      ymax = std::max(ymax, p.y + err);
    }
    kept.push_back(std::move(f));
  }
  std::size_t total = 0;
  for (const Series& s : kept) total += s.points.size();
  if (total == 0) throw ValidationError("emit_chart: no data to draw");

  if (xmax == xmin) { xmin -= 0.5; xmax += 0.5; }
  double ylo, yhi;
  if (style.log_y) {
    ylo = std::floor(std::log10(ymin));
    yhi = std::ceil(std::log10(ymax));
    if (yhi == ylo) yhi += 1.0;
  } else {
    if (ymax == ymin) { ymin -= 0.5; ymax += 0.5; }
    ylo = ymin;
    yhi = ymax;
  }
  const double pw = style.width - kLeft - kRight;
  const double ph = style.height - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  const auto sy = [&](double y) {
    const double v = style.log_y ? std::log10(std::max(y, std::pow(10.0, ylo))) : y;
    return kTop + (yhi - v) / (yhi - ylo) * ph;
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\""
    << style.height << "\" font-family=\"DejaVu Sans, sans-serif\" font-size=\"12\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << style.width << "\" height=\"" << style.height
    << "\" fill=\"white\"/>\n";
  if (!style.title.empty())
    o << "<text x=\"" << style.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(style.title) << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << fmt(pw) << "\" height=\""
    << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Axes ticks.
  if (style.log_y) {
    for (double e = ylo; e <= yhi + 0.5; e += 1.0) {
      const double y = kTop + (yhi - e) / (yhi - ylo) * ph;
      o << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << fmt(y) << "\" x2=\"" << kLeft << "\" y2=\""
        << fmt(y) << "\" stroke=\"black\"/>\n";
      o << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">1e"
        << static_cast<int>(e) << "</text>\n";
    }
  } else {
    const double step = nice_step(yhi - ylo);
    for (double v = std::ceil(ylo / step) * step; v <= yhi + 1e-9 * step; v += step) {
      const double y = sy(v);
      o << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
        << tick_label(v) << "</text>\n";
    }
  }
  const double xstep = nice_step(xmax - xmin);
  for (double v = std::ceil(xmin / xstep) * xstep; v <= xmax + 1e-9 * xstep; v += xstep) {
    const double x = sx(v);
    o << "<line x1=\"" << fmt(x) << "\" y1=\"" << kTop + ph << "\" x2=\"" << fmt(x) << "\" y2=\""
      << fmt(kTop + ph + 4) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">"
      << tick_label(v) << "</text>\n";
  }
  o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << style.height - 12
    << "\" text-anchor=\"middle\">" << escape(style.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << fmt(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << fmt(kTop + ph / 2) << ")\">" << escape(style.y_label) << "</text>\n";

  for (std::size_t k = 0; k < kept.size(); ++k) {
    const Series& s = kept[k];
    const char* color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
    o << "<g stroke=\"" << color << "\" fill=\"" << color << "\">\n";
    if (s.points.size() > 1) {
      o << "<polyline fill=\"none\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i)
        o << (i ? " " : "") << fmt(sx(s.points[i].x)) << ',' << fmt(sy(s.points[i].y));
      o << "\"/>\n";
    }
    for (const SeriesPoint& p : s.points) {
      const double err = std::isfinite(p.err) ? std::abs(p.err) : 0.0;
      const double lo = style.log_y && p.y - err <= 0.0 ? std::pow(10.0, ylo) : p.y - err;
      o << "<line x1=\"" << fmt(sx(p.x)) << "\" y1=\"" << fmt(sy(lo)) << "\" x2=\"" << fmt(sx(p.x))
        << "\" y2=\"" << fmt(sy(p.y + err)) << "\"/>\n";
      o << "<circle cx=\"" << fmt(sx(p.x)) << "\" cy=\"" << fmt(sy(p.y)) << "\" r=\"2.5\"/>\n";
    }
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << fmt(kLeft + pw + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(kLeft + pw + 32)
      << "\" y2=\"" << fmt(ly) << "\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    o << "<text x=\"" << fmt(kLeft + pw + 38) << "\" y=\"" << fmt(ly + 4) << "\" stroke=\"none\">"
      << escape(s.label) << "</text>\n";
    o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace sensekit::chart
