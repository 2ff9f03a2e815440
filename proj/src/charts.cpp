// Copyright 2026 The edgesim Authors.
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

#include "edgesim/charts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace edgesim {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_line_chart_svg(const std::string& title,
                                  const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<ChartSeries>& series) {
  const double width = 720, height = 440;
  const double left = 78, right = 30, top = 52, bottom = 58;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const ChartSeries& s : series) {
    for (auto [x, y] : s.points) {
      if (!any) {
        xmin = xmax = x;
        ymin = ymax = y;
        any = true;
      } else {
        xmin = std::min(xmin, x); xmax = std::max(xmax, x);
        ymin = std::min(ymin, y); ymax = std::max(ymax, y);
      }
    }
  }
  if (xmax == xmin) { xmax += 1.0; xmin -= 1.0; }
  if (ymax == ymin) { ymax += 1.0; ymin -= 1.0; }
  double ypad = 0.06 * (ymax - ymin);
  ymin -= ypad; ymax += ypad;

  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"17\" font-weight=\"bold\">"
      << escape(title) << "</text>\n";

  const int ticks = 5;
  for (int k = 0; k <= ticks; ++k) {
    double fy = ymin + (ymax - ymin) * k / ticks;
    double y = py(fy);
    svg << "<line x1=\"" << left << "\" y1=\"" << num(y) << "\" x2=\""
        << left + plot_w << "\" y2=\"" << num(y)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << num(fy) << "</text>\n";
  }
  for (int k = 0; k <= ticks; ++k) {
    double fx = xmin + (xmax - xmin) * k / ticks;
    double x = px(fx);
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << top + plot_h << "\" x2=\""
        << num(x) << "\" y2=\"" << top + plot_h + 5
        << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << num(x) << "\" y=\"" << top + plot_h + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << num(fx) << "</text>\n";
  }
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << escape(x_label) << "</text>\n";
  svg << "<text x=\"20\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
      << "transform=\"rotate(-90 20 " << top + plot_h / 2 << ")\">"
      << escape(y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    const ChartSeries& s = series[si];
    if (!s.points.empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"2\" points=\"";
      for (auto [x, y] : s.points) svg << num(px(x)) << ',' << num(py(y)) << ' ';
      svg << "\"/>\n";
      for (auto [x, y] : s.points)
        svg << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y))
            << "\" r=\"3.2\" fill=\"" << color << "\"/>\n";
    }
    double ly = top + 10 + 18.0 * si;
    svg << "<line x1=\"" << left + plot_w - 120 << "\" y1=\"" << num(ly)
        << "\" x2=\"" << left + plot_w - 96 << "\" y2=\"" << num(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + plot_w - 90 << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace edgesim
