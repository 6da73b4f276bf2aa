// Copyright 2026 The kanglid Authors
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

#include "kanglid/svg_chart.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace kanglid {
namespace {

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                                 "#d62728", "#9467bd", "#8c564b"};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string open_svg(int width, int height, const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{3}</text>\n",
      width, height, width / 2, escape(title));
}

}  // namespace

std::string bar_chart_svg(const std::string& title, const std::vector<Bar>& bars,
                          const std::string& value_suffix) {
  constexpr int kLeft = 50, kTop = 40, kPlotH = 260, kBarW = 60, kGap = 20;
  const int width = kLeft + static_cast<int>(bars.size()) * (kBarW + kGap) + kGap;
  const int height = kTop + kPlotH + 50;
  double max_value = 0.0;
  for (const auto& b : bars) max_value = std::max(max_value, b.value);
  if (max_value <= 0.0) max_value = 1.0;

  std::string svg = open_svg(width, height, title);
  const int base = kTop + kPlotH;
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n",
                     kLeft, base, width - kGap / 2);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const double h = kPlotH * std::max(0.0, b.value) / max_value;
    const int x = kLeft + kGap + static_cast<int>(i) * (kBarW + kGap);
    svg += fmt::format(
        "<rect class=\"bar\" x=\"{}\" y=\"{:.2f}\" width=\"{}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
        x, base - h, kBarW, h, kPalette[i % kPalette.size()]);
    svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.2f}{}</text>\n",
                       x + kBarW / 2, base - h - 4, b.value, escape(value_suffix));
    svg += fmt::format("<text class=\"xtick\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       x + kBarW / 2, base + 18, escape(b.label));
  }
  svg += "</svg>\n";
  return svg;
}

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series) {
  constexpr int kWidth = 640, kHeight = 400, kLeft = 70, kRight = 140, kTop = 40, kBottom = 50;
  constexpr int kPlotW = kWidth - kLeft - kRight, kPlotH = kHeight - kTop - kBottom;

  std::size_t points = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    points = std::max(points, s.values.size());
    for (double v : s.values) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const auto px = [&](std::size_t i) {
    return points <= 1 ? kLeft + kPlotW / 2.0
                       : kLeft + kPlotW * static_cast<double>(i) / static_cast<double>(points - 1);
  };
  const auto py = [&](double v) { return kTop + kPlotH * (hi - v) / (hi - lo); };

  std::string svg = open_svg(kWidth, kHeight, title);
  svg += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      kLeft, kTop, kPlotW, kPlotH);
  for (std::size_t i = 0; i < points; ++i) {
    svg += fmt::format(
        "<text class=\"xtick\" x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px(i),
        kTop + kPlotH + 16, i + 1);
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3g}</text>\n", kLeft - 6,
                       py(v) + 4, v);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + kPlotW / 2, kHeight - 12, escape(x_label));
  svg += fmt::format(
      "<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      "{0})\">{1}</text>\n",
      kTop + kPlotH / 2, escape(y_label));

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& values = series[s].values;
    const char* color = kPalette[s % kPalette.size()];
    std::string pts;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!pts.empty()) pts += ' ';
      pts += fmt::format("{:.2f},{:.2f}", px(i), py(values[i]));
    }
    svg += fmt::format("<g class=\"series\" data-name=\"{}\">\n", escape(series[s].name));
    svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       pts, color);
    for (std::size_t i = 0; i < values.size(); ++i) {
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", px(i),
                         py(values[i]), color);
    }
    svg += "</g>\n";
    const int ly = kTop + 10 + static_cast<int>(s) * 18;
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>"
        "<text x=\"{4}\" y=\"{5}\">{6}</text>\n",
        kLeft + kPlotW + 10, ly, kLeft + kPlotW + 30, color, kLeft + kPlotW + 36, ly + 4,
        escape(series[s].name));
  }
  svg += "</svg>\n";
  return svg;
}

std::string heatmap_svg(const std::string& title, const std::vector<std::string>& labels,
                        const std::vector<std::vector<double>>& cells) {
  constexpr int kCell = 56, kLeft = 90, kTop = 60;
  const int n = static_cast<int>(labels.size());
  const int width = kLeft + n * kCell + 20;
  const int height = kTop + n * kCell + 50;
  double max_value = 0.0;
  for (const auto& row : cells) {
    for (double v : row) max_value = std::max(max_value, v);
  }
  if (max_value <= 0.0) max_value = 1.0;

  std::string svg = open_svg(width, height, title);
  for (int r = 0; r < n; ++r) {
    svg +=
        fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", kLeft - 6,
                    kTop + r * kCell + kCell / 2 + 4, escape(labels[static_cast<std::size_t>(r)]));
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       kLeft + r * kCell + kCell / 2, kTop - 8,
                       escape(labels[static_cast<std::size_t>(r)]));
    for (int c = 0; c < n; ++c) {
      const double v = cells[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      const int shade = 255 - static_cast<int>(std::lround(200.0 * v / max_value));
      svg += fmt::format(
          "<rect class=\"cell\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
          "fill=\"rgb({},{},255)\" stroke=\"#ccc\"/>\n",
          kLeft + c * kCell, kTop + r * kCell, kCell, kCell, shade, shade);
      svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{:g}</text>\n",
                         kLeft + c * kCell + kCell / 2, kTop + r * kCell + kCell / 2 + 4, v);
    }
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">predicted</text>\n",
                     kLeft + n * kCell / 2, height - 14);
  svg += "</svg>\n";
  return svg;
}

}  // namespace kanglid
