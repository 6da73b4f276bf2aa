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

#pragma once

#include <string>
#include <vector>

namespace kanglid {

// Minimal static SVG figures. Elements carry class attributes ("bar",
// "series", "xtick", "cell") so the output can be inspected as text.

struct Bar {
  std::string label;
  double value = 0.0;
};

std::string bar_chart_svg(const std::string& title, const std::vector<Bar>& bars,
                          const std::string& value_suffix = "");

struct Series {
  std::string name;
  std::vector<double> values;  // one per x position
};

// x runs 1..N (epochs). Series may differ in length; missing points are
// simply not drawn.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series);

// Rows are gold labels, columns predictions.
std::string heatmap_svg(const std::string& title, const std::vector<std::string>& labels,
                        const std::vector<std::vector<double>>& cells);

}  // namespace kanglid
