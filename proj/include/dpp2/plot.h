// Copyright 2026 The dpp2 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPP2_PLOT_H_
#define DPP2_PLOT_H_

#include <string>
#include <vector>

namespace dpp2 {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "iteration k";
  std::string y_label = "optimality gap";
  int width = 720;
  int height = 460;
};

// SVG 1.1 line chart with a logarithmic y axis and a legend. Points with
// y <= 0 are not drawn. Throws std::invalid_argument when there is no series
// or a series has no drawable point.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotSpec& spec);

}  // namespace dpp2

#endif  // DPP2_PLOT_H_
