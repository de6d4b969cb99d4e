// Copyright 2026 The stochgrasp Authors
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

// Minimal SVG line and bar charts written directly as XML.

#ifndef STOCHGRASP_SVG_HPP_
#define STOCHGRASP_SVG_HPP_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stochgrasp/io.hpp"

namespace stochgrasp {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // NaN breaks the line
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct PlotPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  std::optional<std::pair<double, double>> y_range;  // auto when empty
};

// Panels stacked horizontally, each with axes, ticks and a legend.
std::string render_panels_svg(std::span<const PlotPanel> panels, int panel_width = 480,
                              int panel_height = 320);

// Grouped bars of success-probability counts per planner.
std::string histogram_svg(const Histogram& histogram);

// Forces per boom (left) and per-grasp plus joint success probability
// (right). `seed` is overlaid dashed when given. Plots the stored columns.
std::string trajectory_plot_svg(const StoredTrajectoryColumns& optimized,
                                const StoredTrajectoryColumns* seed = nullptr);

// Per-anchor success probability over time.
std::string force_log_svg(const ForceLogAnalysis& analysis);

std::string xml_escape(const std::string& s);

}  // namespace stochgrasp

#endif  // STOCHGRASP_SVG_HPP_
