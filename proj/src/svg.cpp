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

#include "stochgrasp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <tuple>

namespace stochgrasp {

namespace {

constexpr const char* kBoomColors[kNumBooms] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Round tick step near range / 5.
double tick_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::pair<double, double> padded(double lo, double hi) {
  if (!(lo <= hi)) return {0.0, 1.0};
  if (hi - lo < 1e-12) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

void draw_panel(std::ostringstream& os, const PlotPanel& panel, double ox, double oy, double w,
                double h) {
  const double left = ox + 60, right = ox + w - 20, top = oy + 30, bottom = oy + h - 45;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : panel.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }
  std::tie(xlo, xhi) = padded(xlo, xhi);
  if (panel.y_range) {
    std::tie(ylo, yhi) = *panel.y_range;
  } else {
    std::tie(ylo, yhi) = padded(ylo, yhi);
  }
  auto px = [&](double x) { return left + (x - xlo) / (xhi - xlo) * (right - left); };
  auto py = [&](double y) { return bottom - (y - ylo) / (yhi - ylo) * (bottom - top); };

  os << "<g>\n";
  os << "<text x=\"" << num(0.5 * (left + right)) << "\" y=\"" << num(oy + 18)
     << "\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(panel.title) << "</text>\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(right - left)
     << "\" height=\"" << num(bottom - top) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  const double xs = tick_step(xhi - xlo), ys = tick_step(yhi - ylo);
  for (double t = std::ceil(xlo / xs) * xs; t <= xhi + 1e-9 * xs; t += xs) {
    os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(px(t))
       << "\" y2=\"" << num(bottom + 4) << "\" stroke=\"#444\"/>"
       << "<text x=\"" << num(px(t)) << "\" y=\"" << num(bottom + 16)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(t) << "</text>\n";
  }
  for (double t = std::ceil(ylo / ys) * ys; t <= yhi + 1e-9 * ys; t += ys) {
    os << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(left)
       << "\" y2=\"" << num(py(t)) << "\" stroke=\"#444\"/>"
       << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(t) + 3)
       << "\" text-anchor=\"end\" font-size=\"10\">" << tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << num(0.5 * (left + right)) << "\" y=\"" << num(bottom + 34)
     << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(panel.x_label) << "</text>\n";
  os << "<text transform=\"translate(" << num(ox + 16) << "," << num(0.5 * (top + bottom))
     << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(panel.y_label)
     << "</text>\n";

  for (const auto& s : panel.series) {
    std::vector<std::string> runs;
    std::string cur;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        if (!cur.empty()) runs.push_back(cur);
        cur.clear();
        continue;
      }
      const double yc = std::clamp(s.y[i], ylo, yhi);
      cur += (cur.empty() ? "" : " ") + num(px(s.x[i])) + "," + num(py(yc));
    }
    if (!cur.empty()) runs.push_back(cur);
    for (const auto& r : runs) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
         << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"" << r << "\"/>\n";
    }
  }
  double ly = top + 12;
  for (const auto& s : panel.series) {
    if (s.label.empty()) continue;
    os << "<line x1=\"" << num(right - 110) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
       << num(right - 90) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color
       << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>"
       << "<text x=\"" << num(right - 86) << "\" y=\"" << num(ly) << "\" font-size=\"10\">"
       << xml_escape(s.label) << "</text>\n";
    ly += 13;
  }
  os << "</g>\n";
}

std::string open_svg(double w, double h) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\""
     << num(h) << "\" viewBox=\"0 0 " << num(w) << " " << num(h) << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

std::vector<double> steps_axis(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
  return x;
}

void add_columns(const StoredTrajectoryColumns& c, bool dashed, const std::string& tag,
                 PlotPanel* forces, PlotPanel* probs) {
  const auto x = steps_axis(c.force.size());
  for (int b = 0; b < kNumBooms; ++b) {
    PlotSeries f{tag + "boom " + std::to_string(b), x, {}, kBoomColors[b], dashed};
    PlotSeries p{tag + "grasp " + std::to_string(b), x, {}, kBoomColors[b], dashed};
    for (std::size_t k = 0; k < c.force.size(); ++k) {
      f.y.push_back(c.force[k][b]);
      p.y.push_back(c.probability[k][b]);
    }
    forces->series.push_back(std::move(f));
    probs->series.push_back(std::move(p));
  }
  probs->series.push_back({tag + "joint", x, c.step_probability, "#000000", dashed});
}

}  // namespace

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::string render_panels_svg(std::span<const PlotPanel> panels, int panel_width,
                              int panel_height) {
  const double w = panel_width * std::max<std::size_t>(1, panels.size());
  std::ostringstream os;
  os << open_svg(w, panel_height);
  for (std::size_t i = 0; i < panels.size(); ++i) {
    draw_panel(os, panels[i], static_cast<double>(i * panel_width), 0.0, panel_width,
               panel_height);
  }
  os << "</svg>\n";
  return os.str();
}

std::string histogram_svg(const Histogram& h) {
  const double w = 560, ht = 340, left = 60, right = w - 20, top = 30, bottom = ht - 45;
  const std::size_t bins = h.edges.size() > 1 ? h.edges.size() - 1 : 0;
  int cmax = 1;
  for (const auto& [k, counts] : h.counts) {
    for (int c : counts) cmax = std::max(cmax, c);
  }
  std::ostringstream os;
  os << open_svg(w, ht);
  os << "<text x=\"" << num(0.5 * (left + right))
     << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">Plan success probability</text>\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(right - left)
     << "\" height=\"" << num(bottom - top) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  const double bw = bins ? (right - left) / bins : 0.0;
  const std::pair<PlannerKind, const char*> groups[] = {{PlannerKind::rbp, "#1f77b4"},
                                                        {PlannerKind::naive, "#ff7f0e"}};
  for (std::size_t b = 0; b < bins; ++b) {
    for (int g = 0; g < 2; ++g) {
      const auto it = h.counts.find(groups[g].first);
      const int c = it == h.counts.end() ? 0 : it->second[b];
      const double bh = (bottom - top) * c / cmax;
      os << "<rect x=\"" << num(left + b * bw + 2 + g * (bw - 4) / 2) << "\" y=\""
         << num(bottom - bh) << "\" width=\"" << num((bw - 4) / 2) << "\" height=\"" << num(bh)
         << "\" fill=\"" << groups[g].second << "\"/>\n";
    }
    os << "<text x=\"" << num(left + b * bw) << "\" y=\"" << num(bottom + 16)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(h.edges[b]) << "</text>\n";
  }
  if (bins) {
    os << "<text x=\"" << num(right) << "\" y=\"" << num(bottom + 16)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(h.edges[bins])
       << "</text>\n";
  }
  for (int t = 0; t <= cmax; t += std::max(1, cmax / 5)) {
    const double y = bottom - (bottom - top) * t / cmax;
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y + 3)
       << "\" text-anchor=\"end\" font-size=\"10\">" << t << "</text>\n";
  }
  os << "<text x=\"" << num(0.5 * (left + right)) << "\" y=\"" << num(bottom + 34)
     << "\" text-anchor=\"middle\" font-size=\"12\">success probability</text>\n";
  os << "<text transform=\"translate(16," << num(0.5 * (top + bottom))
     << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">plans</text>\n";
  for (int g = 0; g < 2; ++g) {
    const double y = top + 14 + 14 * g;
    os << "<rect x=\"" << num(left + 10) << "\" y=\"" << num(y - 9) << "\" width=\"10\" "
       << "height=\"10\" fill=\"" << groups[g].second << "\"/><text x=\"" << num(left + 24)
       << "\" y=\"" << num(y) << "\" font-size=\"10\">" << to_string(groups[g].first)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string trajectory_plot_svg(const StoredTrajectoryColumns& optimized,
                                const StoredTrajectoryColumns* seed) {
  PlotPanel forces{"Applied forces", "timestep", "tension [N]", {}, std::nullopt};
  PlotPanel probs{"Probability of success", "timestep", "probability", {}, std::nullopt};
  if (seed) add_columns(*seed, true, "seed ", &forces, &probs);
  add_columns(optimized, false, seed ? "opt " : "", &forces, &probs);
  double lo = 1.0;
  for (const auto& s : probs.series) {
    for (double v : s.y) {
      if (std::isfinite(v)) lo = std::min(lo, v);
    }
  }
  probs.y_range = std::make_pair(std::max(0.0, std::floor(lo * 100.0) / 100.0 - 0.01), 1.0);
  if (!(probs.y_range->first < 1.0)) probs.y_range->first = 0.99;
  const PlotPanel panels[] = {forces, probs};
  return render_panels_svg(panels);
}

std::string force_log_svg(const ForceLogAnalysis& a) {
  PlotPanel p{"Probability of grasp maintenance", "time [s]", "probability", {}, {{0.0, 1.0}}};
  for (int b = 0; b < kNumBooms; ++b) {
    PlotSeries s{"anchor " + std::to_string(b + 1), a.time, {}, kBoomColors[b], false};
    for (const auto& row : a.probability) s.y.push_back(row[b]);
    p.series.push_back(std::move(s));
  }
  const PlotPanel panels[] = {p};
  return render_panels_svg(panels);
}

}  // namespace stochgrasp
