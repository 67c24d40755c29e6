#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qsir/core.hpp"
#include "qsir/io/csv.hpp"

namespace qsir::io {

struct Series {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  std::string color{"#1f77b4"};
  std::string dash;  // stroke-dasharray, empty for solid
};

struct PlotSpec {
  std::string title;
  std::string x_label{"t"};
  std::string y_label;
  std::vector<Series> series;
};

struct LabeledTrajectory {
  std::string label;
  const Trajectory* trajectory{nullptr};
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Range {
  double lo{std::numeric_limits<double>::infinity()};
  double hi{-std::numeric_limits<double>::infinity()};

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (lo == hi) {
      const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace detail

/// Self-contained SVG: linear axes with five ticks each, one polyline per
/// series (a marker per point when a series has a single point), legend and
/// title. Output depends only on the input.
inline std::string render_plot(const PlotSpec& spec) {
  constexpr double width = 800, height = 500;
  constexpr double left = 70, right = 190, top = 50, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;

  detail::Range rx, ry;
  for (const auto& s : spec.series) {
    for (double v : s.xs) rx.add(v);
    for (double v : s.ys) ry.add(v);
  }
  rx.settle();
  ry.settle();
  auto sx = [&](double v) { return left + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto sy = [&](double v) { return top + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

  using detail::num;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\">\n";
  out += "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(left + pw / 2) + "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + detail::escape(spec.title) + "</text>\n";
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
    const double fy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
    out += "<line x1=\"" + num(sx(fx)) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(sx(fx)) + "\" y2=\"" +
           num(top + ph + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(sx(fx)) + "\" y=\"" + num(top + ph + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + detail::tick(fx) + "</text>\n";
    out += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(sy(fy)) + "\" x2=\"" + num(left) + "\" y2=\"" +
           num(sy(fy)) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(left - 8) + "\" y=\"" + num(sy(fy) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + detail::tick(fy) + "</text>\n";
  }
  out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 15) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + detail::escape(spec.x_label) +
         "</text>\n";
  out += "<text x=\"18\" y=\"" + num(top + ph / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 " + num(top + ph / 2) + ")\">" + detail::escape(spec.y_label) +
         "</text>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const Series& s = spec.series[k];
    const std::size_t n = std::min(s.xs.size(), s.ys.size());
    const std::string dash = s.dash.empty() ? "" : " stroke-dasharray=\"" + s.dash + "\"";
    if (n == 1) {
      out += "<circle cx=\"" + num(sx(s.xs[0])) + "\" cy=\"" + num(sy(s.ys[0])) + "\" r=\"4\" fill=\"" + s.color +
             "\"/>\n";
    } else if (n > 1) {
      out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"" + dash + " points=\"";
      bool first = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
        if (!first) out += ' ';
        first = false;
        out += num(sx(s.xs[i])) + "," + num(sy(s.ys[i]));
      }
      out += "\"/>\n";
    }
    const double ly = top + 10 + 20.0 * static_cast<double>(k);
    const double lx = width - right + 15;
    out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 25) + "\" y2=\"" + num(ly) +
           "\" stroke=\"" + s.color + "\" stroke-width=\"2\"" + dash + "/>\n";
    out += "<text x=\"" + num(lx + 32) + "\" y=\"" + num(ly + 4) + "\" font-family=\"sans-serif\" font-size=\"12\">" +
           detail::escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

inline void write_plot(const PlotSpec& spec, const std::filesystem::path& path) {
  write_file_atomic(path, render_plot(spec));
}

/// Three series (x, y, z) per trajectory against time.
inline PlotSpec trajectory_plot(std::span<const LabeledTrajectory> trajs, std::string title) {
  static constexpr const char* kDashes[] = {"", "6,4", "2,3", "8,3,2,3"};
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c"};
  static constexpr const char* kNames[] = {"susceptible x", "infected y", "removed z"};
  if (trajs.empty()) throw ValidationError("nothing to plot");

  PlotSpec spec{std::move(title), "t", "fraction", {}};
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    const Trajectory* traj = trajs[k].trajectory;
    if (!traj || traj->empty()) throw ValidationError("cannot plot an empty trajectory");
    for (int c = 0; c < 3; ++c) {
      Series s;
      s.label = trajs[k].label.empty() ? kNames[c] : trajs[k].label + " " + kNames[c];
      s.color = kColors[c];
      s.dash = kDashes[k % 4];
      for (const auto& r : traj->records) {
        s.xs.push_back(r.t);
        s.ys.push_back(c == 0 ? r.state.x : c == 1 ? r.state.y : r.state.z);
      }
      spec.series.push_back(std::move(s));
    }
  }
  return spec;
}

inline void render_svg(std::span<const LabeledTrajectory> trajs, const std::filesystem::path& path,
                       std::string title = "Susceptible, infected and removed fractions") {
  write_plot(trajectory_plot(trajs, std::move(title)), path);
}

}  // namespace qsir::io
