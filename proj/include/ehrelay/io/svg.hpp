#pragma once

// Standalone SVG 1.1 line charts of sweep results: analytic values as a
// polyline, Monte Carlo estimates as circle markers.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ehrelay/errors.hpp"
#include "ehrelay/experiments.hpp"

namespace ehrelay::io {

struct SvgReport {
  bool degenerate_range = false;  // all y values equal; axis padded
  std::size_t points_dropped = 0;  // non-positive values on a log axis, or failed rows
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline std::string axis_label(const std::string& variable) {
  if (variable == "theta") return "energy harvesting ratio theta";
  if (variable == "snr1_db") return "first-hop average SNR (dB)";
  return variable;
}

}  // namespace detail

inline std::string render_svg(const experiments::SweepResult& result, bool log_y, SvgReport* report = nullptr) {
  if (result.rows.size() < 2) throw ValidationError("SVG rendering needs at least two sweep rows");
  SvgReport rep;

  auto transform = [log_y](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [log_y](double v) { return std::isfinite(v) && (!log_y || v > 0.0); };

  struct Pt {
    double x, y;
  };
  std::vector<Pt> line;
  std::vector<Pt> marks;
  for (const auto& row : result.rows) {
    if (!row.error && usable(row.analytic)) {
      line.push_back({row.x, transform(row.analytic)});
    } else {
      ++rep.points_dropped;
    }
    if (row.empirical) {
      if (usable(*row.empirical)) {
        marks.push_back({row.x, transform(*row.empirical)});
      } else {
        ++rep.points_dropped;
      }
    }
  }

  double x_min = result.rows.front().x;
  double x_max = result.rows.back().x;
  double y_min = 0.0;
  double y_max = 1.0;
  bool any = false;
  for (const auto* set : {&line, &marks}) {
    for (const auto& p : *set) {
      y_min = any ? std::min(y_min, p.y) : p.y;
      y_max = any ? std::max(y_max, p.y) : p.y;
      any = true;
    }
  }
  if (log_y) {
    y_min = std::floor(y_min);
    y_max = std::ceil(y_max);
  }
  if (!(y_max > y_min)) {
    rep.degenerate_range = true;
    const double pad = log_y ? 1.0 : std::max(0.05, std::abs(y_min) * 0.1);
    y_min -= pad;
    y_max += pad;
  }
  if (!(x_max > x_min)) x_max = x_min + 1.0;

  constexpr double width = 640, height = 440, left = 70, right = 20, top = 20, bottom = 60;
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };
  using detail::fmt;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
      << "<g font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double xv = x_min + (x_max - x_min) * i / kTicks;
    svg << "<line x1=\"" << fmt(sx(xv)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(sx(xv)) << "\" y2=\""
        << fmt(top + ph + 5) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fmt(sx(xv)) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">" << fmt(xv)
        << "</text>\n";
  }
  const int y_ticks = log_y ? static_cast<int>(std::lround(y_max - y_min)) : kTicks;
  for (int i = 0; i <= y_ticks; ++i) {
    const double yv = y_min + (y_max - y_min) * i / std::max(1, y_ticks);
    const std::string label = log_y ? "1e" + fmt(yv) : fmt(yv);
    svg << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(sy(yv)) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
        << fmt(sy(yv)) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(sy(yv) + 4) << "\" text-anchor=\"end\">" << label
        << "</text>\n";
  }
  svg << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(height - 15) << "\" text-anchor=\"middle\">"
      << detail::axis_label(result.variable_name) << "</text>\n"
      << "<text x=\"15\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
      << fmt(top + ph / 2) << ")\">" << (log_y ? "outage probability (log scale)" : "outage probability")
      << "</text>\n";

  if (!line.empty()) {
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < line.size(); ++i) {
      svg << (i ? " " : "") << fmt(sx(line[i].x)) << ',' << fmt(sy(line[i].y));
    }
    svg << "\"/>\n";
  }
  for (const auto& p : marks) {
    svg << "<circle cx=\"" << fmt(sx(p.x)) << "\" cy=\"" << fmt(sy(p.y))
        << "\" r=\"4\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
  }
  svg << "</g>\n</svg>\n";

  if (report) *report = rep;
  return svg.str();
}

inline SvgReport emit_svg(const experiments::SweepResult& result, const std::string& path, bool log_y) {
  SvgReport report;
  const std::string doc = render_svg(result, log_y, &report);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open SVG output '" + path + "'");
  out << doc;
  out.flush();
  if (!out) throw IoError("failed writing SVG output '" + path + "'");
  return report;
}

}  // namespace ehrelay::io
