#include "sinekan/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace sinekan {

namespace {

constexpr double kPanelW = 480.0;
constexpr double kPanelH = 360.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;
constexpr double kLegendW = 170.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0;
  double hi = 1.0;

  double map(double v) const {
    const double t = log ? std::log10(v) : v;
    return (t - lo) / (hi - lo);
  }
  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::ceil(lo - 1e-9); e <= hi + 1e-9; e += 1.0) out.push_back(std::pow(10.0, e));
      return out;
    }
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (raw <= m * mag) {
        step = m * mag;
        break;
      }
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) out.push_back(v);
    return out;
  }
};

bool point_usable(const LineChart& chart, double x, double y) {
  const auto ok = [](double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); };
  return ok(x, chart.log_x) && ok(y, chart.log_y);
}

Axis fit_axis(const LineChart& chart, bool is_x) {
  Axis a;
  a.log = is_x ? chart.log_x : chart.log_y;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : chart.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!point_usable(chart, s.x[i], s.y[i])) continue;
      const double v = is_x ? s.x[i] : s.y[i];
      const double t = a.log ? std::log10(v) : v;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (a.log) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi <= lo) hi = lo + 1.0;
  } else {
    const double pad = hi > lo ? 0.05 * (hi - lo) : std::max(1.0, std::abs(lo) * 0.1);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

void render_panel(std::ostringstream& out, const LineChart& chart, double ox) {
  const Axis ax = fit_axis(chart, true);
  const Axis ay = fit_axis(chart, false);
  const double pw = kPanelW - kLeft - kRight;
  const double ph = kPanelH - kTop - kBottom;
  auto px = [&](double v) { return ox + kLeft + ax.map(v) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - ay.map(v)) * ph; };

  out << "<g>\n";
  out << "<text x=\"" << fmt(ox + kPanelW / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(chart.title) << "</text>\n";
  out << "<rect x=\"" << fmt(ox + kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (double t : ax.ticks()) {
    const double x = px(t);
    out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(x) << "\" y2=\""
        << fmt(kTop + ph) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + ph + 16) << "\" text-anchor=\"middle\" font-size=\"11\">"
        << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = py(t);
    out << "<line x1=\"" << fmt(ox + kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(ox + kLeft + pw)
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << fmt(ox + kLeft - 6) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
        << tick_label(t) << "</text>\n";
  }
  out << "<text x=\"" << fmt(ox + kLeft + pw / 2) << "\" y=\"" << fmt(kPanelH - 12)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(chart.x_label) << "</text>\n";
  out << "<text transform=\"translate(" << fmt(ox + 16) << "," << fmt(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t si = 0; si < chart.series.size(); ++si) {
    const Series& s = chart.series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (point_usable(chart, s.x[i], s.y[i])) pts.emplace_back(px(s.x[i]), py(s.y[i]));
    }
    if (pts.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      out << (i ? " " : "") << fmt(pts[i].first) << "," << fmt(pts[i].second);
    }
    out << "\"/>\n";
    for (const auto& [x, y] : pts) {
      out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
  }
  out << "</g>\n";
}

}  // namespace

std::string render_svg(const std::vector<LineChart>& panels) {
  std::ostringstream out;
  // Legend entries from the first panel; panels share series labels.
  const std::size_t n_series = panels.empty() ? 0 : panels.front().series.size();
  const double width = kPanelW * std::max<std::size_t>(panels.size(), 1) + kLegendW;
  const double height = std::max(kPanelH, 40.0 + 20.0 * static_cast<double>(n_series));
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
      << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) render_panel(out, panels[p], kPanelW * static_cast<double>(p));
  const double lx = kPanelW * static_cast<double>(panels.size()) + 10.0;
  for (std::size_t si = 0; si < n_series; ++si) {
    const double y = kTop + 20.0 * static_cast<double>(si);
    const char* color = kPalette[si % std::size(kPalette)];
    out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(lx + 20) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(lx + 26) << "\" y=\"" << fmt(y + 4) << "\" font-size=\"11\">"
        << escape(panels.front().series[si].label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace sinekan
