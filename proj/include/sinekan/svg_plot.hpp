#pragma once

#include <string>
#include <vector>

namespace sinekan {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// One panel of a line chart. Non-positive or non-finite values are
/// dropped on log axes.
struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = true;
  std::vector<Series> series;
};

/// Renders the panels side by side into a standalone SVG document. The
/// output depends only on the chart contents.
std::string render_svg(const std::vector<LineChart>& panels);

}  // namespace sinekan
