#pragma once

// Minimal standalone SVG line plots.

#include <string>
#include <vector>

namespace bilip {

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  /// Points with x <= 0 are dropped on a log axis.
  bool log_x = false;
  int width = 800;
  int height = 500;
  std::vector<SvgSeries> series;
};

/// Deterministic output: identical plots render to identical bytes.
std::string render_svg(const SvgPlot& plot);
void write_svg_file(const std::string& path, const SvgPlot& plot);

}  // namespace bilip
