#include "bilip/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bilip {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
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
      default: out += c;
    }
  }
  return out;
}

std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    ticks.push_back(std::fabs(t) < 1e-12 * step ? 0.0 : t);
  }
  return ticks;
}

}  // namespace

std::string render_svg(const SvgPlot& plot) {
  const double left = 80, right = 190, top = 40, bottom = 60;
  const double pw = plot.width - left - right;
  const double ph = plot.height - top - bottom;

  const auto tx = [&](double x) { return plot.log_x ? std::log10(x) : x; };
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (plot.log_x && !(s.x[i] > 0.0)) continue;
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const auto px = [&](double x) { return left + (tx(x) - xmin) / (xmax - xmin) * pw; };
  const auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\""
    << plot.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt("%.1f", left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(plot.title) << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << fmt("%.1f", pw) << "\" height=\""
    << fmt("%.1f", ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  // x ticks
  std::vector<double> xt;
  if (plot.log_x) {
    for (double e = std::ceil(xmin); e <= xmax + 1e-9; e += 1.0) xt.push_back(std::pow(10.0, e));
  } else {
    xt = linear_ticks(xmin, xmax);
  }
  for (double t : xt) {
    const double x = px(t);
    o << "<line x1=\"" << fmt("%.2f", x) << "\" y1=\"" << fmt("%.2f", top + ph) << "\" x2=\""
      << fmt("%.2f", x) << "\" y2=\"" << fmt("%.2f", top + ph + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt("%.2f", x) << "\" y=\"" << fmt("%.2f", top + ph + 18)
      << "\" text-anchor=\"middle\">" << fmt("%g", t) << "</text>\n";
  }
  for (double t : linear_ticks(ymin, ymax)) {
    const double y = py(t);
    o << "<line x1=\"" << fmt("%.2f", left - 5) << "\" y1=\"" << fmt("%.2f", y) << "\" x2=\""
      << fmt("%.2f", left) << "\" y2=\"" << fmt("%.2f", y) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt("%.2f", left - 8) << "\" y=\"" << fmt("%.2f", y + 4)
      << "\" text-anchor=\"end\">" << fmt("%g", t) << "</text>\n";
  }
  o << "<text x=\"" << fmt("%.1f", left + pw / 2) << "\" y=\"" << plot.height - 15
    << "\" text-anchor=\"middle\">" << escape(plot.x_label) << "</text>\n";
  o << "<text x=\"20\" y=\"" << fmt("%.1f", top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
    << fmt("%.1f", top + ph / 2) << ")\">" << escape(plot.y_label) << "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (plot.log_x && !(s.x[i] > 0.0)) continue;
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      o << (first ? "" : " ") << fmt("%.2f", px(s.x[i])) << "," << fmt("%.2f", py(s.y[i]));
      first = false;
    }
    o << "\"/>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << fmt("%.1f", left + pw + 15) << "\" y1=\"" << fmt("%.1f", ly) << "\" x2=\""
      << fmt("%.1f", left + pw + 40) << "\" y2=\"" << fmt("%.1f", ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << fmt("%.1f", left + pw + 46) << "\" y=\"" << fmt("%.1f", ly + 4) << "\">"
      << escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg_file(const std::string& path, const SvgPlot& plot) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << render_svg(plot);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace bilip
