#include "optomech/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "optomech/errors.hpp"

namespace optomech::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

void draw_panel(std::ostringstream& os, const Panel& p, double top, int width, int height) {
  const double left = 80.0;
  const double right = width - 150.0;
  const double y0 = top + 30.0;
  const double y1 = top + height - 45.0;

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& s : p.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      double y = s.y[i];
      if (!std::isfinite(s.x[i]) || !std::isfinite(y) || (p.log_y && y <= 0.0)) continue;
      if (p.log_y) y = std::log10(y);
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
  auto py = [&](double y) { return y1 - (y - ymin) / (ymax - ymin) * (y1 - y0); };

  os << "<text x=\"" << num(left) << "\" y=\"" << num(top + 18) << "\" font-size=\"14\">"
     << escape(p.title) << "</text>\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(y0) << "\" width=\"" << num(right - left)
     << "\" height=\"" << num(y1 - y0) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = xmin + (xmax - xmin) * k / 4.0;
    const double fy = ymin + (ymax - ymin) * k / 4.0;
    os << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(y1 + 16)
       << "\" font-size=\"10\" text-anchor=\"middle\">" << tick(fx) << "</text>\n";
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(fy) + 3)
       << "\" font-size=\"10\" text-anchor=\"end\">" << tick(p.log_y ? std::pow(10.0, fy) : fy)
       << "</text>\n";
  }
  os << "<text x=\"" << num(0.5 * (left + right)) << "\" y=\"" << num(y1 + 34)
     << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(p.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << num(0.5 * (y0 + y1)) << "\" font-size=\"12\" "
     << "text-anchor=\"middle\" transform=\"rotate(-90 16 " << num(0.5 * (y0 + y1)) << ")\">"
     << escape(p.y_label) << "</text>\n";

  for (std::size_t si = 0; si < p.series.size(); ++si) {
    const auto& s = p.series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    std::string path;
    bool pen_down = false;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      double y = s.y[i];
      const bool ok = std::isfinite(s.x[i]) && std::isfinite(y) && !(p.log_y && y <= 0.0);
      if (!ok) {
        pen_down = false;
        continue;
      }
      if (p.log_y) y = std::log10(y);
      path += (pen_down ? " L" : " M") + num(px(s.x[i])) + " " + num(py(y));
      pen_down = true;
    }
    os << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\"/>\n";
    const double ly = y0 + 14.0 + 16.0 * static_cast<double>(si);
    os << "<line x1=\"" << num(right + 10) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
       << num(right + 30) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(right + 34) << "\" y=\"" << num(ly) << "\" font-size=\"11\">"
       << escape(s.label) << "</text>\n";
  }
}

}  // namespace

std::string line_plot(const std::vector<Panel>& panels, int width, int panel_height) {
  const int height = panel_height * static_cast<int>(std::max<std::size_t>(1, panels.size()));
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    draw_panel(os, panels[i], static_cast<double>(i) * panel_height, width, panel_height);
  }
  os << "</svg>\n";
  return os.str();
}

std::string heat_map(const std::string& title, int nx, int ny, const std::vector<double>& values,
                     int width, int height) {
  require(nx > 0 && ny > 0 && values.size() == static_cast<std::size_t>(nx) * ny,
          ErrorCode::InvalidArgument, "heat map dimensions do not match the data");
  double vmax = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) vmax = std::max(vmax, v);
  }
  if (vmax <= 0.0) vmax = 1.0;
  const double left = 40.0;
  const double top = 30.0;
  const double cw = (width - 2 * left) / nx;
  const double ch = (height - top - 20.0) / ny;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(left) << "\" y=\"20\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double v = values[static_cast<std::size_t>(j) * nx + i];
      const double t = std::isfinite(v) ? std::clamp(v / vmax, 0.0, 1.0) : 0.0;
      // black -> red -> yellow -> white
      const int r = static_cast<int>(255 * std::min(1.0, 3.0 * t));
      const int g = static_cast<int>(255 * std::clamp(3.0 * t - 1.0, 0.0, 1.0));
      const int b = static_cast<int>(255 * std::clamp(3.0 * t - 2.0, 0.0, 1.0));
      char color[8];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", r, g, b);
      os << "<rect x=\"" << num(left + i * cw) << "\" y=\"" << num(top + (ny - 1 - j) * ch)
         << "\" width=\"" << num(cw + 0.5) << "\" height=\"" << num(ch + 0.5) << "\" fill=\""
         << color << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace optomech::svg
