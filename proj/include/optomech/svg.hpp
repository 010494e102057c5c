#pragma once

#include <string>
#include <vector>

namespace optomech::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool log_y = false;
};

// Panels stacked vertically. Non-finite points break the polyline.
std::string line_plot(const std::vector<Panel>& panels, int width = 720, int panel_height = 320);

// Row-major values (ny rows of nx), row 0 drawn at the bottom.
std::string heat_map(const std::string& title, int nx, int ny, const std::vector<double>& values,
                     int width = 720, int height = 360);

}  // namespace optomech::svg
