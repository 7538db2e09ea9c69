// Minimal static SVG line plots; no timestamps, byte-deterministic output.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace powalloc {

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  int width = 640;
  int height = 420;
};

void write_svg_plot(std::ostream& os, const PlotSpec& spec);

}  // namespace powalloc
