#pragma once

#include <string>
#include <vector>

namespace entnet {

// Minimal native PNG rendering of a log-log error plot (no external process).
// One polyline per series; axes drawn as a plain frame.
struct PlotSeries {
  std::vector<double> x, y;
  unsigned char r = 30, g = 60, b = 180;
};

void write_loglog_png(const std::string& path, const std::vector<PlotSeries>& series,
                      int width = 640, int height = 480);

}  // namespace entnet
