#pragma once

#include <string>
#include <vector>

namespace fairal {

/// One plotted series: points (x[i], mean[i]) with a shaded band of
/// +-band[i] around the mean. band may be empty (no band) or match x.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> band;
};

/// Self-contained line chart (no external assets). Axis ranges cover the
/// data, bands included, with a 5% margin; a single-point series renders as
/// a marker without a polyline. Throws IoError when the file cannot be
/// written and ShapeError on inconsistent series lengths.
void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<PlotSeries>& series);

}  // namespace fairal
