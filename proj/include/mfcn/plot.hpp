#pragma once

#include <string>
#include <vector>

namespace mfcn {

/// One experiment's trace: medians with a 25-75% band over an n grid.
struct PlotSeries {
  std::string label;
  std::vector<double> x;       // sample sizes
  std::vector<double> median;
  std::vector<double> q25;
  std::vector<double> q75;
};

/// Log-log line chart: per series one band polygon and one median polyline.
std::string svg_loglog_chart(const std::vector<PlotSeries>& series, const std::string& title,
                             const std::string& x_label, const std::string& y_label);

}  // namespace mfcn
