#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bnet/csv.hpp"

namespace bnet {

struct Series {
  std::string label;
  std::vector<double> times;
  std::vector<double> values;
};

struct PlotLabels {
  std::string title;
  std::string x_axis = "t";
  std::string y_axis;
};

/// Standalone 800x500 SVG 1.1 line plot: axes fitted to the data with a 5%
/// margin, one polyline and one legend entry per series. Output depends only
/// on the input. Throws std::invalid_argument on empty or ragged series.
std::string render_svg(const std::vector<Series>& series, const PlotLabels& labels = {});

/// render_svg to a file; throws IoError on write failure.
void emit_svg(const std::vector<Series>& series, const std::filesystem::path& path,
              const PlotLabels& labels = {});

}  // namespace bnet
