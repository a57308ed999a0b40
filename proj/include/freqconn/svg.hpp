#pragma once

#include "freqconn/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace freqconn::svg {

struct Line {
  std::string label;
  std::vector<std::optional<double>> values; // nullopt breaks the line
  std::optional<std::vector<std::optional<double>>> lower;
  std::optional<std::vector<std::optional<double>>> upper;
};

struct LineChart {
  std::string title;
  std::vector<std::string> x_labels; // one per observation
  std::vector<Line> lines;
  double width = 900;
  double height = 360;
};

/// Standalone SVG document. Values are plotted on a shared y axis.
std::string render(const LineChart& chart);

/// Heatmap of a matrix. Cells print their value when there are few columns;
/// NaN cells are drawn grey.
std::string heatmap(const std::string& title, const Matrix& values, const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels);

std::string escape(const std::string& text);

} // namespace freqconn::svg
