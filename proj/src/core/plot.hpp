// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "report.hpp"

namespace vf::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct AxisOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
};

/// All writers emit fixed-canvas standalone SVG with plain text labels and no
/// timestamps: identical inputs yield byte-identical files.
void write_lines(const std::filesystem::path& path, const AxisOptions& axes,
                 const std::vector<Series>& series, bool markers = false);
void write_scatter(const std::filesystem::path& path, const AxisOptions& axes,
                   const std::vector<Series>& series);
void write_boxes(const std::filesystem::path& path, const AxisOptions& axes,
                 const std::vector<std::string>& group_labels,
                 const std::vector<std::vector<double>>& groups);

struct EmitResult {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

/// Renders every plot-typed table of the report (curves./trend. as lines,
/// scatter. as points, box. as grouped box plots) into `dir`. Empty tables
/// produce a warning instead of a file.
EmitResult emit_plots(const Report& report, const std::filesystem::path& dir);

}  // namespace vf::plot
