// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace vf {

/// Linear-interpolation quantile (numpy default); q in [0, 1]. NaN inputs are
/// removed first; an all-NaN or empty sample yields NaN.
double quantile(std::span<const double> values, double q);
double median(std::span<const double> values);
double interquartile_range(std::span<const double> values);

/// Spearman rank correlation with average ranks for ties. Pairs where either
/// coordinate is NaN are dropped; returns NaN for fewer than two usable pairs.
double spearman(std::span<const double> x, std::span<const double> y);

/// Five-number summary plus 1.5*IQR outliers for box plots.
struct BoxStats {
  double whisker_low;
  double q1;
  double median;
  double q3;
  double whisker_high;
  std::vector<double> outliers;
};
BoxStats box_stats(std::span<const double> values);

}  // namespace vf
