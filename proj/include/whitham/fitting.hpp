#pragma once

#include <span>
#include <utility>
#include <vector>

namespace whitham {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Standard error of the slope.
  double halfwidth = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
SlopeFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Least-squares slope of log y against log x. Requires at least three
/// points, strictly increasing positive x and positive y; a nonpositive y
/// usually means a decay has reached the numerical floor and must be pruned
/// by the caller.
SlopeFit fit_loglog_slope(std::span<const std::pair<double, double>> points);

}  // namespace whitham
