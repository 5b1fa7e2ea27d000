#include "whitham/fitting.hpp"

#include <cmath>
#include <string>

#include "whitham/errors.hpp"

namespace whitham {

SlopeFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("linear_fit: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw InsufficientDataError("linear_fit: need at least two points");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InsufficientDataError("linear_fit: degenerate abscissae");

  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ssr += r * r;
    }
    fit.halfwidth = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

SlopeFit fit_loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) {
    throw InsufficientDataError("fit_loglog_slope: need at least three points");
  }
  std::vector<double> lx, ly;
  lx.reserve(points.size());
  ly.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [x, y] = points[i];
    if (!(x > 0.0)) throw ConfigError("fit_loglog_slope: x must be positive");
    if (i > 0 && !(x > points[i - 1].first)) {
      throw ConfigError("fit_loglog_slope: x must be strictly increasing");
    }
    if (!(y > 0.0)) {
      throw ConfigError("fit_loglog_slope: nonpositive y at x = " + std::to_string(x));
    }
    lx.push_back(std::log(x));
    ly.push_back(std::log(y));
  }
  return linear_fit(lx, ly);
}

}  // namespace whitham
