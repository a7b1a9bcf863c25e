#pragma once

#include <cstddef>
#include <span>

namespace sigcpd {

/// Ordinary least squares y = intercept + slope * x with a two-sided t-test
/// of slope == 0 on n - 2 degrees of freedom.
struct LineFit {
  std::size_t n = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double p_value = 1.0;
};

/// Fewer than 3 points, constant x or constant y give slope 0 (when y is
/// constant) and p_value 1. A non-zero slope with zero residual variance has
/// p_value 0.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Running mean that returns the common value exactly for constant input.
double stable_mean(std::span<const double> values);

}  // namespace sigcpd
