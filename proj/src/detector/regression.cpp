#include "sigcpd/regression.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "sigcpd/error.hpp"

namespace sigcpd {

double stable_mean(std::span<const double> values) {
  double mean = 0.0;
  std::size_t i = 0;
  for (double v : values) {
    ++i;
    mean += (v - mean) / static_cast<double>(i);
  }
  return mean;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("fit_line: x and y differ in length");
  LineFit fit;
  fit.n = x.size();
  if (fit.n == 0) return fit;

  const double x_mean = stable_mean(x);
  const double y_mean = stable_mean(y);
  fit.intercept = y_mean;
  const auto [y_lo, y_hi] = std::minmax_element(y.begin(), y.end());
  if (fit.n < 3 || *y_lo == *y_hi) return fit;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    const double dx = x[i] - x_mean;
    const double dy = y[i] - y_mean;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) return fit;

  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;

  double ssr = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += r * r;
  }
  const double dof = static_cast<double>(fit.n - 2);
  fit.slope_se = std::sqrt(ssr / dof / sxx);

  // Residuals at rounding level of the data: treat as an exact line.
  if (ssr <= syy * 1e-24 || fit.slope_se == 0.0) {
    fit.p_value = fit.slope == 0.0 ? 1.0 : 0.0;
    return fit;
  }
  const double t = fit.slope / fit.slope_se;
  const boost::math::students_t dist(dof);
  fit.p_value = std::clamp(2.0 * boost::math::cdf(dist, -std::abs(t)), 0.0, 1.0);
  return fit;
}

}  // namespace sigcpd
