#pragma once

#include <vector>

#include "sigcpd/series.hpp"

namespace sigcpd::baselines {

/// Days on which the trailing short moving average of the metric falls from
/// >= the long one to < it. Averages count observations.
std::vector<Date> ma_crossover(const TimeSeries& series, int short_w, int long_w);

struct CusumConfig {
  double k_ref = 0.5;
  double h = 5.0;
  /// Capped at half the series length.
  int burn_in = 14;
};

/// Two-sided CUSUM on the metric standardized by the burn-in mean and sample
/// standard deviation. Both sums reset after each flag. A zero-variance
/// burn-in followed by any different value throws DegenerateInput; a fully
/// constant series yields no flags.
std::vector<Date> cusum(const TimeSeries& series, const CusumConfig& cfg = {});

/// Flags the last day of each trailing w-observation window whose OLS slope
/// is significantly negative while the previous window's was not.
std::vector<Date> rolling_regression(const TimeSeries& series, int w, double alpha = 0.05);

}  // namespace sigcpd::baselines
