#include "sigcpd/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sigcpd/error.hpp"
#include "sigcpd/regression.hpp"

namespace sigcpd::baselines {

std::vector<Date> ma_crossover(const TimeSeries& series, int short_w, int long_w) {
  if (short_w < 1 || short_w >= long_w) throw InvalidInput("ma_crossover requires 1 <= short_w < long_w");
  const auto lw = static_cast<std::size_t>(long_w);
  const auto sw = static_cast<std::size_t>(short_w);
  if (series.size() < lw + 1)
    throw InsufficientData("ma_crossover needs at least " + std::to_string(lw + 1) + " observations", lw + 1,
                           series.size());
  const auto v = series.metric_values();
  const std::span<const double> all(v);
  std::vector<Date> out;
  bool prev_above = stable_mean(all.subspan(lw - sw, sw)) >= stable_mean(all.subspan(0, lw));
  for (std::size_t i = lw; i < v.size(); ++i) {
    const double s = stable_mean(all.subspan(i + 1 - sw, sw));
    const double l = stable_mean(all.subspan(i + 1 - lw, lw));
    const bool above = s >= l;
    if (prev_above && !above) out.push_back(series[i].date);
    prev_above = above;
  }
  return out;
}

std::vector<Date> cusum(const TimeSeries& series, const CusumConfig& cfg) {
  if (!(cfg.h > 0.0)) throw InvalidInput("cusum requires h > 0");
  if (!(cfg.k_ref >= 0.0)) throw InvalidInput("cusum requires k_ref >= 0");
  if (cfg.burn_in < 2) throw InvalidInput("cusum requires burn_in >= 2");
  if (series.size() < 10) throw InsufficientData("cusum needs at least 10 observations", 10, series.size());

  const auto v = series.metric_values();
  const std::size_t burn = std::min(static_cast<std::size_t>(cfg.burn_in), v.size() / 2);
  const std::span<const double> prefix(v.data(), burn);
  const double mu = stable_mean(prefix);
  double ss = 0.0;
  for (double x : prefix) ss += (x - mu) * (x - mu);
  const double sd = std::sqrt(ss / static_cast<double>(burn - 1));

  std::vector<Date> out;
  if (sd == 0.0) {
    if (std::all_of(v.begin(), v.end(), [&](double x) { return x == mu; })) return out;
    throw DegenerateInput("cusum burn-in has zero variance; cannot standardize the series");
  }
  double hi = 0.0, lo = 0.0;
  for (std::size_t i = burn; i < v.size(); ++i) {
    const double z = (v[i] - mu) / sd;
    hi = std::max(0.0, hi + z - cfg.k_ref);
    lo = std::max(0.0, lo - z - cfg.k_ref);
    if (hi > cfg.h || lo > cfg.h) {
      out.push_back(series[i].date);
      hi = lo = 0.0;
    }
  }
  return out;
}

std::vector<Date> rolling_regression(const TimeSeries& series, int w, double alpha) {
  if (w < 3) throw InvalidInput("rolling_regression requires w >= 3");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  const auto uw = static_cast<std::size_t>(w);
  const auto x = series.day_offsets();
  const auto y = series.metric_values();
  std::vector<Date> out;
  bool prev_sig = false;
  for (std::size_t end = uw; end <= y.size(); ++end) {
    const LineFit fit = fit_line(std::span<const double>(x).subspan(end - uw, uw),
                                 std::span<const double>(y).subspan(end - uw, uw));
    const bool sig = fit.p_value < alpha && fit.slope < 0.0;
    if (sig && !prev_sig) out.push_back(series[end - 1].date);
    prev_sig = sig;
  }
  return out;
}

}  // namespace sigcpd::baselines
