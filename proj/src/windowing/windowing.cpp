#include "sigcpd/windowing.hpp"

#include <algorithm>
#include <string>

#include "sigcpd/error.hpp"

namespace sigcpd {
namespace {

void check_window_size(int w) {
  if (w < 2) throw InvalidInput("window size must be >= 2, got " + std::to_string(w));
}

// Writes the normalized coordinates of one window into t_out / y_out.
void normalize_into(std::span<const double> days, std::span<const double> values, double* t_out, double* y_out) {
  const std::size_t n = days.size();
  const double t0 = days.front();
  const double span = days.back() - t0;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  for (std::size_t i = 0; i < n; ++i) {
    t_out[i] = (days[i] - t0) / span;
    y_out[i] = range > 0.0 ? (values[i] - lo) / range : 0.5;
  }
}

}  // namespace

std::vector<WindowPair> window_pairs(const TimeSeries& series, int w) {
  check_window_size(w);
  const std::size_t need = required_length(w);
  if (series.size() < need)
    throw InsufficientData("series has " + std::to_string(series.size()) + " observations; window size " +
                               std::to_string(w) + " needs at least " + std::to_string(need),
                           need, series.size());
  const auto pts = series.points();
  const std::size_t uw = static_cast<std::size_t>(w);
  std::vector<WindowPair> pairs;
  pairs.reserve(series.size() - need + 1);
  for (std::size_t i = 0; i + need <= series.size(); ++i)
    pairs.push_back(WindowPair{pts.subspan(i, uw), pts.subspan(i + uw, uw), pts[i + uw].date});
  return pairs;
}

NormalizedPath normalize_values(std::span<const double> days, std::span<const double> values) {
  if (days.size() != values.size()) throw ShapeError("days and values differ in length");
  if (days.size() < 2) throw InsufficientData("window needs at least 2 observations", 2, days.size());
  for (std::size_t i = 1; i < days.size(); ++i)
    if (!(days[i] > days[i - 1])) throw InvalidInput("window days must be strictly increasing");
  std::vector<double> t(days.size()), y(days.size());
  normalize_into(days, values, t.data(), y.data());
  std::vector<PathPoint> points(days.size());
  for (std::size_t i = 0; i < days.size(); ++i) points[i] = PathPoint{t[i], y[i]};
  return NormalizedPath(std::move(points));
}

NormalizedPath normalize_window(std::span<const SeriesPoint> window, Metric metric) {
  if (window.size() < 2) throw InsufficientData("window needs at least 2 observations", 2, window.size());
  std::vector<double> days, values;
  days.reserve(window.size());
  values.reserve(window.size());
  for (const auto& p : window) {
    days.push_back(static_cast<double>(days_between(window.front().date, p.date)));
    values.push_back(metric_value(p, metric));
  }
  return normalize_values(days, values);
}

WindowIncrements sliding_window_increments(std::span<const double> days, std::span<const double> values, int w) {
  check_window_size(w);
  if (days.size() != values.size()) throw ShapeError("days and values differ in length");
  const std::size_t uw = static_cast<std::size_t>(w);
  if (days.size() < uw) throw InsufficientData("series shorter than one window", uw, days.size());

  WindowIncrements inc;
  inc.n_windows = days.size() - uw + 1;
  inc.n_segments = uw - 1;
  inc.dt.resize(inc.n_windows * inc.n_segments);
  inc.dy.resize(inc.n_windows * inc.n_segments);

  std::vector<double> t(uw), y(uw);
  for (std::size_t j = 0; j < inc.n_windows; ++j) {
    normalize_into(days.subspan(j, uw), values.subspan(j, uw), t.data(), y.data());
    for (std::size_t s = 0; s < inc.n_segments; ++s) {
      inc.dt[s * inc.n_windows + j] = t[s + 1] - t[s];
      inc.dy[s * inc.n_windows + j] = y[s + 1] - y[s];
    }
  }
  return inc;
}

}  // namespace sigcpd
