#pragma once

#include <span>
#include <vector>

#include "sigcpd/series.hpp"
#include "sigcpd/signature.hpp"

namespace sigcpd {

/// Two adjacent, non-overlapping windows of w observations each. `boundary`
/// is the date of the first observation of `second`.
struct WindowPair {
  std::span<const SeriesPoint> first;
  std::span<const SeriesPoint> second;
  Date boundary;
};

/// All T - 2w + 1 stride-1 window pairs, in boundary order. Windows count
/// observations, not calendar days. The spans view `series`.
std::vector<WindowPair> window_pairs(const TimeSeries& series, int w);

/// Minimum series length for window size w.
inline std::size_t required_length(int w) { return 2 * static_cast<std::size_t>(w); }

/// Maps a window into the unit square: time by calendar-day offset over the
/// window span, metric by min-max scaling (constant windows map to y = 0.5).
NormalizedPath normalize_window(std::span<const SeriesPoint> window, Metric metric = Metric::ctr);

/// Same mapping on raw coordinates; `days` must be strictly increasing.
NormalizedPath normalize_values(std::span<const double> days, std::span<const double> values);

/// Increments of every normalized w-observation window of the series, laid out
/// segment-major for simd::batch_signatures: window j starts at observation j.
struct WindowIncrements {
  std::size_t n_windows = 0;
  std::size_t n_segments = 0;
  std::vector<double> dt;
  std::vector<double> dy;
};

WindowIncrements sliding_window_increments(std::span<const double> days, std::span<const double> values, int w);

}  // namespace sigcpd
