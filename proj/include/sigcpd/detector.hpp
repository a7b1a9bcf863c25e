#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigcpd/series.hpp"

namespace sigcpd {

enum class FeatureMode { full_signature, log_signature };

std::string_view feature_mode_name(FeatureMode mode) noexcept;
std::optional<FeatureMode> parse_feature_mode(std::string_view name) noexcept;

struct DetectorConfig {
  int window = 14;
  int depth = 3;
  double k = 2.0;
  double alpha = 0.05;
  /// Suppression radius in days around each retained peak; unset means
  /// 2 * (window - 1), the width of the response to a single step.
  std::optional<int> merge_gap;
  /// false reports every exceedance as its own change point.
  bool merge = true;
  FeatureMode feature_mode = FeatureMode::full_signature;

  int effective_merge_gap() const noexcept { return merge_gap.value_or(2 * (window - 1)); }
  std::vector<std::string> violations() const;
  /// Throws ValidationError listing every violated constraint.
  void validate() const;
};

struct DistancePoint {
  Date boundary_date;
  double distance = 0.0;
};

/// `distance` is the largest distance in the merged group, found at
/// `peak_date`; `date` is the centre of the group's span.
struct ChangePoint {
  Date date;
  double distance = 0.0;
  double threshold = 0.0;
  Date peak_date;
};

enum class Trend { improving, declining, stable };

std::string_view trend_name(Trend trend) noexcept;

struct TrendFit {
  Trend trend = Trend::stable;
  double slope = 0.0;
  double p_value = 1.0;
};

/// A contiguous piece of the series date span. [begin, end) indexes the
/// observations that fall inside it.
struct SegmentSpan {
  Date start_date;
  Date end_date;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Segment {
  Date start_date;
  Date end_date;
  Trend trend = Trend::stable;
  double slope = 0.0;
  double p_value = 1.0;
  double mean_metric = 0.0;
  std::size_t n_points = 0;
};

struct ChangePointReport {
  DetectorConfig config;
  Metric metric = Metric::ctr;
  std::vector<DistancePoint> distances;
  double mu_d = 0.0;
  double sigma_d = 0.0;
  double threshold = 0.0;
  /// Boundary dates whose distance exceeds the threshold, before merging.
  std::vector<Date> flagged;
  std::vector<ChangePoint> change_points;
  std::vector<Segment> segments;
};

/// Signature distance between every adjacent window pair. Throws
/// InsufficientData (naming the minimum length) when T < 2w.
std::vector<DistancePoint> distance_series(const TimeSeries& series, const DetectorConfig& cfg);

/// Full pipeline: distances, global threshold mu + k sigma (population
/// sigma), strict exceedance flags, merging, segmentation and trend labels.
ChangePointReport detect(const TimeSeries& series, const DetectorConfig& cfg);

/// Exceedances are visited by decreasing distance (earlier date first on
/// ties). Each joins the first retained group whose peak lies within
/// effective_merge_gap() days, otherwise it starts a new group. A group is
/// reported at the boundary date nearest the midpoint of its earliest and
/// latest members (earlier on ties). Output is sorted by date; groups that
/// land on the same date are fused.
std::vector<ChangePoint> merge_exceedances(std::span<const DistancePoint> distances, double threshold,
                                           const DetectorConfig& cfg);

/// OLS of the values on day offsets; stable unless p < alpha. Fewer than
/// 3 points are stable with p_value 1.
TrendFit classify_trend(std::span<const double> day_offsets, std::span<const double> values, double alpha);

/// Splits the date span at each change date (each starts a new segment).
/// Throws InvalidInput for dates outside the span or not strictly increasing.
std::vector<SegmentSpan> segment_series(const TimeSeries& series, std::span<const Date> change_dates);

/// Trend-labelled segments for the given change dates.
std::vector<Segment> classify_segments(const TimeSeries& series, std::span<const Date> change_dates, double alpha);

}  // namespace sigcpd
