#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sigcpd {

using Date = std::chrono::sys_days;

/// Strict YYYY-MM-DD; throws InvalidInput on anything else.
Date parse_iso_date(std::string_view text);
std::string format_iso_date(Date date);

/// Signed whole days from `from` to `to`.
inline std::int64_t days_between(Date from, Date to) { return (to - from).count(); }

enum class Metric { ctr, impressions, clicks, cost };

std::string_view metric_name(Metric metric) noexcept;
std::optional<Metric> parse_metric(std::string_view name) noexcept;

struct SeriesPoint {
  Date date;
  std::int64_t impressions = 0;
  std::int64_t clicks = 0;
  double ctr = 0.0;
  std::optional<double> cost;

  /// Validates counts (impressions > 0, 0 <= clicks <= impressions, cost >= 0)
  /// and derives ctr = clicks / impressions.
  static SeriesPoint make(Date date, std::int64_t impressions, std::int64_t clicks,
                          std::optional<double> cost = std::nullopt);

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

double metric_value(const SeriesPoint& point, Metric metric);

/// Dated observations with strictly increasing dates (gaps allowed).
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<SeriesPoint> points, Metric metric = Metric::ctr);

  std::span<const SeriesPoint> points() const noexcept { return points_; }
  const SeriesPoint& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const noexcept { return points_.size(); }

  Metric metric() const noexcept { return metric_; }
  TimeSeries with_metric(Metric metric) const;

  Date first_date() const { return points_.front().date; }
  Date last_date() const { return points_.back().date; }

  /// True when every observation carries a cost value.
  bool has_cost() const noexcept;

  std::vector<double> metric_values() const;
  /// Days since the first observation.
  std::vector<double> day_offsets() const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<SeriesPoint> points_;
  Metric metric_;
};

struct CsvReadResult {
  TimeSeries series;
  std::vector<std::string> warnings;
  std::size_t dropped_rows = 0;
};

/// Parses `date,impressions,clicks[,cost]`. Zero-impression rows are dropped
/// with a warning. Throws CsvError naming the offending line.
CsvReadResult read_series_csv(std::istream& in, Metric metric = Metric::ctr);
CsvReadResult read_series_csv(const std::filesystem::path& path, Metric metric = Metric::ctr);

/// Writes the same format; cost column only when every row has a cost.
void write_series_csv(std::ostream& out, const TimeSeries& series);

/// Shortest decimal text that round-trips the double.
std::string format_double(double value);

}  // namespace sigcpd
