#include "sigcpd/series.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "sigcpd/error.hpp"

namespace sigcpd {
namespace {

bool parse_digits(std::string_view text, int& value) {
  if (text.empty()) return false;
  for (char c : text)
    if (c < '0' || c > '9') return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

Date parse_iso_date(std::string_view text) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_digits(text.substr(0, 4), y) ||
      !parse_digits(text.substr(5, 2), m) || !parse_digits(text.substr(8, 2), d)) {
    throw InvalidInput("invalid ISO-8601 date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw InvalidInput("invalid calendar date '" + std::string(text) + "'");
  return Date{ymd};
}

std::string format_iso_date(Date date) {
  const std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string_view metric_name(Metric metric) noexcept {
  switch (metric) {
    case Metric::ctr: return "ctr";
    case Metric::impressions: return "impressions";
    case Metric::clicks: return "clicks";
    case Metric::cost: return "cost";
  }
  return "ctr";
}

std::optional<Metric> parse_metric(std::string_view name) noexcept {
  if (name == "ctr") return Metric::ctr;
  if (name == "impressions") return Metric::impressions;
  if (name == "clicks") return Metric::clicks;
  if (name == "cost") return Metric::cost;
  return std::nullopt;
}

SeriesPoint SeriesPoint::make(Date date, std::int64_t impressions, std::int64_t clicks, std::optional<double> cost) {
  if (impressions <= 0) throw InvalidInput("impressions must be positive");
  if (clicks < 0 || clicks > impressions) throw InvalidInput("clicks must lie in [0, impressions]");
  if (cost && !(std::isfinite(*cost) && *cost >= 0.0)) throw InvalidInput("cost must be a finite nonnegative amount");
  SeriesPoint p;
  p.date = date;
  p.impressions = impressions;
  p.clicks = clicks;
  p.ctr = static_cast<double>(clicks) / static_cast<double>(impressions);
  p.cost = cost;
  return p;
}

double metric_value(const SeriesPoint& point, Metric metric) {
  switch (metric) {
    case Metric::ctr: return point.ctr;
    case Metric::impressions: return static_cast<double>(point.impressions);
    case Metric::clicks: return static_cast<double>(point.clicks);
    case Metric::cost:
      if (!point.cost) throw InvalidInput("metric 'cost' selected but observation " + format_iso_date(point.date) +
                                          " has no cost");
      return *point.cost;
  }
  return point.ctr;
}

TimeSeries::TimeSeries(std::vector<SeriesPoint> points, Metric metric) : points_(std::move(points)), metric_(metric) {
  if (points_.empty()) throw InsufficientData("time series needs at least one observation", 1, 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (p.impressions <= 0 || p.clicks < 0 || p.clicks > p.impressions)
      throw InvalidInput("inconsistent counts on " + format_iso_date(p.date));
    if (std::abs(p.ctr - static_cast<double>(p.clicks) / static_cast<double>(p.impressions)) > 1e-9)
      throw InvalidInput("ctr does not equal clicks / impressions on " + format_iso_date(p.date));
    if (i > 0 && !(p.date > points_[i - 1].date))
      throw InvalidInput("dates must be strictly increasing (" + format_iso_date(p.date) + ")");
    if (metric_ == Metric::cost && !p.cost)
      throw InvalidInput("metric 'cost' selected but " + format_iso_date(p.date) + " has no cost");
  }
}

TimeSeries TimeSeries::with_metric(Metric metric) const { return TimeSeries(points_, metric); }

bool TimeSeries::has_cost() const noexcept {
  for (const auto& p : points_)
    if (!p.cost) return false;
  return true;
}

std::vector<double> TimeSeries::metric_values() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(metric_value(p, metric_));
  return out;
}

std::vector<double> TimeSeries::day_offsets() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(static_cast<double>(days_between(points_.front().date, p.date)));
  return out;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace sigcpd
