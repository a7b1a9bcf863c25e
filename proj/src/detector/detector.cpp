#include "sigcpd/detector.hpp"

#include <algorithm>
#include <cmath>

#include "sigcpd/error.hpp"
#include "sigcpd/regression.hpp"
#include "sigcpd/signature.hpp"
#include "sigcpd/simd/window_kernels.hpp"
#include "sigcpd/tensor_seq.hpp"
#include "sigcpd/windowing.hpp"

namespace sigcpd {

std::string_view feature_mode_name(FeatureMode mode) noexcept {
  return mode == FeatureMode::log_signature ? "log-signature" : "full-signature";
}

std::optional<FeatureMode> parse_feature_mode(std::string_view name) noexcept {
  if (name == "full-signature" || name == "full") return FeatureMode::full_signature;
  if (name == "log-signature" || name == "log") return FeatureMode::log_signature;
  return std::nullopt;
}

std::string_view trend_name(Trend trend) noexcept {
  switch (trend) {
    case Trend::improving: return "improving";
    case Trend::declining: return "declining";
    case Trend::stable: return "stable";
  }
  return "stable";
}

std::vector<std::string> DetectorConfig::violations() const {
  std::vector<std::string> v;
  if (window < 2) v.push_back("window must be >= 2 (got " + std::to_string(window) + ")");
  if (depth < 1 || depth > 12) v.push_back("depth must be in [1, 12] (got " + std::to_string(depth) + ")");
  if (!(k > 0.0) || !std::isfinite(k)) v.push_back("k must be a finite positive number");
  if (!(alpha > 0.0 && alpha < 1.0)) v.push_back("alpha must lie in (0, 1)");
  if (merge_gap && *merge_gap < 0) v.push_back("merge_gap must be >= 0");
  return v;
}

void DetectorConfig::validate() const {
  if (auto v = violations(); !v.empty()) throw ValidationError(std::move(v));
}

std::vector<DistancePoint> distance_series(const TimeSeries& series, const DetectorConfig& cfg) {
  cfg.validate();
  const std::size_t w = static_cast<std::size_t>(cfg.window);
  const std::size_t need = required_length(cfg.window);
  if (series.size() < need)
    throw InsufficientData("series has " + std::to_string(series.size()) + " observations; window " +
                               std::to_string(cfg.window) + " requires at least " + std::to_string(need),
                           need, series.size());

  const auto days = series.day_offsets();
  const auto values = series.metric_values();
  const std::size_t n_coef = feature_length(2, cfg.depth);
  const std::size_t n_dist = series.size() - need + 1;
  std::vector<double> dist(n_dist);

  // Boundaries are processed in blocks so the feature matrix of a block
  // (block + w windows) stays cache resident; windows are normalized
  // independently, so blocking does not change any value.
  constexpr std::size_t block = 256;
  std::vector<double> features;
  for (std::size_t b = 0; b < n_dist; b += block) {
    const std::size_t n_out = std::min(block, n_dist - b);
    const std::size_t n_obs = n_out + 2 * w - 1;
    const WindowIncrements inc = sliding_window_increments(std::span(days).subspan(b, n_obs),
                                                           std::span(values).subspan(b, n_obs), cfg.window);
    features.assign(n_coef * inc.n_windows, 0.0);
    simd::batch_signatures({inc.n_windows, inc.n_segments, inc.dt, inc.dy}, cfg.depth, features);

    if (cfg.feature_mode == FeatureMode::log_signature) {
      TensorSeq sig = TensorSeq::identity(2, cfg.depth);
      for (std::size_t j = 0; j < inc.n_windows; ++j) {
        auto coeffs = sig.coefficients();
        for (std::size_t c = 0; c < n_coef; ++c) coeffs[c] = features[c * inc.n_windows + j];
        const TensorSeq lg = log_signature(sig);
        const auto out = lg.coefficients();
        for (std::size_t c = 0; c < n_coef; ++c) features[c * inc.n_windows + j] = out[c];
      }
    }
    simd::lagged_distances(features, inc.n_windows, n_coef, w, std::span(dist).subspan(b, n_out));
  }

  std::vector<DistancePoint> out(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) out[i] = DistancePoint{series[i + w].date, dist[i]};
  return out;
}

namespace {

struct Group {
  std::vector<std::size_t> members;  // indices into the distance series
  std::size_t peak = 0;
};

// Boundary whose date is nearest to the midpoint of the group's date span;
// ties go to the earlier date.
std::size_t center_of(const Group& g, std::span<const DistancePoint> d) {
  const auto [lo, hi] = std::minmax_element(g.members.begin(), g.members.end());
  const double mid = 0.5 * (static_cast<double>(d[*lo].boundary_date.time_since_epoch().count()) +
                            static_cast<double>(d[*hi].boundary_date.time_since_epoch().count()));
  std::size_t best = *lo;
  double best_gap = std::abs(static_cast<double>(d[best].boundary_date.time_since_epoch().count()) - mid);
  for (std::size_t i = *lo; i <= *hi; ++i) {
    const double gap = std::abs(static_cast<double>(d[i].boundary_date.time_since_epoch().count()) - mid);
    if (gap < best_gap) {
      best = i;
      best_gap = gap;
    }
  }
  return best;
}

}  // namespace

std::vector<ChangePoint> merge_exceedances(std::span<const DistancePoint> d, double threshold,
                                           const DetectorConfig& cfg) {
  std::vector<std::size_t> flags;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i].distance > threshold) flags.push_back(i);

  std::vector<ChangePoint> out;
  if (!cfg.merge) {
    for (auto i : flags) out.push_back(ChangePoint{d[i].boundary_date, d[i].distance, threshold, d[i].boundary_date});
    return out;
  }

  const auto gap = static_cast<std::int64_t>(cfg.effective_merge_gap());
  std::stable_sort(flags.begin(), flags.end(),
                   [&](std::size_t a, std::size_t b) { return d[a].distance > d[b].distance; });
  std::vector<Group> groups;
  for (auto i : flags) {
    auto owner = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return std::abs(days_between(d[g.peak].boundary_date, d[i].boundary_date)) <= gap;
    });
    if (owner != groups.end())
      owner->members.push_back(i);
    else
      groups.push_back(Group{{i}, i});
  }

  out.reserve(groups.size());
  for (const auto& g : groups)
    out.push_back(ChangePoint{d[center_of(g, d)].boundary_date, d[g.peak].distance, threshold, d[g.peak].boundary_date});
  std::sort(out.begin(), out.end(), [](const ChangePoint& a, const ChangePoint& b) { return a.date < b.date; });

  std::vector<ChangePoint> fused;
  for (const auto& cp : out) {
    if (!fused.empty() && fused.back().date == cp.date) {
      if (cp.distance > fused.back().distance) fused.back() = cp;
      continue;
    }
    fused.push_back(cp);
  }
  return fused;
}

TrendFit classify_trend(std::span<const double> day_offsets, std::span<const double> values, double alpha) {
  TrendFit out;
  if (values.size() < 3) return out;
  const LineFit fit = fit_line(day_offsets, values);
  out.slope = fit.slope;
  out.p_value = fit.p_value;
  if (fit.p_value < alpha) {
    if (fit.slope > 0.0) out.trend = Trend::improving;
    if (fit.slope < 0.0) out.trend = Trend::declining;
  }
  return out;
}

std::vector<SegmentSpan> segment_series(const TimeSeries& series, std::span<const Date> change_dates) {
  const auto pts = series.points();
  for (std::size_t i = 0; i < change_dates.size(); ++i) {
    const Date cp = change_dates[i];
    if (!(cp > series.first_date() && cp <= series.last_date()))
      throw InvalidInput("change point " + format_iso_date(cp) + " lies outside (" +
                         format_iso_date(series.first_date()) + ", " + format_iso_date(series.last_date()) + "]");
    if (i > 0 && !(cp > change_dates[i - 1])) throw InvalidInput("change points must be strictly increasing");
  }

  auto first_at_or_after = [&](Date date) {
    return static_cast<std::size_t>(
        std::lower_bound(pts.begin(), pts.end(), date, [](const SeriesPoint& p, Date v) { return p.date < v; }) -
        pts.begin());
  };

  std::vector<SegmentSpan> spans;
  spans.reserve(change_dates.size() + 1);
  Date start = series.first_date();
  std::size_t begin = 0;
  for (const Date cp : change_dates) {
    const std::size_t end = first_at_or_after(cp);
    spans.push_back(SegmentSpan{start, cp - std::chrono::days{1}, begin, end});
    start = cp;
    begin = end;
  }
  spans.push_back(SegmentSpan{start, series.last_date(), begin, series.size()});
  return spans;
}

std::vector<Segment> classify_segments(const TimeSeries& series, std::span<const Date> change_dates, double alpha) {
  const auto spans = segment_series(series, change_dates);
  const auto days = series.day_offsets();
  const auto values = series.metric_values();
  std::vector<Segment> out;
  out.reserve(spans.size());
  for (const auto& s : spans) {
    const std::span<const double> x(days.data() + s.begin, s.end - s.begin);
    const std::span<const double> y(values.data() + s.begin, s.end - s.begin);
    const TrendFit fit = classify_trend(x, y, alpha);
    out.push_back(Segment{s.start_date, s.end_date, fit.trend, fit.slope, fit.p_value, stable_mean(y), y.size()});
  }
  return out;
}

ChangePointReport detect(const TimeSeries& series, const DetectorConfig& cfg) {
  ChangePointReport report;
  report.config = cfg;
  report.metric = series.metric();
  report.distances = distance_series(series, cfg);

  const std::size_t n = report.distances.size();
  double sum = 0.0;
  for (const auto& p : report.distances) sum += p.distance;
  report.mu_d = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& p : report.distances) ss += (p.distance - report.mu_d) * (p.distance - report.mu_d);
  report.sigma_d = std::sqrt(ss / static_cast<double>(n));
  report.threshold = report.mu_d + cfg.k * report.sigma_d;

  for (const auto& p : report.distances)
    if (p.distance > report.threshold) report.flagged.push_back(p.boundary_date);

  report.change_points = merge_exceedances(report.distances, report.threshold, cfg);
  std::vector<Date> dates;
  dates.reserve(report.change_points.size());
  for (const auto& cp : report.change_points) dates.push_back(cp.date);
  report.segments = classify_segments(series, dates, cfg.alpha);
  return report;
}

}  // namespace sigcpd
