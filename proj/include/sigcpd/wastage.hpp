#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sigcpd/detector.hpp"
#include "sigcpd/series.hpp"

namespace sigcpd {

/// Where the benchmark cost per click comes from.
struct CpcSource {
  /// Unset means total cost / total clicks over the benchmark segment.
  std::optional<double> constant;

  static CpcSource from_cost_column() { return {}; }
  static CpcSource fixed(double cpc) { return CpcSource{cpc}; }
};

struct BenchmarkChoice {
  std::size_t index = 0;
  /// Set when no segment was stable or improving.
  bool fallback = false;
};

/// Highest mean_metric among stable or improving segments, else the highest
/// overall with `fallback` set. Ties go to the earlier segment.
BenchmarkChoice select_benchmark(std::span<const Segment> segments);

/// max(0, ctr_bench - ctr_t) * impressions_t
double lost_clicks(double ctr_bench, double ctr_t, double impressions_t);

struct DailyWastage {
  Date date;
  double lost_clicks = 0.0;
  double wastage = 0.0;
};

struct WastageReport {
  Segment benchmark_segment;
  std::size_t benchmark_index = 0;
  bool benchmark_fallback = false;
  double ctr_bench = 0.0;
  double cpc_bench = 0.0;
  bool cpc_from_cost = false;
  /// One entry per observation dated after the benchmark segment.
  std::vector<DailyWastage> daily;
  double total_wastage = 0.0;
};

/// ctr_bench is the mean daily CTR over the benchmark segment. Throws
/// ConfigError when the cost column is requested but absent, or when the
/// benchmark segment has no clicks to divide by.
WastageReport compute_wastage(const TimeSeries& series, std::span<const Segment> segments, const CpcSource& cpc);

}  // namespace sigcpd
