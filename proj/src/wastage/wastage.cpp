#include "sigcpd/wastage.hpp"

#include <algorithm>
#include <cmath>

#include "sigcpd/error.hpp"
#include "sigcpd/regression.hpp"

namespace sigcpd {

BenchmarkChoice select_benchmark(std::span<const Segment> segments) {
  if (segments.empty()) throw InvalidInput("select_benchmark: no segments");
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].trend == Trend::declining) continue;
    if (!best || segments[i].mean_metric > segments[*best].mean_metric) best = i;
  }
  if (best) return {*best, false};
  std::size_t top = 0;
  for (std::size_t i = 1; i < segments.size(); ++i)
    if (segments[i].mean_metric > segments[top].mean_metric) top = i;
  return {top, true};
}

double lost_clicks(double ctr_bench, double ctr_t, double impressions_t) {
  return std::max(0.0, ctr_bench - ctr_t) * impressions_t;
}

WastageReport compute_wastage(const TimeSeries& series, std::span<const Segment> segments, const CpcSource& cpc) {
  WastageReport report;
  const BenchmarkChoice choice = select_benchmark(segments);
  report.benchmark_index = choice.index;
  report.benchmark_fallback = choice.fallback;
  report.benchmark_segment = segments[choice.index];
  const Segment& bench = report.benchmark_segment;

  std::vector<double> bench_ctr;
  double bench_cost = 0.0;
  std::int64_t bench_clicks = 0;
  for (const auto& p : series.points()) {
    if (p.date < bench.start_date || p.date > bench.end_date) continue;
    bench_ctr.push_back(p.ctr);
    bench_clicks += p.clicks;
    bench_cost += p.cost.value_or(0.0);
  }
  report.ctr_bench = stable_mean(bench_ctr);

  if (cpc.constant) {
    if (!(*cpc.constant >= 0.0) || !std::isfinite(*cpc.constant))
      throw ConfigError("CPC must be a finite non-negative number");
    report.cpc_bench = *cpc.constant;
  } else {
    if (!series.has_cost())
      throw ConfigError("series has no cost column; supply a constant CPC (--cpc)");
    if (bench_clicks == 0)
      throw ConfigError("benchmark segment has zero clicks, so its CPC is undefined; supply a constant CPC (--cpc)");
    report.cpc_bench = bench_cost / static_cast<double>(bench_clicks);
    report.cpc_from_cost = true;
  }

  for (const auto& p : series.points()) {
    if (p.date <= bench.end_date) continue;
    const double lost = lost_clicks(report.ctr_bench, p.ctr, static_cast<double>(p.impressions));
    const double w = lost * report.cpc_bench;
    report.daily.push_back(DailyWastage{p.date, lost, w});
    report.total_wastage += w;
  }
  return report;
}

}  // namespace sigcpd
