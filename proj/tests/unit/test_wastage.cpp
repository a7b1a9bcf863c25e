#include <catch_amalgamated.hpp>

#include <numeric>

#include "oracles.hpp"
#include "sigcpd/detector.hpp"
#include "sigcpd/error.hpp"
#include "sigcpd/synth.hpp"
#include "sigcpd/wastage.hpp"

using namespace sigcpd;
using sigcpd::testing::ctr_series;
using sigcpd::testing::day;
using Catch::Matchers::WithinAbs;

namespace {

Segment seg(int start, int end, Trend trend, double mean) {
  Segment s;
  s.start_date = day(start);
  s.end_date = day(end);
  s.trend = trend;
  s.mean_metric = mean;
  return s;
}

TimeSeries with_cost(const std::vector<std::array<std::int64_t, 2>>& rows, const std::vector<double>& cost) {
  std::vector<SeriesPoint> pts;
  for (std::size_t i = 0; i < rows.size(); ++i)
    pts.push_back(SeriesPoint::make(day(static_cast<int>(i) + 1), rows[i][0], rows[i][1], cost[i]));
  return TimeSeries(std::move(pts));
}

}  // namespace

TEST_CASE("benchmark selection examples", "[wastage][benchmark]") {
  {
    const std::vector<Segment> s{seg(1, 10, Trend::improving, 0.02), seg(11, 20, Trend::stable, 0.015),
                                 seg(21, 30, Trend::declining, 0.01)};
    const auto b = select_benchmark(s);
    CHECK(b.index == 0);
    CHECK_FALSE(b.fallback);
  }
  {
    const std::vector<Segment> s{seg(1, 10, Trend::declining, 0.02), seg(11, 20, Trend::declining, 0.01)};
    const auto b = select_benchmark(s);
    CHECK(b.index == 0);
    CHECK(b.fallback);
  }
  {
    const std::vector<Segment> s{seg(1, 10, Trend::stable, 0.03)};
    CHECK(select_benchmark(s).index == 0);
  }
  {
    const std::vector<Segment> s{seg(1, 10, Trend::declining, 0.05), seg(11, 20, Trend::stable, 0.01)};
    const auto b = select_benchmark(s);
    CHECK(b.index == 1);
    CHECK_FALSE(b.fallback);
  }
  {
    const std::vector<Segment> s{seg(1, 10, Trend::stable, 0.02), seg(11, 20, Trend::improving, 0.02)};
    CHECK(select_benchmark(s).index == 0);
  }
  CHECK_THROWS_AS(select_benchmark({}), InvalidInput);
}

TEST_CASE("lost clicks formula", "[wastage]") {
  CHECK_THAT(lost_clicks(0.02, 0.015, 10000), WithinAbs(50.0, 1e-9));
  CHECK(lost_clicks(0.02, 0.025, 10000) == 0.0);
  CHECK(lost_clicks(0.02, 0.02, 10000) == 0.0);
}

TEST_CASE("daily savings of a one point CTR shortfall", "[wastage]") {
  // 100,000 impressions, shortfall 0.01, CPC 1.25.
  std::vector<double> ctr(10, 0.02);
  ctr.resize(20, 0.01);
  const auto s = ctr_series(ctr, 100000);
  const std::vector<Segment> segs{seg(1, 10, Trend::stable, 0.02), seg(11, 20, Trend::stable, 0.01)};
  const auto r = compute_wastage(s, segs, CpcSource::fixed(1.25));
  CHECK(r.ctr_bench == 0.02);
  CHECK(r.cpc_bench == 1.25);
  CHECK_FALSE(r.cpc_from_cost);
  REQUIRE(r.daily.size() == 10);
  for (const auto& d : r.daily) {
    CHECK(d.lost_clicks == 1000.0);
    CHECK(d.wastage == 1250.0);
  }
  CHECK(r.total_wastage == 12500.0);
}

TEST_CASE("recovery to the benchmark wastes nothing", "[wastage]") {
  const auto s = ctr_series(std::vector<double>(20, 0.02), 100000);
  const std::vector<Segment> segs{seg(1, 10, Trend::stable, 0.02), seg(11, 20, Trend::stable, 0.02)};
  const auto r = compute_wastage(s, segs, CpcSource::fixed(2.0));
  CHECK(r.daily.size() == 10);
  CHECK(r.total_wastage == 0.0);
}

TEST_CASE("two shortfall days sum to the total", "[wastage]") {
  // Benchmark CTR 0.02; 50 and 30 lost clicks at CPC 2.0.
  const auto s = ctr_series({0.02, 0.02, 0.015, 0.017}, 10000);
  const std::vector<Segment> segs{seg(1, 2, Trend::stable, 0.02), seg(3, 4, Trend::stable, 0.016)};
  const auto r = compute_wastage(s, segs, CpcSource::fixed(2.0));
  REQUIRE(r.daily.size() == 2);
  CHECK_THAT(r.daily[0].lost_clicks, WithinAbs(50.0, 1e-9));
  CHECK_THAT(r.daily[1].lost_clicks, WithinAbs(30.0, 1e-9));
  CHECK_THAT(r.total_wastage, WithinAbs(160.0, 1e-9));
}

TEST_CASE("benchmark CPC comes from the cost column", "[wastage][cpc]") {
  // Benchmark days: 40 clicks for 30.0 spend.
  const auto s = with_cost({{1000, 20}, {1000, 20}, {1000, 10}}, {10.0, 20.0, 5.0});
  const std::vector<Segment> segs{seg(1, 2, Trend::stable, 0.02), seg(3, 3, Trend::stable, 0.01)};
  const auto r = compute_wastage(s, segs, CpcSource::from_cost_column());
  CHECK(r.cpc_from_cost);
  CHECK(r.cpc_bench == 0.75);
  REQUIRE(r.daily.size() == 1);
  CHECK_THAT(r.daily[0].wastage, WithinAbs(10.0 * 0.75, 1e-12));

  const auto fixed = compute_wastage(s, segs, CpcSource::fixed(3.0));
  CHECK(fixed.cpc_bench == 3.0);
  CHECK_FALSE(fixed.cpc_from_cost);
}

TEST_CASE("unusable CPC sources are configuration errors", "[wastage][errors]") {
  const std::vector<Segment> segs{seg(1, 2, Trend::stable, 0.02), seg(3, 3, Trend::stable, 0.01)};
  const auto no_cost = ctr_series({0.02, 0.02, 0.01}, 1000);
  CHECK_THROWS_AS(compute_wastage(no_cost, segs, CpcSource::from_cost_column()), ConfigError);
  const auto zero_clicks = with_cost({{1000, 0}, {1000, 0}, {1000, 0}}, {1.0, 1.0, 1.0});
  try {
    compute_wastage(zero_clicks, segs, CpcSource::from_cost_column());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("--cpc"));
  }
  CHECK_NOTHROW(compute_wastage(zero_clicks, segs, CpcSource::fixed(1.0)));
  CHECK_THROWS_AS(compute_wastage(no_cost, segs, CpcSource::fixed(-1.0)), ConfigError);
  CHECK_THROWS_AS(compute_wastage(no_cost, segs, CpcSource::fixed(std::numeric_limits<double>::quiet_NaN())),
                  ConfigError);
}

TEST_CASE("wastage report invariants on detected segments", "[wastage][property]") {
  synth::BatchOptions opt;
  opt.n_per_pattern = 5;
  opt.master_seed = 8;
  for (const auto& g : synth::generate_batch(opt)) {
    if (g.series.size() < 28) continue;
    const auto report = detect(g.series, DetectorConfig{});
    const auto r = compute_wastage(g.series, report.segments, CpcSource::fixed(0.8));
    double sum = 0.0;
    for (const auto& d : r.daily) {
      CHECK(d.lost_clicks >= 0.0);
      CHECK(d.date > r.benchmark_segment.end_date);
      sum += d.wastage;
    }
    CHECK_THAT(r.total_wastage, WithinAbs(sum, 1e-9));
    const auto after = std::count_if(g.series.points().begin(), g.series.points().end(),
                                     [&](const SeriesPoint& p) { return p.date > r.benchmark_segment.end_date; });
    CHECK(r.daily.size() == static_cast<std::size_t>(after));
    if (!r.benchmark_fallback) CHECK(r.benchmark_segment.trend != Trend::declining);
  }
}
