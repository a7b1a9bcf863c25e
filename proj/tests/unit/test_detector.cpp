#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "sigcpd/detector.hpp"
#include "sigcpd/error.hpp"
#include "sigcpd/signature.hpp"
#include "sigcpd/synth.hpp"
#include "sigcpd/windowing.hpp"

using namespace sigcpd;
using sigcpd::testing::ctr_series;
using sigcpd::testing::day;
using sigcpd::testing::step_series;
using Catch::Matchers::WithinAbs;

namespace {

DetectorConfig config(int w, double k) {
  DetectorConfig c;
  c.window = w;
  c.k = k;
  return c;
}

std::vector<synth::Generated> noisy_corpus(int n_per_pattern, std::uint64_t seed) {
  synth::BatchOptions opt;
  opt.n_per_pattern = n_per_pattern;
  opt.master_seed = seed;
  return synth::generate_batch(opt);
}

std::set<Date> flagged_set(const ChangePointReport& r) { return {r.flagged.begin(), r.flagged.end()}; }

DistancePoint dp(int d, double v) { return DistancePoint{day(d), v}; }

}  // namespace

TEST_CASE("config validation lists every violation", "[detector][config]") {
  DetectorConfig c;
  CHECK(c.violations().empty());
  CHECK(c.effective_merge_gap() == 26);
  c.window = 1;
  c.depth = 0;
  c.k = -1.0;
  c.alpha = 1.0;
  c.merge_gap = -3;
  CHECK(c.violations().size() == 5);
  try {
    c.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.violations().size() == 5);
  }
  DetectorConfig inf;
  inf.k = std::numeric_limits<double>::infinity();
  CHECK(inf.violations().size() == 1);
  CHECK(parse_feature_mode("log") == FeatureMode::log_signature);
  CHECK(parse_feature_mode(feature_mode_name(FeatureMode::full_signature)) == FeatureMode::full_signature);
  CHECK_FALSE(parse_feature_mode("lyndon").has_value());
}

TEST_CASE("constant series has zero distances and no change points", "[detector]") {
  const auto s = ctr_series(std::vector<double>(120, 0.02));
  for (int w : {2, 7, 14, 30}) {
    const auto r = detect(s, config(w, 2.0));
    CHECK(r.distances.size() == 120 - 2 * static_cast<std::size_t>(w) + 1);
    for (const auto& p : r.distances) CHECK(p.distance == 0.0);
    CHECK(r.sigma_d == 0.0);
    CHECK(r.flagged.empty());
    CHECK(r.change_points.empty());
    REQUIRE(r.segments.size() == 1);
    CHECK(r.segments[0].trend == Trend::stable);
  }
}

TEST_CASE("distance series length and boundary dates", "[detector]") {
  std::vector<double> v;
  for (int i = 0; i < 120; ++i) v.push_back(0.02 + 0.001 * std::sin(i * 0.7));
  const auto s = ctr_series(v);
  const auto d = distance_series(s, config(14, 2.0));
  REQUIRE(d.size() == 93);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d[i].boundary_date == s[i + 14].date);
    CHECK(d[i].distance >= 0.0);
  }
}

TEST_CASE("short series error names the minimum length", "[detector][errors]") {
  const auto s = ctr_series(std::vector<double>(27, 0.02));
  try {
    distance_series(s, config(14, 2.0));
    FAIL("expected InsufficientData");
  } catch (const InsufficientData& e) {
    CHECK(e.required() == 28);
    CHECK_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("at least 28"));
  }
  CHECK_THROWS_AS(detect(s, config(14, 2.0)), InsufficientData);
  CHECK_THROWS_AS(detect(s, config(1, 2.0)), ValidationError);
}

TEST_CASE("distance series matches window-by-window signatures", "[detector]") {
  const auto g = synth::generate([] {
    synth::PatternSpec p;
    p.kind = synth::PatternKind::non_continuous;
    p.seed = 5;
    return p;
  }());
  for (auto mode : {FeatureMode::full_signature, FeatureMode::log_signature}) {
    DetectorConfig cfg = config(10, 2.0);
    cfg.feature_mode = mode;
    const auto d = distance_series(g.series, cfg);
    const auto pairs = window_pairs(g.series, 10);
    REQUIRE(d.size() == pairs.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      auto a = path_signature(normalize_window(pairs[i].first), 3);
      auto b = path_signature(normalize_window(pairs[i].second), 3);
      if (mode == FeatureMode::log_signature) {
        a = log_signature(a);
        b = log_signature(b);
      }
      CHECK(d[i].boundary_date == pairs[i].boundary);
      CHECK_THAT(d[i].distance, WithinAbs(sig_distance(a, b), 1e-12));
    }
  }
}

TEST_CASE("long series distances match window-by-window signatures", "[detector]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.005, 0.03);
  std::vector<double> ctr(777);
  for (auto& v : ctr) v = u(rng);
  const auto s = ctr_series(ctr);
  for (int w : {7, 21}) {
    const auto d = distance_series(s, config(w, 2.0));
    const auto pairs = window_pairs(s, w);
    REQUIRE(d.size() == pairs.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto a = path_signature(normalize_window(pairs[i].first), 3);
      const auto b = path_signature(normalize_window(pairs[i].second), 3);
      CHECK(d[i].boundary_date == pairs[i].boundary);
      CHECK_THAT(d[i].distance, WithinAbs(sig_distance(a, b), 1e-12));
    }
  }
}

TEST_CASE("rising then falling ramp gives the reflected-segment distance", "[detector]") {
  // Each window normalizes to a straight segment with increment (1, +1) or
  // (1, -1). Level k of a segment is the k-fold product of its increment over
  // k!, so only words with an odd number of y letters differ, by 2 / k!.
  double expected_sq = 0.0;
  double fact = 1.0;
  for (int k = 1; k <= 3; ++k) {
    fact *= k;
    for (unsigned w = 0; w < (1u << k); ++w)
      if (std::popcount(w) % 2 == 1) expected_sq += (2.0 / fact) * (2.0 / fact);
  }
  CHECK_THAT(expected_sq, WithinAbs(58.0 / 9.0, 1e-14));

  std::vector<double> v;
  for (int i = 0; i < 14; ++i) v.push_back(0.010 + 0.001 * i);
  for (int i = 0; i < 14; ++i) v.push_back(0.023 - 0.001 * i);
  const auto d = distance_series(ctr_series(v), config(14, 2.0));
  REQUIRE(d.size() == 1);
  CHECK_THAT(d[0].distance, WithinAbs(std::sqrt(expected_sq), 1e-9));
}

TEST_CASE("noiseless sharp drop yields one change point at the drop", "[detector]") {
  const auto s = step_series(120, 61, 0.02, 0.008);
  DetectorConfig cfg = config(14, 1.5);
  const auto r = detect(s, cfg);
  REQUIRE(r.change_points.size() == 1);
  CHECK(std::abs(days_between(day(61), r.change_points[0].date)) <= 3);
  CHECK(r.change_points[0].distance > r.threshold);

  cfg.k = 3.0;
  CHECK(detect(s, cfg).change_points.size() <= 1);
}

TEST_CASE("noiseless step profile is zero on the step and peaks beside it", "[detector][property]") {
  for (int w : {7, 10, 14}) {
    const auto s = step_series(120, 61, 0.02, 0.008);
    const auto d = distance_series(s, config(w, 1.5));
    double best = 0.0;
    for (const auto& p : d) best = std::max(best, p.distance);
    std::vector<std::int64_t> argmax;
    for (const auto& p : d)
      if (p.distance >= best * (1.0 - 1e-12)) argmax.push_back(days_between(day(61), p.boundary_date));
    INFO("w = " << w);
    CHECK(std::any_of(argmax.begin(), argmax.end(), [](std::int64_t off) { return std::abs(off) <= 1; }));
    const auto at_step = std::find_if(d.begin(), d.end(), [](const DistancePoint& p) { return p.boundary_date == day(61); });
    REQUIRE(at_step != d.end());
    CHECK(at_step->distance == 0.0);
  }
}

TEST_CASE("threshold identity and strict exceedance", "[detector][property]") {
  for (const auto& g : noisy_corpus(3, 17)) {
    for (double k : {1.5, 2.0, 2.5}) {
      const auto r = detect(g.series, config(14, k));
      CHECK(r.threshold == r.mu_d + k * r.sigma_d);
      double sum = 0.0;
      for (const auto& p : r.distances) sum += p.distance;
      const double mu = sum / static_cast<double>(r.distances.size());
      double ss = 0.0;
      for (const auto& p : r.distances) ss += (p.distance - mu) * (p.distance - mu);
      CHECK_THAT(r.sigma_d, WithinAbs(std::sqrt(ss / static_cast<double>(r.distances.size())), 1e-15));
      std::vector<Date> flags;
      for (const auto& p : r.distances)
        if (p.distance > r.threshold) flags.push_back(p.boundary_date);
      CHECK(flags == r.flagged);
      for (const auto& cp : r.change_points) {
        CHECK(cp.distance > cp.threshold);
        CHECK(cp.threshold == r.threshold);
      }
    }
  }
}

TEST_CASE("flags shrink and change points do not grow as k rises", "[detector][property]") {
  const std::vector<double> ks{1.0, 1.5, 2.0, 2.5, 3.0, 4.0};
  for (const auto& g : noisy_corpus(10, 23)) {
    for (int w : {7, 14}) {
      if (g.series.size() < 2 * static_cast<std::size_t>(w)) continue;
      std::set<Date> prev_flags;
      std::size_t prev_cps = 0;
      for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto r = detect(g.series, config(w, ks[i]));
        const auto flags = flagged_set(r);
        if (i > 0) {
          CHECK(std::includes(prev_flags.begin(), prev_flags.end(), flags.begin(), flags.end()));
          CHECK(r.change_points.size() <= prev_cps);
        }
        prev_flags = flags;
        prev_cps = r.change_points.size();
      }
    }
  }
}

TEST_CASE("segments partition the series span", "[detector][property]") {
  for (const auto& g : noisy_corpus(4, 31)) {
    const auto r = detect(g.series, config(7, 1.5));
    REQUIRE(r.segments.size() == r.change_points.size() + 1);
    CHECK(r.segments.front().start_date == g.series.first_date());
    CHECK(r.segments.back().end_date == g.series.last_date());
    std::size_t covered = 0;
    for (std::size_t i = 0; i < r.segments.size(); ++i) {
      const auto& s = r.segments[i];
      CHECK(s.start_date <= s.end_date);
      if (i > 0) CHECK(s.start_date == r.segments[i - 1].end_date + std::chrono::days{1});
      if (i > 0) CHECK(s.start_date == r.change_points[i - 1].date);
      if (s.n_points < 3 || s.p_value >= 0.05) CHECK(s.trend == Trend::stable);
      covered += s.n_points;
    }
    CHECK(covered == g.series.size());
  }
}

TEST_CASE("detection is deterministic", "[detector][property]") {
  const auto corpus = noisy_corpus(2, 41);
  for (const auto& g : corpus) {
    const auto a = detect(g.series, config(14, 2.0));
    const auto b = detect(g.series, config(14, 2.0));
    REQUIRE(a.distances.size() == b.distances.size());
    for (std::size_t i = 0; i < a.distances.size(); ++i)
      CHECK(std::bit_cast<std::uint64_t>(a.distances[i].distance) == std::bit_cast<std::uint64_t>(b.distances[i].distance));
    CHECK(a.flagged == b.flagged);
    CHECK(a.change_points.size() == b.change_points.size());
  }
}

TEST_CASE("flagged dates are invariant to metric scale", "[detector][property]") {
  for (const auto& g : noisy_corpus(3, 47)) {
    const auto base = detect(g.series.with_metric(Metric::clicks), config(14, 2.0));
    for (std::int64_t c : {3, 10}) {
      std::vector<SeriesPoint> pts;
      for (const auto& p : g.series.points()) pts.push_back(SeriesPoint::make(p.date, p.impressions * c, p.clicks * c));
      const auto scaled = detect(TimeSeries(std::move(pts), Metric::clicks), config(14, 2.0));
      CHECK(flagged_set(scaled) == flagged_set(base));
    }
  }
}

TEST_CASE("merging off reports every exceedance", "[detector][merge]") {
  const std::vector<DistancePoint> d{dp(10, 1.0), dp(11, 5.0), dp(12, 6.0), dp(13, 0.5), dp(40, 4.0)};
  DetectorConfig cfg = config(7, 2.0);
  cfg.merge = false;
  const auto cps = merge_exceedances(d, 2.0, cfg);
  REQUIRE(cps.size() == 3);
  CHECK(cps[0].date == day(11));
  CHECK(cps[1].date == day(12));
  CHECK(cps[2].date == day(40));
}

TEST_CASE("merging groups flags around the strongest peak", "[detector][merge]") {
  DetectorConfig cfg = config(7, 2.0);
  cfg.merge_gap = 5;
  SECTION("separated clusters stay apart") {
    const std::vector<DistancePoint> d{dp(10, 3.0), dp(11, 5.0), dp(12, 6.0), dp(13, 4.0), dp(14, 3.0),
                                       dp(30, 4.0), dp(31, 1.0)};
    const auto cps = merge_exceedances(d, 2.0, cfg);
    REQUIRE(cps.size() == 2);
    CHECK(cps[0].date == day(12));
    CHECK(cps[0].distance == 6.0);
    CHECK(cps[0].peak_date == day(12));
    CHECK(cps[1].date == day(30));
  }
  SECTION("group is dated at the centre of its span, not the peak") {
    const std::vector<DistancePoint> d{dp(10, 6.0), dp(11, 3.0), dp(12, 3.0), dp(13, 3.0), dp(14, 3.0)};
    const auto cps = merge_exceedances(d, 2.0, cfg);
    REQUIRE(cps.size() == 1);
    CHECK(cps[0].date == day(12));
    CHECK(cps[0].peak_date == day(10));
    CHECK(cps[0].distance == 6.0);
  }
  SECTION("a flag beyond the gap from every peak opens a new group") {
    const std::vector<DistancePoint> d{dp(10, 6.0), dp(11, 1.0), dp(12, 1.0), dp(13, 1.0),
                                       dp(14, 1.0), dp(15, 3.0), dp(16, 3.0)};
    const auto cps = merge_exceedances(d, 2.0, cfg);
    REQUIRE(cps.size() == 2);
    CHECK(cps[0].date == day(12));
    CHECK(cps[1].date == day(16));
  }
  SECTION("equal peaks: the earlier one seeds the group") {
    const std::vector<DistancePoint> d{dp(10, 5.0), dp(11, 1.0), dp(12, 1.0), dp(13, 1.0), dp(14, 5.0)};
    const auto cps = merge_exceedances(d, 2.0, cfg);
    REQUIRE(cps.size() == 1);
    CHECK(cps[0].peak_date == day(10));
    CHECK(cps[0].date == day(12));
  }
  SECTION("centre ties go to the earlier boundary") {
    const std::vector<DistancePoint> d{dp(10, 5.0), dp(11, 4.0), dp(12, 3.0), dp(13, 3.0)};
    const auto cps = merge_exceedances(d, 2.0, cfg);
    REQUIRE(cps.size() == 1);
    CHECK(cps[0].date == day(11));
  }
  SECTION("gap is measured in calendar days") {
    const std::vector<DistancePoint> d{dp(10, 5.0), dp(16, 4.0)};
    CHECK(merge_exceedances(d, 2.0, cfg).size() == 2);
    cfg.merge_gap = 6;
    CHECK(merge_exceedances(d, 2.0, cfg).size() == 1);
  }
  SECTION("the centre is always an observed boundary") {
    const std::vector<DistancePoint> d{dp(10, 5.0), dp(14, 4.0)};
    const auto cps = merge_exceedances(d, 2.0, cfg);
    REQUIRE(cps.size() == 1);
    CHECK(cps[0].date == day(10));
  }
  SECTION("nothing above threshold") {
    const std::vector<DistancePoint> d{dp(10, 2.0), dp(11, 1.0)};
    CHECK(merge_exceedances(d, 2.0, cfg).empty());
  }
}

TEST_CASE("trend classification examples", "[detector][trend]") {
  std::vector<double> x, rising, flat;
  for (int t = 0; t < 20; ++t) {
    x.push_back(t);
    rising.push_back(0.01 + 0.001 * t);
    flat.push_back(0.02);
  }
  const auto up = classify_trend(x, rising, 0.05);
  CHECK(up.trend == Trend::improving);
  CHECK_THAT(up.slope, WithinAbs(0.001, 1e-15));
  CHECK(up.p_value < 1e-10);

  const auto level = classify_trend(x, flat, 0.05);
  CHECK(level.trend == Trend::stable);
  CHECK(level.slope == 0.0);

  const std::vector<double> two_x{0, 1}, two_y{0.01, 0.02};
  const auto tiny = classify_trend(two_x, two_y, 0.05);
  CHECK(tiny.trend == Trend::stable);
  CHECK(tiny.p_value == 1.0);

  std::vector<double> falling = rising;
  std::reverse(falling.begin(), falling.end());
  CHECK(classify_trend(x, falling, 0.05).trend == Trend::declining);
}

TEST_CASE("slope p-value matches the closed-form t distribution", "[detector][trend]") {
  // x = 0..4, y = 1,3,2,5,4: slope 0.8, residual SS 3.6, se = sqrt(0.12).
  const std::vector<double> x{0, 1, 2, 3, 4}, y{1, 3, 2, 5, 4};
  const double t = 0.8 / std::sqrt(0.12);
  // Student t CDF with 3 degrees of freedom.
  const double u = t / std::sqrt(3.0);
  const double cdf = 0.5 + (u / (1.0 + u * u) + std::atan(u)) / std::numbers::pi;
  const double p = 2.0 * (1.0 - cdf);
  const auto fit = classify_trend(x, y, 0.05);
  CHECK_THAT(fit.slope, WithinAbs(0.8, 1e-14));
  CHECK_THAT(fit.p_value, WithinAbs(p, 1e-12));
  CHECK(fit.trend == Trend::stable);
  CHECK(classify_trend(x, y, 0.2).trend == Trend::improving);
}

TEST_CASE("segmentation examples", "[detector][segments]") {
  const auto s = ctr_series(std::vector<double>(120, 0.02));
  {
    const auto spans = segment_series(s, {});
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].start_date == day(1));
    CHECK(spans[0].end_date == day(120));
  }
  {
    const std::vector<Date> cps{day(61)};
    const auto spans = segment_series(s, cps);
    REQUIRE(spans.size() == 2);
    CHECK(spans[0].start_date == day(1));
    CHECK(spans[0].end_date == day(60));
    CHECK(spans[1].start_date == day(61));
    CHECK(spans[1].end_date == day(120));
    CHECK(spans[0].end - spans[0].begin == 60);
  }
  {
    const std::vector<Date> cps{day(30), day(90)};
    const auto spans = segment_series(s, cps);
    REQUIRE(spans.size() == 3);
    for (std::size_t i = 1; i < spans.size(); ++i) {
      CHECK(spans[i].start_date == spans[i - 1].end_date + std::chrono::days{1});
      CHECK(spans[i].begin == spans[i - 1].end);
    }
    CHECK(spans.back().end == 120);
  }
  const std::vector<Date> outside{day(121)}, at_start{day(1)}, unordered{day(50), day(40)};
  CHECK_THROWS_AS(segment_series(s, outside), InvalidInput);
  CHECK_THROWS_AS(segment_series(s, at_start), InvalidInput);
  CHECK_THROWS_AS(segment_series(s, unordered), InvalidInput);
}

TEST_CASE("segments over a gap keep calendar boundaries", "[detector][segments]") {
  std::vector<SeriesPoint> pts;
  for (int d : {1, 2, 3, 7, 8, 9})
    pts.push_back(SeriesPoint::make(day(d), 1000, 10 + d));
  const TimeSeries s(std::move(pts));
  const std::vector<Date> cps{day(5)};
  const auto segs = classify_segments(s, cps, 0.05);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].end_date == day(4));
  CHECK(segs[0].n_points == 3);
  CHECK(segs[1].start_date == day(5));
  CHECK(segs[1].n_points == 3);
  CHECK_THAT(segs[1].mean_metric, WithinAbs(0.018, 1e-15));
}
