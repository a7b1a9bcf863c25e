#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sigcpd/baselines.hpp"
#include "sigcpd/error.hpp"

using namespace sigcpd;
using namespace sigcpd::baselines;
using sigcpd::testing::ctr_series;
using sigcpd::testing::day;
using sigcpd::testing::step_series;

namespace {

std::vector<double> random_walk(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 0.002);
  std::vector<double> v{0.02};
  for (int i = 1; i < n; ++i) v.push_back(std::clamp(v.back() + z(rng), 0.001, 0.05));
  return v;
}

// Naive trailing means; state before the first comparable day comes from
// the first full long window.
std::vector<int> ma_oracle(const std::vector<double>& v, int s, int l) {
  auto mean = [&](int end, int len) {
    double sum = 0.0;
    for (int i = end - len + 1; i <= end; ++i) sum += v[static_cast<std::size_t>(i)];
    return sum / len;
  };
  std::vector<int> out;
  bool above = mean(l - 1, s) >= mean(l - 1, l);
  for (int i = l; i < static_cast<int>(v.size()); ++i) {
    const bool now = mean(i, s) >= mean(i, l);
    if (above && !now) out.push_back(i + 1);
    above = now;
  }
  return out;
}

std::vector<int> cusum_oracle(const std::vector<double>& v, int burn, double k, double h) {
  double mu = 0.0;
  for (int i = 0; i < burn; ++i) mu += v[static_cast<std::size_t>(i)];
  mu /= burn;
  double ss = 0.0;
  for (int i = 0; i < burn; ++i) ss += (v[static_cast<std::size_t>(i)] - mu) * (v[static_cast<std::size_t>(i)] - mu);
  const double sd = std::sqrt(ss / (burn - 1));
  std::vector<int> out;
  double up = 0.0, down = 0.0;
  for (int i = burn; i < static_cast<int>(v.size()); ++i) {
    const double z = (v[static_cast<std::size_t>(i)] - mu) / sd;
    up = std::max(0.0, up + z - k);
    down = std::max(0.0, down - z - k);
    if (up > h || down > h) {
      out.push_back(i + 1);
      up = down = 0.0;
    }
  }
  return out;
}

std::vector<int> as_days(const std::vector<Date>& dates) {
  std::vector<int> out;
  for (auto d : dates) out.push_back(static_cast<int>(days_between(day(1), d)) + 1);
  return out;
}

}  // namespace

TEST_CASE("constant series: no baseline fires", "[baselines]") {
  const auto s = ctr_series(std::vector<double>(120, 0.02));
  CHECK(ma_crossover(s, 7, 28).empty());
  CHECK(cusum(s).empty());
  CHECK(rolling_regression(s, 7).empty());
}

TEST_CASE("moving-average crossover examples", "[baselines][ma]") {
  const auto drop = step_series(120, 61, 0.02, 0.008);
  const auto days = as_days(ma_crossover(drop, 7, 28));
  REQUIRE(days.size() == 1);
  CHECK((days[0] >= 61 && days[0] <= 68));

  std::vector<double> rising;
  for (int i = 0; i < 90; ++i) rising.push_back(0.01 + 0.0001 * i);
  CHECK(ma_crossover(ctr_series(rising), 7, 28).empty());
}

TEST_CASE("moving-average crossover matches naive averages", "[baselines][ma]") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto v = random_walk(seed, 150);
    const auto s = ctr_series(v, 1000000);
    CHECK(as_days(ma_crossover(s, 7, 28)) == ma_oracle(s.metric_values(), 7, 28));
    CHECK(as_days(ma_crossover(s, 3, 10)) == ma_oracle(s.metric_values(), 3, 10));
  }
}

TEST_CASE("moving-average crossover argument checks", "[baselines][ma][errors]") {
  const auto s = ctr_series(std::vector<double>(28, 0.02));
  CHECK_THROWS_AS(ma_crossover(s, 7, 28), InsufficientData);
  CHECK_THROWS_AS(ma_crossover(s, 7, 7), InvalidInput);
  CHECK_THROWS_AS(ma_crossover(s, 0, 7), InvalidInput);
}

TEST_CASE("CUSUM flags a five-sigma step within three observations", "[baselines][cusum]") {
  const double a = 0.001;
  std::vector<double> v;
  for (int d = 1; d <= 60; ++d) v.push_back(0.02 + (d % 2 == 0 ? a : -a));
  // Burn-in sample sd of an alternating +-a sequence of even length.
  const double sd = a * std::sqrt(14.0 / 13.0);
  for (int d = 61; d <= 120; ++d) v.push_back(0.02 - 5.0 * sd);
  const auto s = ctr_series(v, 10000000);
  const auto flags = as_days(cusum(s));
  REQUIRE_FALSE(flags.empty());
  CHECK((flags[0] >= 61 && flags[0] <= 63));
  CHECK(flags == cusum_oracle(s.metric_values(), 14, 0.5, 5.0));
}

TEST_CASE("CUSUM matches a hand-rolled recursion", "[baselines][cusum]") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = ctr_series(random_walk(seed, 120), 1000000);
    const CusumConfig cfg{0.25, 3.0, 20};
    CHECK(as_days(cusum(s, cfg)) == cusum_oracle(s.metric_values(), 20, 0.25, 3.0));
  }
  const auto short_series = ctr_series(random_walk(3, 16), 1000000);
  CHECK(as_days(cusum(short_series)) == cusum_oracle(short_series.metric_values(), 8, 0.5, 5.0));
}

TEST_CASE("CUSUM argument and degeneracy errors", "[baselines][cusum][errors]") {
  std::vector<double> v(30, 0.02);
  v[20] = 0.01;
  CHECK_THROWS_AS(cusum(ctr_series(v)), DegenerateInput);
  CHECK_THROWS_AS(cusum(ctr_series(std::vector<double>(9, 0.02))), InsufficientData);
  const auto ok = ctr_series(random_walk(1, 40));
  CHECK_THROWS_AS(cusum(ok, CusumConfig{0.5, 0.0, 14}), InvalidInput);
  CHECK_THROWS_AS(cusum(ok, CusumConfig{-0.1, 5.0, 14}), InvalidInput);
}

TEST_CASE("rolling regression examples", "[baselines][rolling]") {
  std::vector<double> falling;
  for (int i = 0; i < 60; ++i) falling.push_back(0.03 - 0.0001 * i);
  const auto f = as_days(rolling_regression(ctr_series(falling), 7));
  REQUIRE(f.size() == 1);
  CHECK(f[0] == 7);

  const auto drop = as_days(rolling_regression(step_series(120, 61, 0.02, 0.008), 7));
  REQUIRE_FALSE(drop.empty());
  CHECK((drop[0] >= 61 && drop[0] <= 68));

  CHECK_THROWS_AS(rolling_regression(ctr_series(falling), 2), InvalidInput);
  CHECK_THROWS_AS(rolling_regression(ctr_series(falling), 7, 1.5), InvalidInput);
}

TEST_CASE("baselines are deterministic", "[baselines][property]") {
  const auto s = ctr_series(random_walk(9, 120), 1000000);
  CHECK(ma_crossover(s, 7, 28) == ma_crossover(s, 7, 28));
  CHECK(cusum(s) == cusum(s));
  CHECK(rolling_regression(s, 7) == rolling_regression(s, 7));
}
