#include "sigcpd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/lognormal_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <boost/random/seed_seq.hpp>

#include "sigcpd/error.hpp"

namespace sigcpd::synth {
namespace {

using Engine = boost::random::mt19937_64;

Engine make_engine(std::uint64_t seed, std::uint32_t stream) {
  boost::random::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return Engine(seq);
}

std::string fmt(double v) { return format_double(v); }

void check_range(std::vector<std::string>& out, std::string_view name, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi))
    out.push_back(std::string(name) + " = " + fmt(v) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]");
}

std::size_t expected_changes(PatternKind kind) {
  switch (kind) {
    case PatternKind::fatigue_recovery: return 2;
    case PatternKind::multi_stage_decline: return 0;  // any positive number
    default: return 1;
  }
}

PatternKind shape_kind(const PatternSpec& spec) {
  return spec.kind == PatternKind::non_continuous ? spec.base_kind : spec.kind;
}

double effective_noise(const PatternSpec& spec) {
  if (shape_kind(spec) == PatternKind::volatile_decline && spec.noise_cv > 0.0) return spec.ranges.noise_hi;
  return spec.noise_cv;
}

}  // namespace

std::string_view kind_name(PatternKind kind) noexcept {
  switch (kind) {
    case PatternKind::classic_wear_out: return "classic_wear_out";
    case PatternKind::sharp_drop: return "sharp_drop";
    case PatternKind::fatigue_recovery: return "fatigue_recovery";
    case PatternKind::volatile_decline: return "volatile_decline";
    case PatternKind::multi_stage_decline: return "multi_stage_decline";
    case PatternKind::gradual_linear_decay: return "gradual_linear_decay";
    case PatternKind::non_continuous: return "non_continuous";
  }
  return "sharp_drop";
}

std::optional<PatternKind> parse_kind(std::string_view name) noexcept {
  for (auto k : all_kinds)
    if (kind_name(k) == name) return k;
  return std::nullopt;
}

std::vector<int> PatternSpec::resolved_change_days() const {
  if (!change_days.empty()) return change_days;
  const int n = duration_days;
  switch (shape_kind(*this)) {
    case PatternKind::classic_wear_out: return {std::max(1, n / 4)};
    case PatternKind::sharp_drop: return {n / 2};
    case PatternKind::fatigue_recovery: return {n / 3, 2 * n / 3};
    case PatternKind::volatile_decline:
    case PatternKind::gradual_linear_decay: return {onset_day};
    case PatternKind::multi_stage_decline: {
      std::vector<int> days;
      for (int i = 1; i <= n_steps; ++i) days.push_back(n * i / (n_steps + 1));
      return days;
    }
    case PatternKind::non_continuous: break;
  }
  return {};
}

std::vector<std::string> PatternSpec::violations() const {
  std::vector<std::string> v;
  if (!(baseline_ctr > 0.0 && baseline_ctr <= 1.0)) v.push_back("baseline_ctr must lie in (0, 1]");
  if (!(weekly_decay_rate >= 0.0) || !std::isfinite(weekly_decay_rate)) v.push_back("weekly_decay_rate must be >= 0");
  if (!(noise_cv >= 0.0) || !std::isfinite(noise_cv)) v.push_back("noise_cv must be >= 0");
  if (duration_days < 2) v.push_back("duration_days must be >= 2");
  if (impressions_mean < 1) v.push_back("impressions_mean must be >= 1");
  if (!(gap_fraction >= 0.0 && gap_fraction < 1.0)) v.push_back("gap_fraction must lie in [0, 1)");
  if (!(drop_factor > 0.0 && drop_factor <= 1.0)) v.push_back("drop_factor must lie in (0, 1]");
  if (!(step_fraction > 0.0 && step_fraction < 1.0)) v.push_back("step_fraction must lie in (0, 1)");
  if (n_steps < 1) v.push_back("n_steps must be >= 1");
  if (kind == PatternKind::non_continuous && base_kind == PatternKind::non_continuous)
    v.push_back("base_kind cannot itself be non_continuous");
  if (kind == PatternKind::non_continuous && min_observations > duration_days)
    v.push_back("min_observations exceeds duration_days");

  if (enforce_ranges) {
    const Ranges& r = ranges;
    check_range(v, "baseline_ctr", baseline_ctr, r.baseline_lo, r.baseline_hi);
    check_range(v, "weekly_decay_rate", weekly_decay_rate, r.decay_lo, r.decay_hi);
    if (noise_cv != 0.0) check_range(v, "noise_cv", noise_cv, r.noise_lo, r.noise_hi);
    check_range(v, "duration_days", duration_days, r.duration_lo, r.duration_hi);
    const PatternKind shape = shape_kind(*this);
    if (shape == PatternKind::sharp_drop) check_range(v, "drop_factor", drop_factor, r.drop_lo, r.drop_hi);
    if (shape == PatternKind::multi_stage_decline) {
      check_range(v, "step_fraction", step_fraction, r.step_lo, r.step_hi);
      if (change_days.empty() && (n_steps < 2 || n_steps > 3)) v.push_back("n_steps must be 2 or 3");
    }
  }

  if (duration_days >= 2 && !(kind == PatternKind::non_continuous && base_kind == PatternKind::non_continuous)) {
    const auto days = resolved_change_days();
    const std::size_t want = expected_changes(shape_kind(*this));
    if (want != 0 && days.size() != want)
      v.push_back(std::string(kind_name(shape_kind(*this))) + " takes " + std::to_string(want) + " change day(s), got " +
                  std::to_string(days.size()));
    if (days.empty()) v.push_back("at least one change day is required");
    for (std::size_t i = 0; i < days.size(); ++i) {
      if (days[i] < 1 || days[i] > duration_days)
        v.push_back("change day " + std::to_string(days[i]) + " outside [1, " + std::to_string(duration_days) + "]");
      if (i > 0 && days[i] <= days[i - 1]) v.push_back("change days must be strictly increasing");
    }
  }
  return v;
}

void PatternSpec::validate() const {
  if (auto v = violations(); !v.empty()) throw ValidationError(std::move(v));
}

std::vector<double> clean_curve(const PatternSpec& spec) {
  spec.validate();
  const auto tau = spec.resolved_change_days();
  const double b = spec.baseline_ctr;
  const int n = spec.duration_days;
  std::vector<double> ctr(static_cast<std::size_t>(n));
  for (int d = 1; d <= n; ++d) {
    double c = b;
    switch (shape_kind(spec)) {
      case PatternKind::sharp_drop:
        c = d < tau[0] ? b : b * spec.drop_factor;
        break;
      case PatternKind::volatile_decline:
      case PatternKind::gradual_linear_decay:
        c = b * std::max(0.1, 1.0 - spec.weekly_decay_rate * std::max(0, d - tau[0]) / 7.0);
        break;
      case PatternKind::classic_wear_out: {
        const double tp = tau[0];
        c = b * (1.0 + d / tp) * std::exp(-d / (2.0 * tp)) / (2.0 * std::exp(-0.5));
        break;
      }
      case PatternKind::fatigue_recovery:
        if (d < tau[0])
          c = b;
        else if (d < tau[1])
          c = b * (1.0 - 0.5 * (d - tau[0]) / static_cast<double>(tau[1] - tau[0]));
        else
          c = b * (0.5 + 0.2 * std::min(1.0, (d - tau[1]) / 7.0));
        break;
      case PatternKind::multi_stage_decline:
        for (int s : tau)
          if (d >= s) c *= 1.0 - spec.step_fraction;
        break;
      case PatternKind::non_continuous:
        break;
    }
    ctr[static_cast<std::size_t>(d - 1)] = c;
  }
  return ctr;
}

Generated generate(const PatternSpec& input) {
  input.validate();
  PatternSpec spec = input;
  spec.change_days = input.resolved_change_days();
  spec.noise_cv = effective_noise(input);

  auto clean = clean_curve(spec);
  const auto n = static_cast<std::size_t>(spec.duration_days);

  std::vector<bool> keep(n, true);
  if (spec.kind == PatternKind::non_continuous && spec.gap_fraction > 0.0) {
    Engine gaps = make_engine(spec.seed, 1);
    boost::random::uniform_01<double> u01;
    std::vector<double> u(n);
    for (auto& x : u) x = u01(gaps);
    std::vector<std::size_t> removed;
    for (std::size_t i = 0; i < n; ++i)
      if (u[i] < spec.gap_fraction) {
        keep[i] = false;
        removed.push_back(i);
      }
    // Restore the least-removed days first until the floor is met.
    std::stable_sort(removed.begin(), removed.end(), [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });
    auto kept = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
    for (std::size_t i = 0; i < removed.size() && kept < static_cast<std::size_t>(spec.min_observations); ++i) {
      keep[removed[i]] = true;
      ++kept;
    }
  }

  Engine rng = make_engine(spec.seed, 0);
  const double m = static_cast<double>(spec.impressions_mean);
  const double imp_s2 = std::log(1.0 + 0.2 * 0.2);
  boost::random::lognormal_distribution<double> imp_dist(std::log(m) - imp_s2 / 2.0, std::sqrt(imp_s2));
  const double noise_s2 = std::log(1.0 + spec.noise_cv * spec.noise_cv);
  boost::random::lognormal_distribution<double> noise_dist(-noise_s2 / 2.0, std::sqrt(noise_s2));

  std::vector<SeriesPoint> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t imps = spec.impressions_mean;
    std::int64_t clicks = 0;
    if (spec.noise_cv == 0.0) {
      clicks = std::llround(static_cast<double>(imps) * clean[i]);
    } else {
      imps = std::max<std::int64_t>(1, std::llround(imp_dist(rng)));
      const double p = std::clamp(clean[i] * noise_dist(rng), 0.0, 1.0);
      boost::random::binomial_distribution<std::int64_t, double> clicks_dist(imps, p);
      clicks = clicks_dist(rng);
    }
    clicks = std::clamp<std::int64_t>(clicks, 0, imps);
    if (keep[i])
      points.push_back(SeriesPoint::make(spec.start_date + std::chrono::days{static_cast<int>(i)}, imps, clicks));
  }

  GroundTruth truth;
  truth.change_days = spec.change_days;
  for (int d : truth.change_days) truth.change_dates.push_back(spec.start_date + std::chrono::days{d - 1});
  return Generated{std::move(spec), TimeSeries(std::move(points)), std::move(truth), std::move(clean)};
}

std::vector<PatternSpec> sample_specs(const BatchOptions& options) {
  if (options.n_per_pattern < 1) throw InvalidInput("n_per_pattern must be >= 1");
  Engine rng = make_engine(options.master_seed, 2);
  const Ranges& r = options.ranges;
  using Real = boost::random::uniform_real_distribution<double>;
  using Int = boost::random::uniform_int_distribution<int>;
  std::vector<PatternSpec> specs;
  specs.reserve(options.kinds.size() * static_cast<std::size_t>(options.n_per_pattern));
  for (PatternKind kind : options.kinds) {
    for (int i = 0; i < options.n_per_pattern; ++i) {
      PatternSpec s;
      s.kind = kind;
      s.ranges = r;
      s.baseline_ctr = Real(r.baseline_lo, r.baseline_hi)(rng);
      s.weekly_decay_rate = Real(r.decay_lo, r.decay_hi)(rng);
      const double noise = Real(r.noise_lo, r.noise_hi)(rng);
      s.noise_cv = options.noise_cv.value_or(noise);
      const int duration = Int(r.duration_lo, r.duration_hi)(rng);
      s.duration_days = options.duration_days.value_or(duration);
      s.drop_factor = Real(r.drop_lo, r.drop_hi)(rng);
      s.n_steps = Int(2, 3)(rng);
      s.step_fraction = Real(r.step_lo, r.step_hi)(rng);
      s.base_kind = all_kinds[Int(0, 5)(rng)];
      s.seed = rng();
      specs.push_back(std::move(s));
    }
  }
  return specs;
}

std::vector<Generated> generate_batch(const BatchOptions& options) {
  const auto specs = sample_specs(options);
  std::vector<Generated> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(generate(s));
  return out;
}

}  // namespace sigcpd::synth
