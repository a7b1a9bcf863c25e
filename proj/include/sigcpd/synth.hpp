#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigcpd/series.hpp"

namespace sigcpd::synth {

enum class PatternKind {
  classic_wear_out,
  sharp_drop,
  fatigue_recovery,
  volatile_decline,
  multi_stage_decline,
  gradual_linear_decay,
  non_continuous,
};

inline constexpr PatternKind all_kinds[] = {
    PatternKind::classic_wear_out,    PatternKind::sharp_drop,           PatternKind::fatigue_recovery,
    PatternKind::volatile_decline,    PatternKind::multi_stage_decline,  PatternKind::gradual_linear_decay,
    PatternKind::non_continuous,
};

std::string_view kind_name(PatternKind kind) noexcept;
std::optional<PatternKind> parse_kind(std::string_view name) noexcept;

/// Inclusive parameter ranges enforced by PatternSpec::violations.
struct Ranges {
  double baseline_lo = 0.005, baseline_hi = 0.03;
  double decay_lo = 0.02, decay_hi = 0.08;
  double noise_lo = 0.10, noise_hi = 0.30;
  int duration_lo = 30, duration_hi = 180;
  double drop_lo = 0.4, drop_hi = 0.7;
  double step_lo = 0.15, step_hi = 0.25;
};

struct PatternSpec {
  PatternKind kind = PatternKind::sharp_drop;
  double baseline_ctr = 0.02;
  double weekly_decay_rate = 0.05;
  /// 0 selects deterministic output: constant impressions, rounded clicks.
  double noise_cv = 0.2;
  int duration_days = 120;
  std::int64_t impressions_mean = 50000;
  std::uint64_t seed = 0;
  /// non_continuous only.
  double gap_fraction = 0.3;
  /// non_continuous only: the pattern whose days are thinned.
  PatternKind base_kind = PatternKind::sharp_drop;
  /// sharp_drop: post-change CTR as a fraction of baseline.
  double drop_factor = 0.5;
  /// multi_stage_decline: number of steps and the fraction lost at each.
  int n_steps = 3;
  double step_fraction = 0.2;
  /// gradual_linear_decay / volatile_decline onset.
  int onset_day = 20;
  /// Empty means the per-kind defaults.
  std::vector<int> change_days;
  /// non_continuous never thins below this many observations.
  int min_observations = 28;
  Date start_date = Date{std::chrono::year{2024} / 1 / 1};
  bool enforce_ranges = true;
  Ranges ranges;

  std::vector<std::string> violations() const;
  /// Throws ValidationError listing every violation.
  void validate() const;
  /// change_days, or the per-kind defaults when empty.
  std::vector<int> resolved_change_days() const;
};

/// Change days are 1-based and mark the first day of the new regime.
struct GroundTruth {
  std::vector<int> change_days;
  std::vector<Date> change_dates;
};

struct Generated {
  PatternSpec spec;
  TimeSeries series;
  GroundTruth truth;
  /// Noise-free CTR for every calendar day 1..duration_days.
  std::vector<double> clean_ctr;
};

/// Noise-free CTR on days 1..duration_days.
std::vector<double> clean_curve(const PatternSpec& spec);

Generated generate(const PatternSpec& spec);

struct BatchOptions {
  std::vector<PatternKind> kinds{std::begin(all_kinds), std::end(all_kinds)};
  int n_per_pattern = 1;
  std::uint64_t master_seed = 0;
  /// Forced noise level for every series; unset samples the default range.
  std::optional<double> noise_cv;
  /// Forced duration; unset samples the default range.
  std::optional<int> duration_days;
  Ranges ranges;
};

/// Kind-major corpus; every spec is sampled from one stream seeded by
/// master_seed, so the corpus is reproducible.
std::vector<PatternSpec> sample_specs(const BatchOptions& options);
std::vector<Generated> generate_batch(const BatchOptions& options);

}  // namespace sigcpd::synth
