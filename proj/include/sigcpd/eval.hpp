#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sigcpd/series.hpp"

namespace sigcpd::eval {

struct MatchPolicy {
  int tolerance_days = 3;
};

struct MatchPair {
  Date detected;
  Date truth;
  /// detected - truth in days; negative is an early warning.
  std::int64_t delay = 0;
};

/// Greedy one-to-one matching in order of increasing |delay|, then earlier
/// detected date, then earlier truth date. Pairs further apart than the
/// tolerance never match. Output is sorted by truth date.
std::vector<MatchPair> match_detections(std::span<const Date> detected, std::span<const Date> truth,
                                        const MatchPolicy& policy = {});

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct EvalMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Absent when nothing matched.
  std::optional<double> mean_delay_days;
  std::size_t n_detected = 0;
  std::size_t n_true = 0;
  std::size_t n_matched = 0;
  double delay_sum = 0.0;
  std::optional<Interval> precision_ci, recall_ci, f1_ci, delay_ci;
};

/// Builds the ratios from raw counts with the conventions: precision 0 with
/// no detections; recall 1 when there is nothing to find and nothing found.
EvalMetrics metrics_from_counts(std::size_t n_detected, std::size_t n_true, std::size_t n_matched, double delay_sum);

EvalMetrics score(std::span<const Date> detected, std::span<const Date> truth, const MatchPolicy& policy = {});

/// Pools counts across series before forming ratios.
EvalMetrics aggregate(std::span<const EvalMetrics> per_series);

/// Percentile bootstrap (type-7 quantiles) over series-level resampling of
/// the pooled metrics. Throws InvalidInput for fewer than 2 series.
EvalMetrics bootstrap_ci(std::span<const EvalMetrics> per_series, int resamples = 100, double level = 0.95,
                         std::uint64_t seed = 0);

enum class Method { signature, ma_crossover, cusum, rolling_regression };

std::string_view method_name(Method method) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

using Params = std::map<std::string, double>;

/// Defaults every parameter the method reads. The signature method also
/// accepts merge_gap, merge (0 or 1) and log_signature (0 or 1).
Params default_params(Method method);
/// Throws ValidationError for unknown keys or out-of-range values.
void validate_params(Method method, const Params& params);

/// Change point dates found by the method. Throws InsufficientData when the
/// series is too short and ValidationError for bad parameters.
std::vector<Date> run_method(Method method, const Params& params, const TimeSeries& series);

struct LabeledSeries {
  std::string id;
  TimeSeries series;
  std::vector<Date> truth;
};

struct CorpusResult {
  std::vector<std::vector<Date>> detections;
  std::vector<EvalMetrics> per_series;
  EvalMetrics pooled;
  /// Series shorter than the method's minimum length.
  std::size_t n_too_short = 0;
};

CorpusResult evaluate_corpus(Method method, const Params& params, std::span<const LabeledSeries> corpus,
                             const MatchPolicy& policy = {}, unsigned threads = 0);

/// Seeded shuffle of indices; even ranks train, odd ranks validate.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};
Split split_by_parity(std::size_t n, std::uint64_t seed);

enum class Objective { f1, precision, recall };

std::string_view objective_name(Objective objective) noexcept;
std::optional<Objective> parse_objective(std::string_view name) noexcept;

using Grid = std::map<std::string, std::vector<double>>;

/// Every combination of the grid values, keys varying lexicographically with
/// the last key fastest. Keys missing from the grid keep the defaults.
std::vector<Params> expand_grid(Method method, const Grid& grid);

struct GridRow {
  Params params;
  EvalMetrics metrics;
};

struct GridResult {
  Params best;
  EvalMetrics best_metrics;
  std::vector<GridRow> rows;
};

/// Exhaustive search. Ties on the objective go to the more negative mean
/// delay (absent delay ranks last), then to the lexicographically smaller
/// parameter map.
GridResult grid_search(Method method, const Grid& grid, std::span<const LabeledSeries> corpus,
                       const MatchPolicy& policy = {}, Objective objective = Objective::f1, unsigned threads = 0);

struct SensitivityRow {
  int window = 0;
  double k = 0.0;
  int depth = 0;
  EvalMetrics metrics;
};

struct SensitivityOptions {
  std::vector<int> windows{7, 14, 21};
  std::vector<double> ks{1.5, 2.0, 2.5};
  std::vector<int> depths{3};
  MatchPolicy policy;
  int resamples = 100;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// One row per (window, k, depth) cell of the signature detector, with
/// bootstrap intervals unless resamples is 0. Throws InvalidInput for an
/// empty grid.
std::vector<SensitivityRow> sensitivity_report(std::span<const LabeledSeries> corpus, const SensitivityOptions& options);

void write_sensitivity_csv(std::ostream& out, std::span<const SensitivityRow> rows);

}  // namespace sigcpd::eval
