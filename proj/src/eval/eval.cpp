#include "sigcpd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <tuple>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/seed_seq.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "sigcpd/baselines.hpp"
#include "sigcpd/detector.hpp"
#include "sigcpd/error.hpp"
#include "sigcpd/parallel.hpp"

namespace sigcpd::eval {
namespace {

boost::random::mt19937_64 make_engine(std::uint64_t seed, std::uint32_t stream) {
  boost::random::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return boost::random::mt19937_64(seq);
}

double quantile7(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

Interval interval(const std::vector<double>& v, double level) {
  const double tail = (1.0 - level) / 2.0;
  return Interval{quantile7(v, tail), quantile7(v, 1.0 - tail)};
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

int as_int(const Params& p, const std::string& key) { return static_cast<int>(p.at(key)); }

std::optional<std::vector<Date>> try_run(Method method, const Params& params, const TimeSeries& series,
                                         bool swallow_short = true) {
  try {
    switch (method) {
      case Method::signature: {
        DetectorConfig cfg;
        cfg.window = as_int(params, "window");
        cfg.depth = as_int(params, "depth");
        cfg.k = params.at("k");
        cfg.alpha = params.at("alpha");
        if (auto it = params.find("merge_gap"); it != params.end()) cfg.merge_gap = static_cast<int>(it->second);
        if (auto it = params.find("merge"); it != params.end()) cfg.merge = it->second != 0.0;
        if (auto it = params.find("log_signature"); it != params.end() && it->second != 0.0)
          cfg.feature_mode = FeatureMode::log_signature;
        const auto report = detect(series, cfg);
        std::vector<Date> out;
        for (const auto& cp : report.change_points) out.push_back(cp.date);
        return out;
      }
      case Method::ma_crossover:
        return baselines::ma_crossover(series, as_int(params, "short"), as_int(params, "long"));
      case Method::cusum:
        return baselines::cusum(series, {params.at("k_ref"), params.at("h"), as_int(params, "burn_in")});
      case Method::rolling_regression:
        return baselines::rolling_regression(series, as_int(params, "window"), params.at("alpha"));
    }
  } catch (const InsufficientData&) {
    if (!swallow_short) throw;
    return std::nullopt;
  }
  return std::vector<Date>{};
}

}  // namespace

std::vector<MatchPair> match_detections(std::span<const Date> detected, std::span<const Date> truth,
                                        const MatchPolicy& policy) {
  if (policy.tolerance_days < 0) throw InvalidInput("tolerance_days must be >= 0");
  struct Candidate {
    std::int64_t gap;
    std::size_t d, t;
  };
  std::vector<Candidate> cand;
  for (std::size_t d = 0; d < detected.size(); ++d)
    for (std::size_t t = 0; t < truth.size(); ++t) {
      const std::int64_t delay = days_between(truth[t], detected[d]);
      if (std::abs(delay) <= policy.tolerance_days) cand.push_back({std::abs(delay), d, t});
    }
  std::sort(cand.begin(), cand.end(), [&](const Candidate& a, const Candidate& b) {
    return std::tie(a.gap, detected[a.d], truth[a.t]) < std::tie(b.gap, detected[b.d], truth[b.t]);
  });
  std::vector<bool> used_d(detected.size()), used_t(truth.size());
  std::vector<MatchPair> out;
  for (const auto& c : cand) {
    if (used_d[c.d] || used_t[c.t]) continue;
    used_d[c.d] = used_t[c.t] = true;
    out.push_back(MatchPair{detected[c.d], truth[c.t], days_between(truth[c.t], detected[c.d])});
  }
  std::sort(out.begin(), out.end(), [](const MatchPair& a, const MatchPair& b) { return a.truth < b.truth; });
  return out;
}

EvalMetrics metrics_from_counts(std::size_t n_detected, std::size_t n_true, std::size_t n_matched, double delay_sum) {
  EvalMetrics m;
  m.n_detected = n_detected;
  m.n_true = n_true;
  m.n_matched = n_matched;
  m.delay_sum = delay_sum;
  m.precision = n_detected == 0 ? 0.0 : static_cast<double>(n_matched) / static_cast<double>(n_detected);
  if (n_true == 0)
    m.recall = n_detected == 0 ? 1.0 : 0.0;
  else
    m.recall = static_cast<double>(n_matched) / static_cast<double>(n_true);
  m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  if (n_matched > 0) m.mean_delay_days = delay_sum / static_cast<double>(n_matched);
  return m;
}

EvalMetrics score(std::span<const Date> detected, std::span<const Date> truth, const MatchPolicy& policy) {
  const auto pairs = match_detections(detected, truth, policy);
  double sum = 0.0;
  for (const auto& p : pairs) sum += static_cast<double>(p.delay);
  return metrics_from_counts(detected.size(), truth.size(), pairs.size(), sum);
}

EvalMetrics aggregate(std::span<const EvalMetrics> per_series) {
  std::size_t d = 0, t = 0, m = 0;
  double sum = 0.0;
  for (const auto& s : per_series) {
    d += s.n_detected;
    t += s.n_true;
    m += s.n_matched;
    sum += s.delay_sum;
  }
  return metrics_from_counts(d, t, m, sum);
}

EvalMetrics bootstrap_ci(std::span<const EvalMetrics> per_series, int resamples, double level, std::uint64_t seed) {
  if (per_series.size() < 2) throw InvalidInput("bootstrap needs at least 2 series");
  if (resamples < 1) throw InvalidInput("bootstrap needs at least 1 resample");
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("confidence level must lie in (0, 1)");

  EvalMetrics out = aggregate(per_series);
  auto rng = make_engine(seed, 3);
  boost::random::uniform_int_distribution<std::size_t> pick(0, per_series.size() - 1);
  std::vector<double> p, r, f, delay;
  std::vector<EvalMetrics> sample(per_series.size());
  for (int b = 0; b < resamples; ++b) {
    for (auto& s : sample) s = per_series[pick(rng)];
    const EvalMetrics m = aggregate(sample);
    p.push_back(m.precision);
    r.push_back(m.recall);
    f.push_back(m.f1);
    if (m.mean_delay_days) delay.push_back(*m.mean_delay_days);
  }
  out.precision_ci = interval(p, level);
  out.recall_ci = interval(r, level);
  out.f1_ci = interval(f, level);
  if (!delay.empty()) out.delay_ci = interval(delay, level);
  return out;
}

std::string_view method_name(Method method) noexcept {
  switch (method) {
    case Method::signature: return "signature";
    case Method::ma_crossover: return "ma_crossover";
    case Method::cusum: return "cusum";
    case Method::rolling_regression: return "rolling_regression";
  }
  return "signature";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  for (auto m : {Method::signature, Method::ma_crossover, Method::cusum, Method::rolling_regression})
    if (method_name(m) == name) return m;
  return std::nullopt;
}

Params default_params(Method method) {
  switch (method) {
    case Method::signature: return {{"window", 14}, {"depth", 3}, {"k", 2.0}, {"alpha", 0.05}};
    case Method::ma_crossover: return {{"short", 7}, {"long", 28}};
    case Method::cusum: return {{"k_ref", 0.5}, {"h", 5.0}, {"burn_in", 14}};
    case Method::rolling_regression: return {{"window", 7}, {"alpha", 0.05}};
  }
  return {};
}

void validate_params(Method method, const Params& params) {
  const Params defaults = default_params(method);
  std::vector<std::string> v;
  auto need_int = [&](const std::string& key, double lo) {
    auto it = params.find(key);
    if (it == params.end()) return;
    if (!is_integer(it->second) || it->second < lo)
      v.push_back(key + " must be an integer >= " + format_double(lo) + " (got " + format_double(it->second) + ")");
  };
  auto need_pos = [&](const std::string& key) {
    auto it = params.find(key);
    if (it != params.end() && !(it->second > 0.0 && std::isfinite(it->second)))
      v.push_back(key + " must be positive");
  };
  for (const auto& [key, value] : params) {
    const bool optional_key =
        method == Method::signature && (key == "merge_gap" || key == "merge" || key == "log_signature");
    if (!defaults.contains(key) && !optional_key)
      v.push_back("unknown parameter '" + key + "' for method " + std::string(method_name(method)));
  }
  switch (method) {
    case Method::signature:
      need_int("window", 2);
      need_int("depth", 1);
      need_int("merge_gap", 0);
      need_pos("k");
      break;
    case Method::ma_crossover:
      need_int("short", 1);
      need_int("long", 2);
      if (params.contains("short") && params.contains("long") && params.at("short") >= params.at("long"))
        v.push_back("short must be < long");
      break;
    case Method::cusum:
      need_pos("h");
      need_int("burn_in", 2);
      if (auto it = params.find("k_ref"); it != params.end() && !(it->second >= 0.0)) v.push_back("k_ref must be >= 0");
      break;
    case Method::rolling_regression:
      need_int("window", 3);
      break;
  }
  if (auto it = params.find("alpha"); it != params.end() && !(it->second > 0.0 && it->second < 1.0))
    v.push_back("alpha must lie in (0, 1)");
  if (!v.empty()) throw ValidationError(std::move(v));
}

std::vector<Date> run_method(Method method, const Params& params, const TimeSeries& series) {
  Params full = default_params(method);
  for (const auto& [k, v] : params) full[k] = v;
  validate_params(method, full);
  return try_run(method, full, series, false).value_or(std::vector<Date>{});
}

CorpusResult evaluate_corpus(Method method, const Params& params, std::span<const LabeledSeries> corpus,
                             const MatchPolicy& policy, unsigned threads) {
  Params full = default_params(method);
  for (const auto& [k, v] : params) full[k] = v;
  validate_params(method, full);

  CorpusResult out;
  out.detections.resize(corpus.size());
  out.per_series.resize(corpus.size());
  std::vector<char> short_flags(corpus.size(), 0);
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    auto found = try_run(method, full, corpus[i].series);
    short_flags[i] = !found.has_value();
    out.detections[i] = found.value_or(std::vector<Date>{});
    out.per_series[i] = score(out.detections[i], corpus[i].truth, policy);
  });
  out.n_too_short = static_cast<std::size_t>(std::count(short_flags.begin(), short_flags.end(), 1));
  out.pooled = aggregate(out.per_series);
  return out;
}

Split split_by_parity(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  auto rng = make_engine(seed, 4);
  for (std::size_t i = n; i > 1; --i) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(idx[i - 1], idx[pick(rng)]);
  }
  Split s;
  for (std::size_t r = 0; r < n; ++r) (r % 2 == 0 ? s.train : s.validation).push_back(idx[r]);
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  return s;
}

std::string_view objective_name(Objective objective) noexcept {
  switch (objective) {
    case Objective::f1: return "f1";
    case Objective::precision: return "precision";
    case Objective::recall: return "recall";
  }
  return "f1";
}

std::optional<Objective> parse_objective(std::string_view name) noexcept {
  for (auto o : {Objective::f1, Objective::precision, Objective::recall})
    if (objective_name(o) == name) return o;
  return std::nullopt;
}

std::vector<Params> expand_grid(Method method, const Grid& grid) {
  if (grid.empty()) throw InvalidInput("parameter grid is empty");
  for (const auto& [key, values] : grid)
    if (values.empty()) throw InvalidInput("parameter grid entry '" + key + "' has no values");
  std::vector<Params> out{default_params(method)};
  for (const auto& [key, values] : grid) {
    std::vector<Params> next;
    next.reserve(out.size() * values.size());
    for (const auto& base : out)
      for (double v : values) {
        Params p = base;
        p[key] = v;
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  for (const auto& p : out) validate_params(method, p);
  return out;
}

GridResult grid_search(Method method, const Grid& grid, std::span<const LabeledSeries> corpus,
                       const MatchPolicy& policy, Objective objective, unsigned threads) {
  if (corpus.empty()) throw InvalidInput("grid search corpus is empty");
  const auto cells = expand_grid(method, grid);
  GridResult result;
  for (const auto& params : cells)
    result.rows.push_back(GridRow{params, evaluate_corpus(method, params, corpus, policy, threads).pooled});

  auto value = [&](const EvalMetrics& m) {
    switch (objective) {
      case Objective::precision: return m.precision;
      case Objective::recall: return m.recall;
      case Objective::f1: break;
    }
    return m.f1;
  };
  auto delay = [](const EvalMetrics& m) { return m.mean_delay_days.value_or(std::numeric_limits<double>::infinity()); };
  const GridRow* best = &result.rows.front();
  for (const auto& row : result.rows) {
    const double a = value(row.metrics), b = value(best->metrics);
    if (a > b || (a == b && (delay(row.metrics) < delay(best->metrics) ||
                             (delay(row.metrics) == delay(best->metrics) && row.params < best->params))))
      best = &row;
  }
  result.best = best->params;
  result.best_metrics = best->metrics;
  return result;
}

std::vector<SensitivityRow> sensitivity_report(std::span<const LabeledSeries> corpus, const SensitivityOptions& o) {
  if (o.windows.empty() || o.ks.empty() || o.depths.empty()) throw InvalidInput("sensitivity grid is empty");
  if (corpus.size() < 2) throw InvalidInput("sensitivity report needs at least 2 series");
  std::vector<SensitivityRow> rows;
  for (int w : o.windows)
    for (double k : o.ks)
      for (int depth : o.depths) {
        const Params p{{"window", w}, {"k", k}, {"depth", depth}, {"alpha", 0.05}};
        const auto res = evaluate_corpus(Method::signature, p, corpus, o.policy, o.threads);
        rows.push_back(SensitivityRow{
            w, k, depth, o.resamples > 0 ? bootstrap_ci(res.per_series, o.resamples, 0.95, o.seed) : res.pooled});
      }
  return rows;
}

namespace {
std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }
std::string lo(const std::optional<Interval>& v) { return v ? format_double(v->lo) : ""; }
std::string hi(const std::optional<Interval>& v) { return v ? format_double(v->hi) : ""; }
}  // namespace

void write_sensitivity_csv(std::ostream& out, std::span<const SensitivityRow> rows) {
  out << "window,k,depth,precision,precision_lo,precision_hi,recall,recall_lo,recall_hi,f1,f1_lo,f1_hi,"
         "mean_delay_days,delay_lo,delay_hi,n_detected,n_true,n_matched\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << r.window << ',' << format_double(r.k) << ',' << r.depth << ',' << format_double(m.precision) << ','
        << lo(m.precision_ci) << ',' << hi(m.precision_ci) << ',' << format_double(m.recall) << ','
        << lo(m.recall_ci) << ',' << hi(m.recall_ci) << ',' << format_double(m.f1) << ',' << lo(m.f1_ci) << ','
        << hi(m.f1_ci) << ',' << opt(m.mean_delay_days) << ',' << lo(m.delay_ci) << ',' << hi(m.delay_ci) << ','
        << m.n_detected << ',' << m.n_true << ',' << m.n_matched << '\n';
  }
}

}  // namespace sigcpd::eval
