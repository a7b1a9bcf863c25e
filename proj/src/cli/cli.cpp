#include "sigcpd/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "sigcpd/detector.hpp"
#include "sigcpd/error.hpp"
#include "sigcpd/eval.hpp"
#include "sigcpd/io.hpp"
#include "sigcpd/synth.hpp"
#include "sigcpd/wastage.hpp"

namespace sigcpd::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

struct RunConfig {
  // detection
  int window = 14;
  int depth = 3;
  double k = 2.0;
  double alpha = 0.05;
  int merge_gap = 0;
  bool no_merge = false;
  std::string feature_mode = "full-signature";
  std::string metric = "ctr";
  std::string method = "signature";
  int ma_short = 7, ma_long = 28;
  double k_ref = 0.5, h = 5.0;
  int burn_in = 14;

  // files
  std::string input, out, plot, csv, corpus;

  // generation
  std::string pattern;
  bool all = false;
  int n = 1;
  std::uint64_t seed = 0;
  double noise_cv = 0, baseline_ctr = 0, decay_rate = 0, gap_fraction = 0, drop_factor = 0, step_fraction = 0;
  int duration = 0, n_steps = 0, onset_day = 0;
  std::int64_t impressions_mean = 0;
  std::vector<int> change_days;
  std::string base_kind;
  bool no_range_check = false;

  // evaluation
  int tolerance = 3;
  int bootstrap = 100;
  unsigned threads = 0;
  double cpc = 0;
  std::vector<int> windows{7, 14, 21};
  std::vector<double> ks{1.5, 2.0, 2.5};
  std::vector<int> depths{3};
  std::string objective = "f1";
};

bool given(const CLI::App* app, const std::string& name) { return app->count(name) > 0; }

void add_detector_flags(CLI::App* app, RunConfig& c) {
  app->add_option("--window", c.window, "Window size in observations")->capture_default_str();
  app->add_option("--depth", c.depth, "Signature truncation depth")->capture_default_str();
  app->add_option("--k", c.k, "Threshold multiplier")->capture_default_str();
  app->add_option("--alpha", c.alpha, "Trend test significance level")->capture_default_str();
  app->add_option("--merge-gap", c.merge_gap, "Merge radius in days (default 2*(window-1))");
  app->add_flag("--no-merge", c.no_merge, "Report every exceedance separately");
  app->add_option("--feature-mode", c.feature_mode, "full-signature or log-signature")->capture_default_str();
  app->add_option("--metric", c.metric, "ctr, impressions, clicks or cost")->capture_default_str();
}

void add_method_flags(CLI::App* app, RunConfig& c) {
  app->add_option("--method", c.method, "signature, ma_crossover, cusum or rolling_regression")->capture_default_str();
  app->add_option("--short", c.ma_short, "MA crossover short window")->capture_default_str();
  app->add_option("--long", c.ma_long, "MA crossover long window")->capture_default_str();
  app->add_option("--cusum-k", c.k_ref, "CUSUM reference value")->capture_default_str();
  app->add_option("--cusum-h", c.h, "CUSUM decision interval")->capture_default_str();
  app->add_option("--burn-in", c.burn_in, "CUSUM burn-in observations")->capture_default_str();
}

void add_pattern_flags(CLI::App* app, RunConfig& c) {
  app->add_option("--pattern", c.pattern, "Pattern kind");
  app->add_flag("--all", c.all, "All seven pattern kinds");
  app->add_option("--n", c.n, "Series per pattern (sampled parameters)");
  app->add_option("--seed", c.seed, "Seed")->capture_default_str();
  app->add_option("--noise-cv", c.noise_cv, "Noise coefficient of variation (0 = noiseless)");
  app->add_option("--baseline-ctr", c.baseline_ctr, "Baseline CTR");
  app->add_option("--decay-rate", c.decay_rate, "Weekly decay rate");
  app->add_option("--duration", c.duration, "Duration in days");
  app->add_option("--impressions-mean", c.impressions_mean, "Mean daily impressions");
  app->add_option("--gap-fraction", c.gap_fraction, "Fraction of days removed (non_continuous)");
  app->add_option("--drop-factor", c.drop_factor, "Post-drop CTR fraction (sharp_drop)");
  app->add_option("--n-steps", c.n_steps, "Number of steps (multi_stage_decline)");
  app->add_option("--step-fraction", c.step_fraction, "Fraction lost per step (multi_stage_decline)");
  app->add_option("--onset-day", c.onset_day, "Decay onset day");
  app->add_option("--change-day", c.change_days, "Ground-truth change day (repeatable)");
  app->add_option("--base-kind", c.base_kind, "Base pattern (non_continuous)");
  app->add_flag("--no-range-check", c.no_range_check, "Allow parameters outside the default ranges");
}

Metric parse_metric_flag(const std::string& name) {
  auto m = parse_metric(name);
  if (!m) throw ValidationError({"unknown metric '" + name + "'"});
  return *m;
}

eval::Method parse_method_flag(const std::string& name) {
  auto m = eval::parse_method(name);
  if (!m) throw ValidationError({"unknown method '" + name + "'"});
  return *m;
}

DetectorConfig detector_config(const CLI::App* app, const RunConfig& c) {
  DetectorConfig cfg;
  cfg.window = c.window;
  cfg.depth = c.depth;
  cfg.k = c.k;
  cfg.alpha = c.alpha;
  if (given(app, "--merge-gap")) cfg.merge_gap = c.merge_gap;
  cfg.merge = !c.no_merge;
  auto mode = parse_feature_mode(c.feature_mode);
  if (!mode) throw ValidationError({"unknown feature mode '" + c.feature_mode + "'"});
  cfg.feature_mode = *mode;
  cfg.validate();
  return cfg;
}

eval::Params method_params(const CLI::App* app, eval::Method method, const RunConfig& c) {
  eval::Params p = eval::default_params(method);
  switch (method) {
    case eval::Method::signature: {
      const DetectorConfig cfg = detector_config(app, c);
      p["window"] = cfg.window;
      p["depth"] = cfg.depth;
      p["k"] = cfg.k;
      p["alpha"] = cfg.alpha;
      if (cfg.merge_gap) p["merge_gap"] = *cfg.merge_gap;
      if (!cfg.merge) p["merge"] = 0;
      if (cfg.feature_mode == FeatureMode::log_signature) p["log_signature"] = 1;
      break;
    }
    case eval::Method::ma_crossover:
      p["short"] = c.ma_short;
      p["long"] = c.ma_long;
      break;
    case eval::Method::cusum:
      p["k_ref"] = c.k_ref;
      p["h"] = c.h;
      p["burn_in"] = c.burn_in;
      break;
    case eval::Method::rolling_regression:
      if (given(app, "--window")) p["window"] = c.window;
      if (given(app, "--alpha")) p["alpha"] = c.alpha;
      break;
  }
  eval::validate_params(method, p);
  return p;
}

void apply_overrides(const CLI::App* app, const RunConfig& c, synth::PatternSpec& s) {
  if (given(app, "--noise-cv")) s.noise_cv = c.noise_cv;
  if (given(app, "--baseline-ctr")) s.baseline_ctr = c.baseline_ctr;
  if (given(app, "--decay-rate")) s.weekly_decay_rate = c.decay_rate;
  if (given(app, "--duration")) s.duration_days = c.duration;
  if (given(app, "--impressions-mean")) s.impressions_mean = c.impressions_mean;
  if (given(app, "--gap-fraction")) s.gap_fraction = c.gap_fraction;
  if (given(app, "--drop-factor")) s.drop_factor = c.drop_factor;
  if (given(app, "--n-steps")) s.n_steps = c.n_steps;
  if (given(app, "--step-fraction")) s.step_fraction = c.step_fraction;
  if (given(app, "--onset-day")) s.onset_day = c.onset_day;
  if (given(app, "--change-day")) s.change_days = c.change_days;
  if (given(app, "--base-kind")) {
    auto k = synth::parse_kind(c.base_kind);
    if (!k) throw ValidationError({"unknown base kind '" + c.base_kind + "'"});
    s.base_kind = *k;
  }
  if (c.no_range_check) s.enforce_ranges = false;
}

struct NamedSpec {
  std::string id;
  synth::PatternSpec spec;
};

std::vector<NamedSpec> build_specs(const CLI::App* app, const RunConfig& c) {
  if (c.all == !c.pattern.empty()) throw ValidationError({"give exactly one of --pattern or --all"});
  if (c.n < 1) throw ValidationError({"--n must be >= 1"});
  std::vector<synth::PatternKind> kinds;
  if (c.all) {
    kinds.assign(std::begin(synth::all_kinds), std::end(synth::all_kinds));
  } else {
    auto k = synth::parse_kind(c.pattern);
    if (!k) throw ValidationError({"unknown pattern '" + c.pattern + "'"});
    kinds.push_back(*k);
  }

  std::vector<synth::PatternSpec> specs;
  if (c.all || given(app, "--n")) {
    synth::BatchOptions o;
    o.kinds = kinds;
    o.n_per_pattern = c.n;
    o.master_seed = c.seed;
    specs = synth::sample_specs(o);
  } else {
    synth::PatternSpec s;
    s.kind = kinds.front();
    s.seed = c.seed;
    specs.push_back(s);
  }

  std::vector<NamedSpec> out;
  std::map<synth::PatternKind, int> counter;
  std::vector<std::string> problems;
  for (auto& s : specs) {
    apply_overrides(app, c, s);
    char id[64];
    std::snprintf(id, sizeof id, "%s_%04d", std::string(synth::kind_name(s.kind)).c_str(), counter[s.kind]++);
    for (auto& v : s.violations()) problems.push_back(std::string(id) + ": " + v);
    out.push_back(NamedSpec{id, std::move(s)});
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return out;
}

std::vector<eval::LabeledSeries> generated_corpus(const CLI::App* app, const RunConfig& c, Metric metric) {
  std::vector<eval::LabeledSeries> corpus;
  for (const auto& ns : build_specs(app, c)) {
    auto g = synth::generate(ns.spec);
    corpus.push_back(eval::LabeledSeries{ns.id, g.series.with_metric(metric), g.truth.change_dates});
  }
  return corpus;
}

std::vector<eval::LabeledSeries> load_corpus(const fs::path& dir, Metric metric) {
  if (!fs::is_directory(dir)) throw ConfigError("corpus directory not found: " + dir.string());
  std::vector<fs::path> manifests;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") manifests.push_back(e.path());
  std::sort(manifests.begin(), manifests.end());
  if (manifests.empty()) throw ConfigError("no manifest files in " + dir.string());
  std::vector<eval::LabeledSeries> corpus;
  for (const auto& m : manifests) {
    std::ifstream in(m);
    Json j;
    try {
      j = Json::parse(in);
      eval::LabeledSeries ls{j.at("id").get<std::string>(),
                             read_series_csv(dir / j.at("csv").get<std::string>(), metric).series,
                             {}};
      for (const auto& d : j.at("truth").at("change_dates")) ls.truth.push_back(parse_iso_date(d.get<std::string>()));
      corpus.push_back(std::move(ls));
    } catch (const Json::exception& e) {
      throw ConfigError("malformed manifest " + m.string() + ": " + e.what());
    }
  }
  return corpus;
}

std::vector<eval::LabeledSeries> corpus_for(const CLI::App* app, const RunConfig& c, Metric metric) {
  if (!c.corpus.empty()) {
    if (!c.pattern.empty() || c.all) throw ValidationError({"--corpus cannot be combined with --pattern/--all"});
    return load_corpus(c.corpus, metric);
  }
  return generated_corpus(app, c, metric);
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int cmd_generate(const CLI::App* app, const RunConfig& c, std::ostream& out) {
  if (c.out.empty()) throw ValidationError({"--out directory is required"});
  const auto specs = build_specs(app, c);
  fs::create_directories(c.out);
  for (const auto& ns : specs) {
    const auto g = synth::generate(ns.spec);
    const std::string csv_name = ns.id + ".csv";
    std::ofstream csv(fs::path(c.out) / csv_name, std::ios::binary);
    write_series_csv(csv, g.series);
    std::ofstream man(fs::path(c.out) / (ns.id + ".json"), std::ios::binary);
    man << dump(io::manifest(g, ns.id, csv_name));
    if (!csv || !man) throw ConfigError("cannot write into " + c.out);
  }
  out << "wrote " << specs.size() << " series to " << c.out << "\n";
  return exit_ok;
}

int cmd_detect(const CLI::App* app, const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.input.empty()) throw ValidationError({"--input is required"});
  const Metric metric = parse_metric_flag(c.metric);
  const eval::Method method = parse_method_flag(c.method);
  const eval::Params params = method_params(app, method, c);
  const auto read = read_series_csv(fs::path(c.input), metric);
  for (const auto& w : read.warnings) err << "warning: " << w << "\n";
  const TimeSeries& series = read.series;

  std::vector<Date> dates;
  std::vector<Segment> segments;
  Json report;
  if (method == eval::Method::signature) {
    const auto r = detect(series, detector_config(app, c));
    for (const auto& cp : r.change_points) dates.push_back(cp.date);
    segments = r.segments;
    report = io::to_json(r);
  } else {
    dates = eval::run_method(method, params, series);
    segments = classify_segments(series, dates, c.alpha);
    report = io::baseline_report(method, params, metric, dates, segments);
  }
  write_text(c.out, dump(report), out);
  if (!c.plot.empty()) {
    const std::string title = fs::path(c.input).filename().string() + " (" + std::string(metric_name(metric)) + ", " +
                              std::string(eval::method_name(method)) + ")";
    write_text(c.plot, io::render_svg(series, dates, segments, title), out);
  }
  return exit_ok;
}

int cmd_wastage(const CLI::App* app, const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.input.empty()) throw ValidationError({"--input is required"});
  const Metric metric = parse_metric_flag(c.metric);
  const DetectorConfig cfg = detector_config(app, c);
  const auto read = read_series_csv(fs::path(c.input), metric);
  for (const auto& w : read.warnings) err << "warning: " << w << "\n";
  const CpcSource source = given(app, "--cpc") ? CpcSource::fixed(c.cpc) : CpcSource::from_cost_column();
  if (!given(app, "--cpc") && !read.series.has_cost())
    throw ConfigError("no cost column in " + c.input + " and no --cpc given");
  const auto r = detect(read.series, cfg);
  const auto w = compute_wastage(read.series, r.segments, source);
  write_text(c.out, dump(io::to_json(w)), out);
  if (!c.csv.empty()) {
    std::ostringstream s;
    io::write_wastage_csv(s, w);
    write_text(c.csv, s.str(), out);
  }
  return exit_ok;
}

int cmd_evaluate(const CLI::App* app, const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Metric metric = parse_metric_flag(c.metric);
  const eval::Method method = parse_method_flag(c.method);
  const eval::Params params = method_params(app, method, c);
  if (c.tolerance < 0) throw ValidationError({"--tolerance must be >= 0"});
  const auto corpus = corpus_for(app, c, metric);
  const eval::MatchPolicy policy{c.tolerance};
  const auto res = eval::evaluate_corpus(method, params, corpus, policy, c.threads);
  if (res.n_too_short > 0) err << "warning: " << res.n_too_short << " series too short for " << c.method << "\n";
  const auto pooled =
      corpus.size() >= 2 && c.bootstrap > 0 ? eval::bootstrap_ci(res.per_series, c.bootstrap, 0.95, c.seed) : res.pooled;

  Json per = Json::array();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Json det = Json::array(), truth = Json::array();
    for (const auto& d : res.detections[i]) det.push_back(format_iso_date(d));
    for (const auto& d : corpus[i].truth) truth.push_back(format_iso_date(d));
    const auto& m = res.per_series[i];
    per.push_back(Json{{"id", corpus[i].id},
                       {"truth", std::move(truth)},
                       {"detected", std::move(det)},
                       {"n_matched", m.n_matched},
                       {"precision", m.precision},
                       {"recall", m.recall}});
  }
  Json p = Json::object();
  for (const auto& [k, v] : params) p[k] = v;
  const Json report{{"schema_version", io::schema_version},
                    {"method", eval::method_name(method)},
                    {"params", std::move(p)},
                    {"metric", metric_name(metric)},
                    {"tolerance_days", c.tolerance},
                    {"bootstrap_resamples", c.bootstrap},
                    {"n_series", corpus.size()},
                    {"n_too_short", res.n_too_short},
                    {"metrics", io::to_json(pooled)},
                    {"series", std::move(per)}};
  write_text(c.out, dump(report), out);
  if (!c.csv.empty()) {
    std::ostringstream s;
    s << "id,n_detected,n_true,n_matched,precision,recall,f1,mean_delay_days\n";
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& m = res.per_series[i];
      s << corpus[i].id << ',' << m.n_detected << ',' << m.n_true << ',' << m.n_matched << ','
        << format_double(m.precision) << ',' << format_double(m.recall) << ',' << format_double(m.f1) << ','
        << (m.mean_delay_days ? format_double(*m.mean_delay_days) : "") << '\n';
    }
    write_text(c.csv, s.str(), out);
  }
  return exit_ok;
}

int cmd_sweep(const CLI::App* app, const RunConfig& c, std::ostream& out) {
  const Metric metric = parse_metric_flag(c.metric);
  if (c.tolerance < 0) throw ValidationError({"--tolerance must be >= 0"});
  auto objective = eval::parse_objective(c.objective);
  if (!objective) throw ValidationError({"unknown objective '" + c.objective + "'"});
  const auto corpus = corpus_for(app, c, metric);

  eval::SensitivityOptions o;
  o.windows = c.windows;
  o.ks = c.ks;
  o.depths = c.depths;
  o.policy = {c.tolerance};
  o.resamples = c.bootstrap;
  o.seed = c.seed;
  o.threads = c.threads;
  const auto rows = eval::sensitivity_report(corpus, o);

  std::ostringstream csv;
  eval::write_sensitivity_csv(csv, rows);

  eval::Grid grid;
  for (int w : c.windows) grid["window"].push_back(w);
  grid["k"] = c.ks;
  for (int d : c.depths) grid["depth"].push_back(d);
  const auto split = eval::split_by_parity(corpus.size(), c.seed);
  std::vector<eval::LabeledSeries> validation, held_out;
  for (auto i : split.validation) validation.push_back(corpus[i]);
  for (auto i : split.train) held_out.push_back(corpus[i]);
  const auto search = eval::grid_search(eval::Method::signature, grid, validation, o.policy, *objective, c.threads);
  const auto test = eval::evaluate_corpus(eval::Method::signature, search.best, held_out, o.policy, c.threads);

  Json best = Json::object();
  for (const auto& [k, v] : search.best) best[k] = v;
  const Json report{{"schema_version", io::schema_version},
                    {"method", "signature"},
                    {"metric", metric_name(metric)},
                    {"tolerance_days", c.tolerance},
                    {"bootstrap_resamples", c.bootstrap},
                    {"n_series", corpus.size()},
                    {"rows", io::sensitivity_json(rows)},
                    {"selection",
                     Json{{"objective", eval::objective_name(*objective)},
                          {"n_validation", validation.size()},
                          {"n_test", held_out.size()},
                          {"best_params", std::move(best)},
                          {"validation_metrics", io::to_json(search.best_metrics)},
                          {"test_metrics", io::to_json(test.pooled)}}}};
  if (!c.out.empty()) write_text(c.out, dump(report), out);
  if (!c.csv.empty())
    write_text(c.csv, csv.str(), out);
  else if (c.out.empty())
    out << csv.str();
  return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Signature-based change point detection for campaign time series", "sigcpd"};
  app.require_subcommand(1, 1);

  auto* gen = app.add_subcommand("generate", "Write seeded synthetic series and manifests");
  add_pattern_flags(gen, c);
  gen->add_option("--out", c.out, "Output directory");

  auto* det = app.add_subcommand("detect", "Detect change points in a CSV series");
  det->add_option("--input", c.input, "Input CSV");
  det->add_option("--out", c.out, "Report JSON (default stdout)");
  det->add_option("--plot", c.plot, "Write an SVG plot");
  add_detector_flags(det, c);
  add_method_flags(det, c);

  auto* was = app.add_subcommand("wastage", "Quantify spend wasted after the benchmark period");
  was->add_option("--input", c.input, "Input CSV");
  was->add_option("--out", c.out, "Report JSON (default stdout)");
  was->add_option("--csv", c.csv, "Daily wastage CSV");
  was->add_option("--cpc", c.cpc, "Constant cost per click (otherwise the cost column)");
  add_detector_flags(was, c);

  auto* ev = app.add_subcommand("evaluate", "Score a method on a labelled corpus");
  add_pattern_flags(ev, c);
  ev->add_option("--corpus", c.corpus, "Directory written by generate");
  ev->add_option("--tolerance", c.tolerance, "Matching tolerance in days")->capture_default_str();
  ev->add_option("--bootstrap", c.bootstrap, "Bootstrap resamples (0 disables)")->capture_default_str();
  ev->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  ev->add_option("--out", c.out, "Report JSON (default stdout)");
  ev->add_option("--csv", c.csv, "Per-series metrics CSV");
  add_detector_flags(ev, c);
  add_method_flags(ev, c);

  auto* sw = app.add_subcommand("sweep", "Sensitivity table over window, k and depth");
  add_pattern_flags(sw, c);
  sw->add_option("--corpus", c.corpus, "Directory written by generate");
  sw->add_option("--windows", c.windows, "Window sizes")->delimiter(',')->capture_default_str();
  sw->add_option("--ks", c.ks, "Threshold multipliers")->delimiter(',')->capture_default_str();
  sw->add_option("--depths", c.depths, "Signature depths")->delimiter(',')->capture_default_str();
  sw->add_option("--tolerance", c.tolerance, "Matching tolerance in days")->capture_default_str();
  sw->add_option("--bootstrap", c.bootstrap, "Bootstrap resamples (0 disables)")->capture_default_str();
  sw->add_option("--objective", c.objective, "f1, precision or recall")->capture_default_str();
  sw->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  sw->add_option("--out", c.out, "Report JSON");
  sw->add_option("--csv", c.csv, "Table CSV (stdout when neither --out nor --csv)");
  sw->add_option("--metric", c.metric, "ctr, impressions, clicks or cost")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? exit_ok : exit_invalid;
  }

  try {
    if (*gen) return cmd_generate(gen, c, out);
    if (*det) return cmd_detect(det, c, out, err);
    if (*was) return cmd_wastage(was, c, out, err);
    if (*ev) return cmd_evaluate(ev, c, out, err);
    if (*sw) return cmd_sweep(sw, c, out);
  } catch (const InsufficientData& e) {
    err << "error: " << e.what() << "\n";
    return exit_too_short;
  } catch (const ValidationError& e) {
    err << "error: invalid parameters\n";
    for (const auto& v : e.violations()) err << "  " << v << "\n";
    return exit_invalid;
  } catch (const CsvError& e) {
    err << "error: " << (c.input.empty() ? "" : c.input + ": ") << e.what() << "\n";
    return exit_invalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  }
  return exit_invalid;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace sigcpd::cli
