#include "sigcpd/io.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "sigcpd/error.hpp"

namespace sigcpd::io {
namespace {

Json opt_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json interval(const std::optional<eval::Interval>& ci) {
  if (!ci) return nullptr;
  return Json{{"lo", ci->lo}, {"hi", ci->hi}};
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

Json to_json(const DetectorConfig& cfg) {
  return Json{{"window", cfg.window},
              {"depth", cfg.depth},
              {"k", cfg.k},
              {"alpha", cfg.alpha},
              {"merge", cfg.merge},
              {"merge_gap", cfg.effective_merge_gap()},
              {"feature_mode", feature_mode_name(cfg.feature_mode)}};
}

Json to_json(const Segment& s) {
  return Json{{"start_date", format_iso_date(s.start_date)},
              {"end_date", format_iso_date(s.end_date)},
              {"trend", trend_name(s.trend)},
              {"slope", s.slope},
              {"p_value", s.p_value},
              {"mean_metric", s.mean_metric},
              {"n_points", s.n_points}};
}

Json to_json(const ChangePointReport& r) {
  Json distances = Json::array();
  for (const auto& d : r.distances)
    distances.push_back(Json{{"date", format_iso_date(d.boundary_date)}, {"distance", d.distance}});
  Json cps = Json::array();
  for (const auto& cp : r.change_points)
    cps.push_back(Json{{"date", format_iso_date(cp.date)},
                       {"distance", cp.distance},
                       {"threshold", cp.threshold},
                       {"peak_date", format_iso_date(cp.peak_date)}});
  Json flagged = Json::array();
  for (const auto& d : r.flagged) flagged.push_back(format_iso_date(d));
  Json segs = Json::array();
  for (const auto& s : r.segments) segs.push_back(to_json(s));
  return Json{{"schema_version", schema_version},
              {"method", "signature"},
              {"metric", metric_name(r.metric)},
              {"config", to_json(r.config)},
              {"mu_d", r.mu_d},
              {"sigma_d", r.sigma_d},
              {"threshold", r.threshold},
              {"distances", std::move(distances)},
              {"flagged", std::move(flagged)},
              {"change_points", std::move(cps)},
              {"segments", std::move(segs)}};
}

Json to_json(const WastageReport& r) {
  Json daily = Json::array();
  for (const auto& d : r.daily)
    daily.push_back(Json{{"date", format_iso_date(d.date)}, {"lost_clicks", d.lost_clicks}, {"wastage", d.wastage}});
  return Json{{"schema_version", schema_version},
              {"benchmark_segment", to_json(r.benchmark_segment)},
              {"benchmark_index", r.benchmark_index},
              {"benchmark_fallback", r.benchmark_fallback},
              {"ctr_bench", r.ctr_bench},
              {"cpc_bench", r.cpc_bench},
              {"cpc_source", r.cpc_from_cost ? "cost_column" : "constant"},
              {"daily", std::move(daily)},
              {"total_wastage", r.total_wastage}};
}

Json to_json(const eval::EvalMetrics& m) {
  return Json{{"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"mean_delay_days", opt_number(m.mean_delay_days)},
              {"n_detected", m.n_detected},
              {"n_true", m.n_true},
              {"n_matched", m.n_matched},
              {"ci",
               Json{{"precision", interval(m.precision_ci)},
                    {"recall", interval(m.recall_ci)},
                    {"f1", interval(m.f1_ci)},
                    {"mean_delay_days", interval(m.delay_ci)}}}};
}

Json to_json(const synth::PatternSpec& s) {
  return Json{{"kind", synth::kind_name(s.kind)},
              {"baseline_ctr", s.baseline_ctr},
              {"weekly_decay_rate", s.weekly_decay_rate},
              {"noise_cv", s.noise_cv},
              {"duration_days", s.duration_days},
              {"impressions_mean", s.impressions_mean},
              {"seed", s.seed},
              {"gap_fraction", s.gap_fraction},
              {"base_kind", synth::kind_name(s.base_kind)},
              {"drop_factor", s.drop_factor},
              {"n_steps", s.n_steps},
              {"step_fraction", s.step_fraction},
              {"onset_day", s.onset_day},
              {"change_days", s.change_days},
              {"min_observations", s.min_observations},
              {"start_date", format_iso_date(s.start_date)},
              {"enforce_ranges", s.enforce_ranges}};
}

synth::PatternSpec spec_from_json(const Json& j) {
  try {
    synth::PatternSpec s;
    auto kind = synth::parse_kind(j.at("kind").get<std::string>());
    auto base = synth::parse_kind(j.at("base_kind").get<std::string>());
    if (!kind || !base) throw InvalidInput("unknown pattern kind in manifest");
    s.kind = *kind;
    s.base_kind = *base;
    s.baseline_ctr = j.at("baseline_ctr").get<double>();
    s.weekly_decay_rate = j.at("weekly_decay_rate").get<double>();
    s.noise_cv = j.at("noise_cv").get<double>();
    s.duration_days = j.at("duration_days").get<int>();
    s.impressions_mean = j.at("impressions_mean").get<std::int64_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.gap_fraction = j.at("gap_fraction").get<double>();
    s.drop_factor = j.at("drop_factor").get<double>();
    s.n_steps = j.at("n_steps").get<int>();
    s.step_fraction = j.at("step_fraction").get<double>();
    s.onset_day = j.at("onset_day").get<int>();
    s.change_days = j.at("change_days").get<std::vector<int>>();
    s.min_observations = j.at("min_observations").get<int>();
    s.start_date = parse_iso_date(j.at("start_date").get<std::string>());
    s.enforce_ranges = j.at("enforce_ranges").get<bool>();
    return s;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed pattern spec: ") + e.what());
  }
}

Json baseline_report(eval::Method method, const eval::Params& params, Metric metric,
                     std::span<const Date> change_points, std::span<const Segment> segments) {
  Json p = Json::object();
  for (const auto& [k, v] : params) p[k] = v;
  Json cps = Json::array();
  for (const auto& d : change_points) cps.push_back(Json{{"date", format_iso_date(d)}});
  Json segs = Json::array();
  for (const auto& s : segments) segs.push_back(to_json(s));
  return Json{{"schema_version", schema_version},
              {"method", eval::method_name(method)},
              {"metric", metric_name(metric)},
              {"params", std::move(p)},
              {"change_points", std::move(cps)},
              {"segments", std::move(segs)}};
}

Json manifest(const synth::Generated& g, std::string_view id, std::string_view csv_name) {
  Json dates = Json::array();
  for (const auto& d : g.truth.change_dates) dates.push_back(format_iso_date(d));
  return Json{{"schema_version", schema_version},
              {"id", id},
              {"csv", csv_name},
              {"n_observations", g.series.size()},
              {"spec", to_json(g.spec)},
              {"truth", Json{{"change_days", g.truth.change_days}, {"change_dates", std::move(dates)}}}};
}

Json sensitivity_json(std::span<const eval::SensitivityRow> rows) {
  Json out = Json::array();
  for (const auto& r : rows)
    out.push_back(Json{{"window", r.window}, {"k", r.k}, {"depth", r.depth}, {"metrics", to_json(r.metrics)}});
  return out;
}

void write_wastage_csv(std::ostream& out, const WastageReport& r) {
  out << "date,lost_clicks,wastage\n";
  for (const auto& d : r.daily)
    out << format_iso_date(d.date) << ',' << format_double(d.lost_clicks) << ',' << format_double(d.wastage) << '\n';
}

std::string render_svg(const TimeSeries& series, std::span<const Date> change_dates, std::span<const Segment> segments,
                       std::string_view title) {
  constexpr double width = 900, height = 420, left = 70, right = 20, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  const auto values = series.metric_values();
  const double span = std::max<double>(1.0, static_cast<double>(days_between(series.first_date(), series.last_date())));
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5 * std::max(std::abs(lo), 1e-3);
    hi += 0.5 * std::max(std::abs(hi), 1e-3);
  }
  auto xs = [&](Date d) { return left + pw * static_cast<double>(days_between(series.first_date(), d)) / span; };
  auto ys = [&](double v) { return top + ph * (1.0 - (v - lo) / (hi - lo)); };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"420\" viewBox=\"0 0 900 420\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"900\" height=\"420\" fill=\"white\"/>\n";
  s += "<text x=\"" + fixed(left) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">";
  for (char c : title) {
    if (c == '<') s += "&lt;";
    else if (c == '>') s += "&gt;";
    else if (c == '&') s += "&amp;";
    else s += c;
  }
  s += "</text>\n";
  s += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(pw) + "\" height=\"" + fixed(ph) +
       "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    s += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(ys(v) + 4) +
         "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + format_double(v).substr(0, 8) +
         "</text>\n";
  }
  s += "<text x=\"" + fixed(left) + "\" y=\"" + fixed(height - 18) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
       format_iso_date(series.first_date()) + "</text>\n";
  s += "<text x=\"" + fixed(width - right) + "\" y=\"" + fixed(height - 18) +
       "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + format_iso_date(series.last_date()) +
       "</text>\n";

  s += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i) s += ' ';
    s += fixed(xs(series[i].date)) + "," + fixed(ys(values[i]));
  }
  s += "\"/>\n";

  for (const Date d : change_dates)
    s += "<line x1=\"" + fixed(xs(d)) + "\" y1=\"" + fixed(top) + "\" x2=\"" + fixed(xs(d)) + "\" y2=\"" +
         fixed(top + ph) + "\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";

  for (const auto& seg : segments) {
    const double mid = 0.5 * (xs(seg.start_date) + xs(seg.end_date));
    s += "<text x=\"" + fixed(mid) + "\" y=\"" + fixed(top + 16) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" + std::string(trend_name(seg.trend)) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace sigcpd::io
