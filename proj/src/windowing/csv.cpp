#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "sigcpd/error.hpp"
#include "sigcpd/series.hpp"

namespace sigcpd {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::int64_t parse_count(std::string_view text, std::size_t line, const char* column) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw CsvError(line, std::string("column '") + column + "' is not an integer: '" + std::string(text) + "'");
  if (value < 0) throw CsvError(line, std::string("column '") + column + "' must be nonnegative");
  return value;
}

double parse_amount(std::string_view text, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw CsvError(line, "column 'cost' is not a number: '" + std::string(text) + "'");
  if (!std::isfinite(value) || value < 0.0) throw CsvError(line, "column 'cost' must be finite and nonnegative");
  return value;
}

}  // namespace

CsvReadResult read_series_csv(std::istream& in, Metric metric) {
  std::string raw;
  std::size_t line_no = 0;
  bool with_cost = false;
  bool have_header = false;
  std::vector<SeriesPoint> points;
  std::vector<std::string> warnings;
  std::size_t dropped = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (!have_header) {
      if (fields.size() >= 3 && fields[0] == "date" && fields[1] == "impressions" && fields[2] == "clicks" &&
          (fields.size() == 3 || (fields.size() == 4 && fields[3] == "cost"))) {
        with_cost = fields.size() == 4;
        have_header = true;
        continue;
      }
      throw CsvError(line_no, "expected header 'date,impressions,clicks[,cost]'");
    }
    const std::size_t expected = with_cost ? 4 : 3;
    if (fields.size() != expected)
      throw CsvError(line_no, "expected " + std::to_string(expected) + " fields, found " + std::to_string(fields.size()));

    Date date;
    try {
      date = parse_iso_date(fields[0]);
    } catch (const InvalidInput& e) {
      throw CsvError(line_no, e.what());
    }
    const std::int64_t impressions = parse_count(fields[1], line_no, "impressions");
    const std::int64_t clicks = parse_count(fields[2], line_no, "clicks");
    std::optional<double> cost;
    if (with_cost) cost = parse_amount(fields[3], line_no);

    if (clicks > impressions) throw CsvError(line_no, "clicks exceed impressions");
    if (!points.empty() && !(date > points.back().date))
      throw CsvError(line_no, "dates must be strictly increasing");
    if (impressions == 0) {
      ++dropped;
      warnings.push_back("line " + std::to_string(line_no) + ": dropped " + format_iso_date(date) +
                         " (zero impressions, CTR undefined)");
      continue;
    }
    points.push_back(SeriesPoint::make(date, impressions, clicks, cost));
  }
  if (!have_header) throw CsvError(line_no == 0 ? 1 : line_no, "empty input: missing header");
  if (points.empty()) throw CsvError(line_no, "no observations with positive impressions");
  if (metric == Metric::cost && !with_cost) throw CsvError(1, "metric 'cost' requires a cost column");
  return CsvReadResult{TimeSeries(std::move(points), metric), std::move(warnings), dropped};
}

CsvReadResult read_series_csv(const std::filesystem::path& path, Metric metric) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  return read_series_csv(in, metric);
}

void write_series_csv(std::ostream& out, const TimeSeries& series) {
  const bool with_cost = series.has_cost();
  out << (with_cost ? "date,impressions,clicks,cost\n" : "date,impressions,clicks\n");
  for (const auto& p : series.points()) {
    out << format_iso_date(p.date) << ',' << p.impressions << ',' << p.clicks;
    if (with_cost) out << ',' << format_double(*p.cost);
    out << '\n';
  }
}

}  // namespace sigcpd
