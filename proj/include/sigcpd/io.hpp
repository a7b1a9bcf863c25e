#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "sigcpd/detector.hpp"
#include "sigcpd/eval.hpp"
#include "sigcpd/synth.hpp"
#include "sigcpd/wastage.hpp"

namespace sigcpd::io {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

Json to_json(const DetectorConfig& cfg);
Json to_json(const Segment& segment);
Json to_json(const ChangePointReport& report);
Json to_json(const WastageReport& report);
Json to_json(const eval::EvalMetrics& metrics);
Json to_json(const synth::PatternSpec& spec);

/// Baseline output in the detector's change-point-list shape.
Json baseline_report(eval::Method method, const eval::Params& params, Metric metric,
                     std::span<const Date> change_points, std::span<const Segment> segments);

/// Spec echo, ground truth and the file name of the series CSV.
Json manifest(const synth::Generated& generated, std::string_view id, std::string_view csv_name);

/// Reads the fields written by to_json(PatternSpec). Throws InvalidInput.
synth::PatternSpec spec_from_json(const Json& j);

Json sensitivity_json(std::span<const eval::SensitivityRow> rows);

void write_wastage_csv(std::ostream& out, const WastageReport& report);

/// Daily metric polyline, dashed vertical lines at change dates and one
/// trend label per segment.
std::string render_svg(const TimeSeries& series, std::span<const Date> change_dates,
                       std::span<const Segment> segments, std::string_view title);

}  // namespace sigcpd::io
