#pragma once

#include "torpedo_smc/metrics.hpp"
#include "torpedo_smc/sim_engine.hpp"

#include <array>
#include <charconv>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>

namespace torpedo_smc {

/// Nine significant digits, shortest of fixed/scientific, '.' decimal point
/// regardless of the global locale. Negative zero prints as "0".
inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 9);
  if (res.ec != std::errc()) return "nan";
  return std::string(buf.data(), res.ptr);
}

inline constexpr std::string_view kTraceHeader = "t,z,theta,e,s,u";

/// One row per record. An aborted trace ends with a "# aborted: ..." line.
inline void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << kTraceHeader << '\n';
  std::string line;
  for (const auto& r : trace.records) {
    line.clear();
    line += format_number(r.t);
    line += ',';
    line += format_number(r.z);
    line += ',';
    line += format_number(r.theta);
    line += ',';
    line += format_number(r.e);
    line += ',';
    line += format_number(r.s);
    line += ',';
    line += format_number(r.u);
    line += '\n';
    out << line;
  }
  if (trace.aborted) out << "# aborted: " << trace.abort_reason << '\n';
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : "none"; }

inline void write_metrics_report(std::ostream& out, std::string_view name, const MetricsReport& m) {
  out << "scenario: " << name << '\n'
      << "switch_count: " << m.switch_count << '\n'
      << "total_variation: " << format_number(m.total_variation) << '\n'
      << "settling_time: " << format_optional(m.settling_time) << '\n'
      << "steady_control_mean: " << format_number(m.steady_control_mean) << '\n'
      << "steady_control_tv: " << format_number(m.steady_control_tv) << '\n'
      << "peak_control: " << format_number(m.peak_control) << '\n'
      << "peak_error: " << format_number(m.peak_error) << '\n';
}

inline constexpr std::string_view kCompareHeader =
    "name,switch_count,total_variation,settling_time,steady_control_mean,steady_control_tv,peak_control";

inline std::string compare_row(std::string_view name, const MetricsReport& m) {
  std::string row(name);
  row += ',' + std::to_string(m.switch_count);
  row += ',' + format_number(m.total_variation);
  row += ',' + format_optional(m.settling_time);
  row += ',' + format_number(m.steady_control_mean);
  row += ',' + format_number(m.steady_control_tv);
  row += ',' + format_number(m.peak_control);
  return row;
}

inline std::string compare_error_row(std::string_view name) {
  std::string row(name);
  for (int i = 0; i < 6; ++i) row += ",error";
  return row;
}

}  // namespace torpedo_smc
