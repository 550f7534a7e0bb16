#pragma once

#include "torpedo_smc/metrics.hpp"
#include "torpedo_smc/scenario_io.hpp"
#include "torpedo_smc/sim_engine.hpp"
#include "torpedo_smc/trace_io.hpp"

#include <cstddef>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace torpedo_smc::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationError = 1,
  kRuntimeAbort = 2,
  kIoError = 3,
};

/// Command-line values that take precedence over the scenario file.
struct Overrides {
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<double> amplitude;
};

inline Scenario preset_scenario(ControllerKind kind) {
  Scenario sc;
  sc.name = std::string(to_string(kind));
  sc.controller = ControllerConfig::preset(kind);
  return sc;
}

/// Applies overrides and re-validates. Throws ValidationError.
inline Scenario apply_overrides(Scenario sc, const Overrides& o) {
  if (o.dt) sc.dt = *o.dt;
  if (o.duration) sc.duration = *o.duration;
  if (o.amplitude) sc.reference.amplitude = *o.amplitude;
  validate(sc);
  return sc;
}

/// Simulates, writes the trace CSV to out_path and the metrics to `report`.
inline int cmd_run(const Scenario& sc, const std::string& out_path, std::ostream& report, std::ostream& err) {
  Trace trace;
  try {
    trace = run_closed_loop(sc);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidationError;
  }

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    err << "cannot open output file '" << out_path << "'\n";
    return kIoError;
  }
  write_trace_csv(out, trace);
  out.flush();
  if (!out) {
    err << "failed writing output file '" << out_path << "'\n";
    return kIoError;
  }

  write_metrics_report(report, sc.name, compute_metrics(trace));
  if (trace.aborted) {
    err << "simulation aborted: " << trace.abort_reason << '\n';
    return kRuntimeAbort;
  }
  return kSuccess;
}

/// Runs every scenario (concurrently) and writes one summary row each, in
/// input order.
inline int cmd_compare(const std::vector<Scenario>& scenarios, const std::string& out_path, std::ostream& err) {
  if (scenarios.size() < 2) {
    err << "compare needs at least two scenarios\n";
    return kValidationError;
  }

  std::vector<std::future<std::optional<MetricsReport>>> jobs;
  jobs.reserve(scenarios.size());
  for (const auto& sc : scenarios) {
    jobs.push_back(std::async(std::launch::async, [&sc]() -> std::optional<MetricsReport> {
      try {
        Trace trace = run_closed_loop(sc);
        if (trace.aborted) return std::nullopt;
        return compute_metrics(trace);
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }));
  }

  std::vector<std::string> rows;
  bool failed = false;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto report = jobs[i].get();
    if (report) {
      rows.push_back(compare_row(scenarios[i].name, *report));
    } else {
      failed = true;
      err << "scenario '" << scenarios[i].name << "' failed\n";
      rows.push_back(compare_error_row(scenarios[i].name));
    }
  }

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    err << "cannot open output file '" << out_path << "'\n";
    return kIoError;
  }
  out << kCompareHeader << '\n';
  for (const auto& r : rows) out << r << '\n';
  out.flush();
  if (!out) {
    err << "failed writing output file '" << out_path << "'\n";
    return kIoError;
  }
  return failed ? kRuntimeAbort : kSuccess;
}

}  // namespace torpedo_smc::cli
