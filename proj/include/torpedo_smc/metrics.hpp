#pragma once

#include "torpedo_smc/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace torpedo_smc {

/// Counts commutations of the control: increments |du| > threshold whose
/// direction differs from the previous significant increment. The first
/// significant increment counts as a commutation, so a relay toggling
/// between +-k scores one per toggle.
inline std::size_t switch_count(std::span<const double> u, double threshold = 1e-9) {
  if (threshold < 0.0) throw std::invalid_argument("switch threshold must be >= 0");
  std::size_t count = 0;
  int last_dir = 0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    const double du = u[i] - u[i - 1];
    if (!(std::abs(du) > threshold)) continue;
    const int dir = du > 0.0 ? 1 : -1;
    if (dir != last_dir) ++count;
    last_dir = dir;
  }
  return count;
}

inline double total_variation(std::span<const double> u) {
  double tv = 0.0;
  for (std::size_t i = 1; i < u.size(); ++i) tv += std::abs(u[i] - u[i - 1]);
  return tv;
}

/// Earliest sample time after which |e| <= band * |amplitude| holds for
/// every remaining sample; nullopt if the last sample is outside the band.
inline std::optional<double> settling_time(std::span<const double> e, std::span<const double> t, double band,
                                           double amplitude) {
  if (!(band > 0.0 && band < 1.0)) throw std::invalid_argument("settling band must lie in (0, 1)");
  if (e.size() != t.size()) throw std::invalid_argument("error and time series differ in length");
  if (e.empty()) return std::nullopt;
  const double limit = band * std::abs(amplitude);
  std::size_t i = e.size();
  while (i > 0 && std::abs(e[i - 1]) <= limit) --i;
  if (i == e.size()) return std::nullopt;
  return t[i];
}

struct WindowStats {
  double mean = 0.0;
  double total_variation = 0.0;
};

/// Mean and total variation over the final tail_fraction of the samples.
inline WindowStats steady_window_stats(std::span<const double> u, double tail_fraction = 0.2) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw std::invalid_argument("tail_fraction must lie in (0, 1]");
  if (u.empty()) return {};
  auto start = static_cast<std::size_t>(std::floor((1.0 - tail_fraction) * static_cast<double>(u.size())));
  start = std::min(start, u.size() - 1);
  const auto tail = u.subspan(start);
  double sum = 0.0;
  for (double v : tail) sum += v;
  return {sum / static_cast<double>(tail.size()), total_variation(tail)};
}

inline double peak_abs(std::span<const double> v) {
  double p = 0.0;
  for (double x : v) p = std::max(p, std::abs(x));
  return p;
}

struct MetricsOptions {
  double switch_threshold = 1e-9;
  double tail_fraction = 0.2;
  double settling_band = 0.02;
};

struct MetricsReport {
  std::size_t switch_count = 0;
  double total_variation = 0.0;
  std::optional<double> settling_time;
  double steady_control_mean = 0.0;
  double steady_control_tv = 0.0;
  double peak_control = 0.0;
  double peak_error = 0.0;
};

inline MetricsReport compute_metrics(const Trace& trace, const MetricsOptions& opt = {}) {
  const auto u = trace.column(&TraceRecord::u);
  const auto e = trace.column(&TraceRecord::e);
  const auto t = trace.column(&TraceRecord::t);
  const WindowStats tail = steady_window_stats(u, opt.tail_fraction);

  MetricsReport m;
  m.switch_count = switch_count(u, opt.switch_threshold);
  m.total_variation = total_variation(u);
  m.settling_time = settling_time(e, t, opt.settling_band, trace.scenario.reference.amplitude);
  m.steady_control_mean = tail.mean;
  m.steady_control_tv = tail.total_variation;
  m.peak_control = peak_abs(u);
  m.peak_error = peak_abs(e);
  return m;
}

}  // namespace torpedo_smc
