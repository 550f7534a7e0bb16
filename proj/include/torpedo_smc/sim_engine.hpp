#pragma once

#include "torpedo_smc/lti_plant.hpp"
#include "torpedo_smc/smc_controllers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace torpedo_smc {

/// Scenario invariant violation. key() names the offending field using the
/// scenario-file spelling (e.g. "dt", "disturbance.M").
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class NonFiniteStateError : public std::runtime_error {
 public:
  explicit NonFiniteStateError(double t)
      : std::runtime_error("non-finite state during integration at t = " + std::to_string(t)), t_(t) {}

  double time() const noexcept { return t_; }

 private:
  double t_;
};

struct CustomPlant {
  ZpkModel immersion;
  ZpkModel inclination;

  bool operator==(const CustomPlant&) const = default;
};

struct ReferenceStep {
  double amplitude = 10.0;  ///< [m]
  double step_time = 0.0;   ///< [s]

  bool operator==(const ReferenceStep&) const = default;
};

/// Bounded state-dependent disturbance, ||phi||_2 <= bound * ||x||_2.
struct DisturbanceConfig {
  bool enabled = false;
  double bound = 0.05;  ///< "M" in scenario files
  std::uint64_t seed = 1;

  bool operator==(const DisturbanceConfig&) const = default;
};

struct Scenario {
  std::string name;                  ///< label only; not part of the file format
  std::optional<CustomPlant> plant;  ///< nullopt: the torpedo plant
  ControllerConfig controller = ControllerConfig::preset(ControllerKind::PidSmc1);
  ReferenceStep reference;
  double duration = 60.0;  ///< [s]
  double dt = 1e-3;        ///< [s]
  DisturbanceConfig disturbance;
  double eta = 0.0;                   ///< reaching-monitor threshold
  std::vector<double> initial_state;  ///< stacked [x_z ; x_theta]; empty: zeros

  bool operator==(const Scenario& o) const {
    return plant == o.plant && controller == o.controller && reference == o.reference && duration == o.duration &&
           dt == o.dt && disturbance == o.disturbance && eta == o.eta && initial_state == o.initial_state;
  }
};

inline TorpedoPlant make_plant(const Scenario& sc) {
  if (sc.plant) return {sc.plant->immersion, sc.plant->inclination};
  return TorpedoPlant::torpedo();
}

inline void validate(const Scenario& sc) {
  if (!(sc.dt > 0.0) || !std::isfinite(sc.dt)) throw ValidationError("dt", "must be finite and > 0");
  if (!std::isfinite(sc.duration) || !(sc.duration >= sc.dt))
    throw ValidationError("duration", "must be finite and >= dt");
  if (!std::isfinite(sc.reference.amplitude)) throw ValidationError("reference.amplitude", "must be finite");
  if (!std::isfinite(sc.reference.step_time)) throw ValidationError("reference.step_time", "must be finite");
  if (!(sc.disturbance.bound >= 0.0) || !std::isfinite(sc.disturbance.bound))
    throw ValidationError("disturbance.M", "must be finite and >= 0");
  if (!(sc.eta >= 0.0) || !std::isfinite(sc.eta)) throw ValidationError("eta", "must be finite and >= 0");
  try {
    sc.controller.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError("controller", e.what());
  }
  std::optional<TorpedoPlant> plant;
  try {
    plant.emplace(make_plant(sc));
  } catch (const std::invalid_argument& e) {
    throw ValidationError("plant", e.what());
  }
  if (!sc.initial_state.empty() && static_cast<Eigen::Index>(sc.initial_state.size()) != plant->state_dim())
    throw ValidationError("initial_state", "must have " + std::to_string(plant->state_dim()) + " entries");
}

/// Number of integration steps; the trace holds one more record than this.
inline std::size_t step_count(const Scenario& sc) {
  return static_cast<std::size_t>(std::floor(sc.duration / sc.dt + 1e-9));
}

/// Classical four-stage Runge-Kutta step. f(t, x) must return x'.
template <class F>
Eigen::VectorXd rk4_step(F&& f, const Eigen::VectorXd& x, double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  const double h2 = dt / 2.0;
  const Eigen::VectorXd k1 = f(t, x);
  if (!k1.allFinite()) throw NonFiniteStateError(t);
  const Eigen::VectorXd k2 = f(t + h2, (x + h2 * k1).eval());
  if (!k2.allFinite()) throw NonFiniteStateError(t);
  const Eigen::VectorXd k3 = f(t + h2, (x + h2 * k2).eval());
  if (!k3.allFinite()) throw NonFiniteStateError(t);
  const Eigen::VectorXd k4 = f(t + dt, (x + dt * k3).eval());
  if (!k4.allFinite()) throw NonFiniteStateError(t);
  Eigen::VectorXd next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw NonFiniteStateError(t);
  return next;
}

struct ReferenceValue {
  double r = 0.0;
  double r_dot = 0.0;
};

inline ReferenceValue reference_eval(const ReferenceStep& ref, double t) noexcept {
  return {t >= ref.step_time ? ref.amplitude : 0.0, 0.0};
}

/// 64-bit seeded source for the disturbance. Uses only the raw mt19937_64
/// output stream (fixed by the C++ standard), so sequences are identical
/// across standard libraries.
class DisturbanceRng {
 public:
  explicit DisturbanceRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// A random direction scaled by a random fraction of bound * ||x||.
/// Zero when disabled or at x = 0.
inline Eigen::VectorXd disturbance_eval(const DisturbanceConfig& cfg, const Eigen::VectorXd& x, DisturbanceRng& rng) {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(x.size());
  if (!cfg.enabled) return phi;
  for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = 2.0 * rng.uniform() - 1.0;
  const double fraction = rng.uniform();
  const double dir_norm = phi.norm();
  const double limit = cfg.bound * x.norm();
  if (dir_norm == 0.0 || limit == 0.0) return Eigen::VectorXd::Zero(x.size());
  phi *= fraction * limit / dir_norm;
  return phi;
}

struct TraceRecord {
  double t = 0.0;
  double z = 0.0;
  double theta = 0.0;
  double e = 0.0;
  double e_dot = 0.0;
  double e_ddot = 0.0;
  double s = 0.0;
  double s_dot = 0.0;
  double u = 0.0;
  bool reaching_ok = true;
};

struct Trace {
  Scenario scenario;
  std::vector<TraceRecord> records;
  std::size_t steps = 0;  ///< integration steps completed
  bool aborted = false;
  std::string abort_reason;

  template <class T>
  std::vector<T> column(T TraceRecord::*field) const {
    std::vector<T> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.*field);
    return out;
  }
};

/// Closed loop with commutation on the control unit: read outputs, form the
/// error signals, evaluate the surface, apply the law, hold u over one RK4
/// step. A non-finite state stops the run with `aborted` set and the records
/// logged so far.
inline Trace run_closed_loop(const Scenario& sc) {
  validate(sc);

  Trace trace;
  trace.scenario = sc;

  TorpedoPlant plant = make_plant(sc);
  if (!sc.initial_state.empty())
    plant.set_stacked_state(Eigen::Map<const Eigen::VectorXd>(sc.initial_state.data(),
                                                               static_cast<Eigen::Index>(sc.initial_state.size())));

  SlidingModeController controller(sc.controller);
  DisturbanceRng rng(sc.disturbance.seed);

  const std::size_t n = step_count(sc);
  trace.records.reserve(n + 1);
  double u_prev = 0.0;

  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * sc.dt;
    const PlantOutputs y = plant.outputs();
    const ReferenceValue ref = reference_eval(sc.reference, t);

    const ControlStep step = controller.step(error_signals(plant, ref.r, ref.r_dot, u_prev), sc.dt);

    // Surface rate over the coming hold interval, i.e. with the new u applied.
    ErrorSignals ahead = error_signals(plant, ref.r, ref.r_dot, step.u);
    ahead.e_int = step.signals.e_int;
    const double s_dot = controller.surface_rate(ahead);

    trace.records.push_back({t, y.z, y.theta, step.signals.e, step.signals.e_dot, step.signals.e_ddot, step.s, s_dot,
                             step.u, reaching_check(step.s, s_dot, sc.eta)});
    if (i == n) break;

    const Eigen::VectorXd x = plant.stacked_state();
    const Eigen::VectorXd phi = disturbance_eval(sc.disturbance, x, rng);
    const double u = step.u;
    try {
      plant.set_stacked_state(rk4_step(
          [&plant, &phi, u](double, const Eigen::VectorXd& xs) { return plant.derivative(xs, u, phi); }, x, t,
          sc.dt));
    } catch (const NonFiniteStateError& err) {
      trace.aborted = true;
      trace.abort_reason = err.what();
      break;
    }
    u_prev = u;
    ++trace.steps;
  }
  return trace;
}

}  // namespace torpedo_smc
