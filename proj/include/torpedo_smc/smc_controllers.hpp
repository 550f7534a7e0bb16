#pragma once

#include "torpedo_smc/lti_plant.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>

namespace torpedo_smc {

namespace detail {
inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite and > 0");
}
}  // namespace detail

/// s = k1 e + k2 e'
struct LinearSurface {
  double k1;
  double k2;

  LinearSurface(double k1_, double k2_) : k1(k1_), k2(k2_) {
    detail::require_positive(k1, "k1");
    detail::require_positive(k2, "k2");
  }
  bool operator==(const LinearSurface&) const = default;
};

/// sigma = beta1 e + beta2 e' + beta3 e''
///
/// This is the surface alpha2 s' + alpha1 s on top of the linear surface,
/// expanded back into error derivatives.
struct SecondOrderSurface {
  double beta1;
  double beta2;
  double beta3;

  SecondOrderSurface(double b1, double b2, double b3) : beta1(b1), beta2(b2), beta3(b3) {
    detail::require_positive(beta1, "beta1");
    detail::require_positive(beta2, "beta2");
    detail::require_positive(beta3, "beta3");
  }
  bool operator==(const SecondOrderSurface&) const = default;
};

/// s = alpha1 e + alpha2 e' + alpha3 int(e dt)
struct PidSurface {
  double alpha1;
  double alpha2;
  double alpha3;
  double integral = 0.0;  ///< accumulated error [error units * s]

  PidSurface(double a1, double a2, double a3) : alpha1(a1), alpha2(a2), alpha3(a3) {
    detail::require_positive(alpha1, "alpha1");
    detail::require_positive(alpha2, "alpha2");
    detail::require_positive(alpha3, "alpha3");
  }
  bool operator==(const PidSurface&) const = default;
};

struct RelayLaw {
  double k;

  explicit RelayLaw(double k_) : k(k_) { detail::require_positive(k, "k"); }
  bool operator==(const RelayLaw&) const = default;
};

struct SaturationLaw {
  double lambda;
  double phi;  ///< boundary-layer thickness

  SaturationLaw(double lambda_, double phi_) : lambda(lambda_), phi(phi_) {
    detail::require_positive(lambda, "lambda");
    detail::require_positive(phi, "phi");
  }
  bool operator==(const SaturationLaw&) const = default;
};

using Surface = std::variant<LinearSurface, SecondOrderSurface, PidSurface>;
using ControlLaw = std::variant<RelayLaw, SaturationLaw>;

/// Tracking error e = r - z and its derivatives.
///
/// e_dddot is only consumed by the surface-rate monitor of the second-order
/// surface; the control laws never need it.
struct ErrorSignals {
  double e = 0.0;
  double e_dot = 0.0;
  double e_ddot = 0.0;
  double e_dddot = 0.0;
  double e_int = 0.0;
};

/// sign(0) = 0.
inline int sign(double s) noexcept { return (s > 0.0) - (s < 0.0); }

inline double relay_control(double s, const RelayLaw& law) noexcept { return law.k * sign(s); }

inline double sat_control(double s, const SaturationLaw& law) noexcept {
  if (std::abs(s) >= law.phi) return law.lambda * sign(s);
  return law.lambda * s / law.phi;
}

inline double apply_law(double s, const ControlLaw& law) {
  return std::visit(
      [s](const auto& l) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(l)>, RelayLaw>)
          return relay_control(s, l);
        else
          return sat_control(s, l);
      },
      law);
}

inline double eval_surface(const LinearSurface& m, const ErrorSignals& sig) noexcept {
  return m.k1 * sig.e + m.k2 * sig.e_dot;
}
inline double eval_surface(const SecondOrderSurface& m, const ErrorSignals& sig) noexcept {
  return m.beta1 * sig.e + m.beta2 * sig.e_dot + m.beta3 * sig.e_ddot;
}
/// Uses m.integral; sig.e_int is ignored.
inline double eval_surface(const PidSurface& m, const ErrorSignals& sig) noexcept {
  return m.alpha1 * sig.e + m.alpha2 * sig.e_dot + m.alpha3 * m.integral;
}
inline double eval_surface(const Surface& m, const ErrorSignals& sig) {
  return std::visit([&sig](const auto& x) { return eval_surface(x, sig); }, m);
}

/// Time derivative of the surface along the error signals. For the PID
/// surface this is alpha1 e' + alpha2 e'' + alpha3 e.
inline double eval_surface_rate(const Surface& m, const ErrorSignals& sig) {
  struct Visitor {
    const ErrorSignals& sig;
    double operator()(const LinearSurface& x) const { return x.k1 * sig.e_dot + x.k2 * sig.e_ddot; }
    double operator()(const SecondOrderSurface& x) const {
      return x.beta1 * sig.e_dot + x.beta2 * sig.e_ddot + x.beta3 * sig.e_dddot;
    }
    double operator()(const PidSurface& x) const {
      return x.alpha1 * sig.e_dot + x.alpha2 * sig.e_ddot + x.alpha3 * sig.e;
    }
  };
  return std::visit(Visitor{sig}, m);
}

/// Trapezoidal update of the integral term.
inline PidSurface pid_integral_step(PidSurface surface, double e_prev, double e_now, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  surface.integral += dt * (e_prev + e_now) / 2.0;
  return surface;
}

/// Error derivatives evaluated analytically through the immersion
/// realization, with u held at u_prev over the interval (zero-order hold) and
/// the reference assumed to have zero second and third derivatives.
///
/// `order` caps how many derivatives are computed (0..3); the rest stay zero.
inline ErrorSignals error_signals(const TorpedoPlant& plant, double r, double r_dot, double u_prev, int order = 3) {
  const StateSpace& ss = plant.immersion();
  const Eigen::VectorXd& x = plant.x_z();

  ErrorSignals sig;
  sig.e = r - ss.C.dot(x);
  if (order < 1) return sig;

  // Successive derivatives of y = C x: y^(k) = C A^(k-1) x' with x' = A x + B u.
  Eigen::VectorXd dx = ss.A * x + ss.B * u_prev;
  sig.e_dot = r_dot - ss.C.dot(dx);
  if (order < 2) return sig;

  Eigen::VectorXd tmp = ss.A * dx;
  sig.e_ddot = -ss.C.dot(tmp);
  if (order < 3) return sig;

  tmp = ss.A * tmp;
  sig.e_dddot = -ss.C.dot(tmp);
  return sig;
}

/// s s' <= -eta |s|. Holds vacuously at s = 0.
inline bool reaching_check(double s, double s_dot, double eta) noexcept {
  return s * s_dot <= -eta * std::abs(s);
}

enum class ControllerKind { Smc1, Smc2, PidSmc1 };

inline std::string_view to_string(ControllerKind k) noexcept {
  switch (k) {
    case ControllerKind::Smc1: return "smc1";
    case ControllerKind::Smc2: return "smc2";
    case ControllerKind::PidSmc1: return "pid-smc1";
  }
  return "?";
}

inline std::optional<ControllerKind> parse_controller_kind(std::string_view name) noexcept {
  if (name == "smc1") return ControllerKind::Smc1;
  if (name == "smc2") return ControllerKind::Smc2;
  if (name == "pid-smc1") return ControllerKind::PidSmc1;
  return std::nullopt;
}

/// Surface and law for one controller. Presets carry the reference torpedo
/// gains; the SMC2 relay gain gives the +-1.8 control level.
struct ControllerConfig {
  ControllerKind kind;
  Surface surface;
  ControlLaw law;

  static ControllerConfig preset(ControllerKind kind) {
    switch (kind) {
      case ControllerKind::Smc1: return {kind, LinearSurface{1.0, 2.5}, RelayLaw{3.0}};
      case ControllerKind::Smc2: return {kind, SecondOrderSurface{2.0, 5.0, 2.0}, RelayLaw{1.8}};
      case ControllerKind::PidSmc1: return {kind, PidSurface{1.0, 4.0, 0.04}, SaturationLaw{1.0, 2.0}};
    }
    throw std::invalid_argument("unknown controller kind");
  }

  /// Throws if the surface/law pair does not belong to `kind`.
  void validate() const {
    bool ok = false;
    switch (kind) {
      case ControllerKind::Smc1:
        ok = std::holds_alternative<LinearSurface>(surface) && std::holds_alternative<RelayLaw>(law);
        break;
      case ControllerKind::Smc2:
        ok = std::holds_alternative<SecondOrderSurface>(surface) && std::holds_alternative<RelayLaw>(law);
        break;
      case ControllerKind::PidSmc1:
        ok = std::holds_alternative<PidSurface>(surface) && std::holds_alternative<SaturationLaw>(law);
        break;
    }
    if (!ok)
      throw std::invalid_argument("controller '" + std::string(to_string(kind)) +
                                  "' has a mismatched surface/law configuration");
  }

  /// Largest |u| the law can produce.
  double control_bound() const {
    if (const auto* r = std::get_if<RelayLaw>(&law)) return r->k;
    return std::get<SaturationLaw>(law).lambda;
  }

  bool operator==(const ControllerConfig&) const = default;
};

struct ControlStep {
  double u = 0.0;
  double s = 0.0;
  ErrorSignals signals;  ///< with e_int filled for the PID surface
};

/// One controller instance per run; carries the PID integral between steps.
class SlidingModeController {
 public:
  explicit SlidingModeController(ControllerConfig config) : config_(std::move(config)) { config_.validate(); }

  const ControllerConfig& config() const noexcept { return config_; }

  ControlStep step(ErrorSignals sig, double dt) {
    if (auto* pid = std::get_if<PidSurface>(&config_.surface)) {
      if (e_prev_) *pid = pid_integral_step(*pid, *e_prev_, sig.e, dt);
      sig.e_int = pid->integral;
    }
    e_prev_ = sig.e;
    const double s = eval_surface(config_.surface, sig);
    return {apply_law(s, config_.law), s, sig};
  }

  double surface_rate(const ErrorSignals& sig) const { return eval_surface_rate(config_.surface, sig); }

 private:
  ControllerConfig config_;
  std::optional<double> e_prev_;
};

}  // namespace torpedo_smc
