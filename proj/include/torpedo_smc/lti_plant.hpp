#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace torpedo_smc {

/// Thrown when a frequency response is requested exactly at a pole.
class PoleEvaluationError : public std::domain_error {
 public:
  explicit PoleEvaluationError(double omega)
      : std::domain_error("frequency response evaluated at a pole (omega = " +
                          std::to_string(omega) + " rad/s)"),
        omega_(omega) {}

  double omega() const noexcept { return omega_; }

 private:
  double omega_;
};

/// Polynomial coefficients in descending powers of p.
using Polynomial = std::vector<double>;

/// Multiplies two polynomials given in descending powers.
inline Polynomial poly_multiply(const Polynomial& a, const Polynomial& b) {
  if (a.empty() || b.empty()) return {};
  Polynomial out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

/// Expands prod(p - root_i), multiplying the factors in the order listed.
inline Polynomial poly_from_roots(const std::vector<double>& roots) {
  Polynomial p{1.0};
  for (double r : roots) p = poly_multiply(p, {1.0, -r});
  return p;
}

/// Horner evaluation at a complex point.
inline std::complex<double> poly_eval(const Polynomial& p, std::complex<double> x) {
  std::complex<double> acc{0.0, 0.0};
  for (double c : p) acc = acc * x + c;
  return acc;
}

/// Strictly proper SISO transfer function num(p)/den(p).
///
/// Leading zeros of the numerator are stripped on construction, so
/// `num().size() - 1` is the true numerator degree. An empty numerator is the
/// zero system.
class TransferFunction {
 public:
  TransferFunction(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.empty() || den_.front() == 0.0)
      throw std::invalid_argument("transfer function denominator must have a nonzero leading coefficient");
    if (den_.size() < 2)
      throw std::invalid_argument("transfer function denominator must have degree >= 1");
    std::size_t lead = 0;
    while (lead < num_.size() && num_[lead] == 0.0) ++lead;
    num_.erase(num_.begin(), num_.begin() + static_cast<std::ptrdiff_t>(lead));
    if (num_.size() >= den_.size())
      throw std::invalid_argument("transfer function must be strictly proper (deg num < deg den)");
  }

  const Polynomial& num() const noexcept { return num_; }
  const Polynomial& den() const noexcept { return den_; }
  int order() const noexcept { return static_cast<int>(den_.size()) - 1; }

  bool operator==(const TransferFunction&) const = default;

 private:
  Polynomial num_;
  Polynomial den_;
};

/// Factored pole-zero-gain description: gain * prod(p - z_i) / prod(p - p_i).
struct ZpkModel {
  std::vector<double> zeros;
  std::vector<double> poles;
  double gain = 1.0;

  bool operator==(const ZpkModel&) const = default;
};

inline TransferFunction from_zpk(const ZpkModel& m) {
  if (m.zeros.size() >= m.poles.size())
    throw std::invalid_argument("zpk model must have fewer zeros than poles (strictly proper)");
  Polynomial num = poly_from_roots(m.zeros);
  for (double& c : num) c *= m.gain;
  return TransferFunction(std::move(num), poly_from_roots(m.poles));
}

/// Continuous-time realization x' = A x + B u, y = C x + D u.
struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  double D = 0.0;

  Eigen::Index order() const noexcept { return A.rows(); }
};

/// Controllable companion form.
///
/// Ones on the superdiagonal, last row holds the negated monic denominator
/// coefficients [-a_n, ..., -a_1], B = e_n, and C holds the monic-normalized
/// numerator in ascending powers.
inline StateSpace tf_to_ss(const TransferFunction& tf) {
  const auto& den = tf.den();
  const auto& num = tf.num();
  const Eigen::Index n = tf.order();
  const double lead = den.front();

  StateSpace ss;
  ss.A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) ss.A(n - 1, j) = -den[static_cast<std::size_t>(n - j)] / lead;

  ss.B = Eigen::VectorXd::Zero(n);
  ss.B(n - 1) = 1.0;

  ss.C = Eigen::RowVectorXd::Zero(n);
  const std::size_t m = num.size();
  for (std::size_t k = 0; k < m; ++k) ss.C(static_cast<Eigen::Index>(k)) = num[m - 1 - k] / lead;
  ss.D = 0.0;
  return ss;
}

inline std::complex<double> freq_response(const TransferFunction& tf, double omega) {
  const std::complex<double> jw{0.0, omega};
  const std::complex<double> d = poly_eval(tf.den(), jw);
  if (d == std::complex<double>{0.0, 0.0}) throw PoleEvaluationError(omega);
  return poly_eval(tf.num(), jw) / d;
}

/// C (j omega I - A)^-1 B + D.
inline std::complex<double> freq_response(const StateSpace& ss, double omega) {
  const Eigen::Index n = ss.order();
  Eigen::MatrixXcd m = -ss.A.cast<std::complex<double>>();
  m.diagonal().array() += std::complex<double>{0.0, omega};
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
  if (!lu.isInvertible()) throw PoleEvaluationError(omega);
  const Eigen::VectorXcd x = lu.solve(ss.B.cast<std::complex<double>>());
  std::complex<double> y = ss.D;
  for (Eigen::Index i = 0; i < n; ++i) y += ss.C(i) * x(i);
  return y;
}

struct PlantOutputs {
  double z = 0.0;      ///< depth [m]
  double theta = 0.0;  ///< pitch angle [rad]
};

/// Immersion H2 and inclination H1 realized as independent subsystems driven
/// by the same fin deflection u. The stacked state is [x_z ; x_theta].
class TorpedoPlant {
 public:
  TorpedoPlant(const ZpkModel& immersion, const ZpkModel& inclination)
      : immersion_(tf_to_ss(from_zpk(immersion))),
        inclination_(tf_to_ss(from_zpk(inclination))),
        x_z_(Eigen::VectorXd::Zero(immersion_.order())),
        x_theta_(Eigen::VectorXd::Zero(inclination_.order())) {}

  /// H2(p) = 6514 (p + 6.85) / (p (p + 1.91)(p + 12.5)(p + 40))
  static ZpkModel immersion_model() { return {{-6.85}, {0.0, -1.91, -12.5, -40.0}, 6514.0}; }
  /// H1(p) = 7660 / (p (p + 40))
  static ZpkModel inclination_model() { return {{}, {0.0, -40.0}, 7660.0}; }

  static TorpedoPlant torpedo() { return {immersion_model(), inclination_model()}; }

  const StateSpace& immersion() const noexcept { return immersion_; }
  const StateSpace& inclination() const noexcept { return inclination_; }

  const Eigen::VectorXd& x_z() const noexcept { return x_z_; }
  const Eigen::VectorXd& x_theta() const noexcept { return x_theta_; }

  Eigen::Index state_dim() const noexcept { return immersion_.order() + inclination_.order(); }

  Eigen::VectorXd stacked_state() const {
    Eigen::VectorXd x(state_dim());
    x << x_z_, x_theta_;
    return x;
  }

  void set_stacked_state(const Eigen::VectorXd& x) {
    if (x.size() != state_dim()) throw std::invalid_argument("stacked state has wrong dimension");
    x_z_ = x.head(immersion_.order());
    x_theta_ = x.tail(inclination_.order());
  }

  /// [A_z x_z + B_z u ; A_theta x_theta + B_theta u] + phi for an arbitrary
  /// stacked state x.
  Eigen::VectorXd derivative(const Eigen::VectorXd& x, double u, const Eigen::VectorXd& phi) const {
    const Eigen::Index nz = immersion_.order();
    const Eigen::Index nt = inclination_.order();
    if (x.size() != nz + nt || phi.size() != nz + nt)
      throw std::invalid_argument("state/disturbance dimension mismatch");
    Eigen::VectorXd dx(nz + nt);
    dx.head(nz).noalias() = immersion_.A * x.head(nz);
    dx.head(nz) += immersion_.B * u;
    dx.tail(nt).noalias() = inclination_.A * x.tail(nt);
    dx.tail(nt) += inclination_.B * u;
    dx += phi;
    return dx;
  }

  PlantOutputs outputs() const {
    return {immersion_.C.dot(x_z_), inclination_.C.dot(x_theta_)};
  }

 private:
  StateSpace immersion_;
  StateSpace inclination_;
  Eigen::VectorXd x_z_;
  Eigen::VectorXd x_theta_;
};

inline Eigen::VectorXd plant_derivative(const TorpedoPlant& plant, double u, const Eigen::VectorXd& phi) {
  return plant.derivative(plant.stacked_state(), u, phi);
}

inline PlantOutputs plant_outputs(const TorpedoPlant& plant) { return plant.outputs(); }

}  // namespace torpedo_smc
