#include "torpedo_smc/metrics.hpp"
#include "torpedo_smc/sim_engine.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <gtest/gtest.h>

#include <cmath>
#include <set>

namespace torpedo_smc {
namespace {

Eigen::VectorXd decay(double, const Eigen::VectorXd& x) { return -x; }

Scenario preset(ControllerKind kind) {
  Scenario sc;
  sc.name = std::string(to_string(kind));
  sc.controller = ControllerConfig::preset(kind);
  return sc;
}

TEST(Rk4Step, SingleStepExponential) {
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
  const Eigen::VectorXd next = rk4_step(decay, x, 0.0, 0.1);
  // RK4 reproduces the degree-4 Taylor polynomial exactly on linear fields.
  const double h = 0.1;
  EXPECT_NEAR(next(0), 1.0 - h + h * h / 2 - h * h * h / 6 + h * h * h * h / 24, 1e-15);
  EXPECT_LT(std::abs(next(0) - std::exp(-h)), 1e-7);
}

TEST(Rk4Step, ZeroFieldLeavesStateUnchanged) {
  Eigen::VectorXd x(3);
  x << 1.0, -2.0, 3.5;
  const auto zero = [](double, const Eigen::VectorXd& v) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(v.size()); };
  EXPECT_EQ(rk4_step(zero, x, 0.0, 0.25), x);
}

double global_error(double dt) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
  const int n = static_cast<int>(std::lround(1.0 / dt));
  for (int i = 0; i < n; ++i) x = rk4_step(decay, x, i * dt, dt);
  return std::abs(x(0) - std::exp(-1.0));
}

TEST(Rk4Step, FourthOrderConvergence) {
  const double ratio = global_error(1e-2) / global_error(5e-3);
  EXPECT_NEAR(ratio, 16.0, 2.0);
}

TEST(Rk4Step, NonFiniteAborts) {
  const auto blow = [](double, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(v.size(), std::numeric_limits<double>::infinity());
  };
  EXPECT_THROW(rk4_step(blow, Eigen::VectorXd::Ones(2), 0.0, 0.1), NonFiniteStateError);
  EXPECT_THROW(rk4_step(decay, Eigen::VectorXd::Ones(2), 0.0, 0.0), std::invalid_argument);
}

TEST(Rk4Step, OpenLoopPlantMatchesMatrixExponential) {
  const TorpedoPlant plant = TorpedoPlant::torpedo();
  Eigen::VectorXd x0(6);
  x0 << 1e-3, -2e-3, 5e-3, 1e-2, 0.1, -0.3;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(6);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
  a.topLeftCorner(4, 4) = plant.immersion().A;
  a.bottomRightCorner(2, 2) = plant.inclination().A;

  Eigen::VectorXd x = x0;
  const double dt = 1e-3;
  for (int i = 0; i < 2000; ++i)
    x = rk4_step([&](double, const Eigen::VectorXd& v) { return plant.derivative(v, 0.0, zero); }, x, i * dt, dt);
  const Eigen::VectorXd exact = (a * 2.0).exp() * x0;
  EXPECT_LT((x - exact).norm(), 1e-9 * (1.0 + exact.norm()));
  // No spontaneous energy: nothing grows beyond the initial condition's reach.
  EXPECT_LE(x.tail(5).lpNorm<Eigen::Infinity>(), x0.lpNorm<Eigen::Infinity>() * 1.0001);
}

TEST(ReferenceEval, Step) {
  const ReferenceStep at0{10.0, 0.0};
  EXPECT_EQ(reference_eval(at0, 5.0).r, 10.0);
  EXPECT_EQ(reference_eval(at0, 5.0).r_dot, 0.0);
  const ReferenceStep late{10.0, 2.0};
  EXPECT_EQ(reference_eval(late, 1.999).r, 0.0);
  EXPECT_EQ(reference_eval(late, 2.0).r, 10.0);
  EXPECT_EQ(reference_eval(ReferenceStep{0.0, 0.0}, 3.0).r, 0.0);
}

TEST(DisturbanceEval, DisabledAndOrigin) {
  DisturbanceRng rng(3);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(6);
  EXPECT_EQ(disturbance_eval({false, 0.5, 3}, x, rng), Eigen::VectorXd::Zero(6));
  EXPECT_EQ(disturbance_eval({true, 0.5, 3}, Eigen::VectorXd::Zero(6), rng), Eigen::VectorXd::Zero(6));
}

TEST(DisturbanceEval, BoundedAndDeterministic) {
  const DisturbanceConfig cfg{true, 0.3, 99};
  DisturbanceRng a(cfg.seed), b(cfg.seed), c(cfg.seed + 1);
  bool any_diff = false;
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(6, -1.0 - i, 2.0 + 0.5 * i);
    const Eigen::VectorXd pa = disturbance_eval(cfg, x, a);
    const Eigen::VectorXd pb = disturbance_eval(cfg, x, b);
    const Eigen::VectorXd pc = disturbance_eval(cfg, x, c);
    EXPECT_EQ(pa, pb);
    EXPECT_LE(pa.norm(), cfg.bound * x.norm() * (1.0 + 1e-12));
    any_diff = any_diff || pa != pc;
  }
  EXPECT_TRUE(any_diff);
}

TEST(DisturbanceRng, PinnedSequence) {
  // mt19937_64 is fully specified by the standard: its 10000th output for the
  // default seed is 9981545732273789042.
  std::mt19937_64 ref;
  ref.discard(9999);
  EXPECT_EQ(ref(), 9981545732273789042ULL);
  DisturbanceRng rng(5489u);
  std::mt19937_64 same(5489u);
  EXPECT_EQ(rng.uniform(), static_cast<double>(same() >> 11) * 0x1.0p-53);
}

TEST(Validate, RejectsBadFields) {
  Scenario sc;
  sc.dt = 0.0;
  try {
    validate(sc);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.key(), "dt");
  }
  sc = Scenario{};
  sc.duration = 1e-4;
  EXPECT_THROW(validate(sc), ValidationError);
  sc = Scenario{};
  sc.disturbance.bound = -1.0;
  EXPECT_THROW(validate(sc), ValidationError);
  sc = Scenario{};
  sc.initial_state = {1.0, 2.0};
  EXPECT_THROW(validate(sc), ValidationError);
  sc = Scenario{};
  sc.reference.amplitude = std::numeric_limits<double>::infinity();
  EXPECT_THROW(validate(sc), ValidationError);
}

TEST(RunClosedLoop, ZeroReferenceStaysAtRest) {
  for (auto kind : {ControllerKind::Smc1, ControllerKind::Smc2, ControllerKind::PidSmc1}) {
    Scenario sc = preset(kind);
    sc.reference.amplitude = 0.0;
    sc.duration = 5.0;
    const Trace tr = run_closed_loop(sc);
    for (const auto& r : tr.records) {
      ASSERT_EQ(r.z, 0.0);
      ASSERT_EQ(r.theta, 0.0);
      ASSERT_EQ(r.e, 0.0);
      ASSERT_EQ(r.s, 0.0);
      ASSERT_EQ(r.u, 0.0);
    }
  }
}

TEST(RunClosedLoop, RecordCountAndTimestamps) {
  Scenario sc = preset(ControllerKind::PidSmc1);
  sc.duration = 2.5;
  sc.dt = 0.01;
  const Trace tr = run_closed_loop(sc);
  ASSERT_EQ(tr.records.size(), 251u);
  EXPECT_EQ(tr.steps, 250u);
  for (std::size_t i = 1; i < tr.records.size(); ++i) {
    EXPECT_GT(tr.records[i].t, tr.records[i - 1].t);
    EXPECT_NEAR(tr.records[i].t - tr.records[i - 1].t, 0.01, 1e-12);
  }
  EXPECT_EQ(run_closed_loop(preset(ControllerKind::PidSmc1)).records.size(), 60001u);
}

TEST(RunClosedLoop, RelayPresetsOnlyTakeRelayValues) {
  for (auto [kind, k] : {std::pair{ControllerKind::Smc1, 3.0}, std::pair{ControllerKind::Smc2, 1.8}}) {
    const Trace tr = run_closed_loop(preset(kind));
    std::set<double> values;
    for (const auto& r : tr.records) values.insert(r.u);
    for (double v : values) EXPECT_TRUE(v == k || v == -k || v == 0.0) << v;
    EXPECT_TRUE(values.count(k) && values.count(-k));
  }
}

TEST(RunClosedLoop, SaturationPresetRespectsAuthority) {
  Scenario sc = preset(ControllerKind::PidSmc1);
  sc.disturbance.enabled = true;
  const Trace tr = run_closed_loop(sc);
  for (const auto& r : tr.records) ASSERT_LE(std::abs(r.u), 1.0);
}

TEST(RunClosedLoop, PidPresetConverges) {
  const Trace tr = run_closed_loop(preset(ControllerKind::PidSmc1));
  const MetricsReport m = compute_metrics(tr);
  ASSERT_TRUE(m.settling_time.has_value());
  EXPECT_LT(*m.settling_time, 60.0);
  EXPECT_LT(m.steady_control_tv, 0.01);
}

TEST(RunClosedLoop, Deterministic) {
  Scenario sc = preset(ControllerKind::Smc1);
  sc.disturbance = {true, 0.05, 1234};
  sc.duration = 10.0;
  const Trace a = run_closed_loop(sc);
  const Trace b = run_closed_loop(sc);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    ASSERT_EQ(a.records[i].z, b.records[i].z);
    ASSERT_EQ(a.records[i].u, b.records[i].u);
  }
  sc.disturbance.seed = 1235;
  const Trace c = run_closed_loop(sc);
  bool differs = false;
  for (std::size_t i = 0; i < a.records.size() && !differs; ++i) differs = a.records[i].z != c.records[i].z;
  EXPECT_TRUE(differs);
}

TEST(RunClosedLoop, PidSettlingIsDtRobust) {
  Scenario sc = preset(ControllerKind::PidSmc1);
  const auto coarse = compute_metrics(run_closed_loop(sc)).settling_time;
  sc.dt = 5e-4;
  const auto fine = compute_metrics(run_closed_loop(sc)).settling_time;
  ASSERT_TRUE(coarse && fine);
  EXPECT_LT(std::abs(*coarse - *fine) / *fine, 0.05);
}

TEST(RunClosedLoop, InitialStateIsHonoured) {
  Scenario sc = preset(ControllerKind::PidSmc1);
  sc.duration = 0.01;
  sc.initial_state = {1e-4, 0.0, 0.0, 0.0, 2e-3, 0.0};
  const Trace tr = run_closed_loop(sc);
  EXPECT_DOUBLE_EQ(tr.records.front().z, 1e-4 * 44620.9);
  EXPECT_DOUBLE_EQ(tr.records.front().theta, 2e-3 * 7660.0);
}

TEST(RunClosedLoop, NonFiniteStateAbortsWithPartialTrace) {
  Scenario sc = preset(ControllerKind::Smc1);
  sc.plant = CustomPlant{{{}, {1000.0}, 1.0}, TorpedoPlant::inclination_model()};
  sc.duration = 5.0;
  const Trace tr = run_closed_loop(sc);
  EXPECT_TRUE(tr.aborted);
  EXPECT_FALSE(tr.abort_reason.empty());
  EXPECT_LT(tr.records.size(), step_count(sc) + 1);
  EXPECT_EQ(tr.records.size(), tr.steps + 1);
}

// Largest gap between the forward difference of s and the logged analytic
// rate, over boundary-layer samples.
double surface_rate_gap(double dt) {
  Scenario sc = preset(ControllerKind::PidSmc1);
  sc.dt = dt;
  const Trace tr = run_closed_loop(sc);
  double gap = 0.0;
  for (std::size_t i = 0; i + 1 < tr.records.size(); ++i) {
    const auto& a = tr.records[i];
    const auto& b = tr.records[i + 1];
    if (std::abs(a.s) >= 2.0 || std::abs(b.s) >= 2.0) continue;
    gap = std::max(gap, std::abs((b.s - a.s) / dt - a.s_dot));
  }
  return gap;
}

TEST(RunClosedLoop, PidSurfaceRateMatchesDifferenceQuotient) {
  const double coarse = surface_rate_gap(1e-3);
  const double fine = surface_rate_gap(5e-4);
  EXPECT_GT(coarse, 0.0);
  EXPECT_NEAR(coarse / fine, 2.0, 0.4);
}

}  // namespace
}  // namespace torpedo_smc
