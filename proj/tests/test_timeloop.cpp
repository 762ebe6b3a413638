#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "splitform/sbp1d.hpp"
#include "splitform/timeloop.hpp"

using namespace splitform;

namespace {

// Single-node 1D "semi-discretization" with a prescribed drift of the
// conserved variables and a fixed step size.
struct DriftSemi {
  GasModel gas_{1.4};
  State1D drift{-1.0, 0.0, 0.0};
  double dt = 0.1;

  int nodes() const { return 1; }
  const GasModel& gas() const { return gas_; }
  State1D state_at(const Eigen::VectorXd& u, int) const { return {u[0], u[1], u[2]}; }
  Eigen::VectorXd rhs(const Eigen::VectorXd&) const {
    return Eigen::Vector3d(drift[0], drift[1], drift[2]);
  }
  double max_dt(const Eigen::VectorXd&, double cfl) const { return cfl * dt; }
};

// Same, but the rhs rejects states below a density floor like a real one would.
struct ThrowingSemi : DriftSemi {
  Eigen::VectorXd rhs(const Eigen::VectorXd& u) const {
    if (u[0] < 0.25) throw InvalidStateError("density", u[0] - 0.25);
    return DriftSemi::rhs(u);
  }
};

Eigen::VectorXd drift_state(double rho) {
  return Eigen::Vector3d(rho, 0.0, 10.0);
}

double error_cos_problem(int steps) {
  // y' = cos(t) y, y(0) = 1, y(2) = exp(sin 2)
  auto f = [](double t, const Eigen::VectorXd& y, Eigen::VectorXd& out) { out = std::cos(t) * y; };
  const auto y = integrate_fixed(f, Eigen::VectorXd::Ones(1), 2.0, steps);
  return std::abs(y[0] - std::exp(std::sin(2.0)));
}

}  // namespace

TEST(Lsrk, CoefficientsAreConsistent) {
  // stage time c_{s+1} = sum of the increments applied so far to the solution
  // of y' = 1, and the full step integrates y' = 1 exactly
  auto f = [](double, const Eigen::VectorXd&, Eigen::VectorXd& out) { out = Eigen::VectorXd::Ones(1); };
  Eigen::VectorXd y = Eigen::VectorXd::Zero(1), du, k;
  lsrk_step(f, y, 0.0, 0.3, du, k);
  EXPECT_NEAR(y[0], 0.3, 1e-15);
  double c = 0.0, reg = 0.0;
  for (int s = 0; s < LsrkScheme::stages; ++s) {
    EXPECT_NEAR(LsrkScheme::C[s], c, 1e-15) << s;
    reg = LsrkScheme::A[s] * reg + 1.0;
    c += LsrkScheme::B[s] * reg;
  }
  EXPECT_NEAR(c, 1.0, 1e-15);
}

TEST(Lsrk, IntegratesCubicQuadratureExactly) {
  auto f = [](double t, const Eigen::VectorXd&, Eigen::VectorXd& out) {
    out = Eigen::VectorXd::Constant(1, 4.0 * t * t * t);
  };
  const auto y = integrate_fixed(f, Eigen::VectorXd::Zero(1), 1.5, 3);
  EXPECT_NEAR(y[0], std::pow(1.5, 4), 1e-13);
}

TEST(Lsrk, FourthOrderConvergence) {
  const double e1 = error_cos_problem(40), e2 = error_cos_problem(80), e3 = error_cos_problem(160);
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.1);
  EXPECT_NEAR(std::log2(e2 / e3), 4.0, 0.1);
}

TEST(Lsrk, StabilityFunctionOnTheImaginaryAxis) {
  // one step of y' = i y matches exp(i dt) through fourth order, error O(dt^5)
  auto f = [](double, const Eigen::VectorXd& y, Eigen::VectorXd& out) {
    out.resize(2);
    out << -y[1], y[0];
  };
  Eigen::VectorXd y(2), du, k;
  y << 1.0, 0.0;
  lsrk_step(f, y, 0.0, 0.1, du, k);
  EXPECT_NEAR(y[0], std::cos(0.1), 1e-7);
  EXPECT_NEAR(y[1], std::sin(0.1), 1e-7);
}

TEST(Integrate, ClipsTheFinalStep) {
  DriftSemi semi;
  semi.drift = {0.0, 0.0, 0.0};
  std::size_t calls = 0;
  IntegrateOptions opt;
  opt.t_end = 0.35;
  opt.cfl = 1.0;
  opt.on_step = [&](double, const Eigen::VectorXd&, std::size_t) { ++calls; };
  const auto [rep, u] = integrate(semi, drift_state(1.0), opt);
  EXPECT_FALSE(rep.crashed);
  EXPECT_EQ(rep.final_time, 0.35);
  EXPECT_EQ(rep.step_count, 4u);
  EXPECT_EQ(calls, 4u);
  EXPECT_EQ(u[0], 1.0);
}

TEST(Integrate, DetectsNegativeDensityAfterAStep) {
  DriftSemi semi;
  IntegrateOptions opt;
  opt.t_end = 2.0;
  opt.cfl = 1.0;
  const auto [rep, u] = integrate(semi, drift_state(0.45), opt);
  ASSERT_TRUE(rep.crashed);
  EXPECT_NEAR(*rep.crash_time, 0.5, 1e-12);
  EXPECT_NE(rep.crash_reason.find("negative density"), std::string::npos);
  EXPECT_LT(u[0], 0.0);
}

TEST(Integrate, StageFailureCountsAsCrashAtTheEndOfTheStep) {
  ThrowingSemi semi;
  IntegrateOptions opt;
  opt.t_end = 2.0;
  opt.cfl = 1.0;
  const auto [rep, u] = integrate(semi, drift_state(0.6), opt);
  ASSERT_TRUE(rep.crashed);
  EXPECT_NEAR(*rep.crash_time, 0.4, 1e-12);
  EXPECT_NE(rep.crash_reason.find("negative density"), std::string::npos);
  EXPECT_EQ(rep.step_count, 3u);
}

TEST(Integrate, RejectsBadConfiguration) {
  DriftSemi semi;
  EXPECT_THROW(step_size(semi, drift_state(1), 0.0), ConfigError);
  EXPECT_THROW(step_size(semi, drift_state(1), -1.0), ConfigError);
  IntegrateOptions opt;
  EXPECT_THROW(integrate(semi, drift_state(-1), opt), ConfigError);
  opt.t_end = -1.0;
  EXPECT_THROW(integrate(semi, drift_state(1), opt), ConfigError);
}

TEST(Integrate, FindInvalidStateMessages) {
  DriftSemi semi;
  EXPECT_FALSE(find_invalid_state(semi, drift_state(1)).has_value());
  EXPECT_EQ(*find_invalid_state(semi, drift_state(0)), "negative density at node 0");
  EXPECT_EQ(*find_invalid_state(semi, Eigen::Vector3d(1, 0, -1)), "negative pressure at node 0");
  EXPECT_EQ(*find_invalid_state(semi, Eigen::Vector3d(1, NAN, 1)), "non-finite state at node 0");
}

TEST(Integrate, PressureEquilibriumIsMonitoredOnTheDensityWave) {
  const EulerSemidiscretization1D semi(build_operator(OperatorFamily::dg, 8, -1, 1, 3),
                                       FluxId::shima);
  const auto u0 = semi.project([&](double x) { return density_wave_ic(x, semi.gas()); });
  IntegrateOptions opt;
  opt.t_end = 0.2;
  opt.monitor_equilibrium = true;
  const auto [rep, u] = integrate(semi, u0, opt);
  EXPECT_FALSE(rep.crashed);
  EXPECT_GT(rep.step_count, 10u);
  EXPECT_LE(rep.pressure_deviation_max, 1e-10);
  EXPECT_LE(rep.velocity_deviation_max, 1e-12);
  // the density profile is advected with the constant velocity
  EXPECT_GT((u - u0).cwiseAbs().maxCoeff(), 1e-3);

  const EulerSemidiscretization1D kg(semi.op(), FluxId::kennedy_gruber);
  const auto [rep_kg, _] = integrate(kg, u0, opt);
  EXPECT_GT(rep_kg.pressure_deviation_max, 1e-6);
}
