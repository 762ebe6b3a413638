#pragma once

// Five-stage fourth-order low-storage Runge-Kutta integration (Carpenter and
// Kennedy, 2N-storage) with CFL step size, crash detection and an optional
// pressure-equilibrium monitor.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "splitform/errors.hpp"
#include "splitform/euler.hpp"

namespace splitform {

struct LsrkScheme {
  static constexpr int stages = 5;
  static constexpr std::array<double, 5> A = {
      0.0,
      -567301805773.0 / 1357537059087.0,
      -2404267990393.0 / 2016746695238.0,
      -3550918686646.0 / 2091501179385.0,
      -1275806237668.0 / 842570457699.0,
  };
  static constexpr std::array<double, 5> B = {
      1432997174477.0 / 9575080441755.0,
      5161836677717.0 / 13612068292357.0,
      1720146321549.0 / 2090206949498.0,
      3134564353537.0 / 4481467310338.0,
      2277821191437.0 / 14882151754819.0,
  };
  static constexpr std::array<double, 5> C = {
      0.0,
      1432997174477.0 / 9575080441755.0,
      2526269341429.0 / 6820363962896.0,
      2006345519317.0 / 3224310063776.0,
      2802321613138.0 / 2924317926251.0,
  };
};

namespace detail {

template <class Semi>
void eval_rhs(const Semi& semi, const Eigen::VectorXd& u, Eigen::VectorXd& du) {
  if constexpr (requires { semi.rhs(u, du); }) {
    semi.rhs(u, du);
  } else {
    du = semi.rhs(u);
  }
}

template <class Semi>
using semi_state_t =
    decltype(std::declval<const Semi&>().state_at(std::declval<const Eigen::VectorXd&>(), 0));

template <class Semi>
inline constexpr int semi_dim = static_cast<int>(std::tuple_size_v<semi_state_t<Semi>>) - 2;

}  // namespace detail

/// One LSRK step of size dt for u' = f(t, u). `du` is the second storage
/// register; `k` receives stage derivatives. f(t, u, out) must fill out.
template <class F>
void lsrk_step(F&& f, Eigen::VectorXd& u, double t, double dt, Eigen::VectorXd& du,
               Eigen::VectorXd& k) {
  du.setZero(u.size());
  for (int s = 0; s < LsrkScheme::stages; ++s) {
    f(t + LsrkScheme::C[s] * dt, u, k);
    du = LsrkScheme::A[s] * du + dt * k;
    u += LsrkScheme::B[s] * du;
  }
}

/// Fixed-step integration of u' = f(t, u) over [0, t_end] with n steps.
template <class F>
Eigen::VectorXd integrate_fixed(F&& f, Eigen::VectorXd u, double t_end, int steps) {
  Eigen::VectorXd du(u.size()), k(u.size());
  const double dt = t_end / steps;
  for (int n = 0; n < steps; ++n) lsrk_step(f, u, n * dt, dt, du, k);
  return u;
}

/// First invalid nodal state, described as "negative density",
/// "negative pressure" or "non-finite state" with the node index.
template <class Semi>
std::optional<std::string> find_invalid_state(const Semi& semi, const Eigen::VectorXd& u) {
  for (int i = 0; i < semi.nodes(); ++i) {
    constexpr int dim = detail::semi_dim<Semi>;
    const auto s = semi.state_at(u, i);
    for (double x : s) {
      if (!std::isfinite(x)) return "non-finite state at node " + std::to_string(i);
    }
    if (!(s[0] > 0.0)) return "negative density at node " + std::to_string(i);
    if (!(pressure_unchecked<dim>(s, semi.gas()) > 0.0)) {
      return "negative pressure at node " + std::to_string(i);
    }
  }
  return std::nullopt;
}

template <class Semi>
double step_size(const Semi& semi, const Eigen::VectorXd& u, double cfl) {
  if (!(cfl > 0.0) || !std::isfinite(cfl)) throw ConfigError("cfl must be positive");
  return semi.max_dt(u, cfl);
}

struct RunReport {
  double final_time = 0.0;
  bool crashed = false;
  std::optional<double> crash_time;
  std::string crash_reason;
  double pressure_deviation_max = 0.0;
  double velocity_deviation_max = 0.0;
  std::size_t step_count = 0;
};

struct IntegrateOptions {
  double t_end = 1.0;
  double cfl = 0.05;
  bool monitor_equilibrium = false;
  // Called after every accepted step with (t, u, step index).
  std::function<void(double, const Eigen::VectorXd&, std::size_t)> on_step;
};

/// Deviation of nodal pressure and velocity from their initial nodal values.
template <class Semi>
class EquilibriumMonitor {
 public:
  EquilibriumMonitor(const Semi& semi, const Eigen::VectorXd& u0) : semi_(semi) {
    const int n = semi.nodes();
    p0_.resize(n);
    v0_.resize(n);
    for (int i = 0; i < n; ++i) {
      const auto q = prim(u0, i);
      p0_[i] = q.p;
      v0_[i] = q.v;
    }
  }

  void observe(const Eigen::VectorXd& u) {
    for (int i = 0; i < semi_.nodes(); ++i) {
      const auto q = prim(u, i);
      dp_ = std::max(dp_, std::abs(q.p - p0_[i]));
      for (std::size_t k = 0; k < q.v.size(); ++k) {
        dv_ = std::max(dv_, std::abs(q.v[k] - v0_[i][k]));
      }
    }
  }

  double pressure_deviation() const { return dp_; }
  double velocity_deviation() const { return dv_; }

 private:
  static constexpr int dim = detail::semi_dim<Semi>;

  Primitives<dim> prim(const Eigen::VectorXd& u, int i) const {
    return cons_to_prim<dim>(semi_.state_at(u, i), semi_.gas());
  }

  const Semi& semi_;
  std::vector<double> p0_;
  std::vector<std::array<double, dim>> v0_;
  double dp_ = 0.0;
  double dv_ = 0.0;
};

/// Advances u0 to t_end with dt recomputed from the current state every step.
/// Crashes (invalid state after a step, or inside a stage) end the run and
/// are reported, never thrown.
template <class Semi>
std::pair<RunReport, Eigen::VectorXd> integrate(const Semi& semi, Eigen::VectorXd u,
                                                const IntegrateOptions& opt) {
  if (!(opt.t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
  if (auto bad = find_invalid_state(semi, u)) throw ConfigError("invalid initial state: " + *bad);
  RunReport report;
  std::optional<EquilibriumMonitor<Semi>> monitor;
  if (opt.monitor_equilibrium) monitor.emplace(semi, u);

  Eigen::VectorXd du(u.size()), k(u.size());
  double t = 0.0;
  auto f = [&](double, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    detail::eval_rhs(semi, x, out);
  };
  while (t < opt.t_end) {
    double dt = step_size(semi, u, opt.cfl);
    if (t + dt > opt.t_end) dt = opt.t_end - t;
    try {
      lsrk_step(f, u, t, dt, du, k);
    } catch (const InvalidStateError& e) {
      report.crashed = true;
      report.crash_time = t + dt;
      const std::string what = std::isfinite(e.value()) ? "negative " + e.quantity()
                                                        : std::string("non-finite state");
      report.crash_reason = what + " in stage evaluation (" + e.what() + ")";
      break;
    }
    t = (t + dt >= opt.t_end) ? opt.t_end : t + dt;
    ++report.step_count;
    if (auto bad = find_invalid_state(semi, u)) {
      report.crashed = true;
      report.crash_time = t;
      report.crash_reason = *bad;
      break;
    }
    if (monitor) monitor->observe(u);
    if (opt.on_step) opt.on_step(t, u, report.step_count);
  }
  report.final_time = t;
  if (monitor) {
    report.pressure_deviation_max = monitor->pressure_deviation();
    report.velocity_deviation_max = monitor->velocity_deviation();
  }
  return {report, std::move(u)};
}

}  // namespace splitform
