#pragma once

// Compressible Euler equations with an ideal gas law in one and two space
// dimensions: conservative/primitive states, physical flux, entropy machinery
// (standard and Harten entropies), the HLL flux and the density wave.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "splitform/errors.hpp"

namespace splitform {

struct GasModel {
  double gamma = 1.4;

  explicit GasModel(double gamma_ = 1.4) : gamma(gamma_) {
    if (!(gamma > 1.0) || !std::isfinite(gamma)) {
      throw ConfigError("GasModel: gamma must be > 1");
    }
  }
};

/// Conservative variables (rho, rho v_1, ..., rho v_Dim, rho e).
template <int Dim>
using State = std::array<double, Dim + 2>;

using State1D = State<1>;
using State2D = State<2>;

template <int Dim>
struct Primitives {
  double rho = 1.0;
  std::array<double, Dim> v{};
  double p = 1.0;
};

template <int Dim>
constexpr int num_vars = Dim + 2;

template <int Dim>
constexpr int energy_index = Dim + 1;

template <int Dim>
double kinetic_energy_density(const State<Dim>& u) {
  double m2 = 0.0;
  for (int k = 0; k < Dim; ++k) m2 += u[k + 1] * u[k + 1];
  return 0.5 * m2 / u[0];
}

/// Pressure without validity checks.
template <int Dim>
double pressure_unchecked(const State<Dim>& u, const GasModel& gas) {
  return (gas.gamma - 1.0) * (u[energy_index<Dim>] - kinetic_energy_density<Dim>(u));
}

template <int Dim>
bool is_valid(const State<Dim>& u, const GasModel& gas) {
  for (double x : u) {
    if (!std::isfinite(x)) return false;
  }
  return u[0] > 0.0 && pressure_unchecked<Dim>(u, gas) > 0.0;
}

template <int Dim>
Primitives<Dim> cons_to_prim(const State<Dim>& u, const GasModel& gas) {
  for (double x : u) {
    if (!std::isfinite(x)) throw InvalidStateError("non-finite component", x);
  }
  if (!(u[0] > 0.0)) throw InvalidStateError("density", u[0]);
  Primitives<Dim> q;
  q.rho = u[0];
  for (int k = 0; k < Dim; ++k) q.v[k] = u[k + 1] / u[0];
  q.p = pressure_unchecked<Dim>(u, gas);
  if (!(q.p > 0.0)) throw InvalidStateError("pressure", q.p);
  return q;
}

template <int Dim>
State<Dim> prim_to_cons(const Primitives<Dim>& q, const GasModel& gas) {
  if (!(q.rho > 0.0) || !std::isfinite(q.rho)) throw InvalidStateError("density", q.rho);
  if (!(q.p > 0.0) || !std::isfinite(q.p)) throw InvalidStateError("pressure", q.p);
  State<Dim> u{};
  u[0] = q.rho;
  double v2 = 0.0;
  for (int k = 0; k < Dim; ++k) {
    u[k + 1] = q.rho * q.v[k];
    v2 += q.v[k] * q.v[k];
  }
  u[energy_index<Dim>] = q.p / (gas.gamma - 1.0) + 0.5 * q.rho * v2;
  return u;
}

template <int Dim>
double sound_speed(const Primitives<Dim>& q, const GasModel& gas) {
  return std::sqrt(gas.gamma * q.p / q.rho);
}

/// A validated nodal state together with its primitive view. The inner loops
/// of the semi-discretizations work on these to avoid recomputing primitives
/// for every flux evaluation.
template <int Dim>
struct Node {
  State<Dim> u{};
  Primitives<Dim> q{};
};

template <int Dim>
Node<Dim> make_node(const State<Dim>& u, const GasModel& gas) {
  return Node<Dim>{u, cons_to_prim<Dim>(u, gas)};
}

template <int Dim>
State<Dim> physical_flux(const Node<Dim>& n, const GasModel&, int axis) {
  const double vn = n.q.v[axis];
  State<Dim> f{};
  f[0] = n.u[0] * vn;
  for (int k = 0; k < Dim; ++k) f[k + 1] = n.u[k + 1] * vn;
  f[axis + 1] += n.q.p;
  f[energy_index<Dim>] = (n.u[energy_index<Dim>] + n.q.p) * vn;
  return f;
}

template <int Dim>
State<Dim> physical_flux(const State<Dim>& u, const GasModel& gas, int axis = 0) {
  return physical_flux<Dim>(make_node<Dim>(u, gas), gas, axis);
}

/// Entropy function U = -rho h(s), s = log(p / rho^gamma), with h either the
/// standard choice h(s) = s/(gamma-1) or Harten's one-parameter family
/// h(s) = (gamma+alpha)/(gamma-1) exp(s/(gamma+alpha)), alpha > 0.
class HartenEntropy {
 public:
  static HartenEntropy standard() { return HartenEntropy(false, 0.0); }

  static HartenEntropy alpha_family(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw ConfigError("HartenEntropy: alpha must be positive");
    }
    return HartenEntropy(true, alpha);
  }

  bool is_standard() const { return !family_; }
  double alpha() const { return alpha_; }

  double h(double s, const GasModel& gas) const {
    if (!family_) return s / (gas.gamma - 1.0);
    const double ga = gas.gamma + alpha_;
    return ga / (gas.gamma - 1.0) * std::exp(s / ga);
  }

  double dh(double s, const GasModel& gas) const {
    if (!family_) return 1.0 / (gas.gamma - 1.0);
    return std::exp(s / (gas.gamma + alpha_)) / (gas.gamma - 1.0);
  }

  double d2h(double s, const GasModel& gas) const {
    if (!family_) return 0.0;
    return dh(s, gas) / (gas.gamma + alpha_);
  }

  /// h''(s)/h'(s) < 1/gamma, which makes U strictly convex.
  bool is_convex_at(double s, const GasModel& gas) const {
    const double d1 = dh(s, gas);
    return d1 > 0.0 && d2h(s, gas) / d1 < 1.0 / gas.gamma;
  }

 private:
  HartenEntropy(bool family, double alpha) : family_(family), alpha_(alpha) {}

  bool family_;
  double alpha_;
};

template <int Dim>
double specific_entropy(const Primitives<Dim>& q, const GasModel& gas) {
  return std::log(q.p) - gas.gamma * std::log(q.rho);
}

template <int Dim>
double entropy(const State<Dim>& u, const GasModel& gas,
               const HartenEntropy& h = HartenEntropy::standard()) {
  const auto q = cons_to_prim<Dim>(u, gas);
  return -q.rho * h.h(specific_entropy<Dim>(q, gas), gas);
}

/// w = U'(u) = (gamma-1) h'(s)/p * (-rho|v|^2/2 - p/(gamma-1) (h/h' - gamma), rho v, -rho).
template <int Dim>
State<Dim> entropy_variables(const State<Dim>& u, const GasModel& gas,
                             const HartenEntropy& h = HartenEntropy::standard()) {
  const auto q = cons_to_prim<Dim>(u, gas);
  const double s = specific_entropy<Dim>(q, gas);
  if (!h.is_convex_at(s, gas)) throw InvalidStateError("entropy convexity, s", s);
  const double gm1 = gas.gamma - 1.0;
  double v2 = 0.0;
  for (int k = 0; k < Dim; ++k) v2 += q.v[k] * q.v[k];
  State<Dim> w{};
  if (h.is_standard()) {
    // closed form for h(s) = s/(gamma-1)
    w[0] = (gas.gamma - s) / gm1 - 0.5 * q.rho * v2 / q.p;
    for (int k = 0; k < Dim; ++k) w[k + 1] = q.rho * q.v[k] / q.p;
    w[energy_index<Dim>] = -q.rho / q.p;
    return w;
  }
  const double dh = h.dh(s, gas);
  const double scale = gm1 * dh / q.p;
  w[0] = -scale * 0.5 * q.rho * v2 - (h.h(s, gas) - gas.gamma * dh);
  for (int k = 0; k < Dim; ++k) w[k + 1] = scale * q.rho * q.v[k];
  w[energy_index<Dim>] = -scale * q.rho;
  return w;
}

/// psi = (gamma-1) h'(s) rho v_axis; reduces to rho v for the standard entropy.
template <int Dim>
double flux_potential(const State<Dim>& u, const GasModel& gas,
                      const HartenEntropy& h = HartenEntropy::standard(), int axis = 0) {
  const auto q = cons_to_prim<Dim>(u, gas);
  if (h.is_standard()) return u[axis + 1];
  const double s = specific_entropy<Dim>(q, gas);
  return (gas.gamma - 1.0) * h.dh(s, gas) * u[axis + 1];
}

/// HLL flux with Davis wave-speed estimates.
template <int Dim>
State<Dim> hll_flux(const Node<Dim>& l, const Node<Dim>& r, const GasModel& gas, int axis) {
  const double cl = sound_speed<Dim>(l.q, gas);
  const double cr = sound_speed<Dim>(r.q, gas);
  const double sl = std::min(l.q.v[axis] - cl, r.q.v[axis] - cr);
  const double sr = std::max(l.q.v[axis] + cl, r.q.v[axis] + cr);
  const auto fl = physical_flux<Dim>(l, gas, axis);
  if (sl >= 0.0) return fl;
  const auto fr = physical_flux<Dim>(r, gas, axis);
  if (sr <= 0.0) return fr;
  State<Dim> f{};
  const double inv = 1.0 / (sr - sl);
  for (int k = 0; k < num_vars<Dim>; ++k) {
    f[k] = (sr * fl[k] - sl * fr[k] + sl * sr * (r.u[k] - l.u[k])) * inv;
  }
  return f;
}

template <int Dim>
State<Dim> hll_flux(const State<Dim>& ul, const State<Dim>& ur, const GasModel& gas,
                    int axis = 0) {
  return hll_flux<Dim>(make_node<Dim>(ul, gas), make_node<Dim>(ur, gas), gas, axis);
}

/// rho = 1 + 0.98 sin(2 pi x), v = 0.1, p = 20.
inline State1D density_wave_ic(double x, const GasModel& gas) {
  Primitives<1> q;
  q.rho = 1.0 + 0.98 * std::sin(2.0 * std::numbers::pi * x);
  q.v = {0.1};
  q.p = 20.0;
  return prim_to_cons<1>(q, gas);
}

/// rho = 1 + 0.98 sin(2 pi (x1 + x2)), v = (0.1, 0.2), p = 20.
inline State2D density_wave_ic(double x1, double x2, const GasModel& gas) {
  Primitives<2> q;
  q.rho = 1.0 + 0.98 * std::sin(2.0 * std::numbers::pi * (x1 + x2));
  q.v = {0.1, 0.2};
  q.p = 20.0;
  return prim_to_cons<2>(q, gas);
}

}  // namespace splitform
