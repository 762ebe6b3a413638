#pragma once

// Symmetric two-point fluxes for the Euler equations and the property
// checkers built on top of them (entropy conservation, kinetic energy
// preservation, pressure equilibrium preservation).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "splitform/euler.hpp"
#include "splitform/means.hpp"

namespace splitform {

/// Volume/surface fluxes for the Euler equations. `kennedy_gruber` is KEP but
/// not PEP and serves as a negative control; `hll` is dissipative and only
/// meaningful as a surface flux.
enum class FluxId { central, shima, ranocha, kennedy_gruber, hll };

inline constexpr std::array<FluxId, 5> kAllFluxes = {
    FluxId::central, FluxId::shima, FluxId::ranocha, FluxId::kennedy_gruber, FluxId::hll};

constexpr std::string_view to_string(FluxId id) {
  switch (id) {
    case FluxId::central: return "central";
    case FluxId::shima: return "shima";
    case FluxId::ranocha: return "ranocha";
    case FluxId::kennedy_gruber: return "kennedy_gruber";
    case FluxId::hll: return "hll";
  }
  return "unknown";
}

inline std::optional<FluxId> parse_flux_id(std::string_view name) {
  for (auto id : kAllFluxes) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

constexpr bool is_symmetric_two_point(FluxId id) { return id != FluxId::hll; }

namespace flux {

/// Arithmetic mean of the two physical fluxes.
struct Central {
  static constexpr FluxId id = FluxId::central;
  template <int Dim>
  State<Dim> operator()(const Node<Dim>& l, const Node<Dim>& r, const GasModel& gas,
                        int axis) const {
    const auto fl = physical_flux<Dim>(l, gas, axis);
    const auto fr = physical_flux<Dim>(r, gas, axis);
    State<Dim> f;
    for (int k = 0; k < num_vars<Dim>; ++k) f[k] = 0.5 * (fl[k] + fr[k]);
    return f;
  }
};

namespace detail {

// Shared structure of the Shima et al. and Ranocha fluxes:
//   f_rho   = rho_mean <v_n>
//   f_rhov  = f_rho <v> + <p> e_n
//   f_rhoe  = f_rho {v.v}/2 + internal + {p.v_n}
// where `internal` is the flux-specific internal energy term.
template <int Dim>
State<Dim> kep_pep_flux(const Node<Dim>& l, const Node<Dim>& r, double rho_mean,
                        double vn_avg, double internal, int axis) {
  const double p_avg = 0.5 * (l.q.p + r.q.p);
  double vv = 0.0;
  for (int k = 0; k < Dim; ++k) vv += l.q.v[k] * r.q.v[k];
  State<Dim> f;
  f[0] = rho_mean * vn_avg;
  for (int k = 0; k < Dim; ++k) f[k + 1] = f[0] * 0.5 * (l.q.v[k] + r.q.v[k]);
  f[axis + 1] += p_avg;
  f[energy_index<Dim>] = 0.5 * f[0] * vv + internal +
                         0.5 * (l.q.p * r.q.v[axis] + r.q.p * l.q.v[axis]);
  return f;
}

}  // namespace detail

/// KEP and PEP flux with arithmetic density mean.
struct Shima {
  static constexpr FluxId id = FluxId::shima;
  template <int Dim>
  State<Dim> operator()(const Node<Dim>& l, const Node<Dim>& r, const GasModel& gas,
                        int axis) const {
    const double rho_avg = 0.5 * (l.q.rho + r.q.rho);
    const double vn_avg = 0.5 * (l.q.v[axis] + r.q.v[axis]);
    const double p_avg = 0.5 * (l.q.p + r.q.p);
    const double internal = p_avg * vn_avg / (gas.gamma - 1.0);
    return detail::kep_pep_flux<Dim>(l, r, rho_avg, vn_avg, internal, axis);
  }
};

/// EC, KEP and PEP flux with logarithmic means of rho and rho/p.
struct Ranocha {
  static constexpr FluxId id = FluxId::ranocha;
  template <int Dim>
  State<Dim> operator()(const Node<Dim>& l, const Node<Dim>& r, const GasModel& gas,
                        int axis) const {
    const double rho_mean = log_mean_unchecked(l.q.rho, r.q.rho);
    const double beta_mean = log_mean_unchecked(l.q.rho / l.q.p, r.q.rho / r.q.p);
    const double vn_avg = 0.5 * (l.q.v[axis] + r.q.v[axis]);
    const double internal = rho_mean * vn_avg / ((gas.gamma - 1.0) * beta_mean);
    return detail::kep_pep_flux<Dim>(l, r, rho_mean, vn_avg, internal, axis);
  }
};

/// f_rho = <rho><v_n>, f_rhov = f_rho <v> + <p> e_n, f_rhoe = f_rho <e> + <p><v_n>.
struct KennedyGruber {
  static constexpr FluxId id = FluxId::kennedy_gruber;
  template <int Dim>
  State<Dim> operator()(const Node<Dim>& l, const Node<Dim>& r, const GasModel&,
                        int axis) const {
    const double rho_avg = 0.5 * (l.q.rho + r.q.rho);
    const double vn_avg = 0.5 * (l.q.v[axis] + r.q.v[axis]);
    const double p_avg = 0.5 * (l.q.p + r.q.p);
    const double e_avg =
        0.5 * (l.u[energy_index<Dim>] / l.q.rho + r.u[energy_index<Dim>] / r.q.rho);
    State<Dim> f;
    f[0] = rho_avg * vn_avg;
    for (int k = 0; k < Dim; ++k) f[k + 1] = f[0] * 0.5 * (l.q.v[k] + r.q.v[k]);
    f[axis + 1] += p_avg;
    f[energy_index<Dim>] = f[0] * e_avg + p_avg * vn_avg;
    return f;
  }
};

struct Hll {
  static constexpr FluxId id = FluxId::hll;
  template <int Dim>
  State<Dim> operator()(const Node<Dim>& l, const Node<Dim>& r, const GasModel& gas,
                        int axis) const {
    return hll_flux<Dim>(l, r, gas, axis);
  }
};

}  // namespace flux

/// Calls `fn` with the flux functor selected by `id`, so hot loops are
/// instantiated per flux instead of switching per evaluation.
template <class Fn>
decltype(auto) with_flux(FluxId id, Fn&& fn) {
  switch (id) {
    case FluxId::central: return fn(flux::Central{});
    case FluxId::shima: return fn(flux::Shima{});
    case FluxId::ranocha: return fn(flux::Ranocha{});
    case FluxId::kennedy_gruber: return fn(flux::KennedyGruber{});
    case FluxId::hll: return fn(flux::Hll{});
  }
  throw ConfigError("unknown flux id");
}

template <int Dim>
State<Dim> evaluate(FluxId id, const Node<Dim>& l, const Node<Dim>& r, const GasModel& gas,
                    int axis = 0) {
  return with_flux(id, [&](auto f) { return f(l, r, gas, axis); });
}

template <int Dim>
State<Dim> evaluate(FluxId id, const State<Dim>& ul, const State<Dim>& ur,
                    const GasModel& gas, int axis = 0) {
  return evaluate<Dim>(id, make_node<Dim>(ul, gas), make_node<Dim>(ur, gas), gas, axis);
}

/// Correction term separating Ranocha's energy flux from its pressure
/// equilibrium form,
///   (logmean(rho)/logmean(rho/p) - 1/logmean(1/p)) <v> / (gamma-1),
/// which vanishes when p_l = p_r.
inline double ranocha_energy_correction(const State1D& ul, const State1D& ur,
                                        const GasModel& gas) {
  const auto l = cons_to_prim<1>(ul, gas);
  const auto r = cons_to_prim<1>(ur, gas);
  const double v_avg = 0.5 * (l.v[0] + r.v[0]);
  return (log_mean(l.rho, r.rho) / log_mean(l.rho / l.p, r.rho / r.p) -
          1.0 / log_mean(1.0 / l.p, 1.0 / r.p)) *
         v_avg / (gas.gamma - 1.0);
}

// ---------------------------------------------------------------------------
// Property checkers

struct PropertyReport {
  double ec_residual = 0.0;
  double kep_residual = 0.0;
  double pep_momentum_spread = 0.0;
  double pep_energy_spread = 0.0;
  std::size_t states_sampled = 0;
};

/// Signed Tadmor residual [w].f - [psi] for the entropy `h`.
template <int Dim>
double ec_residual_signed(FluxId id, const State<Dim>& ul, const State<Dim>& ur,
                          const GasModel& gas,
                          const HartenEntropy& h = HartenEntropy::standard(), int axis = 0) {
  const auto f = evaluate<Dim>(id, ul, ur, gas, axis);
  const auto wl = entropy_variables<Dim>(ul, gas, h);
  const auto wr = entropy_variables<Dim>(ur, gas, h);
  double r = 0.0;
  for (int k = 0; k < num_vars<Dim>; ++k) r += (wr[k] - wl[k]) * f[k];
  return r - (flux_potential<Dim>(ur, gas, h, axis) - flux_potential<Dim>(ul, gas, h, axis));
}

template <int Dim>
double ec_residual(FluxId id, const State<Dim>& ul, const State<Dim>& ur, const GasModel& gas,
                   const HartenEntropy& h = HartenEntropy::standard(), int axis = 0) {
  return std::abs(ec_residual_signed<Dim>(id, ul, ur, gas, h, axis));
}

/// Magnitude factor max(1, |w|_max * |f|_max) over both states; EC residuals
/// are compared against tolerance times this factor.
template <int Dim>
double ec_scale(FluxId id, const State<Dim>& ul, const State<Dim>& ur, const GasModel& gas,
                const HartenEntropy& h = HartenEntropy::standard(), int axis = 0) {
  const auto f = evaluate<Dim>(id, ul, ur, gas, axis);
  double wmax = 0.0;
  for (const auto& u : {ul, ur}) {
    for (double x : entropy_variables<Dim>(u, gas, h)) wmax = std::max(wmax, std::abs(x));
  }
  double fmax = 0.0;
  for (double x : f) fmax = std::max(fmax, std::abs(x));
  return std::max(1.0, wmax * fmax);
}

/// |f_rhov - (<v> f_rho + <p>)| in the flux direction.
template <int Dim>
double kep_residual(FluxId id, const State<Dim>& ul, const State<Dim>& ur, const GasModel& gas,
                    int axis = 0) {
  const auto l = make_node<Dim>(ul, gas);
  const auto r = make_node<Dim>(ur, gas);
  const auto f = evaluate<Dim>(id, l, r, gas, axis);
  const double v_avg = 0.5 * (l.q.v[axis] + r.q.v[axis]);
  const double p_avg = 0.5 * (l.q.p + r.q.p);
  return std::abs(f[axis + 1] - (v_avg * f[0] + p_avg));
}

struct PepSpread {
  double momentum = 0.0;
  double energy = 0.0;
  double momentum_constant = 0.0;  // C1 of the first sampled pair
  double energy_constant = 0.0;    // C2 of the first sampled pair
};

/// Over all pairs (i <= j) of densities at fixed (p, v), C1 = f_rhov - v f_rho
/// and C2 = f_rhoe - v^2 f_rho / 2 must not depend on the densities.
inline PepSpread pep_spread(FluxId id, double p, double v, const std::vector<double>& densities,
                            const GasModel& gas) {
  PepSpread out;
  if (densities.empty()) return out;
  double c1_min = INFINITY, c1_max = -INFINITY, c2_min = INFINITY, c2_max = -INFINITY;
  bool first = true;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    for (std::size_t j = i; j < densities.size(); ++j) {
      const auto ul = prim_to_cons<1>({densities[i], {v}, p}, gas);
      const auto ur = prim_to_cons<1>({densities[j], {v}, p}, gas);
      const auto f = evaluate<1>(id, ul, ur, gas);
      const double c1 = f[1] - v * f[0];
      const double c2 = f[2] - 0.5 * v * v * f[0];
      if (first) {
        out.momentum_constant = c1;
        out.energy_constant = c2;
        first = false;
      }
      c1_min = std::min(c1_min, c1);
      c1_max = std::max(c1_max, c1);
      c2_min = std::min(c2_min, c2);
      c2_max = std::max(c2_max, c2);
    }
  }
  out.momentum = c1_max - c1_min;
  out.energy = c2_max - c2_min;
  return out;
}

/// |f_rhoe - v^2 f_rho/2 - gamma/(gamma-1) p/logmean(rho) f_rho| at a pair with
/// common pressure and velocity; zero for an EC flux that is also KEP or PEP.
inline double ec_energy_relation_residual(FluxId id, double p, double v, double rho_l,
                                          double rho_r, const GasModel& gas) {
  const auto ul = prim_to_cons<1>({rho_l, {v}, p}, gas);
  const auto ur = prim_to_cons<1>({rho_r, {v}, p}, gas);
  const auto f = evaluate<1>(id, ul, ur, gas);
  const double g = gas.gamma;
  return std::abs(f[2] - 0.5 * v * v * f[0] - g / (g - 1.0) * p / log_mean(rho_l, rho_r) * f[0]);
}

// ---------------------------------------------------------------------------
// Random sampling of valid states

/// Valid 1D states with density and pressure log-uniform over [lo, hi] and
/// velocity uniform in [-vmax, vmax].
class StateSampler {
 public:
  StateSampler(std::uint64_t seed, double lo = 0.05, double hi = 20.0, double vmax = 2.0)
      : rng_(seed), log_(std::log(lo), std::log(hi)), vel_(-vmax, vmax) {}

  double positive() { return std::exp(log_(rng_)); }
  double velocity() { return vel_(rng_); }

  template <int Dim>
  State<Dim> state(const GasModel& gas) {
    Primitives<Dim> q;
    q.rho = positive();
    for (auto& v : q.v) v = velocity();
    q.p = positive();
    return prim_to_cons<Dim>(q, gas);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> log_;
  std::uniform_real_distribution<double> vel_;
};

/// Aggregated EC / KEP / PEP check over `pairs` random state pairs; the EC
/// residual is reported relative to `ec_scale`.
inline PropertyReport check_flux(FluxId id, std::size_t pairs, std::uint64_t seed,
                                 const GasModel& gas) {
  PropertyReport rep;
  StateSampler sampler(seed);
  for (std::size_t n = 0; n < pairs; ++n) {
    const auto ul = sampler.state<1>(gas);
    const auto ur = sampler.state<1>(gas);
    rep.ec_residual = std::max(rep.ec_residual, ec_residual<1>(id, ul, ur, gas) /
                                                    ec_scale<1>(id, ul, ur, gas));
    const auto l = cons_to_prim<1>(ul, gas);
    const auto r = cons_to_prim<1>(ur, gas);
    const double kscale = std::max(1.0, std::max(l.p, r.p));
    rep.kep_residual = std::max(rep.kep_residual, kep_residual<1>(id, ul, ur, gas) / kscale);
    rep.states_sampled += 2;
  }
  // Pressure equilibrium at a random (p, v) with a spread of densities.
  std::vector<double> rho(8);
  for (auto& x : rho) x = sampler.positive();
  const double p = sampler.positive();
  const double v = sampler.velocity();
  const auto pep = pep_spread(id, p, v, rho, gas);
  const double pscale = std::max(1.0, p * std::max(1.0, std::abs(v)));
  rep.pep_momentum_spread = pep.momentum / pscale;
  rep.pep_energy_spread = pep.energy / pscale;
  rep.states_sampled += rho.size();
  return rep;
}

// ---------------------------------------------------------------------------
// Harten entropy scan

struct HartenTrial {
  double rho_m = 0.0;
  double p_m = 0.0;
  double p_p = 0.0;
  double rho_p = 0.0;
  double v = 0.0;
  double residual = 0.0;
};

struct HartenScanResult {
  std::vector<HartenTrial> counterexamples;
  std::size_t trials = 0;
  std::size_t solvable = 0;
  std::size_t skipped = 0;
};

/// h'(s) rho / p for the state (rho, p).
inline double harten_invariant(const HartenEntropy& h, double rho, double p,
                               const GasModel& gas) {
  const double s = std::log(p) - gas.gamma * std::log(rho);
  return h.dh(s, gas) * rho / p;
}

/// Solves h'(s+) rho+ / p+ = h'(s-) rho- / p- for rho+ by bisection on
/// [1e-6, 1e6] (monotone in rho+ for the families considered).
inline std::optional<double> solve_harten_constraint(const HartenEntropy& h, double rho_m,
                                                     double p_m, double p_p,
                                                     const GasModel& gas) {
  const double target = harten_invariant(h, rho_m, p_m, gas);
  auto g = [&](double rho) { return harten_invariant(h, rho, p_p, gas) - target; };
  double lo = 1e-6, hi = 1e6;
  double glo = g(lo), ghi = g(hi);
  if (!(glo * ghi <= 0.0)) return std::nullopt;
  // Bisect in log space; 200 halvings exhaust double precision on this range.
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return 0.5 * (lo + hi);
}

/// Closed form of the Tadmor residual when v and h'(s) rho/p are constant:
/// -[h - gamma h'] f_rho - (gamma-1) [h' rho v].
inline double harten_constrained_residual(const HartenEntropy& h, double rho_m, double p_m,
                                          double rho_p, double p_p, double v, double f_rho,
                                          const GasModel& gas) {
  const double g = gas.gamma;
  const double sm = std::log(p_m) - g * std::log(rho_m);
  const double sp = std::log(p_p) - g * std::log(rho_p);
  const double jump_a = (h.h(sp, gas) - g * h.dh(sp, gas)) - (h.h(sm, gas) - g * h.dh(sm, gas));
  const double jump_b = h.dh(sp, gas) * rho_p * v - h.dh(sm, gas) * rho_m * v;
  return -jump_a * f_rho - (g - 1.0) * jump_b;
}

/// Samples constrained pairs and evaluates the EC condition with the
/// arithmetic-mean density flux <rho> v. Pairs whose |residual| exceeds
/// `tolerance` are returned as counterexamples.
inline HartenScanResult harten_scan(const HartenEntropy& h, const GasModel& gas,
                                    std::size_t trial_count, std::uint64_t seed,
                                    double tolerance = 1e-6) {
  HartenScanResult out;
  StateSampler sampler(seed, 0.1, 10.0);
  std::uniform_real_distribution<double> speed(0.5, 2.0);
  std::bernoulli_distribution sign(0.5);
  for (std::size_t n = 0; n < trial_count; ++n) {
    ++out.trials;
    const double rho_m = sampler.positive();
    const double p_m = sampler.positive();
    const double p_p = sampler.positive();
    const double v = speed(sampler.engine()) * (sign(sampler.engine()) ? 1.0 : -1.0);
    const auto rho_p = solve_harten_constraint(h, rho_m, p_m, p_p, gas);
    if (!rho_p) {
      ++out.skipped;
      continue;
    }
    ++out.solvable;
    // The Shima flux has the arithmetic-mean density flux; its remaining
    // components do not enter because [w_2] = [w_3] = 0 on these pairs.
    const auto ul = prim_to_cons<1>({rho_m, {v}, p_m}, gas);
    const auto ur = prim_to_cons<1>({*rho_p, {v}, p_p}, gas);
    const double res = ec_residual_signed<1>(FluxId::shima, ul, ur, gas, h);
    if (std::abs(res) > tolerance) {
      out.counterexamples.push_back({rho_m, p_m, p_p, *rho_p, v, res});
    }
  }
  return out;
}

}  // namespace splitform
