#pragma once

// Linear stability tooling: finite-difference Jacobians of semi-discrete
// right-hand sides, dense nonsymmetric spectra (LAPACK dgeev) and the
// perturbation-growth experiment on the 2D density wave.

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "splitform/dgsem2d.hpp"
#include "splitform/errors.hpp"
#include "splitform/means.hpp"
#include "splitform/sbp1d.hpp"
#include "splitform/timeloop.hpp"

namespace splitform {

/// A perturbed Jacobian evaluation point left the admissible state set.
class PerturbationError : public std::runtime_error {
 public:
  PerturbationError(std::size_t dof, const std::string& cause)
      : std::runtime_error("jacobian: perturbing DOF " + std::to_string(dof) +
                           " gives an invalid state: " + cause),
        dof_(dof) {}

  std::size_t dof() const noexcept { return dof_; }

 private:
  std::size_t dof_;
};

inline double default_epsilon_scale() {
  return std::cbrt(std::numeric_limits<double>::epsilon());
}

/// Central differences, column j = (f(u + e_j eps) - f(u - e_j eps)) / (2 eps)
/// with eps = epsilon_scale * max(1, |u_j|). With threads > 1 every worker
/// evaluates its own copy of `rhs`, so stateful scratch buffers are safe.
template <class Rhs>
Eigen::MatrixXd jacobian(const Rhs& rhs, const Eigen::VectorXd& u0,
                         double epsilon_scale = default_epsilon_scale(), int threads = 1) {
  const Eigen::Index n = u0.size();
  const Eigen::Index m = rhs(u0).size();
  Eigen::MatrixXd J(m, n);
  std::vector<std::optional<PerturbationError>> failures(std::max(threads, 1));

  auto work = [&](int worker) {
    Rhs f = rhs;
    Eigen::VectorXd u = u0;
    for (Eigen::Index j = worker; j < n; j += std::max(threads, 1)) {
      const double eps = epsilon_scale * std::max(1.0, std::abs(u0[j]));
      try {
        u[j] = u0[j] + eps;
        const Eigen::VectorXd fp = f(u);
        u[j] = u0[j] - eps;
        const Eigen::VectorXd fm = f(u);
        u[j] = u0[j];
        J.col(j) = (fp - fm) / (2.0 * eps);
      } catch (const InvalidStateError& e) {
        failures[worker].emplace(static_cast<std::size_t>(j), e.what());
        return;
      } catch (const DomainError& e) {
        failures[worker].emplace(static_cast<std::size_t>(j), e.what());
        return;
      }
    }
  };

  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures) {
    if (f) throw *f;
  }
  return J;
}

struct Spectrum {
  std::vector<std::complex<double>> eigenvalues;
  double max_real = 0.0;
  double spectral_radius = 0.0;
  std::complex<double> dominant;
  // Real part of the eigenvector of `dominant`, unit infinity-norm, largest
  // entry positive.
  Eigen::VectorXd dominant_eigenvector;
  // max_k min_l |conj(lambda_k) - lambda_l|, relative to max(1, radius).
  double conjugate_pairing_defect = 0.0;
};

namespace detail {

inline double pairing_defect(const std::vector<std::complex<double>>& ev, double scale) {
  std::vector<std::complex<double>> sorted = ev;
  auto key = [](const std::complex<double>& a, const std::complex<double>& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  };
  std::sort(sorted.begin(), sorted.end(), key);
  double worst = 0.0;
  for (const auto& z : ev) {
    const auto c = std::conj(z);
    // search a real-part window around c
    const double tol = 1e-6 * scale;
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), std::complex<double>(c.real() - tol, -1e300), key);
    double best = std::numeric_limits<double>::infinity();
    for (auto it = lo; it != sorted.end() && it->real() <= c.real() + tol; ++it) {
      best = std::min(best, std::abs(*it - c));
    }
    if (!std::isfinite(best)) {
      for (const auto& w : sorted) best = std::min(best, std::abs(w - c));
    }
    worst = std::max(worst, best);
  }
  return worst / scale;
}

}  // namespace detail

/// All eigenvalues of a real square matrix via LAPACK dgeev (Hessenberg
/// reduction + real Schur form), plus the dominant right eigenvector.
inline Spectrum spectrum(const Eigen::MatrixXd& matrix, bool want_eigenvector = true) {
  if (matrix.rows() != matrix.cols()) throw ConfigError("spectrum: matrix must be square");
  if (!matrix.allFinite()) throw ConfigError("spectrum: matrix has non-finite entries");
  const lapack_int n = static_cast<lapack_int>(matrix.rows());
  Spectrum s;
  if (n == 0) return s;
  Eigen::MatrixXd a = matrix;  // column-major copy, overwritten by dgeev
  std::vector<double> wr(n), wi(n);
  Eigen::MatrixXd vr(want_eigenvector ? n : 1, want_eigenvector ? n : 1);
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', want_eigenvector ? 'V' : 'N', n, a.data(), n,
                    wr.data(), wi.data(), nullptr, 1, vr.data(), want_eigenvector ? n : 1);
  if (info > 0) throw std::runtime_error("spectrum: eigensolver did not converge");
  if (info < 0) throw std::runtime_error("spectrum: invalid dgeev argument " + std::to_string(-info));

  s.eigenvalues.resize(n);
  lapack_int best = 0;
  for (lapack_int k = 0; k < n; ++k) {
    s.eigenvalues[k] = {wr[k], wi[k]};
    s.spectral_radius = std::max(s.spectral_radius, std::abs(s.eigenvalues[k]));
    // ties between conjugates resolve to the member with wi >= 0
    if (wr[k] > wr[best] || (wr[k] == wr[best] && wi[k] > wi[best])) best = k;
  }
  s.max_real = wr[best];
  s.dominant = s.eigenvalues[best];
  s.conjugate_pairing_defect =
      detail::pairing_defect(s.eigenvalues, std::max(1.0, s.spectral_radius));

  if (want_eigenvector) {
    // dgeev stores a complex pair (j, j+1) as columns re, im with wi[j] > 0.
    lapack_int col = best;
    if (wi[best] < 0.0) col = best - 1;
    Eigen::VectorXd v = vr.col(col);
    Eigen::Index imax = 0;
    const double norm = v.cwiseAbs().maxCoeff(&imax);
    if (norm > 0.0) v /= (v[imax] < 0.0 ? -norm : norm);
    s.dominant_eigenvector = std::move(v);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Experiments.

/// u0(x) = 2 + 1.9 sin(pi x) on the periodic domain [0, 2].
inline double advection_spectrum_ic(double x) { return 2.0 + 1.9 * std::sin(std::numbers::pi * x); }

struct AdvectionSpectrumConfig {
  OperatorFamily family = OperatorFamily::fd2;
  int size = 32;  // nodes (fd) or elements (cg, dg)
  int degree = 3;
  MeanKind mean = MeanKind::logarithmic;
  int threads = 1;
};

inline AdvectionSemidiscretization advection_semidiscretization(const AdvectionSpectrumConfig& c) {
  return AdvectionSemidiscretization(build_operator(c.family, c.size, 0.0, 2.0, c.degree), c.mean);
}

inline Spectrum advection_spectrum_experiment(const AdvectionSpectrumConfig& c) {
  const auto semi = advection_semidiscretization(c);
  Eigen::VectorXd u0(semi.size());
  for (int i = 0; i < semi.size(); ++i) u0[i] = advection_spectrum_ic(semi.op().grid[i]);
  auto f = [semi](const Eigen::VectorXd& u) { return semi.rhs(u); };
  return spectrum(jacobian(f, u0, default_epsilon_scale(), c.threads));
}

/// The density-wave configuration: N = 5, 4 x 4 elements on [-1, 1]^2.
inline Mesh2D density_wave_mesh() { return Mesh2D(-1.0, 1.0, 4, 5); }

inline Eigen::VectorXd density_wave_state(const Semidiscretization2D& semi) {
  const GasModel gas = semi.gas();
  return semi.project_ic([&](double x1, double x2) { return density_wave_ic(x1, x2, gas); });
}

struct EulerSpectrumResult {
  Spectrum spectrum;
  Eigen::VectorXd base_state;
};

inline EulerSpectrumResult euler_spectrum_experiment(FluxId volume, FluxId surface,
                                                     GasModel gas = GasModel{},
                                                     int threads = 1,
                                                     Mesh2D mesh = density_wave_mesh()) {
  const Semidiscretization2D semi(mesh, volume, surface, gas);
  EulerSpectrumResult r;
  r.base_state = density_wave_state(semi);
  auto f = [semi](const Eigen::VectorXd& u) { return semi.rhs(u); };
  r.spectrum = spectrum(jacobian(f, r.base_state, default_epsilon_scale(), threads));
  return r;
}

struct GrowthSample {
  double t = 0.0;
  std::array<double, 4> diff{};  // l-infinity difference per conserved variable
  double max() const { return *std::max_element(diff.begin(), diff.end()); }
};

struct GrowthFit {
  std::vector<GrowthSample> series;
  double rate = std::numeric_limits<double>::quiet_NaN();
  double window_begin = 0.0;
  double window_end = 0.0;
  std::size_t window_samples = 0;
  RunReport run;  // of the perturbed trajectory
};

/// frozen_base: a single run of u' = g(u) - g(u0), so u0 is a steady state
/// and the difference u - u0 follows the linearization at u0 until it turns
/// nonlinear. two_trajectories: perturbed and unperturbed states both evolve
/// under g with a shared step sequence; the base flow then moves.
enum class PerturbationMethod { frozen_base, two_trajectories };

constexpr std::string_view to_string(PerturbationMethod m) {
  return m == PerturbationMethod::frozen_base ? "frozen_base" : "two_trajectories";
}

inline std::optional<PerturbationMethod> parse_perturbation_method(std::string_view name) {
  for (auto m : {PerturbationMethod::frozen_base, PerturbationMethod::two_trajectories}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

struct PerturbationConfig {
  FluxId volume = FluxId::shima;
  FluxId surface = FluxId::shima;
  double amplitude = 1e-3;
  double t_end = 10.0;
  double cfl = 0.05;
  GasModel gas{};
  double upper = 0.1;
  double transient_fraction = 0.05;
  PerturbationMethod method = PerturbationMethod::frozen_base;
};

/// Least-squares slope of log(max_k diff_k) against t over the samples after
/// the initial transient, above `lower` and before the first exceedance of
/// `upper`.
inline void fit_growth_rate(GrowthFit& g, double lower, double upper, double transient_fraction) {
  const std::size_t skip =
      static_cast<std::size_t>(std::ceil(transient_fraction * static_cast<double>(g.series.size())));
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t n = 0;
  for (std::size_t k = skip; k < g.series.size(); ++k) {
    const double m = g.series[k].max();
    if (!(m <= upper)) break;
    if (m < lower) continue;
    const double t = g.series[k].t;
    const double y = std::log(m);
    if (n == 0) g.window_begin = t;
    g.window_end = t;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++n;
  }
  g.window_samples = n;
  if (n >= 2) {
    const double den = n * stt - st * st;
    if (den > 0.0) g.rate = (n * sty - st * sy) / den;
  }
}

/// Evolves u0 + amplitude * mode on the density wave, records the
/// per-variable l-infinity distance to the reference state after every step
/// and fits the growth rate. The step size follows the CFL condition of the
/// unperturbed state (two_trajectories) or of the single evolving state
/// (frozen_base).
inline GrowthFit perturbation_growth(const PerturbationConfig& c, const Eigen::VectorXd& mode,
                                     Mesh2D mesh = density_wave_mesh()) {
  const Semidiscretization2D semi(mesh, c.volume, c.surface, c.gas);
  const Eigen::VectorXd base0 = density_wave_state(semi);
  if (mode.size() != base0.size()) throw ConfigError("perturbation mode has the wrong size");
  if (!(c.amplitude > 0.0)) throw ConfigError("perturbation amplitude must be positive");
  Eigen::VectorXd base = base0;
  Eigen::VectorXd pert = base0 + c.amplitude * mode;
  if (auto bad = find_invalid_state(semi, pert)) throw ConfigError("perturbed initial state: " + *bad);
  const bool frozen = c.method == PerturbationMethod::frozen_base;

  GrowthFit g;
  const int n = semi.nodes();
  auto record = [&](double t) {
    GrowthSample s;
    s.t = t;
    for (int v = 0; v < 4; ++v) {
      s.diff[v] = (pert.segment(v * n, n) - base.segment(v * n, n)).cwiseAbs().maxCoeff();
    }
    g.series.push_back(s);
  };
  record(0.0);

  const Eigen::VectorXd g0 = frozen ? semi.rhs(base0) : Eigen::VectorXd();
  Eigen::VectorXd du1(base.size()), k1(base.size()), du2(base.size()), k2(base.size());
  auto f = [&](double, const Eigen::VectorXd& x, Eigen::VectorXd& out) { semi.rhs(x, out); };
  auto f_frozen = [&](double, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    semi.rhs(x, out);
    out -= g0;
  };
  double t = 0.0;
  RunReport& rep = g.run;
  while (t < c.t_end) {
    double dt = step_size(semi, frozen ? pert : base, c.cfl);
    if (t + dt > c.t_end) dt = c.t_end - t;
    try {
      if (frozen) {
        lsrk_step(f_frozen, pert, t, dt, du2, k2);
      } else {
        lsrk_step(f, base, t, dt, du1, k1);
        lsrk_step(f, pert, t, dt, du2, k2);
      }
    } catch (const InvalidStateError& e) {
      rep.crashed = true;
      rep.crash_time = t + dt;
      const std::string what = std::isfinite(e.value()) ? "negative " + e.quantity()
                                                        : std::string("non-finite state");
      rep.crash_reason = what + " in stage evaluation (" + e.what() + ")";
      break;
    }
    t = (t + dt >= c.t_end) ? c.t_end : t + dt;
    ++rep.step_count;
    if (auto bad = find_invalid_state(semi, pert)) {
      rep.crashed = true;
      rep.crash_time = t;
      rep.crash_reason = *bad;
      break;
    }
    record(t);
  }
  rep.final_time = t;
  const double floor =
      std::numeric_limits<double>::epsilon() * std::max(1.0, base0.cwiseAbs().maxCoeff());
  fit_growth_rate(g, 100.0 * floor, c.upper, c.transient_fraction);
  return g;
}

}  // namespace splitform
