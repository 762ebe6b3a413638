#pragma once

// Periodic SBP operators in one space dimension and the flux differencing
// semi-discretization
//
//     du_i/dt = -sum_l 2 D_il f(u_i, u_l)
//
// for linear advection (with a scalar mean as two-point flux) and the 1D
// Euler equations. For the DG family the duplicated interface nodes are
// coupled through a surface flux.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "splitform/euler.hpp"
#include "splitform/lobatto.hpp"
#include "splitform/means.hpp"
#include "splitform/twopoint.hpp"

namespace splitform {

enum class OperatorFamily { fd2, fd4, cg, dg };

constexpr std::string_view to_string(OperatorFamily f) {
  switch (f) {
    case OperatorFamily::fd2: return "fd2";
    case OperatorFamily::fd4: return "fd4";
    case OperatorFamily::cg: return "cg";
    case OperatorFamily::dg: return "dg";
  }
  return "unknown";
}

inline std::optional<OperatorFamily> parse_operator_family(std::string_view name) {
  for (auto f : {OperatorFamily::fd2, OperatorFamily::fd4, OperatorFamily::cg,
                 OperatorFamily::dg}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

/// A periodic SBP operator: M D + D^T M = 0 with diagonal positive M.
///
/// Node ordering: fd uses x_i = xmin + i dx; cg/dg are element-major, cg with
/// shared interface nodes (the node at xmax is identified with xmin), dg with
/// duplicated interface nodes.
struct SbpOperator {
  OperatorFamily family = OperatorFamily::fd2;
  int degree = 0;         // polynomial degree (cg/dg), formal order (fd)
  int element_count = 0;  // cg/dg only
  double xmin = 0.0;
  double xmax = 1.0;
  std::vector<double> grid;
  Eigen::MatrixXd D;
  Eigen::VectorXd mass;  // diagonal of M

  // Reference element data (cg/dg).
  LobattoBasis basis;

  // Non-zero pattern of D, row-wise, used by the flux differencing loops.
  std::vector<std::vector<std::pair<int, double>>> rows;

  int size() const { return static_cast<int>(grid.size()); }
  double length() const { return xmax - xmin; }
  double element_width() const {
    return element_count > 0 ? length() / element_count : length() / size();
  }
  Eigen::MatrixXd mass_matrix() const { return mass.asDiagonal(); }

  /// max |M D + D^T M|, zero up to rounding for SBP operators.
  double sbp_defect() const {
    const Eigen::MatrixXd Q = mass.asDiagonal() * D;
    return (Q + Q.transpose()).cwiseAbs().maxCoeff();
  }

  /// min spacing between distinct nodes
  double min_spacing() const {
    double h = length();
    for (int i = 0; i + 1 < size(); ++i) {
      const double d = grid[i + 1] - grid[i];
      if (d > 0.0) h = std::min(h, d);
    }
    return h;
  }
};

namespace detail {

inline void finalize_rows(SbpOperator& op) {
  op.rows.assign(op.size(), {});
  for (int i = 0; i < op.size(); ++i) {
    for (int l = 0; l < op.size(); ++l) {
      if (op.D(i, l) != 0.0) op.rows[i].emplace_back(l, op.D(i, l));
    }
  }
}

inline SbpOperator build_fd(OperatorFamily family, int nodes, double xmin, double xmax) {
  SbpOperator op;
  op.family = family;
  op.degree = family == OperatorFamily::fd2 ? 2 : 4;
  op.xmin = xmin;
  op.xmax = xmax;
  const double dx = (xmax - xmin) / nodes;
  op.grid.resize(nodes);
  for (int i = 0; i < nodes; ++i) op.grid[i] = xmin + i * dx;
  op.D = Eigen::MatrixXd::Zero(nodes, nodes);
  auto add = [&](int i, int offset, double c) {
    const int j = ((i + offset) % nodes + nodes) % nodes;
    op.D(i, j) += c / dx;
  };
  for (int i = 0; i < nodes; ++i) {
    if (family == OperatorFamily::fd2) {
      add(i, -1, -0.5);
      add(i, 1, 0.5);
    } else {
      add(i, -2, 1.0 / 12.0);
      add(i, -1, -8.0 / 12.0);
      add(i, 1, 8.0 / 12.0);
      add(i, 2, -1.0 / 12.0);
    }
  }
  op.mass = Eigen::VectorXd::Constant(nodes, dx);
  return op;
}

inline SbpOperator build_element_operator(OperatorFamily family, int elements, int degree,
                                          double xmin, double xmax) {
  SbpOperator op;
  op.family = family;
  op.degree = degree;
  op.element_count = elements;
  op.xmin = xmin;
  op.xmax = xmax;
  op.basis = lobatto_basis(degree);
  const auto& b = op.basis;
  const int np = degree + 1;
  const double h = (xmax - xmin) / elements;
  const double jac = 2.0 / h;  // d(xi)/dx
  const Eigen::MatrixXd Q = Eigen::Map<const Eigen::VectorXd>(b.weights.data(), np).asDiagonal() *
                            b.derivative;

  if (family == OperatorFamily::cg) {
    const int n = elements * degree;
    op.grid.resize(n);
    op.mass = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd Qg = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e < elements; ++e) {
      for (int i = 0; i < np; ++i) {
        const int gi = (e * degree + i) % n;
        if (i < degree) op.grid[gi] = xmin + h * (e + 0.5 * (b.nodes[i] + 1.0));
        op.mass[gi] += 0.5 * h * b.weights[i];
        for (int j = 0; j < np; ++j) Qg(gi, (e * degree + j) % n) += Q(i, j);
      }
    }
    op.D = op.mass.cwiseInverse().asDiagonal() * Qg;
    return op;
  }

  // dg: block-diagonal element operators plus central coupling of the
  // duplicated interface nodes.
  const int n = elements * np;
  op.grid.resize(n);
  op.mass.resize(n);
  op.D = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < elements; ++e) {
    const int base = e * np;
    for (int i = 0; i < np; ++i) {
      op.grid[base + i] = xmin + h * (e + 0.5 * (b.nodes[i] + 1.0));
      op.mass[base + i] = 0.5 * h * b.weights[i];
      for (int j = 0; j < np; ++j) op.D(base + i, base + j) = jac * b.derivative(i, j);
    }
    const int last = base + degree;
    const int next_first = ((e + 1) % elements) * np;
    const int prev_last = ((e + elements - 1) % elements) * np + degree;
    op.D(last, last) -= 0.5 * jac / b.weights[degree];
    op.D(last, next_first) += 0.5 * jac / b.weights[degree];
    op.D(base, base) += 0.5 * jac / b.weights[0];
    op.D(base, prev_last) -= 0.5 * jac / b.weights[0];
  }
  return op;
}

}  // namespace detail

/// `count` is the number of nodes (fd) or elements (cg/dg); `degree` is the
/// polynomial degree for cg/dg and ignored for fd.
inline SbpOperator build_operator(OperatorFamily family, int count, double xmin, double xmax,
                                  int degree = 3) {
  if (count < 4) throw ConfigError("build_operator: count must be >= 4");
  if (!(xmax > xmin)) throw ConfigError("build_operator: empty domain");
  SbpOperator op;
  switch (family) {
    case OperatorFamily::fd2:
    case OperatorFamily::fd4: op = detail::build_fd(family, count, xmin, xmax); break;
    case OperatorFamily::cg:
    case OperatorFamily::dg:
      if (degree < 1) throw ConfigError("build_operator: degree must be >= 1");
      op = detail::build_element_operator(family, count, degree, xmin, xmax);
      break;
  }
  detail::finalize_rows(op);
  return op;
}

// ---------------------------------------------------------------------------
// Linear advection u_t + u_x = 0 with a scalar mean as two-point flux.

/// Entropies paired with the EC means: u^2/2 for the arithmetic mean and
/// u log u - u for the logarithmic mean.
enum class ScalarEntropy { square, u_log_u };

class AdvectionSemidiscretization {
 public:
  AdvectionSemidiscretization(SbpOperator op, MeanKind volume_mean,
                              std::optional<MeanKind> surface_mean = std::nullopt)
      : op_(std::move(op)), volume_(volume_mean), surface_(surface_mean.value_or(volume_mean)) {}

  const SbpOperator& op() const { return op_; }
  MeanKind volume_mean() const { return volume_; }
  MeanKind surface_mean() const { return surface_; }
  int size() const { return op_.size(); }

  /// Two-point flux value. The arithmetic mean is linear and accepts any
  /// real states; the other means require positive states.
  static double flux(MeanKind kind, double a, double b) {
    if (kind == MeanKind::arithmetic) return 0.5 * (a + b);
    return mean(kind, a, b);
  }

  Eigen::VectorXd rhs(const Eigen::VectorXd& u) const {
    const int n = size();
    Eigen::VectorXd du = Eigen::VectorXd::Zero(n);
    if (op_.family != OperatorFamily::dg) {
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (const auto& [l, d] : op_.rows[i]) {
          acc += d * (l == i ? u[i] : flux(volume_, u[i], u[l]));
        }
        du[i] = -2.0 * acc;
      }
      return du;
    }
    const auto& b = op_.basis;
    const int np = b.degree + 1;
    const int ne = op_.element_count;
    const double jac = 2.0 / op_.element_width();
    for (int e = 0; e < ne; ++e) {
      const int base = e * np;
      for (int i = 0; i < np; ++i) {
        double acc = 0.0;
        for (int l = 0; l < np; ++l) {
          const double d = b.derivative(i, l);
          if (d != 0.0) acc += d * (l == i ? u[base + i] : flux(volume_, u[base + i], u[base + l]));
        }
        du[base + i] = -2.0 * jac * acc;
      }
      const int last = base + b.degree;
      const double ur = u[((e + 1) % ne) * np];
      const double ul = u[((e + ne - 1) % ne) * np + b.degree];
      du[last] -= jac / b.weights[b.degree] * (flux(surface_, u[last], ur) - u[last]);
      du[base] += jac / b.weights[0] * (flux(surface_, ul, u[base]) - u[base]);
    }
    return du;
  }

  double total_entropy(const Eigen::VectorXd& u, ScalarEntropy U) const {
    double s = 0.0;
    for (int i = 0; i < size(); ++i) s += op_.mass[i] * entropy_density(u[i], U);
    return s;
  }

  double entropy_rate(const Eigen::VectorXd& u, ScalarEntropy U) const {
    const auto du = rhs(u);
    double s = 0.0;
    for (int i = 0; i < size(); ++i) s += op_.mass[i] * entropy_variable(u[i], U) * du[i];
    return s;
  }

  static double entropy_density(double u, ScalarEntropy U) {
    if (U == ScalarEntropy::square) return 0.5 * u * u;
    if (!(u > 0.0)) throw DomainError("u log u - u: non-positive state", u);
    return u * std::log(u) - u;
  }

  static double entropy_variable(double u, ScalarEntropy U) {
    if (U == ScalarEntropy::square) return u;
    if (!(u > 0.0)) throw DomainError("log u: non-positive state", u);
    return std::log(u);
  }

 private:
  SbpOperator op_;
  MeanKind volume_;
  MeanKind surface_;
};

// ---------------------------------------------------------------------------
// 1D Euler equations. State vector layout: variable-major, u[var * n + i].

class EulerSemidiscretization1D {
 public:
  EulerSemidiscretization1D(SbpOperator op, FluxId volume_flux,
                            std::optional<FluxId> surface_flux = std::nullopt,
                            GasModel gas = GasModel{})
      : op_(std::move(op)),
        volume_(volume_flux),
        surface_(surface_flux.value_or(volume_flux)),
        gas_(gas) {
    if (!is_symmetric_two_point(volume_)) {
      throw ConfigError("volume flux must be a symmetric two-point flux");
    }
  }

  const SbpOperator& op() const { return op_; }
  const GasModel& gas() const { return gas_; }
  FluxId volume_flux() const { return volume_; }
  FluxId surface_flux() const { return surface_; }
  int nodes() const { return op_.size(); }
  int size() const { return 3 * op_.size(); }

  State1D state_at(const Eigen::VectorXd& u, int i) const {
    const int n = nodes();
    return {u[i], u[n + i], u[2 * n + i]};
  }

  void set_state(Eigen::VectorXd& u, int i, const State1D& s) const {
    const int n = nodes();
    u[i] = s[0];
    u[n + i] = s[1];
    u[2 * n + i] = s[2];
  }

  template <class Fn>
  Eigen::VectorXd project(Fn&& ic) const {
    Eigen::VectorXd u(size());
    for (int i = 0; i < nodes(); ++i) set_state(u, i, ic(op_.grid[i]));
    return u;
  }

  Eigen::VectorXd rhs(const Eigen::VectorXd& u) const {
    const int n = nodes();
    std::vector<Node<1>> nodes_(n);
    for (int i = 0; i < n; ++i) {
      try {
        nodes_[i] = make_node<1>(state_at(u, i), gas_);
      } catch (const InvalidStateError& e) {
        throw e.at(static_cast<std::size_t>(i));
      }
    }
    Eigen::VectorXd du = Eigen::VectorXd::Zero(size());
    with_flux(volume_, [&](auto vol) {
      with_flux(surface_, [&](auto surf) { assemble(nodes_, vol, surf, du); });
    });
    return du;
  }

  double max_wave_speed(const Eigen::VectorXd& u) const {
    double lam = 0.0;
    for (int i = 0; i < nodes(); ++i) {
      const auto q = cons_to_prim<1>(state_at(u, i), gas_);
      lam = std::max(lam, std::abs(q.v[0]) + sound_speed<1>(q, gas_));
    }
    return lam;
  }

  /// Element-based families use cfl * h / (lambda (2N + 1)); finite
  /// differences use cfl * dx / lambda.
  double max_dt(const Eigen::VectorXd& u, double cfl) const {
    const bool elements = op_.family == OperatorFamily::cg || op_.family == OperatorFamily::dg;
    const double factor = elements ? 2.0 * op_.degree + 1.0 : 1.0;
    const double h = elements ? op_.element_width() : op_.min_spacing();
    return cfl * h / (max_wave_speed(u) * factor);
  }

  double total_entropy(const Eigen::VectorXd& u) const {
    double s = 0.0;
    for (int i = 0; i < nodes(); ++i) s += op_.mass[i] * entropy<1>(state_at(u, i), gas_);
    return s;
  }

  double entropy_rate(const Eigen::VectorXd& u) const {
    const auto du = rhs(u);
    double s = 0.0;
    for (int i = 0; i < nodes(); ++i) {
      const auto w = entropy_variables<1>(state_at(u, i), gas_);
      const auto d = state_at(du, i);
      s += op_.mass[i] * (w[0] * d[0] + w[1] * d[1] + w[2] * d[2]);
    }
    return s;
  }

 private:
  template <class Vol, class Surf>
  void assemble(const std::vector<Node<1>>& nd, Vol vol, Surf surf, Eigen::VectorXd& du) const {
    const int n = nodes();
    auto add = [&](int i, const State1D& f, double c) {
      for (int k = 0; k < 3; ++k) du[k * n + i] += c * f[k];
    };
    if (op_.family != OperatorFamily::dg) {
      for (int i = 0; i < n; ++i) {
        for (const auto& [l, d] : op_.rows[i]) {
          add(i, l == i ? physical_flux<1>(nd[i], gas_, 0) : vol(nd[i], nd[l], gas_, 0),
              -2.0 * d);
        }
      }
      return;
    }
    const auto& b = op_.basis;
    const int np = b.degree + 1;
    const int ne = op_.element_count;
    const double jac = 2.0 / op_.element_width();
    for (int e = 0; e < ne; ++e) {
      const int base = e * np;
      for (int i = 0; i < np; ++i) {
        for (int l = 0; l < np; ++l) {
          const double d = b.derivative(i, l);
          if (d == 0.0) continue;
          const auto f = l == i ? physical_flux<1>(nd[base + i], gas_, 0)
                                : vol(nd[base + i], nd[base + l], gas_, 0);
          add(base + i, f, -2.0 * jac * d);
        }
      }
      const int last = base + b.degree;
      const int right = ((e + 1) % ne) * np;
      const int left = ((e + ne - 1) % ne) * np + b.degree;
      const auto fl = physical_flux<1>(nd[base], gas_, 0);
      const auto fr = physical_flux<1>(nd[last], gas_, 0);
      const auto sr = surf(nd[last], nd[right], gas_, 0);
      const auto sl = surf(nd[left], nd[base], gas_, 0);
      for (int k = 0; k < 3; ++k) {
        du[k * n + last] -= jac / b.weights[b.degree] * (sr[k] - fr[k]);
        du[k * n + base] += jac / b.weights[0] * (sl[k] - fl[k]);
      }
    }
  }

  SbpOperator op_;
  FluxId volume_;
  FluxId surface_;
  GasModel gas_;
};

}  // namespace splitform
