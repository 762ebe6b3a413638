#pragma once

// Split-form DGSEM for the 2D compressible Euler equations on a uniform
// periodic Cartesian mesh of Lobatto-Legendre elements.
//
// DOF ordering (global state vector):
//
//     index(var, element, i, j) = var * K^2 (N+1)^2 + element * (N+1)^2 + j * (N+1) + i
//
// with var in (rho, rho_v1, rho_v2, rho_e), element = ey * K + ex, i the
// node index along x1 and j along x2.
//
// Per element and direction the semi-discretization reads, in strong form,
//
//     du_i/dt = -J [ sum_l 2 D_il f_vol(u_i, u_l)
//                    + delta_iN (f_surf - f(u_N)) / w_N
//                    - delta_i0 (f_surf - f(u_0)) / w_0 ]
//
// with J = 2 / element width and D, w the reference LGL operator and weights.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "splitform/euler.hpp"
#include "splitform/lobatto.hpp"
#include "splitform/twopoint.hpp"

namespace splitform {

struct Mesh2D {
  double xmin = -1.0;
  double xmax = 1.0;
  int elements_per_dim = 4;
  int degree = 5;

  Mesh2D() = default;
  Mesh2D(double xmin_, double xmax_, int k, int n)
      : xmin(xmin_), xmax(xmax_), elements_per_dim(k), degree(n) {
    if (k < 1) throw ConfigError("Mesh2D: need at least one element per dimension");
    if (n < 1) throw ConfigError("Mesh2D: polynomial degree must be >= 1");
    if (!(xmax > xmin)) throw ConfigError("Mesh2D: empty domain");
  }

  int nodes_per_dim() const { return degree + 1; }
  int nodes_per_element() const { return nodes_per_dim() * nodes_per_dim(); }
  int element_count() const { return elements_per_dim * elements_per_dim; }
  int node_count() const { return element_count() * nodes_per_element(); }
  int dof_count() const { return 4 * node_count(); }
  double element_width() const { return (xmax - xmin) / elements_per_dim; }
};

class Semidiscretization2D {
 public:
  static constexpr int kVars = 4;

  Semidiscretization2D(Mesh2D mesh, FluxId volume_flux,
                       std::optional<FluxId> surface_flux = std::nullopt,
                       GasModel gas = GasModel{})
      : mesh_(mesh),
        volume_(volume_flux),
        surface_(surface_flux.value_or(volume_flux)),
        gas_(gas),
        basis_(lobatto_basis(mesh.degree)) {
    if (!is_symmetric_two_point(volume_)) {
      throw ConfigError("volume flux must be a symmetric two-point flux");
    }
  }

  const Mesh2D& mesh() const { return mesh_; }
  const GasModel& gas() const { return gas_; }
  const LobattoBasis& basis() const { return basis_; }
  FluxId volume_flux() const { return volume_; }
  FluxId surface_flux() const { return surface_; }
  int size() const { return mesh_.dof_count(); }
  int nodes() const { return mesh_.node_count(); }

  int node_index(int element, int i, int j) const {
    return element * mesh_.nodes_per_element() + j * mesh_.nodes_per_dim() + i;
  }

  std::array<double, 2> coordinates(int element, int i, int j) const {
    const int k = mesh_.elements_per_dim;
    const int ex = element % k;
    const int ey = element / k;
    const double h = mesh_.element_width();
    return {mesh_.xmin + h * (ex + 0.5 * (basis_.nodes[i] + 1.0)),
            mesh_.xmin + h * (ey + 0.5 * (basis_.nodes[j] + 1.0))};
  }

  State2D state_at(const Eigen::VectorXd& u, int node) const {
    const int n = nodes();
    return {u[node], u[n + node], u[2 * n + node], u[3 * n + node]};
  }

  void set_state(Eigen::VectorXd& u, int node, const State2D& s) const {
    const int n = nodes();
    for (int k = 0; k < kVars; ++k) u[k * n + node] = s[k];
  }

  /// Nodal collocation of a pointwise initial condition ic(x1, x2).
  template <class Fn>
  Eigen::VectorXd project_ic(Fn&& ic) const {
    Eigen::VectorXd u(size());
    const int np = mesh_.nodes_per_dim();
    for (int e = 0; e < mesh_.element_count(); ++e) {
      for (int j = 0; j < np; ++j) {
        for (int i = 0; i < np; ++i) {
          const auto x = coordinates(e, i, j);
          set_state(u, node_index(e, i, j), ic(x[0], x[1]));
        }
      }
    }
    return u;
  }

  Eigen::VectorXd rhs(const Eigen::VectorXd& u) const {
    Eigen::VectorXd du(size());
    rhs(u, du);
    return du;
  }

  void rhs(const Eigen::VectorXd& u, Eigen::VectorXd& du) const {
    const int n = nodes();
    std::vector<Node<2>> nd(n);
    std::vector<State2D> acc(n, State2D{});
    for (int e = 0; e < mesh_.element_count(); ++e) {
      for (int q = 0; q < mesh_.nodes_per_element(); ++q) {
        const int g = e * mesh_.nodes_per_element() + q;
        try {
          nd[g] = make_node<2>(state_at(u, g), gas_);
        } catch (const InvalidStateError& err) {
          throw err.at(static_cast<std::size_t>(q), static_cast<std::size_t>(e));
        }
      }
    }
    with_flux(volume_, [&](auto vol) {
      with_flux(surface_, [&](auto surf) {
        volume_terms(vol, nd, acc);
        surface_terms(surf, nd, acc);
      });
    });
    const double jac = 2.0 / mesh_.element_width();
    du.resize(size());
    for (int g = 0; g < n; ++g) {
      for (int k = 0; k < kVars; ++k) du[k * n + g] = -jac * acc[g][k];
    }
  }

  /// Largest (|v1| + c) + (|v2| + c) over all nodes.
  double max_wave_speed(const Eigen::VectorXd& u) const {
    double lam = 0.0;
    for (int g = 0; g < nodes(); ++g) {
      const auto q = cons_to_prim<2>(state_at(u, g), gas_);
      const double c = sound_speed<2>(q, gas_);
      lam = std::max(lam, std::abs(q.v[0]) + c + std::abs(q.v[1]) + c);
    }
    return lam;
  }

  /// cfl * element width / (lambda_max * (2N + 1))
  double max_dt(const Eigen::VectorXd& u, double cfl) const {
    return cfl * mesh_.element_width() / (max_wave_speed(u) * (2.0 * mesh_.degree + 1.0));
  }

  /// Mass-matrix weights (w_i w_j h^2 / 4) per node, same for every element.
  Eigen::VectorXd node_weights() const {
    Eigen::VectorXd w(nodes());
    const int np = mesh_.nodes_per_dim();
    const double h = mesh_.element_width();
    for (int e = 0; e < mesh_.element_count(); ++e) {
      for (int j = 0; j < np; ++j) {
        for (int i = 0; i < np; ++i) {
          w[node_index(e, i, j)] = 0.25 * h * h * basis_.weights[i] * basis_.weights[j];
        }
      }
    }
    return w;
  }

 private:
  template <class Vol>
  void volume_terms(Vol vol, const std::vector<Node<2>>& nd, std::vector<State2D>& acc) const {
    volume_terms_along<0>(vol, nd, acc);
    volume_terms_along<1>(vol, nd, acc);
  }

  // Axis as a template parameter so the flux can be specialized per direction.
  template <int Axis, class Vol>
  void volume_terms_along(Vol vol, const std::vector<Node<2>>& nd,
                          std::vector<State2D>& acc) const {
    const auto& D = basis_.derivative;
    const int np = mesh_.nodes_per_dim();
    const int npe = mesh_.nodes_per_element();
    const int stride = Axis == 0 ? 1 : np;
    const int line_stride = Axis == 0 ? np : 1;
    for (int e = 0; e < mesh_.element_count(); ++e) {
      const int base = e * npe;
      for (int line = 0; line < np; ++line) {
        const int first = base + line * line_stride;
        for (int i = 0; i < np; ++i) {
          const int gi = first + i * stride;
          const double dii = D(i, i);
          if (dii != 0.0) {
            const auto f = physical_flux<2>(nd[gi], gas_, Axis);
            for (int k = 0; k < kVars; ++k) acc[gi][k] += 2.0 * dii * f[k];
          }
          for (int l = i + 1; l < np; ++l) {
            const int gl = first + l * stride;
            const auto f = vol(nd[gi], nd[gl], gas_, Axis);
            const double di = 2.0 * D(i, l);
            const double dl = 2.0 * D(l, i);
            for (int k = 0; k < kVars; ++k) {
              acc[gi][k] += di * f[k];
              acc[gl][k] += dl * f[k];
            }
          }
        }
      }
    }
  }

  template <class Surf>
  void surface_terms(Surf surf, const std::vector<Node<2>>& nd,
                     std::vector<State2D>& acc) const {
    const int k = mesh_.elements_per_dim;
    const int np = mesh_.nodes_per_dim();
    const int last = np - 1;
    const double inv_w0 = 1.0 / basis_.weights[0];
    const double inv_wn = 1.0 / basis_.weights[last];
    for (int ey = 0; ey < k; ++ey) {
      for (int ex = 0; ex < k; ++ex) {
        const int e = ey * k + ex;
        const int east = ey * k + (ex + 1) % k;
        const int north = ((ey + 1) % k) * k + ex;
        for (int m = 0; m < np; ++m) {
          // x1-interface between e (node (N, m)) and east (node (0, m))
          couple(surf, nd, acc, node_index(e, last, m), node_index(east, 0, m), 0, inv_wn,
                 inv_w0);
          // x2-interface between e (node (m, N)) and north (node (m, 0))
          couple(surf, nd, acc, node_index(e, m, last), node_index(north, m, 0), 1, inv_wn,
                 inv_w0);
        }
      }
    }
  }

  template <class Surf>
  void couple(Surf surf, const std::vector<Node<2>>& nd, std::vector<State2D>& acc, int minus,
              int plus, int axis, double inv_wn, double inv_w0) const {
    const auto fs = surf(nd[minus], nd[plus], gas_, axis);
    const auto fm = physical_flux<2>(nd[minus], gas_, axis);
    const auto fp = physical_flux<2>(nd[plus], gas_, axis);
    for (int v = 0; v < kVars; ++v) {
      acc[minus][v] += inv_wn * (fs[v] - fm[v]);
      acc[plus][v] -= inv_w0 * (fs[v] - fp[v]);
    }
  }

  Mesh2D mesh_;
  FluxId volume_;
  FluxId surface_;
  GasModel gas_;
  LobattoBasis basis_;
};

}  // namespace splitform
