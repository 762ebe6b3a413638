#pragma once

// Legendre-Gauss-Lobatto nodes, weights and the collocation derivative matrix
// on the reference interval [-1, 1].

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "splitform/errors.hpp"

namespace splitform {

struct LobattoBasis {
  int degree = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  Eigen::MatrixXd derivative;  // D_ij = l_j'(x_i)
};

namespace detail {

// Legendre polynomial P_n(x) and its derivative by the three-term recurrence.
inline void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace detail

/// Nodes are the roots of (1 - x^2) P_N'(x), found by Newton iteration from
/// Chebyshev-Gauss-Lobatto guesses.
inline LobattoBasis lobatto_basis(int degree) {
  if (degree < 1) throw ConfigError("lobatto_basis: degree must be >= 1");
  const int n = degree;
  LobattoBasis b;
  b.degree = n;
  b.nodes.assign(n + 1, 0.0);
  b.weights.assign(n + 1, 0.0);
  b.nodes[0] = -1.0;
  b.nodes[n] = 1.0;
  for (int i = 1; i < n; ++i) {
    double x = -std::cos(std::numbers::pi * i / n);
    // Newton on q(x) = (x^2-1) P_n'(x), with q'(x) = n(n+1) P_n(x).
    for (int it = 0; it < 100; ++it) {
      double pn, dpn;
      detail::legendre(n, x, pn, dpn);
      const double q = (x * x - 1.0) * dpn;
      const double dq = n * (n + 1.0) * pn;
      const double dx = q / dq;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    b.nodes[i] = x;
  }
  // symmetric node set: x_{n-i} = -x_i
  for (int i = 0; i < (n + 1) / 2; ++i) {
    const double m = 0.5 * (b.nodes[n - i] - b.nodes[i]);
    b.nodes[i] = -m;
    b.nodes[n - i] = m;
  }
  if (n % 2 == 0) b.nodes[n / 2] = 0.0;

  std::vector<double> pn(n + 1);
  for (int i = 0; i <= n; ++i) {
    double dp;
    if (i == 0 || i == n) {
      pn[i] = (i == 0 && n % 2 == 1) ? -1.0 : 1.0;
    } else {
      detail::legendre(n, b.nodes[i], pn[i], dp);
    }
    b.weights[i] = 2.0 / (n * (n + 1.0) * pn[i] * pn[i]);
  }

  b.derivative = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i != j) {
        b.derivative(i, j) = pn[i] / (pn[j] * (b.nodes[i] - b.nodes[j]));
      }
    }
  }
  b.derivative(0, 0) = -0.25 * n * (n + 1.0);
  b.derivative(n, n) = 0.25 * n * (n + 1.0);
  return b;
}

}  // namespace splitform
