#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "splitform/lobatto.hpp"

using namespace splitform;

TEST(Lobatto, KnownNodesAndWeights) {
  const auto b1 = lobatto_basis(1);
  EXPECT_EQ(b1.nodes, (std::vector<double>{-1.0, 1.0}));
  EXPECT_NEAR(b1.weights[0], 1.0, 1e-15);

  const auto b2 = lobatto_basis(2);
  EXPECT_EQ(b2.nodes[1], 0.0);
  EXPECT_NEAR(b2.weights[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(b2.weights[1], 4.0 / 3.0, 1e-15);

  const auto b3 = lobatto_basis(3);
  EXPECT_NEAR(b3.nodes[1], -1.0 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(b3.nodes[2], 1.0 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(b3.weights[0], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(b3.weights[1], 5.0 / 6.0, 1e-15);

  const auto b4 = lobatto_basis(4);
  EXPECT_NEAR(b4.nodes[3], std::sqrt(3.0 / 7.0), 1e-15);
  EXPECT_NEAR(b4.weights[0], 0.1, 1e-15);
  EXPECT_NEAR(b4.weights[1], 49.0 / 90.0, 1e-15);
  EXPECT_NEAR(b4.weights[2], 32.0 / 45.0, 1e-15);
}

TEST(Lobatto, NodesAreSymmetricAndIncreasing) {
  for (int n = 1; n <= 12; ++n) {
    const auto b = lobatto_basis(n);
    for (int i = 0; i <= n; ++i) {
      EXPECT_EQ(b.nodes[i], -b.nodes[n - i]);
      EXPECT_EQ(b.weights[i], b.weights[n - i]);
      if (i > 0) EXPECT_LT(b.nodes[i - 1], b.nodes[i]);
    }
  }
}

TEST(Lobatto, QuadratureIsExactToDegreeTwoNMinusOne) {
  for (int n = 1; n <= 10; ++n) {
    const auto b = lobatto_basis(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double q = 0.0;
      for (int i = 0; i <= n; ++i) q += b.weights[i] * std::pow(b.nodes[i], p);
      const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
      EXPECT_NEAR(q, exact, 1e-14) << "n=" << n << " p=" << p;
    }
  }
}

TEST(Lobatto, DerivativeIsExactOnPolynomialsOfDegreeN) {
  for (int n = 1; n <= 10; ++n) {
    const auto b = lobatto_basis(n);
    for (int p = 0; p <= n; ++p) {
      for (int i = 0; i <= n; ++i) {
        double d = 0.0;
        for (int j = 0; j <= n; ++j) d += b.derivative(i, j) * std::pow(b.nodes[j], p);
        const double exact = p == 0 ? 0.0 : p * std::pow(b.nodes[i], p - 1);
        EXPECT_NEAR(d, exact, 1e-12 * n * n) << "n=" << n << " p=" << p << " i=" << i;
      }
    }
  }
}

TEST(Lobatto, SummationByParts) {
  for (int n = 1; n <= 12; ++n) {
    const auto b = lobatto_basis(n);
    Eigen::MatrixXd Q = Eigen::Map<const Eigen::VectorXd>(b.weights.data(), n + 1).asDiagonal() *
                        b.derivative;
    Eigen::MatrixXd B = Q + Q.transpose();
    B(0, 0) += 1.0;
    B(n, n) -= 1.0;
    EXPECT_LE(B.cwiseAbs().maxCoeff(), 1e-13) << n;
  }
}

TEST(Lobatto, RejectsDegreeZero) { EXPECT_THROW(lobatto_basis(0), ConfigError); }
