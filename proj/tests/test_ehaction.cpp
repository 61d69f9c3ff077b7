#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "levelset/ehaction.hpp"

using namespace levelset;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;

double sphere_measure(int n) {
  switch (n) {
    case 2: return 4.0 * kPi;
    case 3: return 2.0 * kPi2;
    default: return 8.0 * kPi2 / 3.0;
  }
}

// Closed forms for psi = r^(1-n): A = R |S^n| r^n with R = n(n-1)/r^2.
double action_closed(int n, double phi) {
  const double r = std::pow(phi, -1.0 / (n - 1));
  return n * (n - 1) * sphere_measure(n) * std::pow(r, n - 2);
}

}  // namespace

TEST(SphereQuadrature, MeasuresAndMoments) {
  for (int n : {2, 3, 4}) {
    const SphereRule q = sphere_quadrature(n, 16);
    double total = 0.0, second = 0.0, first = 0.0, mixed = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      EXPECT_NEAR(q.nodes[i].norm(), 1.0, 1e-14);
      total += q.weights[i];
      first += q.weights[i] * q.nodes[i][n];
      second += q.weights[i] * q.nodes[i][0] * q.nodes[i][0];
      mixed += q.weights[i] * q.nodes[i][0] * q.nodes[i][1];
    }
    EXPECT_NEAR(total, sphere_measure(n), 1e-12 * sphere_measure(n)) << n;
    EXPECT_NEAR(second, sphere_measure(n) / (n + 1), 1e-10) << n;
    EXPECT_NEAR(first, 0.0, 1e-10) << n;
    EXPECT_NEAR(mixed, 0.0, 1e-10) << n;
  }
  const SphereRule s2 = sphere_quadrature(2, 16);
  double z2 = 0.0;
  for (std::size_t i = 0; i < s2.nodes.size(); ++i) z2 += s2.weights[i] * s2.nodes[i][2] * s2.nodes[i][2];
  EXPECT_NEAR(z2, 4.0 * kPi / 3.0, 1e-10);
}

TEST(SphereQuadrature, RejectsBadArguments) {
  EXPECT_THROW(sphere_quadrature(1, 16), UsageError);
  EXPECT_THROW(sphere_quadrature(5, 16), UsageError);
  EXPECT_THROW(sphere_quadrature(3, 7), UsageError);
  EXPECT_THROW(SphereFamily(6), UsageError);
  EXPECT_THROW(SphereFamily(2), UsageError);
}

TEST(EHAction, TwoSpheresAreTopological) {
  const SphereFamily f(3);
  for (double phi : {0.5, 1.0, 2.5, 4.0}) EXPECT_NEAR(eh_action(f, phi), 8.0 * kPi, 1e-8) << phi;
}

TEST(EHAction, ThreeSpheres) {
  const SphereFamily f(4);
  EXPECT_NEAR(eh_action(f, 1.0), 12.0 * kPi2, 1e-10 * 12.0 * kPi2);
  EXPECT_NEAR(eh_action(f, 4.0), 6.0 * kPi2, 1e-10 * 6.0 * kPi2);
  EXPECT_DOUBLE_EQ(f.radius(4.0), 0.5);
  EXPECT_THROW(eh_action(f, 0.0), DomainError);
  EXPECT_THROW(eh_action(f, -1.0), DomainError);
}

TEST(EHAction, FourSpheres) {
  const SphereFamily f(5);
  for (double phi : {0.5, 1.0, 3.0}) EXPECT_NEAR(eh_action(f, phi), action_closed(4, phi), 1e-10 * action_closed(4, phi));
}

TEST(EHSecondDerivative, ThreeSpheresAtUnitLevel) {
  const SecondDerivativeCheck c = eh_second_derivative_check(SphereFamily(4), 1.0);
  EXPECT_NEAR(c.a2_integral, 9.0 * kPi2, 1e-12 * 9.0 * kPi2);
  EXPECT_NEAR(c.a2_fd, 9.0 * kPi2, 1e-5 * 9.0 * kPi2);
  EXPECT_LE(std::abs(c.residual), 1e-5 * 9.0 * kPi2);
  EXPECT_LE(std::abs(c.second_integral), 1e-12);
  EXPECT_LE(c.identity_gap, 1e-12);
}

TEST(EHSecondDerivative, TwoSpheresVanish) {
  const SecondDerivativeCheck c = eh_second_derivative_check(SphereFamily(3), 1.0);
  EXPECT_LE(std::abs(c.a2_fd), 1e-8);
  EXPECT_LE(std::abs(c.a2_integral), 1e-8);
  EXPECT_LE(c.identity_gap, 1e-12);
}

TEST(EHSecondDerivative, FourSpheresAtUnitLevel) {
  const double exact = 320.0 * kPi2 / 9.0;
  const SecondDerivativeCheck c = eh_second_derivative_check(SphereFamily(5), 1.0);
  EXPECT_NEAR(c.a2_integral, exact, 1e-12 * exact);
  EXPECT_LE(std::abs(c.residual), 1e-4 * exact);
  EXPECT_LE(c.identity_gap, 1e-12);
}

TEST(EHSecondDerivative, StepMustKeepLevelPositive) {
  EXPECT_THROW(eh_second_derivative_check(SphereFamily(4), 1.0, 0.5), DomainError);
}

TEST(Convexity, ThreeSpheres) {
  const SphereFamily f(4);
  const double m = convexity_scan(f, 0.5, 4.0, 50);
  EXPECT_GE(m, -1e-8);
  EXPECT_NEAR(m, 9.0 * kPi2 * std::pow(4.0, -2.5), 1e-10);
}

TEST(Convexity, TwoSpheresFlat) { EXPECT_NEAR(convexity_scan(SphereFamily(3), 0.5, 4.0, 20), 0.0, 1e-8); }

TEST(Convexity, FourSpheres) {
  const double m = convexity_scan(SphereFamily(5), 0.5, 4.0, 5);
  EXPECT_GE(m, -1e-8);
  EXPECT_NEAR(m, 320.0 * kPi2 / 9.0 * std::pow(4.0, -8.0 / 3.0), 1e-9);
}

TEST(EHActionTable, RowsOrderedAndConsistent) {
  const SphereFamily f(4, 8);
  const EHActionTable t = eh_action_table(f, 0.5, 4.0, 12);
  ASSERT_EQ(t.rows.size(), 12u);
  EXPECT_DOUBLE_EQ(t.rows.front().phi, 0.5);
  EXPECT_NEAR(t.rows.back().phi, 4.0, 1e-14);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    EXPECT_TRUE(std::isfinite(row.a2_fd) && std::isfinite(row.a2_integral));
    EXPECT_LE(std::abs(row.residual), std::max(1e-6, 1e-4 * std::abs(row.a2_fd)));
    EXPECT_NEAR(row.action, action_closed(3, row.phi), 1e-10 * row.action);
    if (i > 0) {
      EXPECT_GT(row.phi, t.rows[i - 1].phi);
      EXPECT_LT(row.r, t.rows[i - 1].r);
    }
  }
  EXPECT_DOUBLE_EQ(t.min_a2_integral(), t.rows.back().a2_integral);
}

TEST(GeometricGrid, Spacing) {
  const auto g = geometric_grid(0.5, 4.0, 4);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_NEAR(g[1] / g[0], 2.0, 1e-14);
  EXPECT_NEAR(g[3] / g[2], 2.0, 1e-14);
  EXPECT_THROW(geometric_grid(0.0, 1.0, 3), UsageError);
  EXPECT_THROW(geometric_grid(2.0, 1.0, 3), UsageError);
}
