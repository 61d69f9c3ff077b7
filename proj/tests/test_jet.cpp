#include <gtest/gtest.h>

#include <cmath>

#include "levelset/jet.hpp"

using namespace levelset;

namespace {

// Central differences of a plain function, used as an independent reference.
template <class F>
double fd_partial(F&& f, Point p, int i, double h = 1e-5) {
  Point a = p, b = p;
  a[i] += h;
  b[i] -= h;
  return (f(a) - f(b)) / (2.0 * h);
}

}  // namespace

TEST(Jet, SeedHasUnitGradient) {
  const Point p{1.0, 2.0, 3.0};
  const Jet3 y = jet_seed(p, 1);
  EXPECT_EQ(y.value(), 2.0);
  EXPECT_EQ(y.grad(0), 0.0);
  EXPECT_EQ(y.grad(1), 1.0);
  EXPECT_EQ(y.hess(1, 1), 0.0);
  EXPECT_THROW(jet_seed(p, 3), UsageError);
  EXPECT_THROW(jet_seed(p, -1), UsageError);
}

TEST(Jet, ProductMatchesHandDerivatives) {
  // f = x^2 y at (2, 3).
  const Point p{2.0, 3.0};
  const Jet3 x = jet_seed(p, 0), y = jet_seed(p, 1);
  const Jet3 f = x * x * y;
  EXPECT_DOUBLE_EQ(f.value(), 12.0);
  EXPECT_DOUBLE_EQ(f.grad(0), 12.0);
  EXPECT_DOUBLE_EQ(f.grad(1), 4.0);
  EXPECT_DOUBLE_EQ(f.hess(0, 0), 6.0);
  EXPECT_DOUBLE_EQ(f.hess(0, 1), 4.0);
  EXPECT_DOUBLE_EQ(f.hess(1, 0), 4.0);
  EXPECT_DOUBLE_EQ(f.hess(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(f.third(0, 0, 1), 2.0);
  EXPECT_DOUBLE_EQ(f.third(1, 0, 0), 2.0);
  EXPECT_DOUBLE_EQ(f.third(0, 0, 0), 0.0);
}

TEST(Jet, ExpOfProduct) {
  // f = exp(x y): f_x = y f, f_xx = y^2 f, f_xy = (1 + x y) f, f_xxy = (2y + x y^2) f.
  const Point p{0.3, -0.7};
  const double x0 = 0.3, y0 = -0.7, e = std::exp(x0 * y0);
  const Jet3 f = exp(jet_seed(p, 0) * jet_seed(p, 1));
  EXPECT_NEAR(f.grad(0), y0 * e, 1e-15);
  EXPECT_NEAR(f.hess(0, 0), y0 * y0 * e, 1e-15);
  EXPECT_NEAR(f.hess(0, 1), (1.0 + x0 * y0) * e, 1e-15);
  EXPECT_NEAR(f.third(0, 0, 1), (2.0 * y0 + x0 * y0 * y0) * e, 1e-14);
  EXPECT_NEAR(f.third(1, 1, 1), x0 * x0 * x0 * e, 1e-15);
}

TEST(Jet, QuotientAndPowAgreeWithReciprocal) {
  const Point p{1.3, 0.4, -0.9};
  const auto s = jet_seeds(p);
  const Jet3 r2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
  const Jet3 a = 1.0 / r2;
  const Jet3 b = pow(r2, -1.0);
  EXPECT_NEAR(a.value(), b.value(), 1e-15);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(a.third(i, j, k), b.third(i, j, k), 1e-13);
  // Newtonian potential in 3-D is harmonic.
  EXPECT_NEAR(pow(r2, -0.5).laplacian(), 0.0, 1e-14);
}

TEST(Jet, ThirdDerivativesMatchDifferencedHessian) {
  const Point p{0.8, -0.5, 1.1};
  auto hess_entry = [&](int a, int b) {
    return [=](const Point& q) {
      const auto s = jet_seeds(q);
      const Jet3 f = sin(s[0] * s[1]) * exp(s[2]) + sqrt(1.0 + s[0] * s[0] * s[2] * s[2]) + atan(s[1] - s[2]);
      return f.hess(a, b);
    };
  };
  const auto s = jet_seeds(p);
  const Jet3 f = sin(s[0] * s[1]) * exp(s[2]) + sqrt(1.0 + s[0] * s[0] * s[2] * s[2]) + atan(s[1] - s[2]);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(f.third(i, j, k), fd_partial(hess_entry(i, j), p, k), 1e-8);
}

TEST(Jet, Atan2MatchesClosedForm) {
  const Point p{-0.6, 1.7};
  const double x = p[0], y = p[1], r2 = x * x + y * y;
  const Jet3 th = atan2(jet_seed(p, 1), jet_seed(p, 0));
  EXPECT_NEAR(th.value(), std::atan2(y, x), 1e-15);
  EXPECT_NEAR(th.grad(0), -y / r2, 1e-15);
  EXPECT_NEAR(th.grad(1), x / r2, 1e-15);
  EXPECT_NEAR(th.hess(0, 0), 2.0 * x * y / (r2 * r2), 1e-15);
  EXPECT_NEAR(th.hess(1, 1), -2.0 * x * y / (r2 * r2), 1e-15);
  EXPECT_NEAR(th.hess(0, 1), (y * y - x * x) / (r2 * r2), 1e-15);
  // Harmonic, so the third tensor is trace-free.
  EXPECT_NEAR(th.third(0, 0, 0) + th.third(0, 1, 1), 0.0, 1e-14);
  EXPECT_NEAR(th.third(0, 0, 1) + th.third(1, 1, 1), 0.0, 1e-14);
  auto hxx = [](const Point& q) {
    const double qq = q[0] * q[0] + q[1] * q[1];
    return 2.0 * q[0] * q[1] / (qq * qq);
  };
  EXPECT_NEAR(th.third(0, 0, 0), fd_partial(hxx, p, 0), 1e-8);
  EXPECT_NEAR(th.third(0, 0, 1), fd_partial(hxx, p, 1), 1e-8);
  EXPECT_THROW(atan2(jet_seed(Point{0.0, 0.0}, 1), jet_seed(Point{0.0, 0.0}, 0)), DomainError);
}

TEST(Jet, DomainErrorsNameTheFunction) {
  const Point p{-1.0};
  try {
    (void)log(jet_seed(p, 0));
    FAIL() << "log of a negative value must throw";
  } catch (const DomainError& e) {
    EXPECT_EQ(e.function(), "log");
  }
  EXPECT_THROW((void)sqrt(jet_seed(p, 0)), DomainError);
  EXPECT_THROW((void)pow(jet_seed(p, 0), 0.5), DomainError);
  EXPECT_THROW((void)(1.0 / (jet_seed(p, 0) + 1.0)), DomainError);
  EXPECT_NO_THROW((void)pow(jet_seed(p, 0), 3.0));
}

TEST(Jet, DimensionMismatchIsUsageError) {
  const Jet3 a = jet_seed(Point{1.0, 2.0}, 0);
  const Jet3 b = jet_seed(Point{1.0, 2.0, 3.0}, 0);
  EXPECT_THROW((void)(a + b), UsageError);
  EXPECT_THROW((void)(a * b), UsageError);
  EXPECT_THROW(Jet3(8), UsageError);
}

TEST(Jet, TruncationPropagatesThroughArithmetic) {
  const Point p{0.5, 0.25};
  Jet3 a = exp(jet_seed(p, 0));
  a.truncate(2);
  EXPECT_EQ(a.order(), 2);
  EXPECT_EQ(a.third(0, 0, 0), 0.0);
  const Jet3 b = a * jet_seed(p, 1) + sin(jet_seed(p, 1));
  EXPECT_EQ(b.order(), 2);
  EXPECT_EQ(b.third(0, 0, 1), 0.0);
  EXPECT_NEAR(b.hess(0, 1), std::exp(0.5), 1e-15);
  // Accumulating a lower-order jet into a full one clears the dropped orders.
  Jet3 c = exp(jet_seed(p, 1));
  c += a;
  c -= a;
  EXPECT_EQ(c.order(), 2);
  EXPECT_EQ(c.third(1, 1, 1), 0.0);
  EXPECT_NEAR(c.hess(1, 1), std::exp(0.25), 1e-15);
}

TEST(Jet, MultivariateComposeMatchesDirectProduct) {
  const Point p{0.7, -1.2, 0.4};
  const auto s = jet_seeds(p);
  const Jet3 u = sin(s[0]) + s[1] * s[2];
  const Jet3 v = exp(s[2] - s[0]);
  // f(u, v) = u^2 v as a jet in (u, v).
  const Point uv{u.value(), v.value()};
  const Jet3 fu = jet_seed(uv, 0), fv = jet_seed(uv, 1);
  const Jet3 f = fu * fu * fv;
  const std::array<Jet3, 2> in{u, v};
  const Jet3 composed = compose(f, in);
  const Jet3 direct = u * u * v;
  EXPECT_NEAR(composed.value(), direct.value(), 1e-14);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(composed.third(i, j, k), direct.third(i, j, k), 1e-12);
}

TEST(ImplicitRoot, RadiusFromQuadraticEquation) {
  // t^2 - (x^2 + y^2 + z^2) = 0 on t > 0 gives t = |x|.
  const Point p{0.3, -1.1, 0.6};
  const auto g = [](const auto& t, auto x) { return t * t - (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); };
  const Jet3 t = implicit_root(g, p, Bracket{1e-3, 10.0});
  const auto s = jet_seeds(p);
  const Jet3 r = sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
  EXPECT_NEAR(t.value(), r.value(), 1e-14);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(t.grad(i), r.grad(i), 1e-13);
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(t.hess(i, j), r.hess(i, j), 1e-12);
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(t.third(i, j, k), r.third(i, j, k), 1e-11);
    }
  }
}

TEST(ImplicitRoot, TranscendentalEquationAgainstInverseDerivatives) {
  // t + sin(t)/2 = x: dt/dx = 1/(1 + cos t / 2), and higher orders by the inverse-function rule.
  const Point p{0.9};
  const auto g = [](const auto& t, auto x) {
    using std::sin;
    return t + 0.5 * sin(t) - x[0];
  };
  const Jet3 t = implicit_root(g, p, Bracket{-5.0, 5.0});
  const double t0 = t.value();
  EXPECT_NEAR(t0 + 0.5 * std::sin(t0), 0.9, 1e-14);
  const double f1 = 1.0 + 0.5 * std::cos(t0), f2 = -0.5 * std::sin(t0), f3 = -0.5 * std::cos(t0);
  EXPECT_NEAR(t.grad(0), 1.0 / f1, 1e-14);
  EXPECT_NEAR(t.hess(0, 0), -f2 / (f1 * f1 * f1), 1e-13);
  EXPECT_NEAR(t.third(0, 0, 0), (3.0 * f2 * f2 - f1 * f3) / std::pow(f1, 5), 1e-12);
}

TEST(ImplicitRoot, FailuresRaiseRootError) {
  const auto g = [](const auto& t, auto x) { return t * t + x[0] * x[0] + 1.0; };
  EXPECT_THROW(implicit_root(g, Point{0.5}, Bracket{-1.0, 1.0}), RootError);
  // t^3 = x at x = 0: sign change, but dg/dt vanishes at the root.
  const auto cubic = [](const auto& t, auto x) { return t * t * t - x[0]; };
  EXPECT_THROW(implicit_root(cubic, Point{0.0}, Bracket{-1.0, 1.0}), RootError);
}
