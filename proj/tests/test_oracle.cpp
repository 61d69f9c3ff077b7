#include <gtest/gtest.h>

#include <cmath>

#include "levelset/oracle.hpp"

using namespace levelset;

TEST(FdJet, QuadraticIsExactToRoundOff) {
  const auto f = [](const Point& q) { return q[0] * q[0]; };
  const FDJet fd = fd_jet(f, Point{1.0, 0.0});
  EXPECT_NEAR(fd.jet.grad(0), 2.0, 1e-10);
  EXPECT_NEAR(fd.jet.grad(1), 0.0, 1e-10);
  EXPECT_NEAR(fd.jet.hess(0, 0), 2.0, 1e-7);
  EXPECT_NEAR(fd.jet.third(0, 0, 0), 0.0, 1e-6);
}

TEST(FdJet, ConstantHasOnlyRoundOffDerivatives) {
  const auto f = [](const Point&) { return 3.25; };
  const FDJet fd = fd_jet(f, Point{0.2, -0.4, 0.9});
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(fd.jet.grad(i), 0.0);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) EXPECT_EQ(fd.jet.third(i, j, k), 0.0);
  }
}

TEST(FdJet, InverseRadiusMatchesAnalyticWithinModel) {
  const FieldSpec spec("point_charge", 3);
  const Point p{1.0, 1.0, 1.0};
  const Jet3 a = eval_field(spec, p);
  const FDJet fd = fd_jet([&](const Point& q) { return field_value(spec, q); }, p);
  for (int i = 0; i < 3; ++i) {
    EXPECT_LE(std::abs(a.grad(i) - fd.jet.grad(i)), 10.0 * fd.error_jet.grad(i));
    for (int j = 0; j < 3; ++j) {
      EXPECT_LE(std::abs(a.hess(i, j) - fd.jet.hess(i, j)), 10.0 * fd.error_jet.hess(i, j));
      for (int k = 0; k < 3; ++k)
        EXPECT_LE(std::abs(a.third(i, j, k) - fd.jet.third(i, j, k)), 10.0 * fd.error_jet.third(i, j, k));
    }
  }
  EXPECT_LT(fd.error[3], 1e-5);
}

TEST(FdJet, PlainCentralDifferencesConvergeQuadratically) {
  const auto f = [](const Point& q) { return std::sin(2.0 * q[0]) * std::exp(q[1]); };
  const Point p{0.4, 0.3};
  const double exact = 2.0 * std::cos(0.8) * std::exp(0.3);
  FDConfig cfg;
  cfg.richardson_levels = 1;
  cfg.h = 1e-2;
  const double e1 = std::abs(fd_jet(f, p, cfg).jet.grad(0) - exact);
  cfg.h = 5e-3;
  const double e2 = std::abs(fd_jet(f, p, cfg).jet.grad(0) - exact);
  EXPECT_NEAR(e1 / e2, 4.0, 0.1);
}

TEST(FdJet, RejectsBadConfiguration) {
  const auto f = [](const Point& q) { return q[0]; };
  FDConfig cfg;
  cfg.richardson_levels = 5;
  EXPECT_THROW(fd_jet(f, Point{1.0}, cfg), UsageError);
  cfg.richardson_levels = 2;
  cfg.h = 0.0;
  EXPECT_THROW(fd_jet(f, Point{1.0}, cfg), UsageError);
}

TEST(ValidateJets, EveryCatalogFieldPasses) {
  for (const auto& info : list_fields()) {
    for (int d = info.min_dim; d <= std::min(info.max_dim, 4); ++d) {
      const FieldSpec spec(info.name, d);
      const auto pts = sample_points(spec, 5, 31, oracle_region(spec));
      const JetValidation v = validate_jets(spec, pts);
      EXPECT_TRUE(v.pass) << info.name << " d=" << d << ": " << (v.failures.empty() ? "" : v.failures.front());
      EXPECT_EQ(v.points, 5);
    }
  }
}

TEST(ValidateJets, DetectsAWrongJet) {
  // A field whose plain values are shifted by a linear term the jet does not know about.
  const FieldSpec spec("sphere", 3);
  const auto pts = sample_points(spec, 3, 1, default_region(spec));
  FDConfig cfg;
  int failures = 0;
  for (const auto& p : pts) {
    const Jet3 a = eval_field(spec, p);
    const FDJet fd = fd_jet([&](const Point& q) { return field_value(spec, q) + 1e-4 * q[0]; }, p, cfg);
    if (std::abs(a.grad(0) - fd.jet.grad(0)) > 10.0 * fd.error_jet.grad(0)) ++failures;
  }
  EXPECT_EQ(failures, 3);
}

TEST(ValidateJets, StencilOutsideAdmissibleRegionThrows) {
  const FieldSpec spec("grounded_plate", 3);
  const std::vector<Point> face{Point{0.5, 0.5, 1.0}};
  EXPECT_THROW(validate_jets(spec, face), ExclusionViolation);
}
