#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "levelset/geometry.hpp"

using namespace levelset;

namespace {

FieldSpec make(std::string_view name, int dim = -1) {
  return FieldSpec(name, dim > 0 ? dim : field_info(name).default_dim);
}

}  // namespace

TEST(GeometrySample, SphereOfRadiusTwo) {
  const FieldSpec spec = make("sphere", 3);
  const GeometrySample s = geometry_sample(eval_field(spec, Point{0.0, 2.0, 0.0}));
  EXPECT_NEAR(s.F, 1.0, 1e-15);
  EXPECT_NEAR(s.V, 1.0, 1e-15);
  EXPECT_NEAR(s.trW, 1.0, 1e-15);
  ASSERT_EQ(s.principal_curvatures.size(), 2u);
  EXPECT_NEAR(s.principal_curvatures[0], 0.5, 1e-15);
  EXPECT_NEAR(s.principal_curvatures[1], 0.5, 1e-15);
  EXPECT_NEAR(s.R_extrinsic, 0.5, 1e-15);
  EXPECT_NEAR(s.R_formula, 0.5, 1e-14);
}

TEST(GeometrySample, SampleInvariants) {
  const FieldSpec spec("random_polynomial", 4, {{"seed", 3.0}});
  for (const auto& p : sample_points(spec, 30, 8, default_region(spec))) {
    const GeometrySample s = geometry_sample(eval_field(spec, p));
    EXPECT_NEAR(s.normal.norm(), 1.0, 1e-12);
    EXPECT_LE((s.projector * s.projector - s.projector).norm(), 1e-12);
    EXPECT_LE((s.weingarten * s.normal).norm(), 1e-10 * (1.0 + s.weingarten.norm()));
    double sum = 0.0;
    for (double k : s.principal_curvatures) sum += k;
    EXPECT_NEAR(sum, s.trW, 1e-10 * (1.0 + std::abs(s.trW)));
    EXPECT_TRUE(std::is_sorted(s.principal_curvatures.begin(), s.principal_curvatures.end()));
    EXPECT_EQ(s.R_extrinsic, s.trW * s.trW - s.trW2);
    // Principal directions are tangent eigenvectors of W.
    for (int i = 0; i < 3; ++i) {
      const Vec e = s.principal_directions.col(i);
      EXPECT_NEAR(e.dot(s.normal), 0.0, 1e-12);
      EXPECT_LE((s.weingarten * e - s.principal_curvatures[i] * e).norm(), 1e-9 * (1.0 + s.weingarten.norm()));
    }
  }
}

TEST(GeometrySample, MongeParaboloidAtApex) {
  const FieldSpec spec("monge_graph", 3, {{"f20", 0.5}, {"f02", 0.5}});
  const GeometrySample s = geometry_sample(eval_field(spec, Point{0.0, 0.0, 0.0}));
  EXPECT_NEAR(s.F, 1.0, 1e-15);
  EXPECT_NEAR(s.principal_curvatures[0], -1.0, 1e-14);
  EXPECT_NEAR(s.principal_curvatures[1], -1.0, 1e-14);
  EXPECT_NEAR(s.R_extrinsic, 2.0, 1e-14);
  EXPECT_NEAR(s.R_formula, 2.0, 1e-13);
}

TEST(GeometrySample, PlanarCurvesHaveZeroScalarCurvature) {
  const FieldSpec spec("planar_harmonic", 2, {{"re2", 1.0}});
  const GeometrySample s = geometry_sample(eval_field(spec, Point{1.0, 1.0}));
  EXPECT_EQ(s.principal_curvatures.size(), 1u);
  EXPECT_NEAR(s.R_extrinsic, 0.0, 1e-15);
  EXPECT_NEAR(s.R_formula, 0.0, 1e-14);
}

TEST(GeometrySample, PointChargeCurvatureFormula) {
  const FieldSpec spec = make("point_charge", 3);
  EXPECT_NEAR(scalar_curvature_formula(eval_field(spec, Point{0.6, 0.0, 0.8})), 2.0, 1e-13);
}

TEST(GeometrySample, OutwardSpheresHavePositiveCurvatures) {
  for (int d = 2; d <= 6; ++d) {
    const FieldSpec spec("sphere", d);
    for (const auto& p : sample_points(spec, 10, 1, default_region(spec))) {
      const GeometrySample s = geometry_sample(eval_field(spec, p));
      for (double k : s.principal_curvatures) EXPECT_NEAR(k, 1.0 / p.norm(), 1e-13);
    }
  }
}

TEST(GeometrySample, CriticalPointIsRejected) {
  const FieldSpec spec("planar_harmonic", 2, {{"re2", 1.0}});
  EXPECT_THROW(geometry_sample(eval_field(spec, Point{0.0, 0.0})), CriticalPoint);
  GeometryOptions strict;
  strict.f_min = 10.0;
  EXPECT_THROW(geometry_sample(eval_field(spec, Point{1.0, 1.0}), strict), CriticalPoint);
}

TEST(GeometrySample, ScalingLeavesCurvatureUnchanged) {
  const FieldSpec spec("random_polynomial", 3, {{"seed", 2.0}});
  for (const auto& p : sample_points(spec, 10, 4, default_region(spec))) {
    const Jet3 psi = eval_field(spec, p);
    const GeometrySample a = geometry_sample(psi);
    const GeometrySample b = geometry_sample(7.5 * psi);
    EXPECT_NEAR(a.R_extrinsic, b.R_extrinsic, 1e-10 * (1.0 + std::abs(a.R_extrinsic)));
    EXPECT_NEAR(a.R_formula, b.R_formula, 1e-10 * (1.0 + std::abs(a.R_formula)));
    EXPECT_NEAR(a.trW, b.trW, 1e-12 * (1.0 + std::abs(a.trW)));
  }
}

TEST(PsiDerivative, WorkedExamples) {
  const FieldSpec spec = make("point_charge", 3);
  const Point p{0.0, 0.0, 1.0};
  const Jet3 psi = eval_field(spec, p);
  EXPECT_NEAR(psi_derivative(psi, psi, 1), 1.0, 1e-15);
  EXPECT_NEAR(psi_derivative(psi, psi, 2), 0.0, 1e-14);
  const Jet3 c(3, 5.0);
  EXPECT_EQ(psi_derivative(c, psi, 1), 0.0);
  EXPECT_EQ(psi_derivative(c, psi, 2), 0.0);
  // E = |grad(1/r)| = 1/r^2 = psi^2.
  const Jet3 e = strength_jet(psi);
  EXPECT_NEAR(psi_derivative(e, psi, 1), 2.0, 1e-14);
  EXPECT_NEAR(psi_derivative(e, psi, 2), 2.0, 1e-13);
  EXPECT_THROW(psi_derivative(e, psi, 3), UsageError);
}

TEST(SurfaceOperators, WorkedExamples) {
  const FieldSpec sphere = make("sphere", 3);
  const Point pole{0.0, 0.0, 1.0};
  const Jet3 psi = eval_field(sphere, pole);
  EXPECT_NEAR(surface_laplacian(psi, psi), 0.0, 1e-14);
  const Jet3 z = jet_seed(pole, 2);
  EXPECT_NEAR(surface_laplacian(z, psi), -2.0, 1e-14);
  const Mat hz = surface_covariant_hessian(z, psi);
  const GeometrySample s = geometry_sample(psi);
  EXPECT_LE((hz + s.projector).norm(), 1e-14);
  const Point equator{1.0, 0.0, 0.0};
  EXPECT_LE(surface_covariant_hessian(jet_seed(equator, 2), eval_field(sphere, equator)).norm(), 1e-14);
  EXPECT_LE(surface_covariant_hessian(Jet3(3, 4.0), psi).norm(), 0.0);

  const FieldSpec charge = make("point_charge", 3);
  const Jet3 phi = eval_field(charge, Point{0.3, -0.4, 1.2});
  EXPECT_NEAR(surface_laplacian(1.0 / strength_jet(phi), phi), 0.0, 1e-12);
}

// The ambient expansion agrees with tr(P Hu P) + (n . grad u) trW, and the covariant
// Hessian is tangential with that trace.
TEST(SurfaceOperators, AgreeWithProjectedForms) {
  const FieldSpec spec("random_polynomial", 4, {{"seed", 5.0}});
  const FieldSpec other("random_polynomial", 4, {{"seed", 6.0}});
  for (const auto& p : sample_points(spec, 25, 2, default_region(spec))) {
    const Jet3 psi = eval_field(spec, p);
    const Jet3 u = evaluate<Jet3>(other, std::span<const Jet3>(jet_seeds(p)));
    const GeometrySample s = geometry_sample(psi);
    const double projected =
        (s.projector * hessian(u) * s.projector).trace() + s.normal.dot(gradient(u)) * s.trW;
    const double lap = surface_laplacian(u, psi);
    EXPECT_NEAR(lap, projected, 1e-9 * (1.0 + std::abs(projected)));
    const Mat h = surface_covariant_hessian(u, psi);
    EXPECT_NEAR(h.trace(), lap, 1e-9 * (1.0 + std::abs(lap)));
    EXPECT_LE((h * s.normal).norm(), 1e-10 * (1.0 + h.norm()));
    EXPECT_LE((h - h.transpose()).norm(), 1e-12 * (1.0 + h.norm()));
  }
}

TEST(FrameTensors, WorkedExamples) {
  const double r = 2.0;
  const std::vector<double> sphere{1.0 / r, 1.0 / r};
  const FrameTensors a = frame_tensors(sphere);
  EXPECT_DOUBLE_EQ(a.ricci_diag[0], 1.0 / (r * r));
  EXPECT_DOUBLE_EQ(a.R, 2.0 / (r * r));
  EXPECT_DOUBLE_EQ(a.einstein_diag[1], 0.0);
  const std::vector<double> ones{1.0, 1.0, 1.0};
  const FrameTensors b = frame_tensors(ones);
  EXPECT_DOUBLE_EQ(b.R, 6.0);
  EXPECT_DOUBLE_EQ(b.ricci_diag[2], 2.0);
  EXPECT_DOUBLE_EQ(b.beta_diag[0], 2.0);
  const std::vector<double> single{3.0, 0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(frame_tensors(single).R, 0.0);
}

TEST(FrameTensors, TraceProperties) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 1; n <= 6; ++n) {
    std::vector<double> k(static_cast<std::size_t>(n));
    for (auto& v : k) v = u(rng);
    const FrameTensors t = frame_tensors(k);
    double ric = 0.0, beta = 0.0, sum = 0.0;
    for (int i = 0; i < n; ++i) {
      ric += t.ricci_diag[i];
      beta += t.beta_diag[i];
      sum += k[i];
    }
    EXPECT_NEAR(ric, t.R, 1e-13);
    EXPECT_NEAR(beta, (n - 1) * sum, 1e-13);
  }
}

TEST(CombIdentity, WorkedExamples) {
  const std::vector<double> three{1.0, 1.0, 1.0};
  const auto a = comb_id_check(three);
  EXPECT_DOUBLE_EQ(a.lhs, 3.0);
  EXPECT_DOUBLE_EQ(a.rhs, 3.0);
  const std::vector<double> four{1.0, 1.0, 1.0, 1.0};
  const auto b = comb_id_check(four);
  EXPECT_DOUBLE_EQ(b.lhs, 20.0);
  EXPECT_DOUBLE_EQ(b.rhs, 20.0);
  const std::vector<double> lone{2.5, 0.0, 0.0};
  const auto c = comb_id_check(lone);
  EXPECT_DOUBLE_EQ(c.lhs, 0.0);
  EXPECT_DOUBLE_EQ(c.rhs, 0.0);
  const std::vector<double> two{1.0, 2.0};
  EXPECT_THROW(comb_id_check(two), UsageError);
}

TEST(CombIdentity, HoldsForRandomCurvatures) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int n = 3; n <= 5; ++n)
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> k(static_cast<std::size_t>(n));
      for (auto& v : k) v = u(rng);
      const auto c = comb_id_check(k);
      EXPECT_NEAR(c.lhs, c.rhs, 1e-12 * c.scale);
    }
}

TEST(Identities, SphereResidualsVanish) {
  for (int d = 2; d <= 6; ++d) {
    const FieldSpec spec("sphere", d);
    for (const auto& p : sample_points(spec, 10, 3, default_region(spec))) {
      const IdentityReport r = identity_residuals(spec, p);
      EXPECT_TRUE(r.all_pass());
      for (const auto& [name, value] : r.residuals) EXPECT_NEAR(value, 0.0, 1e-12) << name << " d=" << d;
      EXPECT_EQ(r.residuals.count("2d_triv"), d == 2 ? 1u : 0u);
      EXPECT_EQ(r.residuals.count("gauss"), d == 3 ? 1u : 0u);
    }
  }
}

TEST(Identities, RandomPolynomialMainIdentity) {
  const FieldSpec spec("random_polynomial", 3, {{"seed", 1.0}});
  for (const auto& p : sample_points(spec, 100, 17, default_region(spec))) {
    const IdentityReport r = identity_residuals(spec, p);
    EXPECT_LE(std::abs(r.residuals.at("main")), 1e-7);
    EXPECT_TRUE(r.all_pass()) << "at " << p[0] << "," << p[1] << "," << p[2];
  }
}

TEST(Identities, EveryCatalogFieldPasses) {
  for (const auto& info : list_fields()) {
    for (int d = info.min_dim; d <= info.max_dim; ++d) {
      const FieldSpec spec(info.name, d);
      for (const auto& p : sample_points(spec, 8, 21, default_region(spec))) {
        const IdentityReport r = identity_residuals(spec, p);
        for (const auto& [name, ok] : r.pass)
          EXPECT_TRUE(ok) << info.name << " d=" << d << " " << name << " residual " << r.residuals.at(name);
      }
    }
  }
}

TEST(Identities, ToleranceOverrideForcesFailure) {
  const FieldSpec spec = make("sphere", 3);
  const Point p{0.3, 0.9, -0.7};
  const IdentityReport r = identity_residuals(spec, p, {{"main", 1e-30}});
  EXPECT_EQ(r.tolerances.at("main"), 1e-30);
  EXPECT_EQ(r.pass.at("main"), std::abs(r.residuals.at("main")) <= 1e-30);
  EXPECT_THROW(identity_residuals(make("point_charge"), Point{0.0, 0.0, 0.0}), ExclusionViolation);
}

TEST(Diffeo, IdentityMatchesBaseResiduals) {
  const FieldSpec spec("random_polynomial", 3, {{"seed", 4.0}});
  for (const auto& p : sample_points(spec, 10, 6, default_region(spec))) {
    const IdentityReport base = identity_residuals(spec, p);
    const DiffeoResiduals r = diffeo_residuals(spec, p, Diffeo::identity);
    EXPECT_NEAR(r.mean, base.residuals.at("nH"), 1e-12);
    EXPECT_NEAR(r.scalar, base.residuals.at("main"), 1e-12);
  }
}

TEST(Diffeo, AllFamiliesOnSphereAndPolynomials) {
  const FieldSpec sphere = make("sphere", 3);
  const auto flip = diffeo_residuals(sphere, Point{0.4, -1.0, 0.5}, Diffeo::negate);
  EXPECT_LE(std::abs(flip.mean), 1e-10);
  EXPECT_LE(std::abs(flip.scalar), 1e-10);
  for (int d = 2; d <= 4; ++d) {
    const FieldSpec spec("random_polynomial", d, {{"seed", 9.0}});
    for (const auto& p : sample_points(spec, 50, 10, default_region(spec)))
      for (Diffeo f : {Diffeo::identity, Diffeo::negate, Diffeo::cubic, Diffeo::exp, Diffeo::scale}) {
        const DiffeoResiduals r = diffeo_residuals(spec, p, f);
        EXPECT_LE(std::abs(r.mean), 1e-6) << diffeo_name(f);
        EXPECT_LE(std::abs(r.scalar), 1e-6) << diffeo_name(f);
      }
  }
}

TEST(Evolution, TransportFollowsLevelValues) {
  const FieldSpec spec = make("quadratic_ellipsoid");
  const Point p{0.8, -0.6, 0.5};
  const double psi0 = field_value(spec, p);
  for (double s : {-0.01, 0.003, 0.02}) EXPECT_NEAR(field_value(spec, transport(spec, p, s)), psi0 + s, 1e-12);
}

TEST(Evolution, LineDerivativesOfKnownProfile) {
  // Along radial lines of 1/r, r = 1/psi, so r^2 = psi^-2 has d/dpsi = -2 psi^-3, d2 = 6 psi^-4.
  const FieldSpec spec = make("point_charge", 3);
  const Point p{0.5, 0.5, 0.5};
  const double psi = 1.0 / p.norm();
  const auto r2 = [](const Jet3& j) { return 1.0 / (j.value() * j.value()); };
  const auto ld = line_derivatives(spec, p, 1e-3, r2);
  EXPECT_NEAR(ld.d1, -2.0 / (psi * psi * psi), 1e-9);
  EXPECT_NEAR(ld.d2, 6.0 / std::pow(psi, 4), 1e-6);
}

TEST(Evolution, PointChargeClosedForms) {
  for (int d : {3, 4}) {
    const FieldSpec spec("point_charge", d);
    for (const auto& p : sample_points(spec, 10, 2, default_region(spec))) {
      const EvolutionResiduals r = evolution_residuals(spec, p);
      EXPECT_LE(std::abs(r.h_evolv), 1e-6) << "d=" << d;
      EXPECT_LE(std::abs(r.r_evolv), 1e-6) << "d=" << d;
    }
  }
}

TEST(Evolution, QuadraticEllipsoid) {
  const FieldSpec spec = make("quadratic_ellipsoid");
  for (const auto& p : sample_points(spec, 20, 5, default_region(spec))) {
    const EvolutionResiduals r = evolution_residuals(spec, p);
    EXPECT_LE(std::abs(r.h_evolv), 1e-5);
    EXPECT_LE(std::abs(r.r_evolv), 1e-5);
  }
}

TEST(Evolution, WeakFieldUsesShorterSteps) {
  // F ~ 0.057 here: the fixed default step overshoots, the controlled ladder does not.
  const FieldSpec spec = make("conical_harmonic");
  const Point p{-0.162734, 1.05926, 0.580251};
  EXPECT_GT(std::abs(evolution_residuals(spec, p, 1e-3).h_evolv), 1e-2);
  const EvolutionResiduals r = evolution_residuals(spec, p);
  EXPECT_LE(std::abs(r.h_evolv), 1e-7);
  EXPECT_LE(std::abs(r.r_evolv), 1e-7);
}

TEST(Evolution, RandomPolynomialsInFourDimensions) {
  const FieldSpec spec("random_polynomial", 4, {{"seed", 2.0}});
  for (const auto& p : sample_points(spec, 20, 8, default_region(spec))) {
    const EvolutionResiduals r = evolution_residuals(spec, p);
    EXPECT_LE(std::abs(r.h_evolv), 1e-5);
    EXPECT_LE(std::abs(r.r_evolv), 1e-5);
  }
}
