#pragma once

// Worked examples for harmonic fields, where lap log E = -R. In R^3 this reads
// lap log E + 2K = 0 with K the Gaussian curvature of the equipotential.

#include <array>
#include <cmath>
#include <span>
#include <string>

#include "levelset/error.hpp"
#include "levelset/fields.hpp"
#include "levelset/geometry.hpp"

namespace levelset {

/// The three confocal coordinates (xi, eta, zeta) of a point as plain values.
inline std::array<double, 3> confocal_values(const std::array<double, 3>& axes2, const Point& x) {
  if (x.dim() != 3) throw UsageError("confocal coordinates need a point in R^3");
  const std::span<const double> c = x.coords();
  return {confocal_coordinate<double>(0, axes2, c), confocal_coordinate<double>(1, axes2, c),
          confocal_coordinate<double>(2, axes2, c)};
}

/// Gaussian curvature of the confocal ellipsoid through x,
/// (a^2+xi)(b^2+xi)(c^2+xi) / ((xi-eta)^2 (xi-zeta)^2).
inline double confocal_gaussian_curvature(const std::array<double, 3>& axes2, const Point& x) {
  const auto [xi, eta, zeta] = confocal_values(axes2, x);
  const double num = (axes2[0] + xi) * (axes2[1] + xi) * (axes2[2] + xi);
  return num / ((xi - eta) * (xi - eta) * (xi - zeta) * (xi - zeta));
}

struct EllipsoidCurvatureCheck {
  double lap_log_e = 0.0;     // lap log E
  double k_principal = 0.0;   // k_1 k_2 of the level set
  double k_confocal = 0.0;    // from the confocal coordinates of the point
  double residual = 0.0;      // lap log E + 2 k_principal
  double relative_gap = 0.0;  // |k_principal - k_confocal| / |k_confocal|
};

namespace detail {

inline void require_ellipsoid(const FieldSpec& spec, FieldKind kind, const char* what) {
  if (spec.kind() != kind) throw UsageError(std::string(what) + " needs field " + field_info(kind).name);
}

}  // namespace detail

/// Charged conducting ellipsoid: lap log E + 2K with K from the principal curvatures,
/// and K against its confocal closed form.
inline EllipsoidCurvatureCheck charged_ellipsoid_check(const FieldSpec& spec, const Point& x,
                                                       const GeometryOptions& opt = {}) {
  detail::require_ellipsoid(spec, FieldKind::charged_ellipsoid_potential, "charged_ellipsoid_check");
  const Jet3 psi = eval_field(spec, x);
  const GeometrySample s = geometry_sample(psi, opt);
  EllipsoidCurvatureCheck c;
  c.lap_log_e = laplacian_log_strength(psi, opt);
  c.k_principal = s.principal_curvatures[0] * s.principal_curvatures[1];
  c.k_confocal = confocal_gaussian_curvature(spec.data().axes2, x);
  c.residual = c.lap_log_e + 2.0 * c.k_principal;
  c.relative_gap = std::abs(c.k_principal - c.k_confocal) / std::abs(c.k_confocal);
  return c;
}

/// Conducting ellipsoid in a uniform field, on its surface xi = 0:
/// lap log E + 2 a^2 b^2 c^2 / (eta^2 zeta^2).
inline double uniform_ellipsoid_residual(const FieldSpec& spec, const Point& x, const GeometryOptions& opt = {}) {
  detail::require_ellipsoid(spec, FieldKind::uniform_field_ellipsoid, "uniform_ellipsoid_residual");
  const auto& A = spec.data().axes2;
  const auto [xi, eta, zeta] = confocal_values(A, x);
  if (std::abs(xi) > 1e-9 * A[0]) throw DomainError("uniform_ellipsoid_residual", "point is not on the ellipsoid");
  return laplacian_log_strength(eval_field(spec, x), opt) + 2.0 * A[0] * A[1] * A[2] / (eta * eta * zeta * zeta);
}

/// lap log |grad psi|, which vanishes for planar harmonics, conical harmonics and on
/// the flat face of the grounded plate.
inline double flat_log_strength_residual(const FieldSpec& spec, const Point& x, const GeometryOptions& opt = {}) {
  return laplacian_log_strength(eval_field(spec, x), opt);
}

}  // namespace levelset
