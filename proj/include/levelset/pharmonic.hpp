#pragma once

// Curvature identities of p-harmonic level sets, div(|grad psi|^(p-2) grad psi) = 0,
// checked on the radial solutions of the catalog.

#include <cmath>
#include <map>
#include <string>

#include "levelset/error.hpp"
#include "levelset/fields.hpp"
#include "levelset/geometry.hpp"
#include "levelset/oracle.hpp"

namespace levelset {

struct PHarmonicCase {
  double p = 2.0;
  int d = 3;
  double alpha = 0.0;

  FieldSpec field() const {
    if (!(p > 1.0)) throw UsageError("p-harmonic case requires p > 1");
    if (d < 2 || d > 6) throw UsageError("p-harmonic case requires 2 <= d <= 6");
    return FieldSpec("p_harmonic_radial", d, {{"p", p}});
  }
};

/// Jet of trW = (V - g.Hg / F^2) / F, one order below the gradient jets (order 1 from an order-3 psi).
inline Jet3 weingarten_trace_jet(const Jet3& psi, const GeometryOptions& opt = {}) {
  strength(psi, opt);
  const auto g = gradient_jets(psi);
  const Jet3 f2 = dot(g, g);
  Jet3 ghg(psi.dim(), 0.0, g[0].order() - 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto hi = gradient_jets(g[i]);
    ghg += g[i] * dot(hi, g);
  }
  return (laplacian_jet(psi) - ghg / f2) / sqrt(f2);
}

namespace detail {

// Fixed step when dpsi > 0, otherwise Richardson-controlled around the default step.
template <class Q>
LineDerivatives line_at(const FieldSpec& spec, const Point& point, double dpsi, double psi_value, Q&& q,
                        const GeometryOptions& opt) {
  if (dpsi > 0.0) return line_derivatives(spec, point, dpsi, q, opt);
  return controlled_line_derivatives(spec, point, default_line_step(psi_value), q, opt);
}

}  // namespace detail

/// Residuals (left minus right) at one point:
///   trace_w              trW - (1-p) dF/dpsi
///   scalar_curvature     R - [F lap_S(1/F) + (1-p) F d2F/dpsi2 + (1-p)^2 (dF/dpsi)^2]
///   scalar_curvature_alt R - [F lap_S(1/F) + F^p d/dpsi (trW / F^(p-1))], the last factor
///                        differenced along the field line.
inline std::map<std::string, double> p_identity_residuals(const PHarmonicCase& c, const Point& point,
                                                          double dpsi = 0.0, const GeometryOptions& opt = {}) {
  const FieldSpec spec = c.field();
  const double p = c.p;
  const Jet3 psi = eval_field(spec, point);
  const GeometrySample s = geometry_sample(psi, opt);
  const Jet3 fj = strength_jet(psi, opt);
  const double f = s.F;
  const double df = psi_derivative(fj, psi, 1, opt);
  const double d2f = psi_derivative(fj, psi, 2, opt);
  const double lap_s = surface_laplacian(1.0 / fj, psi, opt);
  const auto q = detail::line_at(
      spec, point, dpsi, psi.value(),
      [&](const Jet3& j) {
        const GeometrySample g = geometry_sample(j, opt);
        return g.trW / std::pow(g.F, p - 1.0);
      },
      opt);

  std::map<std::string, double> r;
  r["trace_w"] = s.trW - (1.0 - p) * df;
  r["scalar_curvature"] = s.R_extrinsic - (f * lap_s + (1.0 - p) * f * d2f + (1.0 - p) * (1.0 - p) * df * df);
  r["scalar_curvature_alt"] = s.R_extrinsic - (f * lap_s + std::pow(f, p) * q.d1);
  return r;
}

namespace detail {

// Tangent field (1/(p-1)) F^(p-1) P grad(trW/F^(p+1)) - (2/p) F^(p-2) W P grad(1/F^p).
inline Vec p_flux(const FieldSpec& spec, double p, const Point& x, const GeometryOptions& opt) {
  const Jet3 psi = eval_field(spec, x);
  const GeometrySample s = geometry_sample(psi, opt);
  const Jet3 fj = strength_jet(psi, opt);
  const Jet3 a = weingarten_trace_jet(psi, opt) * pow(fj, -(p + 1.0));
  const Jet3 b = pow(fj, -p);
  const Vec ga = s.projector * gradient(a);
  const Vec gb = s.projector * gradient(b);
  return std::pow(s.F, p - 1.0) / (p - 1.0) * ga - 2.0 / p * std::pow(s.F, p - 2.0) * (s.weingarten * gb);
}

}  // namespace detail

struct RFpDiff {
  double lhs = 0.0;         // d/dpsi (R / F^p), differenced along the field line
  double tangential = 0.0;  // F^(1-p) div_S of the tangent flux
  double second = 0.0;      // d2/dpsi2 (trW / F^(p-1)), differenced along the field line
  double residual = 0.0;    // lhs - tangential - second
};

/// Evolution of R/F^p along the field line. The tangential term is a surface
/// divergence, tr(P DX) of the tangent field X, with DX from 4th-order central differences.
inline RFpDiff r_fp_diff(const PHarmonicCase& c, const Point& point, double dpsi = 0.0,
                         const GeometryOptions& opt = {}) {
  const FieldSpec spec = c.field();
  const double p = c.p;
  const Jet3 psi = eval_field(spec, point);
  const GeometrySample s = geometry_sample(psi, opt);

  const auto lhs = detail::line_at(
      spec, point, dpsi, psi.value(),
      [&](const Jet3& j) {
        const GeometrySample g = geometry_sample(j, opt);
        return g.R_extrinsic / std::pow(g.F, p);
      },
      opt);
  const auto q = detail::line_at(
      spec, point, dpsi, psi.value(),
      [&](const Jet3& j) {
        const GeometrySample g = geometry_sample(j, opt);
        return g.trW / std::pow(g.F, p - 1.0);
      },
      opt);

  const int d = spec.dim();
  const double hx = 1e-3 * (1.0 + point.norm());
  const auto flux_at = [&](int j, double t) {
    Point y = point;
    y[j] += t;
    return detail::p_flux(spec, p, y, opt);
  };
  Mat dx(d, d);
  for (int j = 0; j < d; ++j)
    dx.col(j) = (8.0 * (flux_at(j, hx) - flux_at(j, -hx)) - (flux_at(j, 2.0 * hx) - flux_at(j, -2.0 * hx))) / (12.0 * hx);
  RFpDiff r;
  r.lhs = lhs.d1;
  r.tangential = std::pow(s.F, 1.0 - p) * (s.projector * dx).trace();
  r.second = q.d2;
  r.residual = r.lhs - r.tangential - r.second;
  return r;
}

/// Residual of the evolution of R/F^p on a radial field, where the tangential terms
/// must vanish (checked to 1e-10 relative to the other terms).
inline double r_fp_diff_residual(const PHarmonicCase& c, const Point& point, double dpsi = 0.0,
                                 const GeometryOptions& opt = {}) {
  const RFpDiff r = r_fp_diff(c, point, dpsi, opt);
  if (std::abs(r.tangential) > 1e-10 * (1.0 + std::abs(r.lhs) + std::abs(r.second)))
    throw Error("tangential terms do not vanish on a radial field: " + std::to_string(r.tangential));
  return r.residual;
}

struct MinPrinciple {
  double residual = 0.0;         // (lap_S/(p-1) + F^2 d2/dpsi2) q + 2 q (p-2)^2/(p-1) (d log F/ds)^2
  double hypothesis_grad = 0.0;  // |grad q|, zero where the identity applies
};

/// Planar minimum-principle identity for q = kappa / F^(p-1) with kappa = -trW.
/// q is differentiated by the finite-difference oracle (it needs fourth derivatives of psi).
inline MinPrinciple min_principle(const PHarmonicCase& c, const Point& point, const GeometryOptions& opt = {}) {
  if (c.d != 2) throw UsageError("min_principle_residual is defined for d = 2 only");
  const FieldSpec spec = c.field();
  const double p = c.p;
  const Jet3 psi = eval_field(spec, point);
  const GeometrySample s = geometry_sample(psi, opt);
  const auto q_at = [&](const Point& x) {
    const GeometrySample g = geometry_sample(eval_field(spec, x), opt);
    return -g.trW / std::pow(g.F, p - 1.0);
  };
  const Jet3 q = fd_jet(q_at, point).jet;
  const Vec tangent(Vec::Map(std::array<double, 2>{-s.normal[1], s.normal[0]}.data(), 2));
  const double dlogf_ds = tangent.dot(gradient(strength_jet(psi, opt))) / s.F;
  MinPrinciple m;
  m.residual = surface_laplacian(q, psi, opt) / (p - 1.0) + s.F * s.F * psi_derivative(q, psi, 2, opt) +
               2.0 * q.value() * (p - 2.0) * (p - 2.0) / (p - 1.0) * dlogf_ds * dlogf_ds;
  m.hypothesis_grad = gradient(q).norm();
  return m;
}

inline double min_principle_residual(const PHarmonicCase& c, const Point& point, const GeometryOptions& opt = {}) {
  return min_principle(c, point, opt).residual;
}

/// Exponents alpha for which the weighted planar minimum principle holds:
///   1 < p <= 2:  (-inf, p-2] u [0, 2-p] u [2(2-p), inf)
///   p > 2:       (-inf, 2(2-p)] u [2-p, 0] u [p-2, inf)
inline bool alpha_admissible(double p, double alpha) {
  if (!(p > 1.0)) throw UsageError("alpha_admissible requires p > 1");
  if (p <= 2.0) return alpha <= p - 2.0 || (alpha >= 0.0 && alpha <= 2.0 - p) || alpha >= 2.0 * (2.0 - p);
  return alpha <= 2.0 * (2.0 - p) || (alpha >= 2.0 - p && alpha <= 0.0) || alpha >= p - 2.0;
}

}  // namespace levelset
