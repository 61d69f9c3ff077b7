#pragma once

// Einstein-Hilbert action A(phi), the integral of the scalar curvature over the
// level set {psi = phi}, for the spherically symmetric harmonic potentials
// psi = r^(1-n) in R^(n+1), and the integral formula for A''(phi).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "levelset/error.hpp"
#include "levelset/fields.hpp"
#include "levelset/geometry.hpp"
#include "levelset/quadrature.hpp"

namespace levelset {

/// Nodes (unit vectors in R^(n+1)) and weights of a product rule on S^n.
struct SphereRule {
  int n = 0;
  std::vector<Point> nodes;
  std::vector<double> weights;
};

/// Product Gauss-Legendre rule in hyperspherical angles theta_1..theta_(n-1) in [0, pi]
/// and phi in [0, 2 pi], `order` nodes per angle. The Jacobian
/// sin^(n-1) theta_1 ... sin theta_(n-1) is folded into the weights.
inline SphereRule sphere_quadrature(int n, int order) {
  if (n < 2 || n > 4) throw UsageError("sphere_quadrature: sphere dimension must be 2..4, got " + std::to_string(n));
  if (order < 8) throw UsageError("sphere_quadrature: order must be at least 8");
  const quadrature::Rule polar = quadrature::gauss_legendre(order, 0.0, std::numbers::pi);
  const quadrature::Rule azimuth = quadrature::gauss_legendre(order, 0.0, 2.0 * std::numbers::pi);
  const std::size_t m = polar.nodes.size();

  SphereRule rule;
  rule.n = n;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);  // n-1 polar indices, then azimuth
  for (;;) {
    std::array<double, kMaxDim> x{};
    double w = 1.0, tail = 1.0;  // tail: product of sines so far
    for (int a = 0; a < n - 1; ++a) {
      const double th = polar.nodes[idx[a]];
      x[a] = tail * std::cos(th);
      w *= polar.weights[idx[a]] * std::pow(std::sin(th), n - 1 - a);
      tail *= std::sin(th);
    }
    const double ph = azimuth.nodes[idx[n - 1]];
    x[n - 1] = tail * std::cos(ph);
    x[n] = tail * std::sin(ph);
    w *= azimuth.weights[idx[n - 1]];
    rule.nodes.emplace_back(std::span<const double>(x.data(), static_cast<std::size_t>(n + 1)));
    rule.weights.push_back(w);

    int a = n - 1;
    while (a >= 0 && ++idx[a] == m) idx[a--] = 0;
    if (a < 0) break;
  }
  return rule;
}

/// Level sets of the point charge r^(1-n) in R^d, d = n + 1.
class SphereFamily {
 public:
  explicit SphereFamily(int d, int quadrature_order = 16)
      : d_(d), order_(quadrature_order), potential_("point_charge", d) {
    if (d < 3 || d > 5) throw UsageError("sphere families are supported for d = 3..5, got " + std::to_string(d));
    rule_ = sphere_quadrature(d - 1, quadrature_order);
  }

  int dim() const noexcept { return d_; }
  int n() const noexcept { return d_ - 1; }
  int quadrature_order() const noexcept { return order_; }
  const FieldSpec& potential() const noexcept { return potential_; }
  const SphereRule& rule() const noexcept { return rule_; }

  /// Radius of the level set {psi = phi}.
  double radius(double phi) const {
    if (!(phi > 0.0) || !std::isfinite(phi)) throw DomainError("eh_action", "phi must be positive and finite");
    return std::pow(phi, -1.0 / (n() - 1));
  }

 private:
  int d_;
  int order_;
  FieldSpec potential_;
  SphereRule rule_;
};

namespace detail {

inline Point scaled(Point x, double r) {
  for (int i = 0; i < x.dim(); ++i) x[i] *= r;
  return x;
}

// Neumaier summation in node order.
struct Sum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

}  // namespace detail

/// A(phi) = integral of R over the level set, with R from geometry_sample at every node.
inline double eh_action(const SphereFamily& family, double phi, const GeometryOptions& opt = {}) {
  const double r = family.radius(phi);
  const double jac = std::pow(r, family.n());
  const SphereRule& q = family.rule();
  GeometryOptions scalar = opt;
  scalar.principal = false;
  detail::Sum sum;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const Point x = detail::scaled(q.nodes[i], r);
    sum.add(q.weights[i] * jac * geometry_sample(eval_field(family.potential(), x, 2), scalar).R_extrinsic);
  }
  return sum.value();
}

struct SecondDerivativeCheck {
  double a2_fd = 0.0;
  double a2_integral = 0.0;
  double residual = 0.0;         // a2_fd - a2_integral
  double action = 0.0;           // A(phi)
  double first_integral = 0.0;   // of (trW G.b/3 - Ric.Ric + R^2/2) / E^2
  double second_integral = 0.0;  // of G(v, v), v the tangential gradient of 1/E
  double identity_gap = 0.0;     // largest |bracket - symmetric sums| / (sum k^2)^2 over nodes
};

/// Integral side of A'' alone, with the node-wise bracket identity recorded.
inline SecondDerivativeCheck eh_second_derivative_integral(const SphereFamily& family, double phi,
                                                           const GeometryOptions& opt = {}) {
  const double r = family.radius(phi);
  const double jac = std::pow(r, family.n());
  const SphereRule& q = family.rule();
  detail::Sum first, second;
  SecondDerivativeCheck out;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const Point x = detail::scaled(q.nodes[i], r);
    const Jet3 psi = eval_field(family.potential(), x, 2);
    GeometryOptions full = opt;
    full.principal = true;
    const GeometrySample s = geometry_sample(psi, full);
    const FrameTensors t = frame_tensors(s.principal_curvatures);

    double sum = 0.0, ric2 = 0.0;
    for (std::size_t a = 0; a < t.k.size(); ++a) {
      sum += t.k[a];
      ric2 += t.ricci_diag[a] * t.ricci_diag[a];
    }
    const double bracket = sum * einstein_contraction(t) / 3.0 - ric2 + 0.5 * t.R * t.R;
    // A zero curvature appended to a pair leaves both sides of the identity unchanged.
    std::vector<double> k = s.principal_curvatures;
    if (k.size() == 2) k.push_back(0.0);
    const CombIdentity c = comb_id_check(k);
    if (c.scale > 0.0) out.identity_gap = std::max(out.identity_gap, std::abs(bracket - c.rhs) / c.scale);

    // grad(1/E) = -Hpsi grad psi / E^3
    const Vec v = -s.projector * (hessian(psi) * gradient(psi)) / (s.F * s.F * s.F);
    double gvv = 0.0;
    for (std::size_t a = 0; a < t.k.size(); ++a) {
      const double va = s.principal_directions.col(static_cast<Eigen::Index>(a)).dot(v);
      gvv += t.einstein_diag[a] * va * va;
    }
    first.add(q.weights[i] * jac * bracket / (s.F * s.F));
    second.add(q.weights[i] * jac * gvv);
  }
  out.first_integral = first.value();
  out.second_integral = second.value();
  if (std::abs(out.second_integral) > 1e-12 * (1.0 + std::abs(out.first_integral)))
    throw Error("tangential-gradient integral does not vanish on a sphere family: " +
                std::to_string(out.second_integral));
  out.a2_integral = 6.0 * (out.first_integral - out.second_integral);
  return out;
}

inline double default_action_step(double phi) { return 1e-2 * phi; }

/// A''(phi) by 5-point central differences of eh_action with step h, against
/// 6 (first integral - second integral). h <= 0 selects 1e-2 phi.
inline SecondDerivativeCheck eh_second_derivative_check(const SphereFamily& family, double phi, double h = 0.0,
                                                        const GeometryOptions& opt = {}) {
  if (h <= 0.0) h = default_action_step(phi);
  if (!(phi - 2.0 * h > 0.0)) throw DomainError("eh_second_derivative_check", "phi - 2h must stay positive");
  SecondDerivativeCheck out = eh_second_derivative_integral(family, phi, opt);
  out.action = eh_action(family, phi, opt);
  const double am2 = eh_action(family, phi - 2.0 * h, opt), am1 = eh_action(family, phi - h, opt);
  const double ap1 = eh_action(family, phi + h, opt), ap2 = eh_action(family, phi + 2.0 * h, opt);
  out.a2_fd = (-am2 + 16.0 * am1 - 30.0 * out.action + 16.0 * ap1 - ap2) / (12.0 * h * h);
  out.residual = out.a2_fd - out.a2_integral;
  return out;
}

struct EHActionRow {
  double phi = 0.0;
  double r = 0.0;
  double action = 0.0;
  double a2_fd = 0.0;
  double a2_integral = 0.0;
  double residual = 0.0;
  double identity_gap = 0.0;
};

struct EHActionTable {
  int d = 0;
  int quadrature_order = 0;
  std::vector<EHActionRow> rows;  // phi increasing, r decreasing

  double min_a2_integral() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) m = std::min(m, row.a2_integral);
    return m;
  }
};

/// Geometrically spaced values phi_lo (phi_hi / phi_lo)^(i / (samples - 1)).
inline std::vector<double> geometric_grid(double lo, double hi, int samples) {
  if (!(lo > 0.0) || !(hi >= lo)) throw UsageError("phi range must satisfy 0 < phi_min <= phi_max");
  if (samples < 1) throw UsageError("samples must be positive");
  std::vector<double> g;
  for (int i = 0; i < samples; ++i)
    g.push_back(samples == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (samples - 1)));
  return g;
}

inline EHActionTable eh_action_table(const SphereFamily& family, double phi_lo, double phi_hi, int samples,
                                     const GeometryOptions& opt = {}) {
  EHActionTable t;
  t.d = family.dim();
  t.quadrature_order = family.quadrature_order();
  for (double phi : geometric_grid(phi_lo, phi_hi, samples)) {
    const SecondDerivativeCheck c = eh_second_derivative_check(family, phi, 0.0, opt);
    t.rows.push_back({phi, family.radius(phi), c.action, c.a2_fd, c.a2_integral, c.residual, c.identity_gap});
  }
  return t;
}

/// Minimum of the integral form of A'' over a geometric phi grid.
inline double convexity_scan(const SphereFamily& family, double phi_lo, double phi_hi, int samples,
                             const GeometryOptions& opt = {}) {
  double m = std::numeric_limits<double>::infinity();
  for (double phi : geometric_grid(phi_lo, phi_hi, samples))
    m = std::min(m, eh_second_derivative_integral(family, phi, opt).a2_integral);
  return m;
}

}  // namespace levelset
