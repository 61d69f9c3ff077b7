#pragma once

// Extrinsic geometry of the level sets of psi, computed from a single Jet3.
//
// Conventions: n = -grad psi / F with F = |grad psi|, P = I - n n^T and
// W = P Hpsi P / F. The psi-derivative of an ambient function u is
// (grad u . grad psi) / F^2, i.e. the derivative along the field line
// parametrized by the level value.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "levelset/error.hpp"
#include "levelset/fields.hpp"
#include "levelset/jet.hpp"

namespace levelset {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

struct GeometryOptions {
  double f_min = 1e-8;     // below this |grad psi| every operation raises CriticalPoint
  bool principal = true;  // false: geometry_sample leaves principal curvatures and directions empty
};

// ---------------------------------------------------------------------------
// Jet plumbing.

inline Vec gradient(const Jet3& u) {
  Vec g(u.dim());
  for (int i = 0; i < u.dim(); ++i) g[i] = u.grad(i);
  return g;
}

inline Mat hessian(const Jet3& u) {
  Mat h(u.dim(), u.dim());
  for (int i = 0; i < u.dim(); ++i)
    for (int j = 0; j < u.dim(); ++j) h(i, j) = u.hess(i, j);
  return h;
}

/// Jets of the partials d_i u; each has one order less than u.
inline std::vector<Jet3> gradient_jets(const Jet3& u) {
  if (u.order() < 1) throw UsageError("gradient_jets: jet carries no derivatives");
  const int d = u.dim();
  std::vector<Jet3> out;
  out.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    Jet3 gi(d, u.grad(i), u.order() - 1);
    if (gi.order() >= 1)
      for (int j = 0; j < d; ++j) gi.grad(j) = u.hess(i, j);
    if (gi.order() >= 2) detail::for_pairs(d, [&](int j, int k) { gi.hess(j, k) = u.third(i, j, k); });
    out.push_back(gi);
  }
  return out;
}

/// Jet of the Laplacian of u (two orders less than u).
inline Jet3 laplacian_jet(const Jet3& u) {
  if (u.order() < 2) throw UsageError("laplacian_jet: jet order below 2");
  const int d = u.dim();
  Jet3 v(d, u.laplacian(), u.order() - 2);
  if (v.order() >= 1)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += u.third(i, i, j);
      v.grad(j) = s;
    }
  return v;
}

inline Jet3 dot(std::span<const Jet3> a, std::span<const Jet3> b) {
  Jet3 s = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Ambient divergence of a vector field given by component jets.
inline double divergence(std::span<const Jet3> field) {
  double s = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) s += field[i].grad(static_cast<int>(i));
  return s;
}

inline double strength(const Jet3& psi, const GeometryOptions& opt = {}) {
  const double f = gradient(psi).norm();
  if (!(f >= opt.f_min))
    throw CriticalPoint("|grad psi| = " + std::to_string(f) + " below the critical-point floor " +
                        std::to_string(opt.f_min));
  return f;
}

/// Jet of F = |grad psi| (one order less than psi).
inline Jet3 strength_jet(const Jet3& psi, const GeometryOptions& opt = {}) {
  strength(psi, opt);
  const auto g = gradient_jets(psi);
  return sqrt(dot(g, g));
}

/// Jet of du/dpsi = (grad u . grad psi) / F^2.
inline Jet3 psi_derivative_jet(const Jet3& u, const Jet3& psi, const GeometryOptions& opt = {}) {
  detail::require_same_dim(u, psi);
  strength(psi, opt);
  const auto g = gradient_jets(psi);
  const auto gu = gradient_jets(u);
  return dot(gu, g) / dot(g, g);
}

/// First or second derivative of u along the field line, with psi as parameter.
inline double psi_derivative(const Jet3& u, const Jet3& psi, int order, const GeometryOptions& opt = {}) {
  if (order == 1) return psi_derivative_jet(u, psi, opt).value();
  if (order == 2) return psi_derivative_jet(psi_derivative_jet(u, psi, opt), psi, opt).value();
  throw UsageError("psi_derivative: order must be 1 or 2");
}

/// Laplace-Beltrami operator of the level set applied to the ambient function u:
/// lap u - F^2 d2u/dpsi2 + (P grad F).(P grad u)/F - V du/dpsi.
inline double surface_laplacian(const Jet3& u, const Jet3& psi, const GeometryOptions& opt = {}) {
  detail::require_same_dim(u, psi);
  const double f = strength(psi, opt);
  const Vec g = gradient(psi);
  const Vec n = -g / f;
  const Jet3 fj = strength_jet(psi, opt);
  const Vec gf = gradient(fj);
  const Vec gu = gradient(u);
  const Vec pgf = gf - n * n.dot(gf);
  const Vec pgu = gu - n * n.dot(gu);
  const Jet3 du = psi_derivative_jet(u, psi, opt);
  const double d2u = psi_derivative_jet(du, psi, opt).value();
  return u.laplacian() - f * f * d2u + pgf.dot(pgu) / f - psi.laplacian() * du.value();
}

/// Covariant Hessian of u on the level set, as a tangential ambient matrix:
/// P Hu P + (n . grad u) P Hpsi P / F.
inline Mat surface_covariant_hessian(const Jet3& u, const Jet3& psi, const GeometryOptions& opt = {}) {
  detail::require_same_dim(u, psi);
  const int d = psi.dim();
  const double f = strength(psi, opt);
  const Vec n = -gradient(psi) / f;
  const Mat p = Mat::Identity(d, d) - n * n.transpose();
  return p * hessian(u) * p + n.dot(gradient(u)) * (p * hessian(psi) * p) / f;
}

/// Laplacian of log F, from the jet of F.
inline double laplacian_log_strength(const Jet3& psi, const GeometryOptions& opt = {}) {
  return log(strength_jet(psi, opt)).laplacian();
}

/// div(V grad psi / F^2) with V = lap psi.
inline double flux_divergence(const Jet3& psi, const GeometryOptions& opt = {}) {
  strength(psi, opt);
  const auto g = gradient_jets(psi);
  const Jet3 scale = laplacian_jet(psi) / dot(g, g);
  std::vector<Jet3> x;
  x.reserve(g.size());
  for (const auto& gi : g) x.push_back(scale * gi);
  return divergence(x);
}

/// Scalar curvature of the level set from the rearranged identity
/// R = -lap log F + div(V grad psi / F^2). Uses third derivatives of psi.
inline double scalar_curvature_formula(const Jet3& psi, const GeometryOptions& opt = {}) {
  return -laplacian_log_strength(psi, opt) + flux_divergence(psi, opt);
}

// ---------------------------------------------------------------------------
// Pointwise geometry.

struct GeometrySample {
  double F = 0.0;
  double V = 0.0;
  Vec normal;
  Mat projector;
  Mat weingarten;
  std::vector<double> principal_curvatures;  // ascending
  Mat principal_directions;                  // d x (d-1), columns match principal_curvatures
  double trW = 0.0;
  double trW2 = 0.0;
  double R_extrinsic = 0.0;
  double R_formula = 0.0;
};

/// Principal curvatures are the eigenvalues of W restricted to the tangent space,
/// spanned by the orthonormal complement of n from a Householder reflection.
/// R_formula needs third derivatives; it is NaN for a jet of order 2.
inline GeometrySample geometry_sample(const Jet3& psi, const GeometryOptions& opt = {}) {
  if (!psi.finite()) throw Error("geometry_sample: non-finite jet");
  if (psi.order() < 2) throw UsageError("geometry_sample: jet order below 2");
  const int d = psi.dim();
  GeometrySample s;
  s.F = strength(psi, opt);
  s.V = psi.laplacian();
  s.normal = -gradient(psi) / s.F;
  s.projector = Mat::Identity(d, d) - s.normal * s.normal.transpose();
  s.weingarten = s.projector * hessian(psi) * s.projector / s.F;
  s.trW = s.weingarten.trace();
  s.trW2 = (s.weingarten * s.weingarten).trace();
  s.R_extrinsic = s.trW * s.trW - s.trW2;
  s.R_formula = psi.order() >= 3 ? scalar_curvature_formula(psi, opt) : std::numeric_limits<double>::quiet_NaN();
  if (!opt.principal) return s;

  Mat basis(d, d);
  basis = Eigen::HouseholderQR<Mat>(Mat(s.normal)).householderQ();
  const Mat tangent = basis.rightCols(d - 1);
  Mat restricted = tangent.transpose() * s.weingarten * tangent;
  restricted = 0.5 * (restricted + restricted.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> eig(restricted);
  if (eig.info() != Eigen::Success) throw Error("geometry_sample: eigen-decomposition failed");
  s.principal_curvatures.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + (d - 1));
  s.principal_directions = tangent * eig.eigenvectors();
  return s;
}

// ---------------------------------------------------------------------------
// Principal-frame tensors of a level set.

struct FrameTensors {
  std::vector<double> k;
  std::vector<double> ricci_diag;     // k_i (sum k - k_i)
  std::vector<double> einstein_diag;  // ricci - R/2
  std::vector<double> beta_diag;      // sum k - k_i
  double R = 0.0;
};

inline FrameTensors frame_tensors(std::span<const double> k) {
  FrameTensors t;
  t.k.assign(k.begin(), k.end());
  double sum = 0.0, sum2 = 0.0;
  for (double v : k) {
    sum += v;
    sum2 += v * v;
  }
  t.R = sum * sum - sum2;
  for (double v : k) {
    t.ricci_diag.push_back(v * (sum - v));
    t.einstein_diag.push_back(v * (sum - v) - 0.5 * t.R);
    t.beta_diag.push_back(sum - v);
  }
  return t;
}

/// sum_i G_ii k_i.
inline double einstein_contraction(const FrameTensors& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.k.size(); ++i) s += t.einstein_diag[i] * t.k[i];
  return s;
}

struct CombIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double scale = 0.0;  // (sum k^2)^2, the natural magnitude of either side
};

/// lhs: (1/3) sum k * G.b - Ric.Ric + R^2/2 from the frame tensors.
/// rhs: sum_{i<j, l != i,j} k_i k_j k_l^2 + 8 sum_{i<j<l<m} k_i k_j k_l k_m.
inline CombIdentity comb_id_check(std::span<const double> k) {
  const int n = static_cast<int>(k.size());
  if (n < 3 || n > 5) throw UsageError("comb_id_check: curvature vector length must be 3..5");
  const FrameTensors t = frame_tensors(k);
  double sum = 0.0, sum2 = 0.0, ric2 = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += k[i];
    sum2 += k[i] * k[i];
    ric2 += t.ricci_diag[i] * t.ricci_diag[i];
  }
  CombIdentity c;
  c.lhs = sum * einstein_contraction(t) / 3.0 - ric2 + 0.5 * t.R * t.R;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int l = 0; l < n; ++l)
        if (l != i && l != j) c.rhs += k[i] * k[j] * k[l] * k[l];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int l = j + 1; l < n; ++l)
        for (int m = l + 1; m < n; ++m) c.rhs += 8.0 * k[i] * k[j] * k[l] * k[m];
  c.scale = sum2 * sum2;
  return c;
}

// ---------------------------------------------------------------------------
// Identity residuals.

struct IdentityReport {
  Point point;
  std::map<std::string, double> residuals;
  std::map<std::string, double> tolerances;
  std::map<std::string, bool> pass;

  void add(const std::string& name, double residual, double tolerance) {
    residuals[name] = residual;
    tolerances[name] = tolerance;
    pass[name] = std::abs(residual) <= tolerance;
  }
  bool all_pass() const {
    return std::all_of(pass.begin(), pass.end(), [](const auto& kv) { return kv.second; });
  }
};

using ToleranceOverrides = std::map<std::string, double>;

namespace detail {

inline double tolerance_for(const ToleranceOverrides& overrides, const std::string& name, double fallback) {
  const auto it = overrides.find(name);
  return it != overrides.end() ? it->second : fallback;
}

}  // namespace detail

/// Residuals of the pointwise level-set identities at one point:
///   nH                   trW + dF/dpsi - V/F
///   lap_lnF              lap log F + F lap_S(1/F) - F^2 d2(log F)/dpsi2 + trW V/F - V^2/F^2
///   main                 lap log F + R - div(V grad psi / F^2)
///   formula_vs_extrinsic R_formula - R_extrinsic (tolerance scaled by 1 + |R|)
///   2d_triv              lap log F - div(V grad psi / F^2)          (d = 2)
///   gauss                R - 2 k1 k2                                 (d = 3)
inline IdentityReport identity_residuals(const FieldSpec& spec, const Point& point,
                                         const ToleranceOverrides& overrides = {},
                                         const GeometryOptions& opt = {}) {
  const Jet3 psi = eval_field(spec, point);
  const GeometrySample s = geometry_sample(psi, opt);
  const double tol = spec.default_tolerance();
  auto tol_of = [&](const std::string& name) { return detail::tolerance_for(overrides, name, tol); };

  const Jet3 fj = strength_jet(psi, opt);
  const Jet3 log_f = log(fj);
  const double lap_log_f = log_f.laplacian();
  const double flux = flux_divergence(psi, opt);
  const double f = s.F, v = s.V;

  IdentityReport r;
  r.point = point;
  r.add("nH", s.trW + psi_derivative(fj, psi, 1, opt) - v / f, tol_of("nH"));
  const double lap_rhs = -f * surface_laplacian(1.0 / fj, psi, opt) + f * f * psi_derivative(log_f, psi, 2, opt) -
                         s.trW * v / f + v * v / (f * f);
  r.add("lap_lnF", lap_log_f - lap_rhs, tol_of("lap_lnF"));
  r.add("main", lap_log_f + s.R_extrinsic - flux, tol_of("main"));
  r.add("formula_vs_extrinsic", s.R_formula - s.R_extrinsic,
        tol_of("formula_vs_extrinsic") * (1.0 + std::abs(s.R_extrinsic)));
  if (spec.dim() == 2) r.add("2d_triv", lap_log_f - flux, tol_of("2d_triv"));
  if (spec.dim() == 3)
    r.add("gauss", s.R_extrinsic - 2.0 * s.principal_curvatures[0] * s.principal_curvatures[1], tol_of("gauss"));
  return r;
}

// ---------------------------------------------------------------------------
// Reparametrization psi -> f(psi).

enum class Diffeo { identity, negate, cubic, exp, scale };

inline const char* diffeo_name(Diffeo f) {
  switch (f) {
    case Diffeo::identity:
      return "t";
    case Diffeo::negate:
      return "-t";
    case Diffeo::cubic:
      return "t^3+t";
    case Diffeo::exp:
      return "exp";
    case Diffeo::scale:
      return "lambda*t";
  }
  return "?";
}

inline Curve1Jet diffeo_curve(Diffeo f, double t, double lambda = 2.0) {
  switch (f) {
    case Diffeo::identity:
      return {t, 1.0, 0.0, 0.0};
    case Diffeo::negate:
      return {-t, -1.0, 0.0, 0.0};
    case Diffeo::cubic:
      return {t * t * t + t, 3.0 * t * t + 1.0, 6.0 * t, 6.0};
    case Diffeo::exp:
      return curves::exp(t);
    case Diffeo::scale:
      return {lambda * t, lambda, 0.0, 0.0};
  }
  throw UsageError("unknown reparametrization");
}

struct DiffeoResiduals {
  double mean = 0.0;    // sign(f') trW + d|grad chi|/dchi - lap chi / |grad chi|
  double scalar = 0.0;  // lap log|grad chi| + R - div(lap chi grad chi / |grad chi|^2)
};

/// Both identities for chi = f(psi); trW and R come from psi's own orientation.
inline DiffeoResiduals diffeo_residuals(const FieldSpec& spec, const Point& point, Diffeo family,
                                        double lambda = 2.0, const GeometryOptions& opt = {}) {
  const Jet3 psi = eval_field(spec, point);
  const GeometrySample s = geometry_sample(psi, opt);
  const Curve1Jet fc = diffeo_curve(family, psi.value(), lambda);
  if (fc.d1 == 0.0) throw DomainError("diffeomorphism", "f'(psi) vanishes at the point");
  const Jet3 chi = compose(fc, psi);
  const Jet3 fchi = strength_jet(chi, opt);
  const double f = fchi.value();
  DiffeoResiduals r;
  r.mean = (fc.d1 > 0.0 ? 1.0 : -1.0) * s.trW + psi_derivative(fchi, chi, 1, opt) - chi.laplacian() / f;
  r.scalar = log(fchi).laplacian() + s.R_extrinsic - flux_divergence(chi, opt);
  return r;
}

// ---------------------------------------------------------------------------
// Field-line transport and derivatives along it.

/// Point on the field line through `start` at level psi(start) + s, from
/// dx/dpsi = grad psi / F^2 integrated with classical Runge-Kutta.
inline Point transport(const FieldSpec& spec, const Point& start, double s, int steps = 4,
                       const GeometryOptions& opt = {}) {
  const int d = spec.dim();
  auto velocity = [&](const Point& x) {
    if (!admissible(spec, x)) throw ExclusionViolation("field line leaves the admissible region of " + spec.name());
    const Jet3 j = eval_field(spec, x);
    const Vec g = gradient(j);
    const double f2 = g.squaredNorm();
    if (!(std::sqrt(f2) >= opt.f_min)) throw CriticalPoint("field line meets a critical point");
    return Vec(g / f2);
  };
  auto shifted = [&](const Point& x, const Vec& v, double t) {
    Point y = x;
    for (int i = 0; i < d; ++i) y[i] += t * v[i];
    return y;
  };
  Point x = start;
  const double h = s / steps;
  for (int k = 0; k < steps; ++k) {
    const Vec k1 = velocity(x);
    const Vec k2 = velocity(shifted(x, k1, 0.5 * h));
    const Vec k3 = velocity(shifted(x, k2, 0.5 * h));
    const Vec k4 = velocity(shifted(x, k3, h));
    x = shifted(x, (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0, h);
  }
  if (!admissible(spec, x)) throw ExclusionViolation("field line leaves the admissible region of " + spec.name());
  return x;
}

struct LineDerivatives {
  double value = 0.0;
  double d1 = 0.0;    // Richardson-extrapolated first derivative in psi
  double d2 = 0.0;    // Richardson-extrapolated second derivative in psi
  double gap1 = 0.0;  // |D1(h) - D1(h/2)|
  double gap2 = 0.0;  // |D2(h) - D2(h/2)|
};

inline double default_line_step(double psi_value) { return 1e-3 * std::max(std::abs(psi_value), 1.0); }

/// Derivatives in psi of q(jet) along the field line through `point`, by 5-point
/// central differences at steps h and h/2 combined by Richardson extrapolation.
template <class Q>
LineDerivatives line_derivatives(const FieldSpec& spec, const Point& point, double h, Q&& q,
                                 const GeometryOptions& opt = {}) {
  if (!(h > 0.0)) throw UsageError("line step must be positive");
  // Offsets -2h, -h, -h/2, 0, h/2, h, 2h, transported outward in segments.
  std::array<double, 7> val{};
  val[3] = q(eval_field(spec, point));
  for (int dir : {-1, 1}) {
    Point x = point;
    double at = 0.0;
    for (int m = 0; m < 3; ++m) {
      const double target = dir * std::array<double, 3>{0.5 * h, h, 2.0 * h}[m];
      x = transport(spec, x, target - at, 4, opt);
      at = target;
      val[3 + dir * (m + 1)] = q(eval_field(spec, x));
    }
  }
  const double fm2 = val[0], fm1 = val[1], fmh = val[2], f0 = val[3], fph = val[4], fp1 = val[5], fp2 = val[6];
  const double d1h = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
  const double d1q = (fm1 - 8.0 * fmh + 8.0 * fph - fp1) / (6.0 * h);
  const double d2h = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
  const double d2q = (-fm1 + 16.0 * fmh - 30.0 * f0 + 16.0 * fph - fp1) / (3.0 * h * h);
  LineDerivatives out;
  out.value = f0;
  out.d1 = d1q + (d1q - d1h) / 15.0;
  out.d2 = d2q + (d2q - d2h) / 15.0;
  out.gap1 = std::abs(d1h - d1q);
  out.gap2 = std::abs(d2h - d2q);
  return out;
}

/// line_derivatives over the ladder h0 2^k, k = -4..3. For each order the result
/// is the extrapolated value whose distance to the next smaller step's value is
/// least; that distance is reported as the gap. Steps whose line leaves the
/// admissible region end the ladder.
template <class Q>
LineDerivatives controlled_line_derivatives(const FieldSpec& spec, const Point& point, double h0, Q&& q,
                                            const GeometryOptions& opt = {}) {
  if (!(h0 > 0.0)) throw UsageError("line step must be positive");
  std::vector<LineDerivatives> ladder;
  for (int k = -4; k <= 3; ++k) {
    try {
      ladder.push_back(line_derivatives(spec, point, std::ldexp(h0, k), q, opt));
    } catch (const ExclusionViolation&) {
      if (k <= 0) throw;
      break;
    }
  }
  LineDerivatives best = ladder[1];
  best.gap1 = best.gap2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < ladder.size(); ++k) {
    const double e1 = std::abs(ladder[k].d1 - ladder[k - 1].d1);
    const double e2 = std::abs(ladder[k].d2 - ladder[k - 1].d2);
    if (e1 < best.gap1) {
      best.d1 = ladder[k].d1;
      best.gap1 = e1;
    }
    if (e2 < best.gap2) {
      best.d2 = ladder[k].d2;
      best.gap2 = e2;
    }
  }
  return best;
}

struct EvolutionResiduals {
  double h_evolv = 0.0;  // d trW/dpsi + lap_S(1/F) + trW2/F
  double r_evolv = 0.0;  // dR/dpsi + 2 G.b/F + trW R/F + 2 <trW P - W, Hess_S(1/F)>
  double h_gap = 0.0;    // Richardson gaps of the differenced left sides
  double r_gap = 0.0;
};

/// Evolution of mean and scalar curvature along the field line, at the fixed step
/// `dpsi`, or Richardson-controlled around 1e-3 max(|psi|, 1) min(1, F) when `dpsi` <= 0.
inline EvolutionResiduals evolution_residuals(const FieldSpec& spec, const Point& point, double dpsi = 0.0,
                                              const GeometryOptions& opt = {}) {
  const Jet3 psi = eval_field(spec, point);
  const GeometrySample s = geometry_sample(psi, opt);

  const Jet3 inv_f = 1.0 / strength_jet(psi, opt);
  const double lap_s = surface_laplacian(inv_f, psi, opt);
  const Mat hess_s = surface_covariant_hessian(inv_f, psi, opt);
  const Mat beta = s.trW * s.projector - s.weingarten;
  const FrameTensors t = frame_tensors(s.principal_curvatures);

  // A psi-step h moves the point by h/F, so weak fields get a proportionally smaller ladder.
  const double h0 = default_line_step(psi.value()) * std::min(1.0, s.F);
  const auto along = [&](auto&& q) {
    return dpsi > 0.0 ? line_derivatives(spec, point, dpsi, q, opt)
                      : controlled_line_derivatives(spec, point, h0, q, opt);
  };
  const auto tr = along([&](const Jet3& j) { return geometry_sample(j, opt).trW; });
  const auto rr = along([&](const Jet3& j) { return geometry_sample(j, opt).R_extrinsic; });

  EvolutionResiduals r;
  r.h_evolv = tr.d1 - (-lap_s - s.trW2 / s.F);
  r.r_evolv = rr.d1 - (-2.0 * einstein_contraction(t) / s.F - s.trW * s.R_extrinsic / s.F -
                       2.0 * (beta.cwiseProduct(hess_s)).sum());
  r.h_gap = tr.gap1;
  r.r_gap = rr.gap1;
  return r;
}

}  // namespace levelset
