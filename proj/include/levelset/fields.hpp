#pragma once

// Catalog of closed-form scalar fields used as the test corpus for the
// level-set identities. Every formula is written once, templated over the
// scalar type: instantiated with Jet3 it yields analytic derivatives, with
// double it yields plain values (the finite-difference oracle uses those).

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "levelset/error.hpp"
#include "levelset/jet.hpp"
#include "levelset/quadrature.hpp"

namespace levelset {

enum class FieldKind {
  sphere,
  point_charge,
  quadratic_ellipsoid,
  monge_graph,
  planar_harmonic,
  conical_harmonic,
  charged_ellipsoid_potential,
  uniform_field_ellipsoid,
  grounded_plate,
  p_harmonic_radial,
  random_polynomial,
};

struct ParamSchema {
  std::string key;
  double default_value = 0.0;
  std::string constraint;
};

struct FieldInfo {
  FieldKind kind;
  std::string name;
  int min_dim = 2;
  int max_dim = 6;
  int default_dim = 3;
  std::vector<ParamSchema> params;
  std::string indexed_params;  // families of indexed keys, empty if none
  std::string exclusion;
  std::string default_region;
  bool harmonic = false;
  bool quadrature = false;
};

/// The catalog, in its documented (stable) order.
inline const std::vector<FieldInfo>& list_fields() {
  static const std::vector<FieldInfo> catalog = [] {
    using K = FieldKind;
    const std::vector<ParamSchema> axes = {{"a", 2.0, "a > b > c > 0"}, {"b", 1.5, "a > b > c > 0"},
                                           {"c", 1.0, "a > b > c > 0"}};
    std::vector<FieldInfo> v;
    v.push_back({K::sphere, "sphere", 2, 6, 3, {}, "", "origin", "shell:0.5,2", false, false});
    v.push_back({K::point_charge, "point_charge", 2, 6, 3, {}, "", "origin", "shell:0.5,2", true, false});
    v.push_back({K::quadratic_ellipsoid, "quadratic_ellipsoid", 3, 3, 3, axes, "", "origin", "shell:0.5,2", false,
                 false});
    v.push_back({K::monge_graph, "monge_graph", 3, 3, 3, {}, "f<i><j>: coefficient of x^i y^j, i+j <= 6 "
                 "(default f20=f02=0.5)", "none", "box:-1,1", false, false});
    v.push_back({K::planar_harmonic, "planar_harmonic", 2, 2, 2, {{"part", 0.0, "0 (real part) or 1 (imaginary part)"}},
                 "re<k>, im<k>: complex coefficient of z^k, k <= 8 (default re1=0.2, re2=1, im3=0.3)", "none",
                 "box:-1.5,1.5", true, false});
    v.push_back({K::conical_harmonic, "conical_harmonic", 3, 3, 3,
                 {{"part", 0.0, "0 or 1"},
                  {"log", 0.3, "coefficient of log tan(theta/2)"},
                  {"arg", 0.5, "coefficient of the azimuth"},
                  {"cone", 0.3, "half-angle of the excluded cone around -z, 0 < cone < pi/2"}},
                 "re<k>, im<k>: coefficient of w^k, w = tan(theta/2) e^(i azimuth) (default re1=1, re2=0.4)",
                 "apex, z-axis, cone of half-angle `cone` around the negative z-axis", "shell:0.5,2", true, false});
    v.push_back({K::charged_ellipsoid_potential, "charged_ellipsoid_potential", 3, 3, 3, axes, "",
                 "coordinate planes (confocal roots degenerate)", "surface", true, true});
    auto uf = axes;
    uf.push_back({"E0", 1.0, "external field strength, nonzero"});
    v.push_back({K::uniform_field_ellipsoid, "uniform_field_ellipsoid", 3, 3, 3, uf, "",
                 "coordinate planes (confocal roots degenerate)", "surface", true, true});
    v.push_back({K::grounded_plate, "grounded_plate", 3, 3, 3,
                 {{"a", 1.0, "> 0"}, {"b", 1.0, "> 0"}, {"c", 1.0, "> 0"}, {"L", 3.0, "integer >= 1"}},
                 "c<l><m>: series coefficient (default 1/(l^2+m^2))", "outside the box [0,a]x[0,b]x[0,c]", "face",
                 true, false});
    v.push_back({K::p_harmonic_radial, "p_harmonic_radial", 2, 6, 3, {{"p", 3.0, "p > 1"}}, "", "origin",
                 "shell:0.5,2", false, false});
    v.push_back({K::random_polynomial, "random_polynomial", 2, 6, 3,
                 {{"seed", 0.0, "integer >= 0"}, {"degree", 4.0, "integer in 1..4"}}, "", "none", "box:-1,1", false,
                 false});
    return v;
  }();
  return catalog;
}

inline const FieldInfo& field_info(std::string_view name) {
  for (const auto& f : list_fields())
    if (f.name == name) return f;
  throw UsageError("unknown field: " + std::string(name));
}

inline const FieldInfo& field_info(FieldKind kind) {
  for (const auto& f : list_fields())
    if (f.kind == kind) return f;
  throw UsageError("unknown field kind");
}

namespace detail {

/// Portable uniform doubles from a seeded 64-bit engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

struct Monomial {
  std::array<int, kMaxDim> exponent{};
  double coeff = 0.0;
};

struct PlateTerm {
  int l = 1, m = 1;
  double coeff = 0.0, kx = 0.0, ky = 0.0, gamma = 0.0;
};

// Everything precomputed from the parameters.
struct FieldData {
  std::array<double, 3> axes2{};  // a^2, b^2, c^2
  std::vector<Monomial> monomials;
  int max_power = 0;
  std::vector<std::complex<double>> complex_coeffs;  // index = power
  std::vector<PlateTerm> plate;
  double uniform_norm = 1.0;  // integral for F(0)
};

inline bool parse_index_key(std::string_view key, std::string_view prefix, std::vector<int>& digits) {
  if (key.substr(0, prefix.size()) != prefix) return false;
  const auto rest = key.substr(prefix.size());
  if (rest.empty()) return false;
  digits.clear();
  for (char ch : rest) {
    if (ch < '0' || ch > '9') return false;
    digits.push_back(ch - '0');
  }
  return true;
}

}  // namespace detail

/// A named, parameterized catalog entry. Immutable after construction.
class FieldSpec {
 public:
  FieldSpec(std::string_view name, int dim, std::map<std::string, double> params = {})
      : info_(&field_info(name)), dim_(dim), params_(std::move(params)) {
    validate_and_prepare();
  }

  /// Builds a spec from "key=value" strings (the --param flags).
  static FieldSpec parse(std::string_view name, int dim, std::span<const std::string> key_values) {
    std::map<std::string, double> params;
    for (const auto& kv : key_values) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("malformed parameter (expected key=value): " + kv);
      const std::string key = kv.substr(0, eq);
      const std::string text = kv.substr(eq + 1);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
        throw UsageError("malformed parameter value: " + kv);
      params[key] = value;
    }
    return FieldSpec(name, dim, std::move(params));
  }

  const FieldInfo& info() const noexcept { return *info_; }
  const std::string& name() const noexcept { return info_->name; }
  FieldKind kind() const noexcept { return info_->kind; }
  int dim() const noexcept { return dim_; }
  const std::map<std::string, double>& params() const noexcept { return params_; }
  double param(const std::string& key) const {
    const auto it = params_.find(key);
    if (it == params_.end()) throw UsageError("field " + name() + " has no parameter " + key);
    return it->second;
  }
  bool harmonic() const noexcept { return info_->harmonic; }
  bool quadrature_backed() const noexcept { return info_->quadrature; }
  const std::string& exclusion() const noexcept { return info_->exclusion; }

  /// Identity tolerance: closed-form fields 1e-7, quadrature-backed confocal fields 1e-5.
  double default_tolerance() const noexcept { return quadrature_backed() ? 1e-5 : 1e-7; }

  /// Absolute noise level of plain values (quadrature-limited for confocal fields).
  double value_noise() const noexcept { return quadrature_backed() ? 1e-12 : 0.0; }

  /// Samplers reject points with |grad psi| below this.
  double min_strength() const noexcept {
    switch (kind()) {
      case FieldKind::random_polynomial:
        return 0.1;
      case FieldKind::planar_harmonic:
      case FieldKind::conical_harmonic:
      case FieldKind::grounded_plate:
        return 0.05;
      default:
        return 1e-6;
    }
  }

  const detail::FieldData& data() const noexcept { return *data_; }

 private:
  void validate_and_prepare();

  const FieldInfo* info_;
  int dim_;
  std::map<std::string, double> params_;
  std::shared_ptr<const detail::FieldData> data_;
};

// ---------------------------------------------------------------------------
// Confocal ellipsoidal coordinates.

namespace detail {

// Left side of the confocal cubic, sum x_i^2 / (A_i + u) - 1.
inline auto confocal_equation(const std::array<double, 3>& axes2) {
  return [axes2](const auto& u, auto x) {
    auto s = x[0] * x[0] / (axes2[0] + u);
    s += x[1] * x[1] / (axes2[1] + u);
    s += x[2] * x[2] / (axes2[2] + u);
    return s - 1.0;
  };
}

inline Bracket confocal_bracket(int which, const std::array<double, 3>& axes2, std::span<const double> x) {
  const double delta = 1e-13 * axes2[0];
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  switch (which) {
    case 0:
      return {-axes2[2] + delta, std::max(r2, -axes2[2] + 2.0 * delta) + 1.0};
    case 1:
      return {-axes2[1] + delta, -axes2[2] - delta};
    default:
      return {-axes2[0] + delta, -axes2[1] - delta};
  }
}

}  // namespace detail

/// One confocal coordinate (0: xi, 1: eta, 2: zeta) of the point `x`, as a value
/// or as a jet through the inputs. Ordering: xi >= -c^2 >= eta >= -b^2 >= zeta >= -a^2.
template <class T>
T confocal_coordinate(int which, const std::array<double, 3>& axes2, std::span<const T> x) {
  if (x.size() != 3) throw UsageError("confocal coordinates need three inputs");
  const auto g = detail::confocal_equation(axes2);
  std::array<double, 3> xv{};
  for (int i = 0; i < 3; ++i) xv[i] = scalar_value(x[i]);
  const Bracket br = detail::confocal_bracket(which, axes2, xv);
  if constexpr (std::is_same_v<T, Jet3>) {
    return implicit_root(g, x, br);
  } else {
    return implicit_root_value(g, std::span<const double>(xv), br);
  }
}

/// All three confocal coordinates (xi, eta, zeta) of a point as jets.
inline std::array<Jet3, 3> confocal_roots(double a, double b, double c, const Point& p) {
  const std::array<double, 3> axes2{a * a, b * b, c * c};
  const auto seeds = jet_seeds(p);
  const std::span<const Jet3> x(seeds);
  return {confocal_coordinate<Jet3>(0, axes2, x), confocal_coordinate<Jet3>(1, axes2, x),
          confocal_coordinate<Jet3>(2, axes2, x)};
}

// ---------------------------------------------------------------------------
// Radial profiles of the confocal potentials.

namespace detail {

// Potential of the charged ellipsoid as a function of xi:
// phi(xi) = int_xi^inf ds / sqrt(P(s)), P(s) = (s+a^2)(s+b^2)(s+c^2).
inline Curve1Jet charged_profile(const std::array<double, 3>& A, double xi) {
  const double p = (xi + A[0]) * (xi + A[1]) * (xi + A[2]);
  if (!(p > 0.0)) throw DomainError("charged_ellipsoid_potential", "xi outside (-c^2, inf)");
  const double value =
      quadrature::integrate_to_infinity([&](double s) { return 1.0 / std::sqrt((s + A[0]) * (s + A[1]) * (s + A[2])); },
                                        xi);
  // phi' = -P^(-1/2); with L = log(-phi'), phi'' = phi' L', phi''' = phi' (L'' + L'^2).
  const double d1 = -1.0 / std::sqrt(p);
  double l1 = 0.0, l2 = 0.0;
  for (double ai : A) {
    l1 += -0.5 / (xi + ai);
    l2 += 0.5 / ((xi + ai) * (xi + ai));
  }
  return {value, d1, d1 * l1, d1 * (l2 + l1 * l1)};
}

inline double uniform_integral(const std::array<double, 3>& A, double xi) {
  return quadrature::integrate_to_infinity(
      [&](double s) { return 1.0 / ((s + A[0]) * std::sqrt((s + A[0]) * (s + A[1]) * (s + A[2]))); }, xi);
}

// 1 - F(xi) for the ellipsoid in a uniform field along x,
// F(xi) = I(xi) / I(0),  I(xi) = int_xi^inf ds / ((s+a^2) sqrt(P(s))).
inline Curve1Jet uniform_profile(const std::array<double, 3>& A, double norm, double xi) {
  const double p = (xi + A[0]) * (xi + A[1]) * (xi + A[2]);
  if (!(p > 0.0)) throw DomainError("uniform_field_ellipsoid", "xi outside (-c^2, inf)");
  const double i1 = -1.0 / ((xi + A[0]) * std::sqrt(p));
  const double l1 = -1.5 / (xi + A[0]) - 0.5 / (xi + A[1]) - 0.5 / (xi + A[2]);
  const double l2 = 1.5 / ((xi + A[0]) * (xi + A[0])) + 0.5 / ((xi + A[1]) * (xi + A[1])) +
                    0.5 / ((xi + A[2]) * (xi + A[2]));
  const double i2 = i1 * l1;
  const double i3 = i1 * (l2 + l1 * l1);
  return {1.0 - uniform_integral(A, xi) / norm, -i1 / norm, -i2 / norm, -i3 / norm};
}

template <class T>
T zero_like(const T& like) {
  if constexpr (std::is_same_v<T, Jet3>) {
    return Jet3(like.dim(), 0.0);
  } else {
    return 0.0;
  }
}

// Real and imaginary parts of sum_k c_k w^k with w = X + iY.
template <class T>
std::pair<T, T> complex_polynomial(const std::vector<std::complex<double>>& coeffs, const T& X, const T& Y) {
  T re = zero_like(X), im = zero_like(X);
  T pr = zero_like(X) + 1.0, pi = zero_like(X);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (k > 0) {
      T nr = pr * X - pi * Y;
      T ni = pr * Y + pi * X;
      pr = std::move(nr);
      pi = std::move(ni);
    }
    const auto c = coeffs[k];
    if (c.real() != 0.0) {
      re += c.real() * pr;
      im += c.real() * pi;
    }
    if (c.imag() != 0.0) {
      re -= c.imag() * pi;
      im += c.imag() * pr;
    }
  }
  return {re, im};
}

}  // namespace detail

/// The field formula at `x` (length spec.dim()), for T = double or Jet3.
template <class T>
T evaluate(const FieldSpec& spec, std::span<const T> x) {
  using std::atan2;
  using std::cos;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  const int d = spec.dim();
  const auto& data = spec.data();
  auto radius2 = [&] {
    T s = x[0] * x[0];
    for (int i = 1; i < d; ++i) s += x[i] * x[i];
    return s;
  };
  switch (spec.kind()) {
    case FieldKind::sphere:
      return sqrt(radius2());
    case FieldKind::point_charge:
      if (d == 2) return 0.5 * log(radius2());
      return pow(radius2(), -0.5 * (d - 2));
    case FieldKind::quadratic_ellipsoid:
      return x[0] * x[0] / data.axes2[0] + x[1] * x[1] / data.axes2[1] + x[2] * x[2] / data.axes2[2];
    case FieldKind::monge_graph:
    case FieldKind::random_polynomial: {
      // Powers x_i^k, k = 0..max_power.
      std::vector<std::vector<T>> pw(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) {
        pw[i].reserve(static_cast<std::size_t>(data.max_power) + 1);
        pw[i].push_back(detail::zero_like(x[i]) + 1.0);
        for (int k = 1; k <= data.max_power; ++k) pw[i].push_back(k == 1 ? x[i] : pw[i].back() * x[i]);
      }
      T sum = detail::zero_like(x[0]);
      for (const auto& mono : data.monomials) {
        T term = detail::zero_like(x[0]) + mono.coeff;
        for (int i = 0; i < d; ++i)
          if (mono.exponent[i] > 0) term = term * pw[i][mono.exponent[i]];
        sum += term;
      }
      if (spec.kind() == FieldKind::monge_graph) return x[2] - sum;
      return sum;
    }
    case FieldKind::planar_harmonic: {
      auto [re, im] = detail::complex_polynomial(data.complex_coeffs, x[0], x[1]);
      return spec.param("part") == 0.0 ? re : im;
    }
    case FieldKind::conical_harmonic: {
      const T rho_xy = sqrt(x[0] * x[0] + x[1] * x[1]);
      const T r = sqrt(radius2());
      const T rho = rho_xy / (r + x[2]);  // tan(theta/2)
      const T azimuth = atan2(x[1], x[0]);
      const T X = rho * cos(azimuth);
      const T Y = rho * sin(azimuth);
      auto [re, im] = detail::complex_polynomial(data.complex_coeffs, X, Y);
      T h = spec.param("part") == 0.0 ? re : im;
      if (spec.param("log") != 0.0) h += spec.param("log") * log(rho);
      if (spec.param("arg") != 0.0) h += spec.param("arg") * azimuth;
      return h;
    }
    case FieldKind::charged_ellipsoid_potential: {
      const T xi = confocal_coordinate<T>(0, data.axes2, x);
      return apply(detail::charged_profile(data.axes2, scalar_value(xi)), xi);
    }
    case FieldKind::uniform_field_ellipsoid: {
      const auto& A = data.axes2;
      const T xi = confocal_coordinate<T>(0, A, x);
      const T eta = confocal_coordinate<T>(1, A, x);
      const T zeta = confocal_coordinate<T>(2, A, x);
      // |x| recovered from the confocal coordinates.
      const double denom = (A[1] - A[0]) * (A[2] - A[0]);
      const T abs_x = sqrt((xi + A[0]) * (eta + A[0]) * (zeta + A[0]) / denom);
      const double sign = scalar_value(x[0]) < 0.0 ? -1.0 : 1.0;
      const T shape = apply(detail::uniform_profile(A, data.uniform_norm, scalar_value(xi)), xi);
      return (-spec.param("E0") * sign) * (abs_x * shape);
    }
    case FieldKind::grounded_plate: {
      const double c = spec.param("c");
      T sum = detail::zero_like(x[0]);
      for (const auto& t : data.plate) {
        sum += t.coeff * (sin(t.kx * x[0]) * sin(t.ky * x[1]) * sinh(t.gamma * (c - x[2])));
      }
      return sum;
    }
    case FieldKind::p_harmonic_radial: {
      const double p = spec.param("p");
      if (p == static_cast<double>(d)) return 0.5 * log(radius2());
      return pow(radius2(), 0.5 * (p - d) / (p - 1.0));
    }
  }
  throw UsageError("unhandled field kind");
}

// ---------------------------------------------------------------------------
// Admissibility.

/// Distance-style test against the field's singular set; `margin` = 0 gives the
/// hard exclusion used by eval_field.
inline bool admissible(const FieldSpec& spec, const Point& p, double margin = 0.0) {
  if (p.dim() != spec.dim() || !p.finite()) return false;
  const double tiny = 1e-12;
  const double m = std::max(margin, tiny);
  switch (spec.kind()) {
    case FieldKind::sphere:
    case FieldKind::point_charge:
    case FieldKind::quadratic_ellipsoid:
    case FieldKind::p_harmonic_radial:
      return p.norm() >= m;
    case FieldKind::conical_harmonic: {
      const double r = p.norm();
      const double rho = std::hypot(p[0], p[1]);
      if (r < m || rho < m) return false;
      const double theta = std::acos(std::clamp(p[2] / r, -1.0, 1.0));
      return theta <= std::numbers::pi - spec.param("cone") - (margin > 0.0 ? margin / r : 0.0);
    }
    case FieldKind::charged_ellipsoid_potential:
    case FieldKind::uniform_field_ellipsoid:
      return std::abs(p[0]) >= m && std::abs(p[1]) >= m && std::abs(p[2]) >= m;
    case FieldKind::grounded_plate: {
      const double a = spec.param("a"), b = spec.param("b"), c = spec.param("c");
      const double slack = margin > 0.0 ? margin : -tiny;
      return p[0] >= slack && p[0] <= a - slack && p[1] >= slack && p[1] <= b - slack && p[2] >= slack &&
             p[2] <= c + tiny;
    }
    case FieldKind::monge_graph:
    case FieldKind::planar_harmonic:
    case FieldKind::random_polynomial:
      return true;
  }
  return false;
}

inline void check_point(const FieldSpec& spec, const Point& p) {
  if (p.dim() != spec.dim())
    throw UsageError("point dimension " + std::to_string(p.dim()) + " does not match field dimension " +
                     std::to_string(spec.dim()));
  if (!p.finite()) throw UsageError("point has non-finite coordinates");
  if (!admissible(spec, p))
    throw ExclusionViolation("point lies in the excluded set of " + spec.name() + " (" + spec.exclusion() + ")");
}

/// Jet of the field at a point, carrying derivatives up to `order`.
inline Jet3 eval_field(const FieldSpec& spec, const Point& p, int order = 3) {
  check_point(spec, p);
  auto seeds = jet_seeds(p);
  for (auto& s : seeds) s.truncate(order);
  return evaluate<Jet3>(spec, std::span<const Jet3>(seeds));
}

/// Plain value of the field at a point (no derivative propagation).
inline double field_value(const FieldSpec& spec, const Point& p) {
  check_point(spec, p);
  return evaluate<double>(spec, p.coords());
}

// ---------------------------------------------------------------------------

inline void FieldSpec::validate_and_prepare() {
  const FieldInfo& fi = *info_;
  if (dim_ < fi.min_dim || dim_ > fi.max_dim)
    throw UsageError(fi.name + " supports dimensions " + std::to_string(fi.min_dim) + ".." +
                     std::to_string(fi.max_dim) + ", got " + std::to_string(dim_));
  auto data = std::make_shared<detail::FieldData>();

  // Split parameters into fixed and indexed keys.
  std::map<std::string, double> indexed;
  for (const auto& [key, value] : params_) {
    const bool fixed = std::any_of(fi.params.begin(), fi.params.end(), [&](const auto& s) { return s.key == key; });
    if (!fixed) {
      if (fi.indexed_params.empty()) throw UsageError("unknown parameter for " + fi.name + ": " + key);
      indexed[key] = value;
    }
  }
  for (const auto& s : fi.params) params_.try_emplace(s.key, s.default_value);

  auto require = [&](bool ok, const std::string& what) {
    if (!ok) throw UsageError(fi.name + ": parameter constraint violated: " + what);
  };
  auto is_integer = [](double v) { return v == std::floor(v); };
  std::vector<int> digits;

  switch (fi.kind) {
    case FieldKind::quadratic_ellipsoid:
    case FieldKind::charged_ellipsoid_potential:
    case FieldKind::uniform_field_ellipsoid: {
      const double a = params_["a"], b = params_["b"], c = params_["c"];
      require(a > b && b > c && c > 0.0, "a > b > c > 0");
      data->axes2 = {a * a, b * b, c * c};
      if (fi.kind == FieldKind::uniform_field_ellipsoid) {
        require(params_["E0"] != 0.0, "E0 != 0");
        data->uniform_norm = detail::uniform_integral(data->axes2, 0.0);
      }
      break;
    }
    case FieldKind::monge_graph: {
      if (indexed.empty()) indexed = {{"f20", 0.5}, {"f02", 0.5}};
      for (const auto& [key, value] : indexed) {
        if (!detail::parse_index_key(key, "f", digits) || digits.size() != 2 || digits[0] + digits[1] > 6)
          throw UsageError("monge_graph: bad coefficient key " + key + " (expected f<i><j>, i+j <= 6)");
        detail::Monomial mono;
        mono.exponent[0] = digits[0];
        mono.exponent[1] = digits[1];
        mono.coeff = value;
        data->monomials.push_back(mono);
        data->max_power = std::max({data->max_power, digits[0], digits[1]});
        params_[key] = value;
      }
      break;
    }
    case FieldKind::planar_harmonic:
    case FieldKind::conical_harmonic: {
      require(params_["part"] == 0.0 || params_["part"] == 1.0, "part in {0, 1}");
      if (fi.kind == FieldKind::conical_harmonic)
        require(params_["cone"] > 0.0 && params_["cone"] < std::numbers::pi / 2.0, "0 < cone < pi/2");
      if (indexed.empty()) {
        if (fi.kind == FieldKind::planar_harmonic)
          indexed = {{"re1", 0.2}, {"re2", 1.0}, {"im3", 0.3}};
        else
          indexed = {{"re1", 1.0}, {"re2", 0.4}};
      }
      for (const auto& [key, value] : indexed) {
        const bool re = detail::parse_index_key(key, "re", digits);
        const bool im = !re && detail::parse_index_key(key, "im", digits);
        if ((!re && !im) || digits.size() != 1)
          throw UsageError(fi.name + ": bad coefficient key " + key + " (expected re<k> or im<k>, k <= 8)");
        const auto k = static_cast<std::size_t>(digits[0]);
        if (data->complex_coeffs.size() <= k) data->complex_coeffs.resize(k + 1);
        if (re)
          data->complex_coeffs[k].real(value);
        else
          data->complex_coeffs[k].imag(value);
        params_[key] = value;
      }
      break;
    }
    case FieldKind::grounded_plate: {
      const double a = params_["a"], b = params_["b"], c = params_["c"], L = params_["L"];
      require(a > 0.0 && b > 0.0 && c > 0.0, "a, b, c > 0");
      require(L >= 1.0 && L <= 9.0 && is_integer(L), "L integer in 1..9");
      for (const auto& [key, value] : indexed) {
        if (!detail::parse_index_key(key, "c", digits) || digits.size() != 2 || digits[0] < 1 || digits[1] < 1 ||
            digits[0] > L || digits[1] > L)
          throw UsageError("grounded_plate: bad coefficient key " + key + " (expected c<l><m>, 1 <= l,m <= L)");
      }
      for (int l = 1; l <= static_cast<int>(L); ++l)
        for (int m = 1; m <= static_cast<int>(L); ++m) {
          const std::string key = "c" + std::to_string(l) + std::to_string(m);
          const auto it = indexed.find(key);
          detail::PlateTerm t;
          t.l = l;
          t.m = m;
          t.coeff = it != indexed.end() ? it->second : 1.0 / (l * l + m * m);
          t.kx = l * std::numbers::pi / a;
          t.ky = m * std::numbers::pi / b;
          t.gamma = std::numbers::pi * std::sqrt(static_cast<double>(l * l) / (a * a) + static_cast<double>(m * m) / (b * b));
          if (t.coeff != 0.0) data->plate.push_back(t);
          params_[key] = t.coeff;
        }
      break;
    }
    case FieldKind::p_harmonic_radial:
      require(params_["p"] > 1.0, "p > 1");
      break;
    case FieldKind::random_polynomial: {
      const double seed = params_["seed"], degree = params_["degree"];
      require(seed >= 0.0 && is_integer(seed), "seed integer >= 0");
      require(degree >= 1.0 && degree <= 4.0 && is_integer(degree), "degree integer in 1..4");
      const int deg = static_cast<int>(degree);
      detail::Rng rng(static_cast<std::uint64_t>(seed) * 0x9E3779B97F4A7C15ULL + 17);
      // Graded enumeration of exponent vectors with total degree <= deg.
      std::array<int, kMaxDim> e{};
      auto recurse = [&](auto&& self, int var, int remaining) -> void {
        if (var == dim_) {
          detail::Monomial mono;
          mono.exponent = e;
          mono.coeff = rng.uniform(-1.0, 1.0);
          data->monomials.push_back(mono);
          return;
        }
        for (int k = 0; k <= remaining; ++k) {
          e[var] = k;
          self(self, var + 1, remaining - k);
        }
        e[var] = 0;
      };
      recurse(recurse, 0, deg);
      data->max_power = deg;
      break;
    }
    case FieldKind::sphere:
    case FieldKind::point_charge:
      break;
  }
  data_ = std::move(data);
}

// ---------------------------------------------------------------------------
// Sampling.

/// Where sample points are drawn from.
struct Region {
  enum class Kind { box, shell, surface, face };
  Kind kind = Kind::box;
  std::vector<double> lo, hi;  // box bounds per coordinate
  double rmin = 0.0, rmax = 0.0;

  static Region box(std::vector<double> lo, std::vector<double> hi) {
    Region r;
    r.kind = Kind::box;
    r.lo = std::move(lo);
    r.hi = std::move(hi);
    return r;
  }
  static Region shell(double rmin, double rmax) {
    Region r;
    r.kind = Kind::shell;
    r.rmin = rmin;
    r.rmax = rmax;
    return r;
  }
  static Region surface() {
    Region r;
    r.kind = Kind::surface;
    return r;
  }
  static Region face() {
    Region r;
    r.kind = Kind::face;
    return r;
  }

  /// "box:lo,hi" (every coordinate), "box:lo0,hi0,lo1,hi1,...", "shell:rmin,rmax",
  /// "surface" (ellipsoid fields: the surface sum x_i^2/a_i^2 = 1) or "face" (grounded_plate: z = c).
  static Region parse(std::string_view text, int dim) {
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    std::vector<double> nums;
    if (colon != std::string_view::npos) {
      std::string_view rest = text.substr(colon + 1);
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view tok = rest.substr(0, comma);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
          throw UsageError("malformed region: " + std::string(text));
        nums.push_back(v);
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
    }
    if (head == "shell") {
      if (nums.size() != 2 || !(nums[0] > 0.0) || !(nums[1] > nums[0]))
        throw UsageError("shell region needs 0 < rmin < rmax: " + std::string(text));
      return shell(nums[0], nums[1]);
    }
    if (head == "box") {
      std::vector<double> lo, hi;
      if (nums.size() == 2) {
        lo.assign(static_cast<std::size_t>(dim), nums[0]);
        hi.assign(static_cast<std::size_t>(dim), nums[1]);
      } else if (nums.size() == static_cast<std::size_t>(2 * dim)) {
        for (int i = 0; i < dim; ++i) {
          lo.push_back(nums[2 * i]);
          hi.push_back(nums[2 * i + 1]);
        }
      } else {
        throw UsageError("box region needs 2 or 2*dim bounds: " + std::string(text));
      }
      for (int i = 0; i < dim; ++i)
        if (!(hi[i] > lo[i])) throw UsageError("box region has empty extent: " + std::string(text));
      return box(std::move(lo), std::move(hi));
    }
    if (head == "surface" && nums.empty()) return surface();
    if (head == "face" && nums.empty()) return face();
    throw UsageError("unknown region: " + std::string(text));
  }
};

inline Region default_region(const FieldSpec& spec) { return Region::parse(spec.info().default_region, spec.dim()); }

inline double region_diameter(const FieldSpec& spec, const Region& region) {
  switch (region.kind) {
    case Region::Kind::shell:
      return 2.0 * region.rmax;
    case Region::Kind::box: {
      double s = 0.0;
      for (std::size_t i = 0; i < region.lo.size(); ++i) s += (region.hi[i] - region.lo[i]) * (region.hi[i] - region.lo[i]);
      return std::sqrt(s);
    }
    case Region::Kind::surface:
      return 2.0 * std::sqrt(spec.data().axes2[0]);
    case Region::Kind::face:
      return std::hypot(spec.param("a"), spec.param("b"));
  }
  return 1.0;
}

/// Deterministic seeded sample of admissible points. Points within
/// `margin_fraction` x region diameter of the exclusion set, or where
/// |grad psi| < spec.min_strength(), are rejected.
inline std::vector<Point> sample_points(const FieldSpec& spec, int count, std::uint64_t seed, const Region& region,
                                        double margin_fraction = 0.05) {
  if (count < 0) throw UsageError("sample count must be non-negative");
  const int d = spec.dim();
  const bool ellipsoidal = spec.kind() == FieldKind::quadratic_ellipsoid ||
                           spec.kind() == FieldKind::charged_ellipsoid_potential ||
                           spec.kind() == FieldKind::uniform_field_ellipsoid;
  if (region.kind == Region::Kind::surface && !ellipsoidal)
    throw UsageError("surface region is only defined for ellipsoid fields");
  if (region.kind == Region::Kind::face && spec.kind() != FieldKind::grounded_plate)
    throw UsageError("face region is only defined for grounded_plate");
  if (region.kind == Region::Kind::box && static_cast<int>(region.lo.size()) != d)
    throw UsageError("box region dimension does not match the field");

  const double margin = margin_fraction * region_diameter(spec, region);
  detail::Rng rng(seed);
  auto direction = [&] {
    std::array<double, kMaxDim> v{};
    double n = 0.0;
    while (n < 1e-8) {
      n = 0.0;
      for (int i = 0; i < d; ++i) {
        v[i] = rng.normal();
        n += v[i] * v[i];
      }
      n = std::sqrt(n);
    }
    for (int i = 0; i < d; ++i) v[i] /= n;
    return v;
  };
  auto draw = [&]() -> Point {
    Point p = Point::zeros(d);
    switch (region.kind) {
      case Region::Kind::box:
        for (int i = 0; i < d; ++i) p[i] = rng.uniform(region.lo[i], region.hi[i]);
        break;
      case Region::Kind::shell: {
        const auto v = direction();
        const double r = rng.uniform(region.rmin, region.rmax);
        for (int i = 0; i < d; ++i) p[i] = r * v[i];
        break;
      }
      case Region::Kind::surface: {
        const auto v = direction();
        for (int i = 0; i < 3; ++i) p[i] = std::sqrt(spec.data().axes2[i]) * v[i];
        break;
      }
      case Region::Kind::face:
        p[0] = rng.uniform(margin, spec.param("a") - margin);
        p[1] = rng.uniform(margin, spec.param("b") - margin);
        p[2] = spec.param("c");
        break;
    }
    return p;
  };
  auto accept = [&](const Point& p) {
    if (!admissible(spec, p, margin)) return false;
    if (spec.kind() == FieldKind::grounded_plate && region.kind == Region::Kind::box &&
        p[2] > spec.param("c") - margin)
      return false;
    try {
      const Jet3 j = eval_field(spec, p);
      double f2 = 0.0;
      for (int i = 0; i < d; ++i) f2 += j.grad(i) * j.grad(i);
      return std::sqrt(f2) >= spec.min_strength() && j.finite();
    } catch (const Error&) {
      return false;
    }
  };

  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  const long max_attempts = 2000L * count + 1000L;
  for (long attempt = 0; static_cast<int>(out.size()) < count; ++attempt) {
    if (attempt >= max_attempts)
      throw Error("empty feasible region: only " + std::to_string(out.size()) + " of " + std::to_string(count) +
                  " admissible points found for " + spec.name());
    Point p = draw();
    if (accept(p)) out.push_back(p);
  }
  return out;
}

}  // namespace levelset
