#pragma once

// Taylor-mode derivative propagation to third order.
//
// A Jet3 carries the value of a scalar function at a point together with its
// gradient, Hessian and third-derivative tensor with respect to the ambient
// coordinates. Hessian and third tensor are stored once per sorted index tuple,
// so symmetry holds by construction.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "levelset/error.hpp"

namespace levelset {

/// Largest supported jet dimension: six ambient coordinates plus one slot for the
/// implicit variable of jointly differentiated root equations.
inline constexpr int kMaxDim = 7;

namespace detail {

inline constexpr int kHessSize = kMaxDim * (kMaxDim + 1) / 2;
inline constexpr int kThirdSize = kMaxDim * (kMaxDim + 1) * (kMaxDim + 2) / 6;

struct IndexTables {
  std::array<std::array<int, kMaxDim>, kMaxDim> pair{};
  std::array<std::array<std::array<int, kMaxDim>, kMaxDim>, kMaxDim> triple{};
};

// Colex packing: the entries of a dim-d jet occupy the first hess_size(d) and
// third_size(d) slots.
constexpr int hess_size(int d) { return d * (d + 1) / 2; }
constexpr int third_size(int d) { return d * (d + 1) * (d + 2) / 6; }

constexpr IndexTables make_index_tables() {
  IndexTables t{};
  for (int a = 0; a < kMaxDim; ++a)
    for (int b = a; b < kMaxDim; ++b) {
      t.pair[a][b] = t.pair[b][a] = hess_size(b) + a;
      for (int c = b; c < kMaxDim; ++c) {
        const int n = third_size(c) + hess_size(b) + a;
        t.triple[a][b][c] = t.triple[a][c][b] = t.triple[b][a][c] = n;
        t.triple[b][c][a] = t.triple[c][a][b] = t.triple[c][b][a] = n;
      }
    }
  return t;
}

inline constexpr IndexTables kIndex = make_index_tables();

}  // namespace detail

/// A point of the ambient Euclidean space (coordinates x0..x{d-1}).
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<double> coords) : Point(std::span<const double>(coords.begin(), coords.size())) {}
  explicit Point(std::span<const double> coords) : dim_(static_cast<int>(coords.size())) {
    if (dim_ < 1 || dim_ > kMaxDim) throw UsageError("point dimension out of range: " + std::to_string(dim_));
    std::copy(coords.begin(), coords.end(), x_.begin());
  }
  static Point zeros(int dim) {
    std::array<double, kMaxDim> z{};
    return Point(std::span<const double>(z.data(), static_cast<std::size_t>(dim)));
  }

  int dim() const noexcept { return dim_; }
  double operator[](int i) const { return x_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return x_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const noexcept { return {x_.data(), static_cast<std::size_t>(dim_)}; }

  double norm() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += x_[i] * x_[i];
    return std::sqrt(s);
  }
  bool finite() const {
    return std::all_of(x_.begin(), x_.begin() + dim_, [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const Point& a, const Point& b) {
    return a.dim_ == b.dim_ && std::equal(a.x_.begin(), a.x_.begin() + a.dim_, b.x_.begin());
  }

 private:
  std::array<double, kMaxDim> x_{};
  int dim_ = 0;
};

/// Value and first three derivatives of a function of one real variable.
struct Curve1Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

/// Value plus partial derivatives of orders 1..3 at a point.
///
/// `order()` records how many derivative orders are meaningful; quantities
/// derived from a jet's own derivatives (|grad psi|, say) lose one order each
/// time and the truncated entries are held at zero.
class Jet3 {
 public:
  Jet3() = default;
  explicit Jet3(int dim, double value = 0.0, int order = 3) : dim_(dim), order_(order), value_(value) {
    if (dim < 1 || dim > kMaxDim) throw UsageError("jet dimension out of range: " + std::to_string(dim));
    if (order < 0 || order > 3) throw UsageError("jet order out of range: " + std::to_string(order));
  }

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }

  double value() const noexcept { return value_; }
  double& value() noexcept { return value_; }

  double grad(int i) const { return grad_[static_cast<std::size_t>(i)]; }
  double& grad(int i) { return grad_[static_cast<std::size_t>(i)]; }

  double hess(int i, int j) const { return hess_[detail::kIndex.pair[i][j]]; }
  double& hess(int i, int j) { return hess_[detail::kIndex.pair[i][j]]; }

  double third(int i, int j, int k) const { return third_[detail::kIndex.triple[i][j][k]]; }
  double& third(int i, int j, int k) { return third_[detail::kIndex.triple[i][j][k]]; }

  double laplacian() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += hess(i, i);
    return s;
  }

  /// Drops derivative orders above `order` (they are zeroed).
  void truncate(int order) {
    if (order >= order_) return;
    order_ = std::max(order, 0);
    if (order_ < 3) third_.fill(0.0);
    if (order_ < 2) hess_.fill(0.0);
    if (order_ < 1) grad_.fill(0.0);
  }

  bool finite() const {
    if (!std::isfinite(value_)) return false;
    for (int i = 0; i < dim_; ++i) {
      if (!std::isfinite(grad(i))) return false;
      for (int j = i; j < dim_; ++j) {
        if (!std::isfinite(hess(i, j))) return false;
        for (int k = j; k < dim_; ++k)
          if (!std::isfinite(third(i, j, k))) return false;
      }
    }
    return true;
  }

  Jet3& operator+=(const Jet3& b);
  Jet3& operator-=(const Jet3& b);
  Jet3& operator*=(double s);
  Jet3& operator+=(double c) {
    value_ += c;
    return *this;
  }
  Jet3& operator-=(double c) {
    value_ -= c;
    return *this;
  }

 private:
  int dim_ = 1;
  int order_ = 3;
  double value_ = 0.0;
  std::array<double, kMaxDim> grad_{};
  std::array<double, detail::kHessSize> hess_{};
  std::array<double, detail::kThirdSize> third_{};
};

namespace detail {

inline void require_same_dim(const Jet3& a, const Jet3& b) {
  if (a.dim() != b.dim())
    throw UsageError("jet dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
}

// Visits every stored (sorted) index pair / triple of a dim-d jet.
template <class Fn>
void for_pairs(int d, Fn&& fn) {
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) fn(i, j);
}

template <class Fn>
void for_triples(int d, Fn&& fn) {
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      for (int k = j; k < d; ++k) fn(i, j, k);
}

}  // namespace detail

inline Jet3& Jet3::operator+=(const Jet3& b) {
  detail::require_same_dim(*this, b);
  truncate(b.order_);
  value_ += b.value_;
  for (int i = 0; i < dim_; ++i) grad_[i] += b.grad_[i];
  if (order_ >= 2)
    for (int n = 0; n < detail::hess_size(dim_); ++n) hess_[n] += b.hess_[n];
  if (order_ >= 3)
    for (int n = 0; n < detail::third_size(dim_); ++n) third_[n] += b.third_[n];
  return *this;
}

inline Jet3& Jet3::operator-=(const Jet3& b) {
  detail::require_same_dim(*this, b);
  truncate(b.order_);
  value_ -= b.value_;
  for (int i = 0; i < dim_; ++i) grad_[i] -= b.grad_[i];
  if (order_ >= 2)
    for (int n = 0; n < detail::hess_size(dim_); ++n) hess_[n] -= b.hess_[n];
  if (order_ >= 3)
    for (int n = 0; n < detail::third_size(dim_); ++n) third_[n] -= b.third_[n];
  return *this;
}

inline Jet3& Jet3::operator*=(double s) {
  value_ *= s;
  for (int i = 0; i < dim_; ++i) grad_[i] *= s;
  for (int n = 0; n < detail::hess_size(dim_); ++n) hess_[n] *= s;
  for (int n = 0; n < detail::third_size(dim_); ++n) third_[n] *= s;
  return *this;
}

/// Jet of the coordinate function x_index at `point`.
inline Jet3 jet_seed(const Point& point, int index) {
  if (index < 0 || index >= point.dim())
    throw UsageError("seed index " + std::to_string(index) + " out of range for dimension " +
                     std::to_string(point.dim()));
  Jet3 j(point.dim(), point[index]);
  j.grad(index) = 1.0;
  return j;
}

/// All coordinate jets of `point`, in order.
inline std::vector<Jet3> jet_seeds(const Point& point) {
  std::vector<Jet3> out;
  out.reserve(static_cast<std::size_t>(point.dim()));
  for (int i = 0; i < point.dim(); ++i) out.push_back(jet_seed(point, i));
  return out;
}

inline Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
inline Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
inline Jet3 operator+(Jet3 a, double c) { return a += c; }
inline Jet3 operator+(double c, Jet3 a) { return a += c; }
inline Jet3 operator-(Jet3 a, double c) { return a -= c; }
inline Jet3 operator-(double c, Jet3 a) {
  a *= -1.0;
  return a += c;
}
inline Jet3 operator-(Jet3 a) { return a *= -1.0; }
inline Jet3 operator*(Jet3 a, double s) { return a *= s; }
inline Jet3 operator*(double s, Jet3 a) { return a *= s; }

/// Leibniz rule to third order.
inline Jet3 operator*(const Jet3& a, const Jet3& b) {
  detail::require_same_dim(a, b);
  const int d = a.dim();
  Jet3 c(d, a.value() * b.value(), std::min(a.order(), b.order()));
  const double a0 = a.value();
  const double b0 = b.value();
  for (int i = 0; i < d; ++i) c.grad(i) = a0 * b.grad(i) + a.grad(i) * b0;
  if (c.order() >= 2)
    detail::for_pairs(d, [&](int i, int j) {
      c.hess(i, j) = a0 * b.hess(i, j) + a.grad(i) * b.grad(j) + a.grad(j) * b.grad(i) + a.hess(i, j) * b0;
    });
  if (c.order() >= 3)
    detail::for_triples(d, [&](int i, int j, int k) {
      c.third(i, j, k) = a0 * b.third(i, j, k) + a.third(i, j, k) * b0 +
                         a.grad(i) * b.hess(j, k) + a.grad(j) * b.hess(i, k) + a.grad(k) * b.hess(i, j) +
                         a.hess(j, k) * b.grad(i) + a.hess(i, k) * b.grad(j) + a.hess(i, j) * b.grad(k);
    });
  c.truncate(c.order());
  return c;
}

inline Jet3& operator*=(Jet3& a, const Jet3& b) { return a = a * b; }

/// Faa di Bruno to third order: the jet of g(u(x)) given g and its derivatives at u.value().
inline Jet3 compose(const Curve1Jet& g, const Jet3& u) {
  const int d = u.dim();
  Jet3 c(d, g.value, u.order());
  for (int i = 0; i < d; ++i) c.grad(i) = g.d1 * u.grad(i);
  if (c.order() >= 2)
    detail::for_pairs(d, [&](int i, int j) { c.hess(i, j) = g.d1 * u.hess(i, j) + g.d2 * u.grad(i) * u.grad(j); });
  if (c.order() >= 3)
    detail::for_triples(d, [&](int i, int j, int k) {
      c.third(i, j, k) = g.d1 * u.third(i, j, k) +
                         g.d2 * (u.grad(i) * u.hess(j, k) + u.grad(j) * u.hess(i, k) + u.grad(k) * u.hess(i, j)) +
                         g.d3 * u.grad(i) * u.grad(j) * u.grad(k);
    });
  c.truncate(c.order());
  return c;
}

/// Multivariate chain rule: `f` is a jet in m variables evaluated at the values of
/// the m `inputs`, each a jet in the same d variables. Returns the jet of f(inputs(x)).
inline Jet3 compose(const Jet3& f, std::span<const Jet3> inputs) {
  const int m = f.dim();
  if (static_cast<int>(inputs.size()) != m)
    throw UsageError("compose: expected " + std::to_string(m) + " inputs, got " + std::to_string(inputs.size()));
  const int d = inputs.front().dim();
  int order = f.order();
  for (const auto& u : inputs) {
    if (u.dim() != d) throw UsageError("compose: inputs differ in dimension");
    order = std::min(order, u.order());
  }
  Jet3 c(d, f.value(), order);
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int a = 0; a < m; ++a) s += f.grad(a) * inputs[a].grad(i);
    c.grad(i) = s;
  }
  if (order >= 2)
    detail::for_pairs(d, [&](int i, int j) {
      double s = 0.0;
      for (int a = 0; a < m; ++a) {
        s += f.grad(a) * inputs[a].hess(i, j);
        for (int b = 0; b < m; ++b) s += f.hess(a, b) * inputs[a].grad(i) * inputs[b].grad(j);
      }
      c.hess(i, j) = s;
    });
  if (order >= 3)
    detail::for_triples(d, [&](int i, int j, int k) {
      double s = 0.0;
      for (int a = 0; a < m; ++a) {
        const Jet3& ua = inputs[a];
        s += f.grad(a) * ua.third(i, j, k);
        for (int b = 0; b < m; ++b) {
          const Jet3& ub = inputs[b];
          s += f.hess(a, b) * (ua.hess(i, j) * ub.grad(k) + ua.hess(i, k) * ub.grad(j) + ua.hess(j, k) * ub.grad(i));
          for (int e = 0; e < m; ++e) s += f.third(a, b, e) * ua.grad(i) * ub.grad(j) * inputs[e].grad(k);
        }
      }
      c.third(i, j, k) = s;
    });
  c.truncate(order);
  return c;
}

// ---------------------------------------------------------------------------
// Elementary functions as one-variable jets.

namespace curves {

inline Curve1Jet identity(double x) { return {x, 1.0, 0.0, 0.0}; }

inline Curve1Jet exp(double x) {
  const double e = std::exp(x);
  return {e, e, e, e};
}

inline Curve1Jet log(double x) {
  if (!(x > 0.0)) throw DomainError("log", "argument must be positive, got " + std::to_string(x));
  const double r = 1.0 / x;
  return {std::log(x), r, -r * r, 2.0 * r * r * r};
}

inline Curve1Jet sqrt(double x) {
  if (!(x > 0.0)) throw DomainError("sqrt", "argument must be positive, got " + std::to_string(x));
  const double s = std::sqrt(x);
  return {s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)};
}

inline Curve1Jet reciprocal(double x) {
  if (x == 0.0) throw DomainError("divide", "division by zero value");
  const double r = 1.0 / x;
  return {r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r};
}

inline Curve1Jet sin(double x) {
  const double s = std::sin(x), c = std::cos(x);
  return {s, c, -s, -c};
}

inline Curve1Jet cos(double x) {
  const double s = std::sin(x), c = std::cos(x);
  return {c, -s, -c, s};
}

inline Curve1Jet sinh(double x) {
  const double s = std::sinh(x), c = std::cosh(x);
  return {s, c, s, c};
}

inline Curve1Jet cosh(double x) {
  const double s = std::sinh(x), c = std::cosh(x);
  return {c, s, c, s};
}

inline Curve1Jet atan(double x) {
  const double q = 1.0 / (1.0 + x * x);
  return {std::atan(x), q, -2.0 * x * q * q, (6.0 * x * x - 2.0) * q * q * q};
}

/// x^a for real a; x must be positive unless a is a non-negative integer.
inline Curve1Jet pow(double x, double a) {
  const bool integral = a == std::floor(a);
  if (x < 0.0 && !integral) throw DomainError("pow", "negative base with non-integer exponent");
  if (x == 0.0 && a < 3.0 && !(integral && a >= 0.0))
    throw DomainError("pow", "zero base with exponent " + std::to_string(a));
  auto term = [&](double coeff, double e) { return coeff == 0.0 ? 0.0 : coeff * std::pow(x, e); };
  return {std::pow(x, a), term(a, a - 1.0), term(a * (a - 1.0), a - 2.0),
          term(a * (a - 1.0) * (a - 2.0), a - 3.0)};
}

}  // namespace curves

inline Jet3 exp(const Jet3& u) { return compose(curves::exp(u.value()), u); }
inline Jet3 log(const Jet3& u) { return compose(curves::log(u.value()), u); }
inline Jet3 sqrt(const Jet3& u) { return compose(curves::sqrt(u.value()), u); }
inline Jet3 sin(const Jet3& u) { return compose(curves::sin(u.value()), u); }
inline Jet3 cos(const Jet3& u) { return compose(curves::cos(u.value()), u); }
inline Jet3 sinh(const Jet3& u) { return compose(curves::sinh(u.value()), u); }
inline Jet3 cosh(const Jet3& u) { return compose(curves::cosh(u.value()), u); }
inline Jet3 atan(const Jet3& u) { return compose(curves::atan(u.value()), u); }
inline Jet3 pow(const Jet3& u, double a) { return compose(curves::pow(u.value(), a), u); }
inline Jet3 reciprocal(const Jet3& u) { return compose(curves::reciprocal(u.value()), u); }

inline Jet3 operator/(const Jet3& a, const Jet3& b) {
  detail::require_same_dim(a, b);
  return a * reciprocal(b);
}
inline Jet3 operator/(Jet3 a, double s) {
  if (s == 0.0) throw DomainError("divide", "division by zero value");
  return a *= 1.0 / s;
}
inline Jet3 operator/(double c, const Jet3& b) { return c * reciprocal(b); }

/// Two-argument arctangent. Partials follow from theta = Im log(x + i y):
/// d^a/dx^a d^b/dy^b theta = Im[ i^b (-1)^(n-1) (n-1)! / z^n ],  n = a + b.
inline Jet3 atan2(const Jet3& y, const Jet3& x) {
  detail::require_same_dim(y, x);
  const double y0 = y.value(), x0 = x.value();
  if (x0 == 0.0 && y0 == 0.0) throw DomainError("atan2", "both arguments are zero");
  const std::complex<double> z(x0, y0);
  // Variable 0 is y, variable 1 is x.
  auto partial = [&](int ny, int nx) {
    const int n = nx + ny;
    double fact = 1.0;
    for (int k = 2; k < n; ++k) fact *= k;
    std::complex<double> ib(1.0, 0.0);
    for (int k = 0; k < ny; ++k) ib *= std::complex<double>(0.0, 1.0);
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;
    return (ib * (sign * fact) / std::pow(z, n)).imag();
  };
  Jet3 f(2, std::atan2(y0, x0));
  f.grad(0) = partial(1, 0);
  f.grad(1) = partial(0, 1);
  f.hess(0, 0) = partial(2, 0);
  f.hess(0, 1) = partial(1, 1);
  f.hess(1, 1) = partial(0, 2);
  f.third(0, 0, 0) = partial(3, 0);
  f.third(0, 0, 1) = partial(2, 1);
  f.third(0, 1, 1) = partial(1, 2);
  f.third(1, 1, 1) = partial(0, 3);
  const std::array<Jet3, 2> in{y, x};
  return compose(f, in);
}

// ---------------------------------------------------------------------------
// Implicit roots t(x) of g(t, x) = 0.

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct RootOptions {
  double tol = 1e-13;          // on |g| at the returned root
  int max_iterations = 80;
  double degeneracy = 1e-10;   // |dg/dt| floor relative to |grad g|
};

namespace detail {

// Bisection to a narrow bracket, then Newton (or false-position when the slope is
// unavailable) kept inside the bracket. `eval(t)` returns {g, dg/dt}; dg/dt may be NaN.
template <class Eval>
double bracketed_root(Eval&& eval, Bracket br, const RootOptions& opt) {
  double lo = br.lo, hi = br.hi;
  auto [flo, slo] = eval(lo);
  auto [fhi, shi] = eval(hi);
  (void)slo;
  (void)shi;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!(std::signbit(flo) != std::signbit(fhi)) || !std::isfinite(flo) || !std::isfinite(fhi))
    throw RootError("no sign change on bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");

  const double width0 = hi - lo;
  int it = 0;
  // Coarse bisection phase.
  for (; it < opt.max_iterations / 2 && (hi - lo) > 1e-4 * width0; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = eval(mid).first;
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  double t = 0.5 * (lo + hi);
  for (; it < opt.max_iterations; ++it) {
    auto [f, slope] = eval(t);
    if (std::abs(f) <= opt.tol) return t;
    if (std::signbit(f) == std::signbit(flo)) {
      lo = t;
      flo = f;
    } else {
      hi = t;
      fhi = f;
    }
    double next = std::isfinite(slope) && slope != 0.0 ? t - f / slope : (lo * fhi - hi * flo) / (fhi - flo);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)))
      return t;  // round-off floor reached
    t = next;
  }
  const double f = eval(t).first;
  if (std::abs(f) <= opt.tol || hi - lo <= 1e-12 * std::max(1.0, std::abs(t))) return t;
  throw RootError("root solve did not converge (|g| = " + std::to_string(f) + ")");
}

}  // namespace detail

/// Value-only root of g(t, x) = 0 on the bracket. `g` is called as g(double, span<const double>).
template <class G>
double implicit_root_value(G&& g, std::span<const double> x, Bracket br, const RootOptions& opt = {}) {
  auto eval = [&](double t) {
    return std::pair<double, double>{g(t, x), std::numeric_limits<double>::quiet_NaN()};
  };
  return detail::bracketed_root(eval, br, opt);
}

/// Jet of t(x) defined by g(t(x), x) = 0, differentiated through the input jets `x`.
///
/// `g` is called as g(Jet3, span<const Jet3>): with one-variable jets in t for the
/// Newton slope, then with joint jets in (t, x) so that its partials in t and x
/// are available together. Derivatives come from solving the differentiated
/// relation order by order; each order is linear in the unknown with coefficient dg/dt.
template <class G>
Jet3 implicit_root(G&& g, std::span<const Jet3> x, Bracket br, const RootOptions& opt = {}) {
  const int m = static_cast<int>(x.size());
  if (m < 1 || m + 1 > kMaxDim) throw UsageError("implicit_root: unsupported number of inputs");
  std::vector<double> xv(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) xv[i] = x[i].value();

  // Newton slope from a one-variable jet in t.
  std::vector<Jet3> xc(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) xc[i] = Jet3(1, xv[i], 1);
  auto eval = [&](double t) {
    Jet3 tj(1, t, 1);
    tj.grad(0) = 1.0;
    const Jet3 gv = g(tj, std::span<const Jet3>(xc));
    return std::pair<double, double>{gv.value(), gv.grad(0)};
  };
  const double root = detail::bracketed_root(eval, br, opt);

  // Joint jet of g in (t, x0..x{m-1}).
  std::array<double, kMaxDim> joint{};
  joint[0] = root;
  std::copy(xv.begin(), xv.end(), joint.begin() + 1);
  const Point jp(std::span<const double>(joint.data(), static_cast<std::size_t>(m + 1)));
  std::vector<Jet3> jx;
  jx.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) jx.push_back(jet_seed(jp, i + 1));
  const Jet3 gj = g(jet_seed(jp, 0), std::span<const Jet3>(jx));

  const double gt = gj.grad(0);
  double scale = 0.0;
  for (int i = 0; i <= m; ++i) scale += gj.grad(i) * gj.grad(i);
  scale = std::sqrt(scale);
  if (!(std::abs(gt) >= opt.degeneracy * scale) || scale == 0.0)
    throw RootError("implicit root is degenerate: |dg/dt| = " + std::to_string(std::abs(gt)) +
                    " below threshold (coordinate degeneracy)");

  // t as a jet in the m local variables, solved one order at a time.
  const Point xp(std::span<const double>(xv.data(), xv.size()));
  std::vector<Jet3> lift;
  lift.reserve(static_cast<std::size_t>(m + 1));
  lift.emplace_back(m, root);
  for (int i = 0; i < m; ++i) lift.push_back(jet_seed(xp, i));
  Jet3& tj = lift[0];
  for (int i = 0; i < m; ++i) tj.grad(i) = -gj.grad(i + 1) / gt;
  {
    const Jet3 c = compose(gj, lift);
    detail::for_pairs(m, [&](int i, int j) { tj.hess(i, j) = -c.hess(i, j) / gt; });
  }
  {
    const Jet3 c = compose(gj, lift);
    detail::for_triples(m, [&](int i, int j, int k) { tj.third(i, j, k) = -c.third(i, j, k) / gt; });
  }
  return compose(tj, x);
}

/// Convenience overload for a point: the inputs are the coordinate jets.
template <class G>
Jet3 implicit_root(G&& g, const Point& point, Bracket br, const RootOptions& opt = {}) {
  const auto seeds = jet_seeds(point);
  return implicit_root(std::forward<G>(g), std::span<const Jet3>(seeds), br, opt);
}

// ---------------------------------------------------------------------------
// Helpers for code templated over the scalar type (double or Jet3).

inline double scalar_value(double x) { return x; }
inline double scalar_value(const Jet3& x) { return x.value(); }

/// Applies a one-variable function given as a Curve1Jet evaluated at t's value.
inline double apply(const Curve1Jet& g, double) { return g.value; }
inline Jet3 apply(const Curve1Jet& g, const Jet3& t) { return compose(g, t); }

}  // namespace levelset
