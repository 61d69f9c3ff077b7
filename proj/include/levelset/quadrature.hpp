#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "levelset/error.hpp"

namespace levelset::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
inline Rule gauss_legendre(int n) {
  if (n < 1) throw UsageError("gauss_legendre: order must be positive");
  const std::vector<double> positive = boost::math::legendre_p_zeros<double>(n);
  Rule rule;
  for (double x : positive) {
    const double dp = boost::math::legendre_p_prime(n, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
    if (x != 0.0) {
      rule.nodes.push_back(-x);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

/// Gauss-Legendre rule mapped to [lo, hi].
inline Rule gauss_legendre(int n, double lo, double hi) {
  Rule r = gauss_legendre(n);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    r.nodes[i] = mid + half * r.nodes[i];
    r.weights[i] *= half;
  }
  return r;
}

/// Adaptive 61-point Gauss-Kronrod on a finite interval.
template <class F>
double integrate(F&& f, double lo, double hi, double tol = 1e-12) {
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, tol, &error);
  if (!std::isfinite(value)) throw DomainError("integrate", "non-finite quadrature result");
  return value;
}

/// Integral of f over [lower, +inf) via s = lower + tan^2(u), u in [0, pi/2].
/// `f` must decay at least like s^(-3/2) for the mapped integrand to stay bounded.
template <class F>
double integrate_to_infinity(F&& f, double lower, double tol = 1e-12) {
  auto mapped = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double t = std::tan(u);
    const double s = lower + t * t;
    return f(s) * 2.0 * t * (1.0 + t * t);
  };
  return integrate(mapped, 0.0, std::numbers::pi / 2.0, tol);
}

}  // namespace levelset::quadrature
