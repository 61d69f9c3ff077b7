#pragma once

// Central finite-difference derivative oracle. It only ever calls a plain
// value evaluator, so it shares no derivative code with the jet machinery.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "levelset/error.hpp"
#include "levelset/fields.hpp"
#include "levelset/jet.hpp"

namespace levelset {

struct FDConfig {
  double h = 1e-3;        // step for orders 1-2, scaled by 1 + |point|
  double h_third = 1e-2;  // step for order 3, scaled by 1 + |point|
  int richardson_levels = 2;
  double value_noise = 0.0;  // absolute noise of the evaluator beyond round-off
};

struct FDJet {
  Jet3 jet;
  std::array<double, 4> error{};  // largest estimated error per derivative order (index 0 unused)
  Jet3 error_jet;                 // per-entry error estimates, same layout as `jet`
};

namespace detail {

// One derivative entry at every level h, h/2, h/4, ...
template <class Fn>
std::pair<double, double> richardson(Fn&& at_step, double h, int levels) {
  const int n = levels + 1;
  std::vector<std::vector<double>> t(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    t[l].push_back(at_step(h / std::pow(2.0, l)));
    for (int m = 1; m <= l; ++m) {
      const double f = std::pow(4.0, m);
      t[l].push_back(t[l][m - 1] + (t[l][m - 1] - t[l - 1][m - 1]) / (f - 1.0));
    }
  }
  // Result uses `levels` step sizes; the extra level only estimates its error.
  const double result = t[levels - 1][levels - 1];
  const double better = t[levels][levels];
  return {result, std::abs(better - result)};
}

}  // namespace detail

/// Finite-difference jet of `f` at `p`. Gradient and Hessian use 2nd-order central
/// stencils with step h, third derivatives use 2nd-order stencils with step h_third,
/// each refined by Richardson extrapolation over `richardson_levels` halvings.
template <class Eval>
FDJet fd_jet(Eval&& f, const Point& p, const FDConfig& cfg = {}) {
  if (!(cfg.h > 0.0) || !(cfg.h_third > 0.0)) throw UsageError("fd_jet: steps must be positive");
  if (cfg.richardson_levels < 1 || cfg.richardson_levels > 4) throw UsageError("fd_jet: levels must be 1..4");
  const int d = p.dim();
  const double scale = 1.0 + p.norm();
  const double h12 = cfg.h * scale, h3 = cfg.h_third * scale;
  const double f0 = f(p);

  auto at = [&](std::initializer_list<std::pair<int, double>> shifts) {
    Point q = p;
    for (const auto& [i, s] : shifts) q[i] += s;
    return f(q);
  };

  FDJet out;
  out.jet = Jet3(d, f0);
  out.error_jet = Jet3(d, 0.0);
  double magnitude = std::abs(f0);
  auto note = [&](double v) { magnitude = std::max(magnitude, std::abs(v)); };
  const double eps = 4.0 * std::numeric_limits<double>::epsilon();

  for (int i = 0; i < d; ++i) {
    auto [v, e] = detail::richardson(
        [&](double h) {
          const double a = at({{i, h}}), b = at({{i, -h}});
          note(a);
          note(b);
          return (a - b) / (2.0 * h);
        },
        h12, cfg.richardson_levels);
    out.jet.grad(i) = v;
    out.error_jet.grad(i) = e;
  }
  detail::for_pairs(d, [&](int i, int j) {
    auto [v, e] = detail::richardson(
        [&](double h) {
          if (i == j) return (at({{i, h}}) - 2.0 * f0 + at({{i, -h}})) / (h * h);
          return (at({{i, h}, {j, h}}) - at({{i, h}, {j, -h}}) - at({{i, -h}, {j, h}}) + at({{i, -h}, {j, -h}})) /
                 (4.0 * h * h);
        },
        h12, cfg.richardson_levels);
    out.jet.hess(i, j) = v;
    out.error_jet.hess(i, j) = e;
  });
  detail::for_triples(d, [&](int i, int j, int k) {
    auto [v, e] = detail::richardson(
        [&](double h) {
          if (i == j && j == k)
            return (at({{i, 2.0 * h}}) - 2.0 * at({{i, h}}) + 2.0 * at({{i, -h}}) - at({{i, -2.0 * h}})) /
                   (2.0 * h * h * h);
          if (i == j || j == k) {
            const int a = (i == j) ? i : k;  // repeated index
            const int b = (i == j) ? k : i;  // single index
            auto second = [&](double sb) {
              return at({{a, h}, {b, sb}}) - 2.0 * at({{b, sb}}) + at({{a, -h}, {b, sb}});
            };
            return (second(h) - second(-h)) / (2.0 * h * h * h);
          }
          double s = 0.0;
          for (int si : {-1, 1})
            for (int sj : {-1, 1})
              for (int sk : {-1, 1}) s += si * sj * sk * at({{i, si * h}, {j, sj * h}, {k, sk * h}});
          return s / (8.0 * h * h * h);
        },
        h3, cfg.richardson_levels);
    out.jet.third(i, j, k) = v;
    out.error_jet.third(i, j, k) = e;
  });

  // Round-off (and evaluator noise) amplified by the stencils, added to the truncation estimates.
  const double noise = eps * std::max(magnitude, 1.0) + cfg.value_noise;
  const std::array<double, 4> amplification{0.0, 1.0 / h12, 4.0 / (h12 * h12), 8.0 / (h3 * h3 * h3)};
  for (int i = 0; i < d; ++i) {
    out.error_jet.grad(i) += noise * amplification[1];
    out.error[1] = std::max(out.error[1], out.error_jet.grad(i));
  }
  detail::for_pairs(d, [&](int i, int j) {
    out.error_jet.hess(i, j) += noise * amplification[2];
    out.error[2] = std::max(out.error[2], out.error_jet.hess(i, j));
  });
  detail::for_triples(d, [&](int i, int j, int k) {
    out.error_jet.third(i, j, k) += noise * amplification[3];
    out.error[3] = std::max(out.error[3], out.error_jet.third(i, j, k));
  });
  return out;
}

struct OrderCheck {
  double max_discrepancy = 0.0;  // largest |analytic - fd|
  double max_ratio = 0.0;        // largest discrepancy / allowance
};

struct JetValidation {
  std::string field;
  int points = 0;
  std::array<OrderCheck, 4> orders{};  // index 0: value
  double guard = 10.0;
  bool pass = true;
  std::vector<std::string> failures;
};

/// Compares analytic jets with fd_jet at every point. An entry fails when its
/// discrepancy exceeds `guard` times the oracle's error estimate (plus a relative
/// floor of 1e-12 of the analytic entry).
inline JetValidation validate_jets(const FieldSpec& spec, const std::vector<Point>& points, FDConfig cfg = {},
                                   double guard = 10.0) {
  cfg.value_noise = std::max(cfg.value_noise, spec.value_noise());
  JetValidation report;
  report.field = spec.name();
  report.guard = guard;
  const int d = spec.dim();
  for (std::size_t n = 0; n < points.size(); ++n) {
    const Point& p = points[n];
    const Jet3 analytic = eval_field(spec, p);
    const FDJet fd = fd_jet([&](const Point& q) { return field_value(spec, q); }, p, cfg);
    ++report.points;
    auto check = [&](int order, double a, double b, double allowance, const std::string& entry) {
      const double disc = std::abs(a - b);
      const double limit = guard * allowance + 1e-12 * std::abs(a);
      auto& oc = report.orders[static_cast<std::size_t>(order)];
      oc.max_discrepancy = std::max(oc.max_discrepancy, disc);
      const double ratio = limit > 0.0 ? disc / limit : (disc > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      oc.max_ratio = std::max(oc.max_ratio, ratio);
      if (ratio > 1.0) {
        report.pass = false;
        report.failures.push_back(spec.name() + " point " + std::to_string(n) + " " + entry + ": analytic " +
                                  std::to_string(a) + " vs fd " + std::to_string(b));
      }
    };
    check(0, analytic.value(), fd.jet.value(), cfg.value_noise + 4.0 * std::numeric_limits<double>::epsilon() *
                                                                    std::abs(analytic.value()),
          "value");
    for (int i = 0; i < d; ++i)
      check(1, analytic.grad(i), fd.jet.grad(i), fd.error_jet.grad(i), "grad[" + std::to_string(i) + "]");
    detail::for_pairs(d, [&](int i, int j) {
      check(2, analytic.hess(i, j), fd.jet.hess(i, j), fd.error_jet.hess(i, j),
            "hess[" + std::to_string(i) + "," + std::to_string(j) + "]");
    });
    detail::for_triples(d, [&](int i, int j, int k) {
      check(3, analytic.third(i, j, k), fd.jet.third(i, j, k), fd.error_jet.third(i, j, k),
            "third[" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + "]");
    });
  }
  return report;
}

/// Points suitable for oracle validation: stencils of radius 2 h_third (1 + |x|)
/// must stay admissible, so the plate is validated in its interior.
inline Region oracle_region(const FieldSpec& spec) {
  if (spec.kind() == FieldKind::grounded_plate)
    return Region::box({0.0, 0.0, 0.0}, {spec.param("a"), spec.param("b"), spec.param("c")});
  return default_region(spec);
}

}  // namespace levelset
