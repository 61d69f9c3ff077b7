#pragma once

// Batch front end: check, sample, ehaction and oracle subcommands.
// Exit codes: 0 pass, 1 usage or domain error, 2 identity failure.
// Rows are computed per point on worker threads and merged in sample order,
// so output is byte-identical for every --jobs value.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "levelset/ehaction.hpp"
#include "levelset/error.hpp"
#include "levelset/fields.hpp"
#include "levelset/geometry.hpp"
#include "levelset/oracle.hpp"
#include "levelset/report.hpp"

namespace levelset {

struct RunConfig {
  std::string command;
  std::string field = "sphere";
  std::vector<std::string> params;
  int dim = 0;  // 0: the field's default dimension
  int count = -1;  // -1: command default
  std::uint64_t seed = 0;
  std::string region;
  std::vector<std::string> tolerances;
  std::string format;
  std::string out;
  int jobs = 1;  // 0: hardware concurrency
  double margin = 0.05;
  double phi_min = 0.5;
  double phi_max = 4.0;
  int samples = 20;
  int order = 16;
};

/// Verbosity from LEVELSET_LOG: unset, "0" or "quiet" print errors only; "1" or "info"
/// add a summary per run; "2" or "debug" add per-point diagnostics.
enum class LogLevel { quiet = 0, info = 1, debug = 2 };

inline LogLevel log_level_from_env() {
  const char* v = std::getenv("LEVELSET_LOG");
  if (v == nullptr) return LogLevel::quiet;
  const std::string s(v);
  if (s == "1" || s == "info") return LogLevel::info;
  if (s == "2" || s == "debug") return LogLevel::debug;
  return LogLevel::quiet;
}

namespace detail {

struct Logger {
  LogLevel level;
  std::ostream& err;
  void info(const std::string& m) const {
    if (level >= LogLevel::info) err << "[info] " << m << '\n';
  }
  void debug(const std::string& m) const {
    if (level >= LogLevel::debug) err << "[debug] " << m << '\n';
  }
};

/// out[i] = fn(i), evaluated by `jobs` threads pulling indices in order.
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t n, int jobs, Fn&& fn) {
  std::vector<R> out(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) out[i] = fn(i);
  };
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::size_t extra = std::min<std::size_t>(static_cast<std::size_t>(jobs), std::max<std::size_t>(n, 1)) - 1;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < extra; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

template <class R>
struct Guarded {
  R value{};
  std::string error;  // empty on success
};

// Library errors are captured so they never escape a worker thread.
template <class Fn>
auto guarded(Fn&& fn) -> Guarded<decltype(fn())> {
  Guarded<decltype(fn())> g;
  try {
    g.value = fn();
  } catch (const Error& e) {
    g.error = e.what();
  }
  return g;
}

inline std::string point_text(const Point& p) {
  std::string s = "(";
  for (int i = 0; i < p.dim(); ++i) s += (i ? ", " : "") + format_real(p[i]);
  return s + ")";
}

inline std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items) {
  std::map<std::string, double> t;
  for (const auto& kv : items) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("malformed tolerance (expected name=value): " + kv);
    const std::string text = kv.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw UsageError("malformed tolerance value: " + kv);
    }
    if (used != text.size() || !(v >= 0.0)) throw UsageError("malformed tolerance value: " + kv);
    t[kv.substr(0, eq)] = v;
  }
  return t;
}

inline void require_known(const std::map<std::string, double>& tol, const std::vector<std::string>& known,
                          const std::string& command) {
  for (const auto& [name, v] : tol)
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw UsageError("unknown tolerance for " + command + ": " + name);
}

inline FieldSpec make_field(const RunConfig& c) {
  const FieldInfo& info = field_info(c.field);
  return FieldSpec::parse(c.field, c.dim > 0 ? c.dim : info.default_dim, c.params);
}

inline Region make_region(const RunConfig& c, const FieldSpec& spec) {
  return c.region.empty() ? default_region(spec) : Region::parse(c.region, spec.dim());
}

inline std::vector<Point> make_points(const RunConfig& c, const FieldSpec& spec, int fallback_count,
                                      const Region& region) {
  return sample_points(spec, c.count >= 0 ? c.count : fallback_count, c.seed, region, c.margin);
}

inline std::vector<std::string> coordinate_columns(int d) {
  std::vector<std::string> v;
  for (int i = 0; i < d; ++i) v.push_back("x" + std::to_string(i));
  return v;
}

// A row, or the message of the error that stopped it.
struct PointOutcome {
  std::vector<Cell> cells;
  std::vector<std::string> failures;
  std::vector<std::string> notes;  // debug messages, printed after the ordered merge
  std::string error;
};

struct DiffeoColumn {
  Diffeo family;
  const char* suffix;
};

inline constexpr DiffeoColumn kDiffeoColumns[] = {
    {Diffeo::identity, "t"}, {Diffeo::negate, "neg"}, {Diffeo::cubic, "cubic"}, {Diffeo::exp, "exp"}};

/// Names of the residual columns of `check`, in output order.
inline std::vector<std::string> check_identity_names(int d) {
  std::vector<std::string> v = {"nH", "lap_lnF", "main", "formula_vs_extrinsic"};
  if (d == 2) v.push_back("2d_triv");
  if (d == 3) v.push_back("gauss");
  for (const auto& dc : kDiffeoColumns) {
    v.push_back(std::string("diffeo_mean_") + dc.suffix);
    v.push_back(std::string("diffeo_scalar_") + dc.suffix);
  }
  v.push_back("h_evolv");
  v.push_back("r_evolv");
  return v;
}

inline int emit(const Table& t, Format f, const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.out.empty()) {
    write_table(t, f, out);
    return 0;
  }
  std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << "error: cannot open output file " << c.out << '\n';
    return 1;
  }
  write_table(t, f, file);
  return file ? 0 : 1;
}

inline Format format_of(const RunConfig& c) { return c.format.empty() ? Format::csv : parse_format(c.format); }

}  // namespace detail

/// Residuals of every pointwise identity, every reparametrization family and both
/// evolution equations per point. Evolution columns are nan, and not judged,
/// where the field line leaves the admissible region.
inline int cmd_check(const RunConfig& c, std::ostream& out, std::ostream& err, LogLevel level = LogLevel::quiet) {
  const detail::Logger log{level, err};
  const FieldSpec spec = detail::make_field(c);
  const Region region = detail::make_region(c, spec);
  const Format format = detail::format_of(c);
  const auto tol = detail::parse_tolerances(c.tolerances);
  const int d = spec.dim();
  const std::vector<std::string> names = detail::check_identity_names(d);
  std::vector<std::string> known = names;
  for (const char* g : {"diffeo_mean", "diffeo_scalar"}) known.emplace_back(g);
  detail::require_known(tol, known, "check");

  const auto tol_of = [&](const std::string& name, const std::string& group, double fallback) {
    if (const auto it = tol.find(name); it != tol.end()) return it->second;
    if (const auto it = tol.find(group); it != tol.end()) return it->second;
    return fallback;
  };
  const double diffeo_default = std::max(1e-6, spec.default_tolerance());
  const double evolution_default = std::max(1e-5, spec.default_tolerance());

  const std::vector<Point> points = detail::make_points(c, spec, 100, region);
  const auto rows = detail::parallel_map<detail::PointOutcome>(points.size(), c.jobs, [&](std::size_t i) {
    detail::PointOutcome o;
    const Point& x = points[i];
    try {
      o.cells.emplace_back(static_cast<long long>(i));
      for (int k = 0; k < d; ++k) o.cells.emplace_back(x[k]);
      const auto judge = [&](const std::string& name, double residual, double limit) {
        o.cells.emplace_back(residual);
        if (!(std::abs(residual) <= limit))
          o.failures.push_back("identity " + name + " failed at point " + std::to_string(i) + " " +
                               detail::point_text(x) + ": residual " + format_real(residual) +
                               " exceeds tolerance " + format_real(limit));
      };
      const IdentityReport r = identity_residuals(spec, x, tol);
      for (const auto& name : names) {
        if (!r.residuals.count(name)) continue;
        judge(name, r.residuals.at(name), r.tolerances.at(name));
      }
      for (const auto& dc : detail::kDiffeoColumns) {
        const DiffeoResiduals q = diffeo_residuals(spec, x, dc.family);
        const std::string m = std::string("diffeo_mean_") + dc.suffix, s = std::string("diffeo_scalar_") + dc.suffix;
        judge(m, q.mean, tol_of(m, "diffeo_mean", diffeo_default));
        judge(s, q.scalar, tol_of(s, "diffeo_scalar", diffeo_default));
      }
      std::optional<EvolutionResiduals> e;
      try {
        e = evolution_residuals(spec, x);
      } catch (const ExclusionViolation& ex) {
        o.notes.push_back("point " + std::to_string(i) + ": evolution skipped, " + ex.what());
      }
      if (e) {
        judge("h_evolv", e->h_evolv, tol_of("h_evolv", "h_evolv", evolution_default));
        judge("r_evolv", e->r_evolv, tol_of("r_evolv", "r_evolv", evolution_default));
      } else {
        o.cells.emplace_back(std::nan(""));
        o.cells.emplace_back(std::nan(""));
      }
      o.cells.emplace_back(o.failures.empty());
    } catch (const Error& ex) {
      o.error = "point " + std::to_string(i) + " " + detail::point_text(x) + ": " + ex.what();
    }
    return o;
  });

  Table t;
  t.columns = {"index"};
  for (const auto& col : detail::coordinate_columns(d)) t.columns.push_back(col);
  for (const auto& name : names) t.columns.push_back(name);
  t.columns.emplace_back("pass");

  std::size_t failing = 0;
  for (const auto& o : rows) {
    if (!o.error.empty()) {
      err << "error: check " << spec.name() << " " << o.error << '\n';
      return 1;
    }
  }
  for (const auto& o : rows) {
    t.add_row(o.cells);
    for (const auto& n : o.notes) log.debug(n);
    for (const auto& f : o.failures) err << "FAIL " << spec.name() << ": " << f << '\n';
    if (!o.failures.empty()) ++failing;
  }
  log.info("check " + spec.name() + " d=" + std::to_string(d) + ": " + std::to_string(points.size()) + " points, " +
           std::to_string(failing) + " failing");
  if (const int code = detail::emit(t, format, c, out, err)) return code;
  return failing ? 2 : 0;
}

/// Geometry export: coordinates, F, V, trW, k_1..k_(d-1), R_extrinsic, R_formula.
inline int cmd_sample(const RunConfig& c, std::ostream& out, std::ostream& err, LogLevel level = LogLevel::quiet) {
  const detail::Logger log{level, err};
  const FieldSpec spec = detail::make_field(c);
  const Region region = detail::make_region(c, spec);
  const Format format = detail::format_of(c);
  if (!c.tolerances.empty()) throw UsageError("sample takes no tolerances");
  const int d = spec.dim();
  const std::vector<Point> points = detail::make_points(c, spec, 100, region);
  const auto rows = detail::parallel_map<detail::PointOutcome>(points.size(), c.jobs, [&](std::size_t i) {
    detail::PointOutcome o;
    try {
      const GeometrySample s = geometry_sample(eval_field(spec, points[i]));
      for (int k = 0; k < d; ++k) o.cells.emplace_back(points[i][k]);
      o.cells.emplace_back(s.F);
      o.cells.emplace_back(s.V);
      o.cells.emplace_back(s.trW);
      for (double k : s.principal_curvatures) o.cells.emplace_back(k);
      o.cells.emplace_back(s.R_extrinsic);
      o.cells.emplace_back(s.R_formula);
    } catch (const Error& ex) {
      o.error = "point " + std::to_string(i) + " " + detail::point_text(points[i]) + ": " + ex.what();
    }
    return o;
  });

  Table t;
  t.columns = detail::coordinate_columns(d);
  for (const char* col : {"F", "V", "trW"}) t.columns.emplace_back(col);
  for (int k = 1; k < d; ++k) t.columns.push_back("k_" + std::to_string(k));
  t.columns.emplace_back("R_extrinsic");
  t.columns.emplace_back("R_formula");
  for (const auto& o : rows) {
    if (!o.error.empty()) {
      err << "error: sample " << spec.name() << " " << o.error << '\n';
      return 1;
    }
    t.add_row(o.cells);
  }
  log.info("sample " + spec.name() + " d=" + std::to_string(d) + ": " + std::to_string(points.size()) + " rows");
  return detail::emit(t, format, c, out, err);
}

/// Action table over a geometric phi grid. Fails when |a2_fd - a2_integral| exceeds
/// a2 |a2_integral| + 1e-8 (a2 = 1e-4 by default) or when A'' drops below -convexity
/// (1e-8 by default).
inline int cmd_ehaction(const RunConfig& c, std::ostream& out, std::ostream& err, LogLevel level = LogLevel::quiet) {
  const detail::Logger log{level, err};
  const Format format = detail::format_of(c);
  const auto tol = detail::parse_tolerances(c.tolerances);
  detail::require_known(tol, {"a2", "convexity"}, "ehaction");
  const double a2_tol = tol.count("a2") ? tol.at("a2") : 1e-4;
  const double convexity_tol = tol.count("convexity") ? tol.at("convexity") : 1e-8;
  const SphereFamily family(c.dim > 0 ? c.dim : 4, c.order);
  const std::vector<double> grid = geometric_grid(c.phi_min, c.phi_max, c.samples);
  if (c.phi_min - 2.0 * default_action_step(c.phi_min) <= 0.0)
    throw DomainError("ehaction", "phi_min leaves no room for the difference stencil");

  const auto rows = detail::parallel_map<detail::Guarded<SecondDerivativeCheck>>(grid.size(), c.jobs, [&](std::size_t i) {
    return detail::guarded([&] { return eh_second_derivative_check(family, grid[i]); });
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!rows[i].error.empty()) {
      err << "error: ehaction d=" << family.dim() << " phi " << format_real(grid[i]) << ": " << rows[i].error << '\n';
      return 1;
    }
  }

  Table t;
  t.columns = {"phi", "r", "action", "a2_fd", "a2_integral", "residual"};
  int failing = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const SecondDerivativeCheck& r = rows[i].value;
    t.add_row({grid[i], family.radius(grid[i]), r.action, r.a2_fd, r.a2_integral, r.residual});
    const double limit = a2_tol * std::abs(r.a2_integral) + 1e-8;
    if (!(std::abs(r.residual) <= limit)) {
      ++failing;
      err << "FAIL ehaction d=" << family.dim() << ": identity a2 failed at phi " << format_real(grid[i])
          << ": residual " << format_real(r.residual) << " exceeds tolerance " << format_real(limit) << '\n';
    }
    if (!(r.a2_integral >= -convexity_tol)) {
      ++failing;
      err << "FAIL ehaction d=" << family.dim() << ": identity convexity failed at phi " << format_real(grid[i])
          << ": A'' = " << format_real(r.a2_integral) << '\n';
    }
  }
  log.info("ehaction d=" + std::to_string(family.dim()) + " order " + std::to_string(family.quadrature_order()) +
           ": " + std::to_string(grid.size()) + " rows, " + std::to_string(failing) + " failures");
  if (const int code = detail::emit(t, format, c, out, err)) return code;
  return failing ? 2 : 0;
}

/// Analytic jets against the finite-difference oracle. Prints an aligned table by
/// default, or one row per derivative order with --format.
inline int cmd_oracle(const RunConfig& c, std::ostream& out, std::ostream& err, LogLevel level = LogLevel::quiet) {
  const detail::Logger log{level, err};
  const FieldSpec spec = detail::make_field(c);
  const Region region = c.region.empty() ? oracle_region(spec) : Region::parse(c.region, spec.dim());
  const bool table = c.format.empty() || c.format == "table";
  const Format format = table ? Format::csv : parse_format(c.format);
  const auto tol = detail::parse_tolerances(c.tolerances);
  detail::require_known(tol, {"guard"}, "oracle");
  const double guard = tol.count("guard") ? tol.at("guard") : 10.0;
  const std::vector<Point> points = detail::make_points(c, spec, 20, region);

  // Chunks validated independently, then merged in order.
  const auto parts = detail::parallel_map<detail::Guarded<JetValidation>>(points.size(), c.jobs, [&](std::size_t i) {
    return detail::guarded([&] { return validate_jets(spec, {points[i]}, FDConfig{}, guard); });
  });
  JetValidation v;
  v.field = spec.name();
  v.guard = guard;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!parts[i].error.empty()) {
      err << "error: oracle " << spec.name() << " point " << i << " " << detail::point_text(points[i]) << ": "
          << parts[i].error << '\n';
      return 1;
    }
  }
  for (const auto& part : parts) {
    const JetValidation& p = part.value;
    v.points += p.points;
    v.pass = v.pass && p.pass;
    for (std::size_t k = 0; k < v.orders.size(); ++k) {
      v.orders[k].max_discrepancy = std::max(v.orders[k].max_discrepancy, p.orders[k].max_discrepancy);
      v.orders[k].max_ratio = std::max(v.orders[k].max_ratio, p.orders[k].max_ratio);
    }
    v.failures.insert(v.failures.end(), p.failures.begin(), p.failures.end());
  }

  Table t;
  t.columns = {"order", "max_discrepancy", "max_ratio", "pass"};
  for (std::size_t k = 0; k < v.orders.size(); ++k)
    t.add_row({static_cast<long long>(k), v.orders[k].max_discrepancy, v.orders[k].max_ratio,
               v.orders[k].max_ratio <= 1.0});
  int code = 0;
  if (table) {
    std::ostringstream text;
    char line[128];
    std::snprintf(line, sizeof line, "%-6s %-24s %-24s %s\n", "order", "max_discrepancy", "max_ratio", "pass");
    text << "field " << spec.name() << " d=" << spec.dim() << ", " << v.points << " points, guard "
         << format_real(guard) << '\n'
         << line;
    for (std::size_t k = 0; k < v.orders.size(); ++k) {
      std::snprintf(line, sizeof line, "%-6zu %-24s %-24s %s\n", k, format_real(v.orders[k].max_discrepancy).c_str(),
                    format_real(v.orders[k].max_ratio).c_str(), v.orders[k].max_ratio <= 1.0 ? "yes" : "no");
      text << line;
    }
    if (c.out.empty()) {
      out << text.str();
    } else {
      std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
      if (!(file << text.str())) {
        err << "error: cannot write output file " << c.out << '\n';
        return 1;
      }
    }
  } else {
    code = detail::emit(t, format, c, out, err);
  }
  for (const auto& f : v.failures) err << "FAIL oracle: " << f << '\n';
  log.info("oracle " + spec.name() + ": " + std::to_string(v.points) + " points, " +
           (v.pass ? "pass" : std::to_string(v.failures.size()) + " failing entries"));
  if (code) return code;
  return v.pass ? 0 : 2;
}

/// Parses `args` (without the program name) and runs one subcommand.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Level-set curvature identities: checks, geometry samples, actions and jet validation"};
  app.name("levelset");
  app.require_subcommand(1);
  RunConfig c;

  const auto field_options = [&](CLI::App* s) {
    s->add_option("--field", c.field, "catalog field name")->capture_default_str();
    s->add_option("--param", c.params, "field parameter key=value (repeatable)");
    s->add_option("--dim", c.dim, "ambient dimension (default: the field's)");
    s->add_option("--count", c.count, "number of sample points");
    s->add_option("--seed", c.seed, "sampling seed")->capture_default_str();
    s->add_option("--region", c.region, "box:lo,hi | box:lo0,hi0,... | shell:rmin,rmax | surface | face");
    s->add_option("--margin", c.margin, "exclusion margin as a fraction of the region diameter")->capture_default_str();
  };
  const auto run_options = [&](CLI::App* s) {
    s->add_option("--tol", c.tolerances, "tolerance override name=value (repeatable)");
    s->add_option("--format", c.format, "csv or jsonl");
    s->add_option("--out", c.out, "output path (default: standard output)");
    s->add_option("--jobs", c.jobs, "worker threads, 0 for all cores")->capture_default_str();
  };

  CLI::App* check = app.add_subcommand("check", "identity residuals at sampled points");
  field_options(check);
  run_options(check);
  CLI::App* sample = app.add_subcommand("sample", "geometry of sampled points");
  field_options(sample);
  run_options(sample);
  CLI::App* oracle = app.add_subcommand("oracle", "analytic jets against finite differences");
  field_options(oracle);
  run_options(oracle);
  CLI::App* eh = app.add_subcommand("ehaction", "Einstein-Hilbert action of sphere families");
  eh->add_option("--dim", c.dim, "ambient dimension 3..5 (default 4)");
  eh->add_option("--phi-min", c.phi_min, "smallest level value")->capture_default_str();
  eh->add_option("--phi-max", c.phi_max, "largest level value")->capture_default_str();
  eh->add_option("--samples", c.samples, "number of level values")->capture_default_str();
  eh->add_option("--order", c.order, "Gauss-Legendre nodes per angle")->capture_default_str();
  run_options(eh);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  const LogLevel level = log_level_from_env();
  try {
    if (c.jobs < 0) throw UsageError("--jobs must be non-negative");
    c.command = app.get_subcommands().front()->get_name();
    if (c.command == "check") return cmd_check(c, out, err, level);
    if (c.command == "sample") return cmd_sample(c, out, err, level);
    if (c.command == "oracle") return cmd_oracle(c, out, err, level);
    return cmd_ehaction(c, out, err, level);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace levelset
