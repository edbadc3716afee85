// logcave: transforms, verification suites and the 1-D slope-problem solver
// on the command line. JSON for bundles, CSV for plot data. Exit codes:
//   0 success / all checks hold
//   1 a verification check failed
//   2 bad input (parse failure, unknown suite, invalid data)
//   3 conjugation target cannot hold the attained slopes
//   4 datum classified not solvable in the smooth class
//   5 necessary condition (null barycenter, tail consistency) failed
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "logcave/io.hpp"

using namespace logcave;

namespace {

bool verbose() {
  const char* v = std::getenv("LOGCAVE_LOG");
  return v != nullptr && *v != '\0';
}

void logmsg(const std::string& s) {
  if (verbose()) std::fprintf(stderr, "[logcave] %s\n", s.c_str());
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

std::string stem_of(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
  return path.substr(0, dot);
}

PotentialGrid load_potential(const std::string& path) {
  if (ends_with(path, ".csv")) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return read_potential_csv(in);
  }
  return potential_from_json(load_json(path));
}

LogConcaveFn load_fn(const std::string& path) {
  if (!ends_with(path, ".csv")) {
    const json j = load_json(path);
    if (j.contains("class")) return logconcave_from_json(j);
    LogConcaveFn f = as_logconcave(potential_from_json(j));
    f.class_tag = classify(f).tag;
    logmsg(path + " classified as " + to_string(f.class_tag));
    return f;
  }
  // CSV never carries a class field; classify the sampled window
  LogConcaveFn f = as_logconcave(load_potential(path));
  f.class_tag = classify(f).tag;
  logmsg(path + " classified as " + to_string(f.class_tag));
  return f;
}

MinkowskiDatum1D load_datum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return read_datum_csv(in);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("datum: ") + e.what());
  }
}

// ---- fixtures shared by the verification suites ----

LogConcaveFn half_square(std::size_t n) {
  return as_logconcave(
      sample_1d(-8, 8, n, [](double x) { return x * x / 2; }), FnClass::Aprime);
}

LogConcaveFn gamma1(std::size_t n) { return make_gaussian(1, Grid::line(-8, 8, n)); }

LogConcaveFn e_sq(std::size_t n) {
  return as_logconcave(sample_1d(-8, 8, n, [](double x) { return x * x; }),
                       FnClass::Aprime);
}

LogConcaveFn cosh_fn(std::size_t n) {
  return as_logconcave(
      sample_1d(-6, 6, n, [](double x) { return std::cosh(x) - 1; }),
      FnClass::Aprime);
}

LogConcaveFn quartic_fn(std::size_t n) {
  return as_logconcave(
      sample_1d(-8, 8, n, [](double x) { return x * x * x * x / 4; }),
      FnClass::Aprime);
}

PotentialGrid random_convex(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> curv(0.05, 3.0);
  std::uniform_real_distribution<double> tilt(-2.0, 2.0);
  PotentialGrid p;
  p.grid = Grid::line(-5, 5, n);
  p.values.resize(n);
  const double h = p.grid.h(0);
  double slope = tilt(rng) - 5.0, val = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p.values[i] = val;
    slope += curv(rng) * h;
    val += slope * h;
  }
  const double vmin = *std::min_element(p.values.begin(), p.values.end());
  for (auto& v : p.values) v -= vmin;
  return p;
}

MinkowskiDatum1D analytic_datum(double lo, double hi, std::size_t n,
                                const std::function<double(double)>& m) {
  const Grid g = Grid::line(lo, hi, n);
  std::vector<double> density(n);
  for (std::size_t i = 0; i < n; ++i) density[i] = m(g.coord(0, i));
  return make_datum(g, std::move(density));
}

// density e^{phi - y phi'} phi'' implied by the recovered potential, on the
// datum grid (zero at the edges and outside the effective domain)
std::vector<double> recovered_density(const MinkowskiSolution1D& sol) {
  const Grid& g = sol.phi.grid;
  const double h = g.h(0);
  std::vector<double> m(g.n[0], 0.0);
  for (std::size_t j = 1; j + 1 < g.n[0]; ++j) {
    const double pm = sol.phi.values[j - 1], p0 = sol.phi.values[j],
                 pp = sol.phi.values[j + 1];
    if (!is_finite(pm) || !is_finite(p0) || !is_finite(pp)) continue;
    const double y = g.coord(0, j);
    const double d1 = (pp - pm) / (2 * h);
    const double d2 = (pp - 2 * p0 + pm) / (h * h);
    m[j] = std::exp(p0 - y * d1) * d2;
  }
  return m;
}

double density_l1_error(const MinkowskiSolution1D& sol, const MinkowskiDatum1D& d) {
  const std::vector<double> rec = recovered_density(sol);
  const double h = d.grid.h(0);
  double acc = 0;
  for (std::size_t j = 1; j + 1 < d.grid.n[0]; ++j)
    acc += std::abs(rec[j] - d.density[j]) * h;
  return acc;
}

// ---- report construction ----
// Orientation: gap >= 0 means the check passes. >=-type checks store
// gap = lhs - rhs, <=-type budget checks store gap = budget - value, and
// equality checks pass iff |gap| <= tolerance.

InequalityReport ineq(std::string name, double lhs, double rhs, double tol) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.gap = lhs - rhs;
  r.tolerance = tol > 0 ? tol : detail::default_tolerance(lhs, rhs);
  r.holds = r.gap >= -r.tolerance;
  return r;
}

InequalityReport bound(std::string name, double value, double budget, double tol) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = value;
  r.rhs = budget;
  r.gap = budget - value;
  r.tolerance = tol > 0 ? tol : 0.0;
  r.holds = r.gap >= -r.tolerance;
  return r;
}

InequalityReport equality(std::string name, double lhs, double rhs, double tol) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.gap = lhs - rhs;
  r.tolerance = tol > 0 ? tol : detail::default_tolerance(lhs, rhs);
  r.holds = std::abs(r.gap) <= r.tolerance;
  r.equality_case_detected = r.holds;
  return r;
}

void print_table(const std::vector<InequalityReport>& reports) {
  std::printf("%-34s %14s %14s %12s %s\n", "check", "lhs", "rhs", "gap", "holds");
  int held = 0;
  for (const auto& r : reports) {
    std::printf("%-34s %14.6g %14.6g %12.3g %s%s\n", r.name.c_str(), r.lhs, r.rhs,
                r.gap, r.holds ? "yes" : "NO",
                r.equality_case_detected ? " (equality)" : "");
    if (r.holds) ++held;
  }
  std::printf("%d/%zu checks hold\n", held, reports.size());
}

// ---- verification suites ----

struct SuiteConfig {
  std::string suite = "all";
  std::string in_path;
  std::string out_path = "report.json";
  double tol = 0.0;  // 0 keeps per-check defaults
  unsigned seed = 42;
  std::size_t grid_n = 2001;
};

std::vector<InequalityReport> suite_conjugate(const SuiteConfig& c) {
  std::vector<InequalityReport> out;
  const std::size_t n = c.grid_n;

  const auto quad = sample_1d(-8, 8, n, [](double x) { return x * x / 2; });
  out.push_back(bound("conjugate_involution_quad",
                      fenchel_involution_residual(quad), 5e-3, c.tol));
  const auto vee = sample_1d(-8, 8, n, [](double x) { return std::abs(x); });
  out.push_back(bound("conjugate_involution_abs",
                      fenchel_involution_residual(vee), 5e-3, c.tol));
  const auto ind =
      indicator_of(ConvexBody::interval(-1, 1), Grid::line(-2, 2, std::min<std::size_t>(n, 801)));
  out.push_back(bound("conjugate_involution_indicator",
                      fenchel_involution_residual(ind), 1e-9, c.tol));

  std::mt19937 rng(c.seed);
  double worst_resid = 0, worst_brute = 0;
  for (int rep = 0; rep < 12; ++rep) {
    const PotentialGrid u = random_convex(rng, 501);
    worst_resid = std::max(worst_resid, fenchel_involution_residual(u));
    const Grid target = default_conjugate_target(u);
    const PotentialGrid fast = fenchel_conjugate(u, target, true);
    const PotentialGrid brute = fenchel_conjugate_brute(u, target);
    for (std::size_t k = 0; k < target.n[0]; ++k) {
      const double a = fast.values[k], b = brute.values[k];
      if (!is_finite(a) && !is_finite(b)) continue;
      worst_brute = std::max(worst_brute, std::abs(a - b));
    }
  }
  out.push_back(bound("conjugate_involution_random", worst_resid, 5e-3, c.tol));
  out.push_back(bound("conjugate_fast_vs_brute", worst_brute, 1e-12, c.tol));
  return out;
}

std::vector<InequalityReport> suite_algebra(const SuiteConfig& c) {
  std::vector<InequalityReport> out;
  const LogConcaveFn g = gamma1(c.grid_n);
  const LogConcaveFn f = half_square(c.grid_n);

  out.push_back(equality("algebra_oplus_self_mass",
                         total_mass(oplus(f, f, 0.5, 0.5)), total_mass(f),
                         c.tol > 0 ? c.tol : 1e-3 * total_mass(f)));
  out.push_back(equality("algebra_oplus_translate_mass",
                         total_mass(oplus(g, translate(g, 0.7), 0.5, 0.5)),
                         total_mass(g), c.tol > 0 ? c.tol : 1e-3));
  const LogConcaveFn f2 =
      as_logconcave(right_scalar_mult(f.potential, 2.0), FnClass::Aprime);
  out.push_back(equality("algebra_dilation_mass", total_mass(f2),
                         std::sqrt(2.0) * total_mass(f),
                         c.tol > 0 ? c.tol : 1e-3 * total_mass(f)));
  const LogConcaveFn ind_a = as_logconcave(
      indicator_of(ConvexBody::interval(-1, 1), Grid::line(-4, 4, 801)));
  const LogConcaveFn ind_b = as_logconcave(
      indicator_of(ConvexBody::interval(0.5, 1), Grid::line(-2, 2, 401)));
  const LogConcaveFn s = oplus(ind_a, ind_b, 1.0, 1.0);
  out.push_back(equality("algebra_indicator_domain_sum", total_mass(s), 2.5,
                         c.tol > 0 ? c.tol : 3 * s.potential.grid.h(0)));
  return out;
}

std::vector<InequalityReport> suite_variation(const SuiteConfig& c) {
  std::vector<InequalityReport> out;
  struct Case {
    const char* label;
    LogConcaveFn f;
  };
  const Case cases[] = {{"halfsquare", half_square(c.grid_n)},
                        {"gamma1", gamma1(c.grid_n)},
                        {"cosh", cosh_fn(c.grid_n)}};
  for (const auto& k : cases) {
    const double closed = delta_J_self(k.f);
    const DeltaJEstimate fd = delta_J_fd(k.f, k.f);
    const double tol =
        c.tol > 0 ? c.tol : std::max(1e-3 * std::abs(closed), fd.error_bar);
    out.push_back(equality(std::string("variation_self_") + k.label, fd.value,
                           closed, tol));
  }
  const DeltaJEstimate per = delta_J_fd(half_square(c.grid_n), gamma1(c.grid_n));
  out.push_back(equality("variation_perimeter_halfsquare", per.value,
                         -1.0501231726632709,
                         c.tol > 0 ? c.tol : std::max(1.1e-3, per.error_bar)));
  return out;
}

std::vector<InequalityReport> suite_measures(const SuiteConfig& c) {
  std::vector<InequalityReport> out;
  struct Case {
    const char* label;
    LogConcaveFn f;
  };
  const Case cases[] = {{"halfsquare", half_square(c.grid_n)},
                        {"gamma1", gamma1(c.grid_n)},
                        {"esq", e_sq(c.grid_n)},
                        {"cosh", cosh_fn(c.grid_n)}};
  for (const auto& k : cases) {
    const double J = total_mass(k.f);
    const ParticleMeasure mu = area_measure_mu(k.f);
    out.push_back(bound(std::string("mu_mass_drift_") + k.label,
                        std::abs(mu.total - J), 1e-4 * J, c.tol));
    const NecessaryConditionReport rep = check_necessary_conditions(mu);
    out.push_back(bound(std::string("mu_barycenter_") + k.label, rep.residual,
                        1e-3 * rep.scale, c.tol));
    const double repr = delta_J_repr_Aprime(k.f, k.f);
    const double closed = delta_J_self(k.f);
    out.push_back(equality(std::string("mu_representation_") + k.label, repr,
                           closed, c.tol > 0 ? c.tol : 1e-3 * std::abs(closed)));
  }
  return out;
}

std::vector<InequalityReport> suite_inequalities(const SuiteConfig& c) {
  std::vector<InequalityReport> out;
  const LogConcaveFn g = gamma1(c.grid_n);
  const LogConcaveFn f = half_square(c.grid_n);
  const LogConcaveFn esq = e_sq(c.grid_n);

  const InequalityReport plt = check_prekopa_leindler(g, translate(g, 0.7), 0.5);
  out.push_back(equality("prekopa_leindler_translates", plt.lhs, plt.rhs,
                         c.tol > 0 ? c.tol : 1e-3));
  const InequalityReport pls = check_prekopa_leindler(g, esq, 0.5);
  out.push_back(ineq("prekopa_leindler_strict", pls.lhs, pls.rhs, c.tol));

  const InequalityReport mkt =
      check_minkowski_first(g, translate(g, 0.7), delta_J_fd(g, translate(g, 0.7)));
  out.push_back(equality("minkowski_first_translates", mkt.lhs, mkt.rhs,
                         c.tol > 0 ? c.tol : 1e-3));
  const InequalityReport mks = check_minkowski_first(g, esq, delta_J_fd(g, esq));
  out.push_back(ineq("minkowski_first_strict", mks.lhs, mks.rhs, c.tol));

  const InequalityReport iso = check_isoperimetric(g);
  out.push_back(equality("isoperimetric_gamma1", iso.lhs, iso.rhs,
                         c.tol > 0 ? c.tol : 1e-4));
  const InequalityReport isoq = check_isoperimetric(quartic_fn(c.grid_n));
  out.push_back(ineq("isoperimetric_quartic", isoq.lhs, isoq.rhs, c.tol));

  for (const double alpha : {0.1, 0.25, 0.4}) {
    std::vector<double> h(g.potential.grid.n[0]);
    for (std::size_t i = 0; i < h.size(); ++i)
      h[i] = std::exp(alpha * g.potential.grid.coord(0, i));
    const InequalityReport ls =
        check_log_sobolev(g.potential, h, AKind::Square, 1.0);
    char name[48];
    std::snprintf(name, sizeof name, "log_sobolev_alpha_%g", alpha);
    // the check already orients the gap as rhs - lhs for this <=-type bound
    InequalityReport r = ls;
    r.name = name;
    if (c.tol > 0) {
      r.tolerance = c.tol;
      r.holds = r.gap >= -r.tolerance;
    }
    out.push_back(r);
  }
  std::vector<double> h25(g.potential.grid.n[0]);
  for (std::size_t i = 0; i < h25.size(); ++i)
    h25[i] = std::exp(0.25 * g.potential.grid.coord(0, i));
  const InequalityReport ls25 = check_log_sobolev(g.potential, h25, AKind::Square, 1.0);
  out.push_back(equality("log_sobolev_factor_two", ls25.rhs / ls25.lhs, 2.0,
                         c.tol > 0 ? c.tol : 1e-3));

  const InequalityReport pm1 = check_pmixed_mass(ConvexBody::interval(-1, 1), 2.0);
  out.push_back(equality("pmixed_mass_interval", pm1.lhs, pm1.rhs,
                         c.tol > 0 ? c.tol : 1e-4 * pm1.rhs));
  const InequalityReport pmd = check_pmixed_mass(ConvexBody::disc(1.0), 2.0);
  out.push_back(equality("pmixed_mass_disc", pmd.lhs, pmd.rhs,
                         c.tol > 0 ? c.tol : 1e-3 * pmd.rhs));
  const InequalityReport pv = check_pmixed_variation(
      ConvexBody::interval(-1, 1), ConvexBody::interval(-2, 2), 2.0);
  out.push_back(equality("pmixed_variation_q2", pv.lhs, pv.rhs,
                         c.tol > 0 ? c.tol : 5e-3 * pv.rhs));
  return out;
}

std::vector<InequalityReport> minkowski_datum_reports(const SuiteConfig& c,
                                                      const MinkowskiDatum1D& d,
                                                      const char* label) {
  std::vector<InequalityReport> out;
  const FeasibilityReport diag = feasibility_diagnostic(d);
  const double p_hat =
      std::min(diag.plus.growth_exponent, diag.minus.growth_exponent);
  out.push_back(ineq(std::string("minkowski_growth_exponent_") + label, p_hat,
                     1.5, c.tol > 0 ? c.tol : 1e-9));
  const MinkowskiSolution1D sol = solve_minkowski_1d(d);
  out.push_back(bound(std::string("minkowski_tail_consistency_") + label,
                      sol.tail_mismatch, 1e-3, c.tol));
  out.push_back(bound(std::string("minkowski_ode_residual_") + label,
                      density_l1_error(sol, d), 2e-2 * d.mass, c.tol));
  out.push_back(bound(std::string("minkowski_mass_recovery_") + label,
                      std::abs(total_mass(sol.f) - d.mass), 2e-2 * d.mass, c.tol));
  return out;
}

std::vector<InequalityReport> suite_minkowski(const SuiteConfig& c) {
  std::vector<InequalityReport> out;
  if (!c.in_path.empty()) {
    const MinkowskiDatum1D d = load_datum(c.in_path);
    return minkowski_datum_reports(c, d, "datum");
  }
  const MinkowskiDatum1D gauss = analytic_datum(
      -8, 8, c.grid_n, [](double y) { return std::exp(-y * y / 2); });
  out = minkowski_datum_reports(c, gauss, "gaussian");

  const MinkowskiDatum1D lap = analytic_datum(
      -12, 12, 2401, [](double y) { return 0.5 * std::exp(-std::abs(y)); });
  const FeasibilityReport ld = feasibility_diagnostic(lap);
  const double lp = std::max(ld.plus.growth_exponent, ld.minus.growth_exponent);
  out.push_back(bound("minkowski_exponential_exponent", lp, 1.35, c.tol));

  bool refused = false;
  try {
    solve_minkowski_1d(analytic_datum(-8, 9, c.grid_n, [](double y) {
      return std::exp(-(y - 0.5) * (y - 0.5) / 2);
    }));
  } catch (const NecessaryConditionError&) {
    refused = true;
  }
  out.push_back(bound("minkowski_refuses_nonzero_barycenter", refused ? 0.0 : 1.0,
                      0.0, c.tol > 0 ? c.tol : 0.5));
  return out;
}

std::vector<InequalityReport> run_suites(const SuiteConfig& c) {
  std::vector<InequalityReport> out;
  auto append = [&](std::vector<InequalityReport> part) {
    for (auto& r : part) out.push_back(std::move(r));
  };
  if (c.suite == "conjugate" || c.suite == "all") append(suite_conjugate(c));
  if (c.suite == "algebra" || c.suite == "all") append(suite_algebra(c));
  if (c.suite == "variation" || c.suite == "all") append(suite_variation(c));
  if (c.suite == "measures" || c.suite == "all") append(suite_measures(c));
  if (c.suite == "inequalities" || c.suite == "all") append(suite_inequalities(c));
  if (c.suite == "minkowski" || c.suite == "all") append(suite_minkowski(c));
  return out;
}

// ---- commands ----

int cmd_conjugate(const std::string& in, std::string out_path, double target_lo,
                  double target_hi, bool has_target, std::size_t grid_n) {
  const PotentialGrid u = load_potential(in);
  PotentialGrid star;
  if (has_target) {
    if (!(target_lo < target_hi))
      throw ParseError("conjugate: need --target-lo < --target-hi");
    const std::size_t n = grid_n ? grid_n : u.grid.n[0];
    star = fenchel_conjugate(u, Grid::line(target_lo, target_hi, n));
  } else {
    star = fenchel_conjugate(u);
  }
  const double resid = fenchel_involution_residual(u);
  if (out_path.empty()) out_path = stem_of(in) + "_star.json";
  if (ends_with(out_path, ".csv")) {
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot write " + out_path);
    write_potential_csv(os, star);
  } else {
    save_json(out_path, to_json(star));
  }
  std::printf("conjugate of %s -> %s\n", in.c_str(), out_path.c_str());
  std::printf("involution residual %.6g\n", resid);
  return 0;
}

int cmd_oplus(const std::string& in, const std::string& in2, double alpha,
              double beta, std::string out_path) {
  const LogConcaveFn f = load_fn(in);
  const LogConcaveFn g = load_fn(in2);
  const LogConcaveFn s = oplus(f, g, alpha, beta);
  if (out_path.empty()) out_path = "oplus.json";
  save_json(out_path, to_json(s));
  std::printf("oplus(%g*%s, %g*%s) -> %s\n", alpha, in.c_str(), beta, in2.c_str(),
              out_path.c_str());
  std::printf("mass %.12g\n", total_mass(s));
  return 0;
}

int cmd_mass(const std::string& in, const std::string& out_path) {
  const LogConcaveFn f = load_fn(in);
  const double J = total_mass(f);
  std::printf("mass %.12g\n", J);
  if (!out_path.empty()) {
    json j;
    j["mass"] = J;
    save_json(out_path, j);
  }
  return 0;
}

int cmd_entropy(const std::string& in, const std::string& out_path) {
  const LogConcaveFn f = load_fn(in);
  const double J = total_mass(f);
  const double flogf = flogf_integral(f);
  const double ent = entropy(f);
  std::printf("mass    %.12g\n", J);
  std::printf("f log f %.12g\n", flogf);
  std::printf("entropy %.12g\n", ent);
  if (!out_path.empty()) {
    json j;
    j["mass"] = J;
    j["flogf"] = flogf;
    j["entropy"] = ent;
    save_json(out_path, j);
  }
  return 0;
}

int cmd_deltaj(const std::string& in, const std::string& in2, double t0,
               int levels, const std::string& out_path) {
  const LogConcaveFn f = load_fn(in);
  const LogConcaveFn g = load_fn(in2);
  const DeltaJEstimate fd = delta_J_fd(f, g, t0, levels);
  std::printf("finite differences  %.10g  (error bar %.3g)\n", fd.value,
              fd.error_bar);

  bool have_repr = false;
  double repr = 0;
  if (f.class_tag == FnClass::Aprime && g.class_tag == FnClass::Aprime) {
    repr = delta_J_repr_Aprime(f, g);
    have_repr = true;
  } else if (f.class_tag == FnClass::Adoubleprime &&
             g.class_tag == FnClass::Adoubleprime && f.potential.dim() == 1) {
    repr = delta_J_repr_Adoubleprime(f, g);
    have_repr = true;
  }
  if (have_repr)
    std::printf("representation      %.10g  (difference %.3g)\n", repr,
                std::abs(repr - fd.value));
  else
    std::printf("representation      unavailable for classes %s/%s\n",
                to_string(f.class_tag), to_string(g.class_tag));

  if (!out_path.empty()) {
    json j;
    j["fd"] = to_json(fd);
    if (have_repr) {
      DeltaJEstimate re;
      re.value = repr;
      re.error_bar = 0.0;
      re.method = DeltaJMethod::Representation;
      j["representation"] = to_json(re);
    }
    save_json(out_path, j);
  }
  return 0;
}

int cmd_measure(const std::string& in, std::string out_path,
                std::string sigma_path) {
  const LogConcaveFn f = load_fn(in);
  const ParticleMeasure mu = area_measure_mu(f);
  if (out_path.empty()) out_path = stem_of(in) + "_mu.json";
  save_json(out_path, to_json(mu));
  const NecessaryConditionReport rep = check_necessary_conditions(mu);
  std::printf("mu total %.12g (function mass %.12g)\n", mu.total, total_mass(f));
  std::printf("mu barycenter residual %.3g (null: %s)\n", rep.residual,
              rep.barycenter_vanishes ? "yes" : "no");
  std::printf("mu -> %s\n", out_path.c_str());

  if (f.class_tag == FnClass::Adoubleprime) {
    const SphereMeasure sg = area_measure_sigma(f);
    if (sigma_path.empty()) sigma_path = stem_of(in) + "_sigma.json";
    save_json(sigma_path, to_json(sg));
    std::printf("sigma total %.12g -> %s\n", sg.total(), sigma_path.c_str());
  }
  return 0;
}

int cmd_verify(const SuiteConfig& c) {
  static const char* known[] = {"conjugate", "algebra",     "variation", "measures",
                                "inequalities", "minkowski", "all"};
  if (std::find_if(std::begin(known), std::end(known), [&](const char* s) {
        return c.suite == s;
      }) == std::end(known)) {
    std::fprintf(stderr, "unknown suite \"%s\"\n", c.suite.c_str());
    return 2;
  }
  logmsg("running suite " + c.suite + " with seed " + std::to_string(c.seed));
  const std::vector<InequalityReport> reports = run_suites(c);
  print_table(reports);
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  save_json(c.out_path, arr);
  std::printf("report -> %s\n", c.out_path.c_str());
  const bool all_hold =
      std::all_of(reports.begin(), reports.end(),
                  [](const InequalityReport& r) { return r.holds; });
  return all_hold ? 0 : 1;
}

int cmd_solve(const std::string& in, std::string out_path) {
  const MinkowskiDatum1D d = load_datum(in);
  if (out_path.empty()) out_path = stem_of(in) + "_solution.json";
  const std::string stem = stem_of(out_path);

  MinkowskiSolution1D sol;
  try {
    sol = solve_minkowski_1d(d);
  } catch (const NecessaryConditionError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    std::fprintf(stderr,
                 "the slope problem requires a datum with null barycenter and "
                 "consistent tails\n");
    return 5;
  }

  save_json(out_path, to_json(sol));
  std::printf("solution -> %s\n", out_path.c_str());

  if (sol.feasibility == Feasibility::NotSolvableAprime) {
    const std::string trace_path = stem + "_feasibility.json";
    save_json(trace_path, to_json(sol.diagnostics));
    std::printf("datum classified %s; feasibility trace -> %s\n",
                to_string(sol.feasibility), trace_path.c_str());
    return 4;
  }

  {
    std::ofstream os(stem + "_phi.csv");
    os << "y,phi\n";
    for (std::size_t j = 0; j < sol.phi.grid.n[0]; ++j)
      os << detail::fmt(sol.phi.grid.coord(0, j)) << ',' << detail::fmt(sol.phi.values[j])
         << '\n';
  }
  {
    std::ofstream os(stem + "_f.csv");
    os << "x,f\n";
    const PotentialGrid& u = sol.f.potential;
    for (std::size_t j = 0; j < u.grid.n[0]; ++j)
      os << detail::fmt(u.grid.coord(0, j)) << ',' << detail::fmt(detail::density(u.values[j]))
         << '\n';
  }
  const std::vector<double> rec = recovered_density(sol);
  {
    std::ofstream os(stem + "_density.csv");
    os << "y,m_input,m_recovered\n";
    for (std::size_t j = 0; j < d.grid.n[0]; ++j)
      os << detail::fmt(d.grid.coord(0, j)) << ',' << detail::fmt(d.density[j]) << ','
         << detail::fmt(rec[j]) << '\n';
  }
  std::printf("plots -> %s_phi.csv, %s_f.csv, %s_density.csv\n", stem.c_str(),
              stem.c_str(), stem.c_str());
  std::printf("L1 recovery error %.6g (datum mass %.6g)\n",
              density_l1_error(sol, d), d.mass);
  std::printf("feasibility %s, M_infinity %.8g, tail mismatch %.3g\n",
              to_string(sol.feasibility), sol.M_infinity, sol.tail_mismatch);
  return 0;
}

int cmd_diagnose(const std::string& in, std::string out_path) {
  const MinkowskiDatum1D d = load_datum(in);
  const FeasibilityReport rep = feasibility_diagnostic(d);
  if (out_path.empty()) out_path = stem_of(in) + "_diagnostic.json";
  save_json(out_path, to_json(rep));
  std::printf("verdict %s\n", to_string(rep.verdict));
  std::printf("plus tail:  M_infinity %.8g, growth exponent %.4g, %s\n",
              rep.plus.M_infinity, rep.plus.growth_exponent,
              to_string(rep.plus.verdict));
  std::printf("minus tail: M_infinity %.8g, growth exponent %.4g, %s\n",
              rep.minus.M_infinity, rep.minus.growth_exponent,
              to_string(rep.minus.verdict));
  std::printf("diagnostic -> %s\n", out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transforms, verification suites and the 1-D slope-problem solver "
               "for log-concave functions"};
  app.require_subcommand(1);

  std::string in_path, in2_path, out_path, sigma_path;
  double target_lo = 0, target_hi = 0, alpha = 1.0, beta = 1.0, t0 = 0.1;
  int levels = 6;
  SuiteConfig cfg;

  CLI::App* conj = app.add_subcommand("conjugate", "convex conjugate of a potential");
  conj->add_option("--in", in_path, "input potential (.json or .csv)")->required();
  conj->add_option("--out", out_path, "output path (default <in>_star.json)");
  CLI::Option* tlo =
      conj->add_option("--target-lo,--grid-lo", target_lo, "target window start");
  CLI::Option* thi =
      conj->add_option("--target-hi,--grid-hi", target_hi, "target window end");
  conj->add_option("--grid-n", cfg.grid_n, "target node count (default: input size)");

  CLI::App* opl = app.add_subcommand("oplus", "Asplund combination alpha.f + beta.g");
  opl->add_option("--in", in_path, "first function")->required();
  opl->add_option("--in2", in2_path, "second function")->required();
  opl->add_option("--alpha", alpha, "weight of the first function");
  opl->add_option("--beta", beta, "weight of the second function");
  opl->add_option("--out", out_path, "output path (default oplus.json)");

  CLI::App* mas = app.add_subcommand("mass", "total integral J(f)");
  mas->add_option("--in", in_path, "function file")->required();
  mas->add_option("--out", out_path, "optional JSON output");

  CLI::App* ent = app.add_subcommand("entropy", "mass, f log f and Ent(f)");
  ent->add_option("--in", in_path, "function file")->required();
  ent->add_option("--out", out_path, "optional JSON output");

  CLI::App* dlj = app.add_subcommand(
      "deltaj", "first variation: finite differences and representation side by side");
  dlj->add_option("--in", in_path, "base function f")->required();
  dlj->add_option("--in2", in2_path, "direction function g")->required();
  dlj->add_option("--t0", t0, "largest step of the difference quotient");
  dlj->add_option("--levels", levels, "number of halved steps");
  dlj->add_option("--out", out_path, "optional JSON output");

  CLI::App* mea = app.add_subcommand("measure", "area measures of a function");
  mea->add_option("--in", in_path, "function file")->required();
  mea->add_option("--out", out_path, "output for mu (default <in>_mu.json)");
  mea->add_option("--out-sigma", sigma_path, "output for sigma (default <in>_sigma.json)");

  CLI::App* ver = app.add_subcommand("verify", "run a verification suite");
  ver->add_option("--suite", cfg.suite,
                  "conjugate|algebra|variation|measures|inequalities|minkowski|all");
  ver->add_option("--in", cfg.in_path, "datum CSV for the minkowski suite");
  ver->add_option("--out", cfg.out_path, "report path (default report.json)");
  ver->add_option("--tol", cfg.tol, "override every tolerance in the suite");
  ver->add_option("--seed", cfg.seed, "seed for randomized sweeps (default 42)");
  ver->add_option("--grid-n", cfg.grid_n, "fixture resolution (default 2001)");

  CLI::App* sol = app.add_subcommand("solve", "solve the 1-D slope problem");
  sol->add_option("--in", in_path, "datum CSV (columns y,m)")->required();
  sol->add_option("--out", out_path, "solution path (default <in>_solution.json)");

  CLI::App* dia = app.add_subcommand("diagnose", "feasibility diagnostic of a datum");
  dia->add_option("--in", in_path, "datum CSV (columns y,m)")->required();
  dia->add_option("--out", out_path, "diagnostic path (default <in>_diagnostic.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (conj->parsed()) {
      const bool has_target = tlo->count() > 0 || thi->count() > 0;
      if (has_target && (tlo->count() == 0 || thi->count() == 0))
        throw ParseError("conjugate: --target-lo and --target-hi go together");
      return cmd_conjugate(in_path, out_path, target_lo, target_hi, has_target,
                           cfg.grid_n == 2001 ? 0 : cfg.grid_n);
    }
    if (opl->parsed()) return cmd_oplus(in_path, in2_path, alpha, beta, out_path);
    if (mas->parsed()) return cmd_mass(in_path, out_path);
    if (ent->parsed()) return cmd_entropy(in_path, out_path);
    if (dlj->parsed()) return cmd_deltaj(in_path, in2_path, t0, levels, out_path);
    if (mea->parsed()) return cmd_measure(in_path, out_path, sigma_path);
    if (ver->parsed()) return cmd_verify(cfg);
    if (sol->parsed()) return cmd_solve(in_path, out_path);
    if (dia->parsed()) return cmd_diagnose(in_path, out_path);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const SlopeRangeError& e) {
    std::fprintf(stderr,
                 "%s: the requested target window clips the attained slopes\n",
                 e.what());
    return 3;
  } catch (const NecessaryConditionError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 5;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
  return 0;
}
