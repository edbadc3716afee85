// Solving the slope problem: recovering a log-concave function from its
// prescribed gradient pushforward, feasibility classification, necessary
// conditions, and uniqueness up to translation.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "logcave/minkowski.hpp"

using namespace logcave;

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005;

MinkowskiDatum1D analytic_datum(double lo, double hi, std::size_t n, double (*m)(double)) {
  const Grid g = Grid::line(lo, hi, n);
  std::vector<double> density(n);
  for (std::size_t i = 0; i < n; ++i) density[i] = m(g.coord(0, i));
  return make_datum(g, std::move(density));
}

double gaussian_m(double y) { return std::exp(-y * y / 2); }
double squared_exp_m(double y) { return 0.5 * std::exp(-y * y / 4); }
double laplace_m(double y) { return 0.5 * std::exp(-std::abs(y)); }
double parabola_m(double y) { return 0.75 * std::max(0.0, 1.0 - y * y); }

LogConcaveFn half_square(double shift = 0.0) {
  return as_logconcave(sample_1d(-8 + shift, 8 + shift, 2001,
                                 [shift](double x) { return (x - shift) * (x - shift) / 2; }),
                       FnClass::Aprime);
}

LogConcaveFn gamma1() {
  return make_gaussian(1, Grid::line(-8, 8, 2001));
}

LogConcaveFn e_sq() {
  return as_logconcave(sample_1d(-8, 8, 2001, [](double x) { return x * x; }),
                       FnClass::Aprime);
}

LogConcaveFn cosh_fn() {
  return as_logconcave(sample_1d(-6, 6, 2001, [](double x) { return std::cosh(x) - 1; }),
                       FnClass::Aprime);
}

LogConcaveFn circle_fn() {
  auto p = sample_1d(-1.5, 1.5, 1201, [](double x) {
    if (std::abs(x) > 1.0) return kInf;
    return 1.0 - std::sqrt(std::max(0.0, 1.0 - x * x));
  });
  p.body = ConvexBody::interval(-1, 1);
  p.domain_kind = DomainKind::ConvexBodyDomain;
  return as_logconcave(std::move(p), FnClass::Adoubleprime);
}

// worst deviation of the computed potential from a reference over |y| <= win
double sup_phi_err(const MinkowskiSolution1D& sol, double (*ref)(double), double win) {
  double worst = 0;
  const Grid& g = sol.phi.grid;
  for (std::size_t j = 0; j < g.n[0]; ++j) {
    const double y = g.coord(0, j);
    if (std::abs(y) > win) continue;
    worst = std::max(worst, std::abs(sol.phi.values[j] - ref(y)));
  }
  return worst;
}

// L1 distance between densities, sampled finely over the union of windows
double l1_between(const LogConcaveFn& a, const LogConcaveFn& b) {
  const double lo = std::min(a.potential.grid.lo[0], b.potential.grid.lo[0]);
  const double hi = std::max(a.potential.grid.hi[0], b.potential.grid.hi[0]);
  const std::size_t n = 8001;
  const double h = (hi - lo) / static_cast<double>(n - 1);
  double acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double da = x < a.potential.grid.lo[0] || x > a.potential.grid.hi[0]
                          ? 0.0
                          : detail::density(detail::interp1(a.potential, x));
    const double db = x < b.potential.grid.lo[0] || x > b.potential.grid.hi[0]
                          ? 0.0
                          : detail::density(detail::interp1(b.potential, x));
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    acc += w * std::abs(da - db) * h;
  }
  return acc;
}

// L1 norm of e^{phi - y phi'} phi'' - m over the datum window
double ode_residual_l1(const MinkowskiSolution1D& sol, const MinkowskiDatum1D& datum) {
  const Grid& g = sol.phi.grid;
  const double h = g.h(0);
  double acc = 0;
  for (std::size_t j = 1; j + 1 < g.n[0]; ++j) {
    const double pm = sol.phi.values[j - 1], p0 = sol.phi.values[j], pp = sol.phi.values[j + 1];
    if (!is_finite(pm) || !is_finite(p0) || !is_finite(pp)) continue;
    const double y = g.coord(0, j);
    const double d1 = (pp - pm) / (2 * h);
    const double d2 = (pp - 2 * p0 + pm) / (h * h);
    acc += std::abs(std::exp(p0 - y * d1) * d2 - datum.density[j]) * h;
  }
  return acc;
}

}  // namespace

TEST_CASE("gaussian datum reproduces the squared potential") {
  const auto datum = analytic_datum(-8, 8, 2001, gaussian_m);
  CHECK(datum.mass == Catch::Approx(kSqrt2Pi).epsilon(1e-6));
  CHECK(std::abs(datum.barycenter) < 1e-12);

  const auto sol = solve_minkowski_1d(datum);
  CHECK(sol.feasibility == Feasibility::SolvableAprime);
  CHECK(sol.M_infinity == Catch::Approx(1.0).margin(5e-6));
  CHECK(sol.phi0 == Catch::Approx(0.0).margin(5e-6));
  CHECK(sol.tail_mismatch < 1e-9);

  CHECK(sup_phi_err(sol, [](double y) { return y * y / 2; }, 4.0) <= 1e-3);

  CHECK(sol.f.class_tag == FnClass::Aprime);
  const auto reference = half_square();
  CHECK(l1_between(sol.f, reference) <= 2e-2 * kSqrt2Pi);
  CHECK(total_mass(sol.f) == Catch::Approx(kSqrt2Pi).epsilon(5e-3));

  CHECK(sol.diagnostics.plus.growth_exponent == Catch::Approx(2.0).margin(0.1));
  CHECK(sol.diagnostics.minus.growth_exponent == Catch::Approx(2.0).margin(0.1));
}

TEST_CASE("squared-exponential datum reproduces the quarter potential") {
  const auto datum = analytic_datum(-8, 8, 2001, squared_exp_m);
  const auto sol = solve_minkowski_1d(datum);
  CHECK(sol.feasibility == Feasibility::SolvableAprime);
  CHECK(sol.M_infinity == Catch::Approx(1.0).margin(5e-6));
  CHECK(sup_phi_err(sol, [](double y) { return y * y / 4; }, 4.0) <= 1e-3);
  CHECK(l1_between(sol.f, e_sq()) <= 2e-2 * std::sqrt(std::numbers::pi));
}

TEST_CASE("exponential tails are classified not solvable") {
  const auto datum = analytic_datum(-12, 12, 2401, laplace_m);
  const auto sol = solve_minkowski_1d(datum);
  CHECK(sol.feasibility == Feasibility::NotSolvableAprime);
  CHECK(sol.diagnostics.plus.growth_exponent > 1.1);
  CHECK(sol.diagnostics.plus.growth_exponent <= 1.35);

  // the potential itself still exists; only full membership in the smooth
  // positive class fails
  CHECK(total_mass(sol.f) > 0.1);

  const auto diag = feasibility_diagnostic(datum);
  CHECK(diag.verdict == Feasibility::NotSolvableAprime);
  CHECK(diag.plus.verdict == Feasibility::NotSolvableAprime);
  CHECK(diag.minus.verdict == Feasibility::NotSolvableAprime);
}

TEST_CASE("slope growth traces separate gaussian from exponential decay") {
  const auto gauss = feasibility_diagnostic(analytic_datum(-8, 8, 2001, gaussian_m));
  REQUIRE(!gauss.plus.trace.empty());
  CHECK(gauss.plus.trace.front().second == Catch::Approx(0.0).margin(1e-9));
  // integrand is exactly -1/2, so the trace is -(y - 1)/2
  CHECK(gauss.plus.trace.back().first == Catch::Approx(8.0).margin(1e-9));
  CHECK(gauss.plus.trace.back().second == Catch::Approx(-3.5).margin(0.05));
  // minus tail reports mirrored coordinates
  CHECK(gauss.minus.trace.back().first == Catch::Approx(-8.0).margin(1e-9));

  const auto lap = feasibility_diagnostic(analytic_datum(-12, 12, 2401, laplace_m));
  REQUIRE(!lap.plus.trace.empty());
  // logarithmic growth: far shallower than the gaussian trace at the same y
  const double s_end = lap.plus.trace.back().second;
  CHECK(s_end < -1.2);
  CHECK(s_end > -1.6);
  for (std::size_t k = 1; k < lap.plus.trace.size(); ++k)
    CHECK(lap.plus.trace[k].second <= lap.plus.trace[k - 1].second + 1e-12);
}

TEST_CASE("compactly supported datum is solvable with a body domain") {
  const auto datum = analytic_datum(-3, 3, 1501, parabola_m);
  const auto sol = solve_minkowski_1d(datum);
  CHECK(sol.feasibility == Feasibility::SolvableAprime);
  CHECK(std::isinf(sol.diagnostics.plus.growth_exponent));
  CHECK(sol.M_infinity == Catch::Approx(3.0 / 16.0).epsilon(1e-5));

  REQUIRE(sol.phi.domain_kind == DomainKind::ConvexBodyDomain);
  REQUIRE(sol.phi.body.has_value());
  CHECK(sol.phi.body->b == Catch::Approx(1.0).margin(2e-2));
  CHECK(sol.phi.body->a == Catch::Approx(-1.0).margin(2e-2));
  CHECK(total_mass(sol.f) > 0.0);
}

TEST_CASE("nonzero barycenter is refused with the necessary condition message") {
  const auto shifted = analytic_datum(-8, 9, 2001,
                                      [](double y) { return std::exp(-(y - 0.5) * (y - 0.5) / 2); });
  CHECK(shifted.barycenter == Catch::Approx(0.5 * kSqrt2Pi).epsilon(1e-6));
  CHECK_THROWS_AS(solve_minkowski_1d(shifted), NecessaryConditionError);
  CHECK_THROWS_WITH(solve_minkowski_1d(shifted),
                    "necessary condition failed: the datum must have null barycenter");
}

TEST_CASE("tails that disagree on the anchor are refused") {
  // a heavy central spike keeps the barycenter inside its gate while the two
  // side bumps carry visibly different tail masses
  const auto datum = analytic_datum(-4, 4, 2001, [](double y) {
    const double core = 2.0 * std::exp(-(y / 0.05) * (y / 0.05));
    const double right = 1.005e-2 * std::exp(-((y - 2) / 0.2) * ((y - 2) / 0.2));
    const double left = 0.995e-2 * std::exp(-((y + 2) / 0.2) * ((y + 2) / 0.2));
    return core + right + left;
  });
  CHECK(std::abs(datum.barycenter) < 1e-3 * datum.mass);
  CHECK_THROWS_AS(solve_minkowski_1d(datum), NecessaryConditionError);
  CHECK_THROWS_WITH(solve_minkowski_1d(datum),
                    "datum inconsistent: the two tails disagree on e^{phi(0)}");
}

TEST_CASE("datum constructors validate and conserve moments") {
  const Grid g = Grid::line(-2, 2, 101);
  CHECK_THROWS_AS(make_datum(g, std::vector<double>(50, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(make_datum(g, std::vector<double>(101, -1.0)), std::invalid_argument);
  CHECK_THROWS_AS(make_datum(Grid::box(-1, 1, 11, -1, 1, 11), std::vector<double>(121, 1.0)),
                  std::invalid_argument);

  ParticleMeasure mu;
  mu.dim = 1;
  mu.points = {{-1.25, 0}, {0.5, 0}, {2.0, 0}, {0.75, 0}};
  mu.weights = {0.5, 1.25, 0.25, 1.0};
  for (double w : mu.weights) mu.total += w;
  const auto binned = datum_from_particles(mu, 257);
  CHECK(binned.mass == Catch::Approx(3.0).epsilon(1e-12));
  // linear deposit preserves the first moment node by node
  const double moment = -1.25 * 0.5 + 0.5 * 1.25 + 2.0 * 0.25 + 0.75 * 1.0;
  CHECK(binned.barycenter == Catch::Approx(moment).margin(1e-12));

  ParticleMeasure empty;
  CHECK_THROWS_AS(datum_from_particles(empty), std::invalid_argument);

  // the window must straddle the origin for the half-line integrals
  const auto off = analytic_datum(1, 2, 51, [](double) { return 1.0; });
  CHECK_THROWS_AS(solve_minkowski_1d(off), std::invalid_argument);

  // a tail with no mass at all cannot anchor the potential
  const auto one_sided = analytic_datum(-3, 1, 401, [](double y) {
    return std::max(0.0, (y + 2) * (-1 - y)) * 3.0;
  });
  const auto diag = feasibility_diagnostic(one_sided);
  CHECK(diag.plus.M_infinity == 0.0);
  CHECK(diag.plus.verdict == Feasibility::NotSolvableAprime);
}

TEST_CASE("round trips through the slope measure") {
  struct Case {
    LogConcaveFn f;
    std::size_t bins;
  };
  const Case cases[] = {
      {gamma1(), 1025},
      {e_sq(), 1025},
      {cosh_fn(), 8193},
  };
  for (const auto& c : cases) {
    const auto mu = area_measure_mu(c.f);
    const auto datum = datum_from_particles(mu, c.bins);
    CHECK(datum.mass == Catch::Approx(mu.total).epsilon(1e-12));

    const auto sol = solve_minkowski_1d(datum);
    const double budget = 2e-2 * total_mass(c.f);
    INFO("bins = " << c.bins << ", J = " << total_mass(c.f));
    CHECK(l1_between(sol.f, c.f) <= budget);
  }
}

TEST_CASE("solution is invariant under translating the source") {
  // the slope measure of a translate is the slope measure itself, so the
  // solver returns the centered representative; alignment reports the shift
  const auto sol = solve_minkowski_1d(analytic_datum(-8, 8, 2001, gaussian_m));
  const auto f_t = half_square(1.0);
  CHECK(l1_between(sol.f, half_square()) <= 2e-2 * kSqrt2Pi);

  const auto rep = verify_uniqueness(f_t, sol.f, 5e-3);
  CHECK(rep.equalities_hold);
  CHECK(rep.translation_found);
  CHECK(rep.x0 == Catch::Approx(-1.0).margin(0.05));
  CHECK(rep.consistent);

  const auto mu = area_measure_mu(f_t);
  const auto sol2 = solve_minkowski_1d(datum_from_particles(mu));
  CHECK(l1_between(sol2.f, half_square()) <= 2e-2 * kSqrt2Pi);
}

TEST_CASE("pushforward equation holds along the recovered potential") {
  const auto analytic = analytic_datum(-8, 8, 2001, gaussian_m);
  CHECK(ode_residual_l1(solve_minkowski_1d(analytic), analytic) <= 2e-2 * analytic.mass);

  const auto quarter = analytic_datum(-8, 8, 2001, squared_exp_m);
  CHECK(ode_residual_l1(solve_minkowski_1d(quarter), quarter) <= 2e-2 * quarter.mass);

  const auto binned = datum_from_particles(area_measure_mu(gamma1()));
  CHECK(ode_residual_l1(solve_minkowski_1d(binned), binned) <= 2e-2 * binned.mass);
}

TEST_CASE("necessary condition report on centered and off-center measures") {
  const auto mu = area_measure_mu(gamma1());
  const auto rep = check_necessary_conditions(mu);
  CHECK(rep.mu_mass_finite);
  CHECK(rep.sigma_mass_finite);
  CHECK(rep.barycenter_vanishes);
  CHECK(std::abs(rep.residual) <= 1e-6);

  // translating the source does not move the slope measure's barycenter
  const auto mu_t = area_measure_mu(half_square(1.0));
  CHECK(check_necessary_conditions(mu_t).barycenter_vanishes);

  // a function with a body domain needs its boundary term: mu alone may
  // be balanced or not, but mu + sigma must be
  const auto disc = circle_fn();
  const auto mu_d = area_measure_mu(disc);
  const auto sg = area_measure_sigma(disc);
  const auto both = check_necessary_conditions(mu_d, &sg);
  CHECK(both.sigma_mass_finite);
  CHECK(both.barycenter_vanishes);

  ParticleMeasure off;
  off.dim = 1;
  off.points = {{1.0, 0}};
  off.weights = {1.0};
  off.total = 1.0;
  const auto bad = check_necessary_conditions(off);
  CHECK(bad.residual == Catch::Approx(1.0));
  CHECK_FALSE(bad.barycenter_vanishes);
}

TEST_CASE("uniqueness verifier separates translates from distinct functions") {
  const auto f = half_square();

  SECTION("a translate passes every equality and is located") {
    const auto g = translate(f, 1.5);
    const auto rep = verify_uniqueness(f, g);
    CHECK(rep.equalities_hold);
    CHECK(rep.max_residual <= rep.tolerance);
    CHECK(rep.translation_found);
    CHECK(rep.x0 == Catch::Approx(1.5).margin(0.02));
    CHECK(rep.consistent);
  }

  SECTION("a function against itself sits at zero shift") {
    const auto rep = verify_uniqueness(f, f);
    CHECK(rep.equalities_hold);
    CHECK(rep.translation_found);
    CHECK(rep.x0 == 0.0);
    CHECK(rep.consistent);
  }

  SECTION("a mass-matched but different shape fails the equalities") {
    // sqrt(2) e^{-x^2} carries the same mass as e^{-x^2/2}
    const auto g = as_logconcave(
        sample_1d(-8, 8, 2001, [](double x) { return x * x - 0.5 * std::log(2.0); }),
        FnClass::Aprime);
    CHECK(total_mass(g) == Catch::Approx(kSqrt2Pi).epsilon(1e-6));

    const auto rep = verify_uniqueness(f, g);
    const double log2 = std::log(2.0);
    CHECK(rep.d11 == Catch::Approx(kSqrt2Pi / 2).epsilon(1e-4));
    CHECK(rep.d12 == Catch::Approx(kSqrt2Pi * (0.25 + 0.5 * log2)).epsilon(1e-4));
    CHECK(rep.d21 == Catch::Approx(kSqrt2Pi).epsilon(1e-4));
    CHECK(rep.d22 == Catch::Approx(kSqrt2Pi * 0.5 * (1 + log2)).epsilon(1e-4));
    CHECK_FALSE(rep.equalities_hold);
    CHECK(rep.max_residual > 0.1);
    CHECK_FALSE(rep.translation_found);
    CHECK(rep.consistent);
  }

  SECTION("mass mismatch is rejected outright") {
    CHECK_THROWS_AS(verify_uniqueness(f, e_sq()), std::invalid_argument);
  }
}
