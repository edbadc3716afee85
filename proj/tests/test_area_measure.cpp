// Area measures, admissible perturbations, and the representation formulas
// for the first variation.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "logcave/measure.hpp"

using namespace logcave;

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005;

LogConcaveFn half_square(double shift = 0.0) {
  return as_logconcave(
      sample_1d(-8 + shift, 8 + shift, 2001,
                [=](double x) { return (x - shift) * (x - shift) / 2; }),
      FnClass::Aprime);
}

LogConcaveFn e_sq() {
  return as_logconcave(sample_1d(-8, 8, 2001, [](double x) { return x * x; }),
                       FnClass::Aprime);
}

LogConcaveFn gamma1() { return make_gaussian(1, Grid::line(-8, 8, 2001)); }

LogConcaveFn unit_indicator() {
  return as_logconcave(indicator_of(ConvexBody::interval(-1, 1), Grid::line(-2, 2, 401)));
}

LogConcaveFn cosh_fn() {
  return as_logconcave(sample_1d(-6, 6, 2001, [](double x) { return std::cosh(x) - 1; }),
                       FnClass::Aprime);
}

LogConcaveFn quartic_fn() {
  return as_logconcave(sample_1d(-8, 8, 2001, [](double x) { return x * x * x * x / 4; }),
                       FnClass::Aprime);
}

// r - sqrt(r^2 - x^2) on [-r, r], gradient blowing up at the endpoints
LogConcaveFn circle_fn(double r = 1.0, double shift = 0.0, double tilt = 0.0) {
  auto p = sample_1d(-1.5 * r + shift, 1.5 * r + shift, 1201, [=](double x0) {
    const double x = x0 - shift;
    if (std::abs(x) > r) return kInf;
    return r - std::sqrt(std::max(0.0, r * r - x * x)) + tilt * x;
  });
  p.body = ConvexBody::interval(-r + shift, r + shift);
  p.domain_kind = DomainKind::ConvexBodyDomain;
  return as_logconcave(std::move(p), FnClass::Adoubleprime);
}

// unit depth over a stretched domain: 1 - sqrt(1 - (x/R)^2) on [-R, R]
LogConcaveFn stretched_circle(double R = 1.5) {
  auto p = sample_1d(-1.5 * R, 1.5 * R, 1201, [=](double x) {
    if (std::abs(x) > R) return kInf;
    return 1.0 - std::sqrt(std::max(0.0, 1.0 - (x / R) * (x / R)));
  });
  p.body = ConvexBody::interval(-R, R);
  p.domain_kind = DomainKind::ConvexBodyDomain;
  return as_logconcave(std::move(p), FnClass::Adoubleprime);
}

LogConcaveFn spike(double v0 = 1.0) {
  PotentialGrid p;
  p.grid = Grid::line(-8, 8, 2001);
  p.values.assign(2001, kInf);
  p.values[1000] = v0;
  p.domain_kind = DomainKind::ConvexBodyDomain;
  return as_logconcave(std::move(p));
}

LogConcaveFn gauss2() {
  return as_logconcave(sample_2d(Grid::box(-6, 6, 181, -6, 6, 181),
                                 [](double x, double y) { return (x * x + y * y) / 2; }),
                       FnClass::Aprime);
}

LogConcaveFn e_sq2() {
  return as_logconcave(sample_2d(Grid::box(-6, 6, 181, -6, 6, 181),
                                 [](double x, double y) { return x * x + y * y; }),
                       FnClass::Aprime);
}

// Bin the pushforward into 64 buckets and compare with the predicted density.
// Each particle stands for a source cell, so its mass is spread over the gap
// to its neighbors; hard assignment would add one-particle shot noise per bin
// edge, which at 2000 particles is the same order as the tolerance.
double l1_against_density(const ParticleMeasure& mu, double (*rho)(double)) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(mu.points.size());
  for (std::size_t i = 0; i < mu.points.size(); ++i)
    pts.emplace_back(mu.points[i][0], mu.weights[i]);
  std::sort(pts.begin(), pts.end());
  const double ymin = pts.front().first, ymax = pts.back().first;
  const int nb = 64;
  const double w = (ymax - ymin) / nb;
  std::vector<double> mass(nb, 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double lo = i ? 0.5 * (pts[i - 1].first + pts[i].first) : pts[i].first;
    const double hi =
        i + 1 < pts.size() ? 0.5 * (pts[i].first + pts[i + 1].first) : pts[i].first;
    if (!(hi > lo)) {
      mass[std::clamp(static_cast<int>((pts[i].first - ymin) / w), 0, nb - 1)] += pts[i].second;
      continue;
    }
    const int b0 = std::clamp(static_cast<int>((lo - ymin) / w), 0, nb - 1);
    const int b1 = std::clamp(static_cast<int>((hi - ymin) / w), 0, nb - 1);
    for (int b = b0; b <= b1; ++b) {
      const double a = std::max(lo, ymin + b * w), c = std::min(hi, ymin + (b + 1) * w);
      if (c > a) mass[b] += pts[i].second * (c - a) / (hi - lo);
    }
  }
  double l1 = 0;
  for (int b = 0; b < nb; ++b)
    l1 += std::abs(mass[b] / w - rho(ymin + (b + 0.5) * w)) * w;
  return l1;
}

}  // namespace

TEST_CASE("particle measure conserves mass") {
  for (const auto& f : {half_square(), e_sq(), gamma1(), cosh_fn(), quartic_fn(), circle_fn()}) {
    const double J = total_mass(f);
    CHECK(std::abs(area_measure_mu(f).total - J) <= 1e-4 * J);
  }
  const auto g2 = gauss2();
  const double J2 = total_mass(g2);
  CHECK(std::abs(area_measure_mu(g2).total - J2) <= 1e-4 * J2);
}

TEST_CASE("particle measure needs a gradient") {
  CHECK_THROWS_AS(area_measure_mu(unit_indicator()), ClassError);
  CHECK_THROWS_AS(area_measure_sigma(half_square()), ClassError);
}

TEST_CASE("gradient pushforward has the predicted density") {
  // grad u = x pushes e^{-x^2/2} to itself
  CHECK(l1_against_density(area_measure_mu(half_square()),
                           [](double y) { return std::exp(-y * y / 2); }) <= 1e-2);
  // grad u = 2x pushes e^{-x^2} to e^{-y^2/4}/2, total sqrt(pi)
  const auto mu = area_measure_mu(e_sq());
  CHECK(l1_against_density(mu, [](double y) { return std::exp(-y * y / 4) / 2; }) <= 1e-2);
  CHECK(mu.total == Catch::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-4));
}

TEST_CASE("gradient pushforward balances") {
  // int y dmu(f) = 0 whenever f decays: the cell sum telescopes exactly
  for (const auto& f : {half_square(0.7), gamma1(), cosh_fn(), quartic_fn()}) {
    const auto m = mu_first_moment(area_measure_mu(f));
    CHECK(std::abs(m[0]) <= 1e-9);
  }
  // a tilted, correlated 2-D quadratic: nothing cancels by symmetry
  const auto f2 = as_logconcave(
      sample_2d(Grid::box(-6, 6, 241, -6, 6, 241),
                [](double x, double y) { return (x * x + y * y) / 2 + 0.3 * x + 0.25 * x * y; }),
      FnClass::Aprime);
  const auto m2 = mu_first_moment(area_measure_mu(f2));
  const double scale = std::max(1.0, area_measure_mu(f2).total);
  CHECK(std::abs(m2[0]) <= 1e-3 * scale);
  CHECK(std::abs(m2[1]) <= 1e-3 * scale);
}

TEST_CASE("sphere measure atoms are the boundary values") {
  const auto sg = area_measure_sigma(circle_fn());
  CHECK(sg.minus == Catch::Approx(std::exp(-1.0)).margin(1e-12));
  CHECK(sg.plus == Catch::Approx(std::exp(-1.0)).margin(1e-12));

  // plain indicator: no gradient anywhere, but the boundary atoms make sense
  const auto si = area_measure_sigma(unit_indicator());
  CHECK(si.minus == 1.0);
  CHECK(si.plus == 1.0);

  // potential blowing up at the boundary: the atoms vanish
  auto blow = sample_1d(-1.2, 1.2, 1201, [](double x) {
    if (std::abs(x) >= 1.0) return kInf;
    return -std::log(std::cos(std::numbers::pi * x / 2));
  });
  blow.body = ConvexBody::interval(-1, 1);
  blow.domain_kind = DomainKind::ConvexBodyDomain;
  const auto sb = area_measure_sigma(as_logconcave(std::move(blow), FnClass::Adoubleprime));
  CHECK(std::abs(sb.minus) <= 1e-2);
  CHECK(std::abs(sb.plus) <= 1e-2);

  // translate of the circle potential to [0, 2]
  const auto st = area_measure_sigma(circle_fn(1.0, 1.0));
  CHECK(st.minus == Catch::Approx(std::exp(-1.0)).margin(1e-12));
  CHECK(st.plus == Catch::Approx(std::exp(-1.0)).margin(1e-12));
  CHECK(std::abs(sigma_first_moment(st)[0]) <= 1e-12);
}

TEST_CASE("area measures balance for boundary-visiting functions") {
  // int y d(mu + sigma) = 0; discretely both sides telescope to f(a) - f(b)
  for (const auto& f : {circle_fn(), circle_fn(1.0, 1.0), circle_fn(1.0, 0.0, 0.5)}) {
    const double mu1 = mu_first_moment(area_measure_mu(f))[0];
    const double sg1 = sigma_first_moment(area_measure_sigma(f))[0];
    CHECK(std::abs(mu1 + sg1) <= 1e-9);
  }
  // the tilted circle really is asymmetric: both moments are far from zero
  const double tilted = mu_first_moment(area_measure_mu(circle_fn(1.0, 0.0, 0.5)))[0];
  CHECK(std::abs(tilted) >= 0.1);
}

TEST_CASE("largest admissible perturbation scale") {
  CHECK(admissible_c_max(half_square(), e_sq()) == Catch::Approx(2.0).margin(1e-3));
  CHECK(admissible_c_max(e_sq(), half_square()) == Catch::Approx(0.5).margin(1e-3));
  CHECK(admissible_c_max(half_square(), half_square()) == Catch::Approx(1.0).margin(1e-4));
  CHECK(admissible_c_max(circle_fn(), circle_fn()) == Catch::Approx(1.0).margin(1e-4));

  // a point mass has an affine conjugate: it never destroys convexity
  CHECK(admissible_c_max(half_square(), spike()) == 1e6);
  // and nothing convex survives being subtracted from an affine conjugate
  CHECK(admissible_c_max(spike(), half_square()) == 0.0);

  // h_K has no curvature away from the origin, so no positive scale works;
  // the wide stencil smears the origin atom, hence the loose zero
  CHECK(admissible_c_max(unit_indicator(), half_square()) <= 1e-2);
}

TEST_CASE("admissible perturbation scale in dimension two") {
  CHECK(admissible_c_max(gauss2(), e_sq2()) == Catch::Approx(2.0).epsilon(0.03));
  CHECK(admissible_c_max(gauss2(), gauss2()) == Catch::Approx(1.0).margin(1e-4));

  // a kink makes the conjugate flat along one axis where the gaussian is not
  const auto kink = as_logconcave(
      sample_2d(Grid::box(-6, 6, 181, -6, 6, 181),
                [](double x, double y) { return std::abs(x) + y * y / 2; }),
      FnClass::Aprime);
  CHECK(admissible_c_max(kink, gauss2()) == 0.0);
}

TEST_CASE("gradient representation of the first variation") {
  std::vector<std::string> warnings;
  CHECK(delta_J_repr_Aprime(half_square(), half_square(), &warnings) ==
        Catch::Approx(kSqrt2Pi / 2).margin(1e-4));
  CHECK(!warnings.empty());

  // against the gaussian the representation is the perimeter
  CHECK(delta_J_repr_Aprime(half_square(), gamma1()) ==
        Catch::Approx(-1.0501231726632709).margin(1e-4));
  CHECK(delta_J_repr_Aprime(half_square(), e_sq()) ==
        Catch::Approx(std::sqrt(std::numbers::pi / 8)).margin(1e-4));

  // cross-check pairs without closed forms against finite differences
  const std::vector<std::pair<LogConcaveFn, LogConcaveFn>> pairs = {
      {cosh_fn(), half_square()}, {e_sq(), cosh_fn()}, {quartic_fn(), gamma1()}};
  for (const auto& [f, g] : pairs) {
    const double repr = delta_J_repr_Aprime(f, g);
    const auto fd = delta_J_fd(f, g);
    CHECK(std::abs(repr - fd.value) <=
          std::max(1e-3 * std::max(1.0, std::abs(fd.value)), 3 * fd.error_bar));
  }

  // dimension two, admissible pair: int |x|^2/4 e^{-|x|^2/2} = pi
  CHECK(delta_J_repr_Aprime(gauss2(), e_sq2()) ==
        Catch::Approx(std::numbers::pi).epsilon(5e-3));
}

TEST_CASE("representation formula guards") {
  const auto kink = as_logconcave(
      sample_2d(Grid::box(-6, 6, 181, -6, 6, 181),
                [](double x, double y) { return std::abs(x) + y * y / 2; }),
      FnClass::Aprime);
  CHECK_THROWS_WITH(delta_J_repr_Aprime(kink, gauss2()), "hypothesis not met");

  CHECK_THROWS_AS(delta_J_repr_Aprime(circle_fn(), half_square()), ClassError);
  CHECK_THROWS_WITH(delta_J_repr_Adoubleprime(gauss2(), gauss2()),
                    "boundary representation implemented in dimension 1 only");
  CHECK_THROWS_AS(delta_J_repr_Adoubleprime(circle_fn(), half_square()), ClassError);
  // right class but no domain body recorded
  const auto untracked = as_logconcave(
      sample_1d(-1.5, 1.5, 1201,
                [](double x) {
                  return std::abs(x) > 1.0
                             ? kInf
                             : 1.0 - std::sqrt(std::max(0.0, 1.0 - x * x));
                }),
      FnClass::Adoubleprime);
  CHECK_THROWS_AS(delta_J_repr_Adoubleprime(untracked, untracked), ClassError);
}

TEST_CASE("boundary representation of the first variation") {
  const auto circle = circle_fn();

  // self variation has the closed form n J + int f log f
  const double self = delta_J_repr_Adoubleprime(circle, circle);
  CHECK(self == Catch::Approx(1.3688268059340501).epsilon(5e-3));

  // translating either side leaves the variation unchanged
  CHECK(delta_J_repr_Adoubleprime(circle_fn(1.0, 1.0), circle) ==
        Catch::Approx(self).margin(1e-6));
  CHECK(delta_J_repr_Adoubleprime(circle, circle_fn(1.0, 0.3)) ==
        Catch::Approx(self).margin(1e-6));

  // a larger domain for the perturbation brings in real boundary terms
  const auto big = stretched_circle();
  const double repr = delta_J_repr_Adoubleprime(circle, big);
  const auto fd = delta_J_fd(circle, big);
  CHECK(std::abs(repr - fd.value) <=
        std::max(5e-3 * std::max(1.0, std::abs(fd.value)), 3 * fd.error_bar));
  CHECK(repr == Catch::Approx(2.2239706305251015).epsilon(5e-3));
  CHECK(delta_J_repr_Adoubleprime(circle, circle_fn(1.5)) ==
        Catch::Approx(2.0532402088999880).epsilon(5e-3));

  // finite differences agree with the representation on the self pair too
  const auto fd_self = delta_J_fd(circle, circle);
  CHECK(std::abs(self - fd_self.value) <=
        std::max(5e-3 * std::max(1.0, std::abs(fd_self.value)), 3 * fd_self.error_bar));
}

TEST_CASE("pointwise derivative of the interpolation potential") {
  const auto f = half_square();

  // u_t(x) = x^2/(2(1+t)): both sides equal 2/9 in size at x = 1, t = 1/2
  CHECK(pointwise_derivative_check(f, f, 1.0, 0.5) <= 1e-3);
  CHECK(pointwise_derivative_check(f, f, 0.0, 0.5) <= 1e-3);

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ux(-1.5, 1.5), ut(0.2, 1.5);
  const auto g = e_sq();
  for (int k = 0; k < 20; ++k)
    CHECK(pointwise_derivative_check(f, g, ux(rng), ut(rng)) <= 1e-2);

  CHECK_THROWS_AS(pointwise_derivative_check(f, f, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pointwise_derivative_check(gauss2(), gauss2(), 0.0, 0.5),
                  std::invalid_argument);
}
