// The 1-D slope problem end to end: push a gaussian forward to its area
// measure datum, hand only the datum to the solver, and compare what comes
// back with the function we started from. Then the same pipeline on an
// exponential datum, which the feasibility test correctly rejects.
#include <cmath>
#include <cstdio>

#include "logcave/minkowski.hpp"

using namespace logcave;

namespace {

MinkowskiDatum1D sampled_datum(double lo, double hi, std::size_t n,
                               double (*m)(double)) {
  const Grid g = Grid::line(lo, hi, n);
  std::vector<double> density(n);
  for (std::size_t i = 0; i < n; ++i) density[i] = m(g.coord(0, i));
  return make_datum(g, std::move(density));
}

}  // namespace

int main() {
  // the pushforward of e^{-x^2/2} under its own gradient is again gaussian
  const MinkowskiDatum1D d =
      sampled_datum(-8, 8, 2001, [](double y) { return std::exp(-y * y / 2); });
  std::printf("datum: gaussian density on [-8,8], mass %.8f\n", d.mass);

  const MinkowskiSolution1D sol = solve_minkowski_1d(d);
  std::printf("verdict %s, e^{phi(0)} = %.8f, tail mismatch %.2g\n\n",
              to_string(sol.feasibility), sol.M_infinity, sol.tail_mismatch);

  std::printf("recovered potential vs the exact phi(y) = y^2/2:\n");
  std::printf("  %6s %14s %14s %10s\n", "y", "phi", "y^2/2", "error");
  for (const double y : {0.0, 0.5, 1.0, 2.0, 3.0, 4.0}) {
    const std::size_t j =
        static_cast<std::size_t>(std::lround((y - (-8.0)) / d.grid.h(0)));
    const double yj = d.grid.coord(0, j);
    const double got = sol.phi.values[j];
    std::printf("  %6.3f %14.8f %14.8f %10.2g\n", yj, got, yj * yj / 2,
                std::abs(got - yj * yj / 2));
  }

  std::printf("\nrecovered function vs e^{-x^2/2}:\n");
  std::printf("  %6s %14s %14s %10s\n", "x", "u(x)", "x^2/2", "error");
  const PotentialGrid& u = sol.f.potential;
  for (const double x : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const std::size_t j =
        static_cast<std::size_t>(std::lround((x - u.grid.lo[0]) / u.grid.h(0)));
    const double got = u.values[j];
    const double xj = u.grid.coord(0, j);
    std::printf("  %6.2f %14.8f %14.8f %10.2g\n", xj, got, xj * xj / 2,
                std::abs(got - xj * xj / 2));
  }
  std::printf("recovered mass %.8f (datum mass %.8f)\n\n", total_mass(sol.f),
              d.mass);

  // an exponential datum decays too slowly for the smooth class
  const MinkowskiDatum1D lap = sampled_datum(
      -12, 12, 2401, [](double y) { return 0.5 * std::exp(-std::abs(y)); });
  const FeasibilityReport fr = feasibility_diagnostic(lap);
  std::printf("exponential datum: verdict %s\n", to_string(fr.verdict));
  std::printf("  plus tail growth exponent %.3f (smooth class needs p > 1.5)\n",
              fr.plus.growth_exponent);
  return 0;
}
