// Three independent roads to the first variation delta J(f; g), shown side
// by side: the raw difference quotients with extrapolation, the closed form
// for the self case, and the integral against the gradient-pushforward
// measure. They agree to a few parts in 10^4 on a 2001-node grid.
#include <cmath>
#include <cstdio>

#include "logcave/functionals.hpp"
#include "logcave/measure.hpp"
#include "logcave/minkowski.hpp"

using namespace logcave;

int main() {
  const Grid g = Grid::line(-8, 8, 2001);
  const LogConcaveFn f =
      as_logconcave(sample_1d(-8, 8, 2001, [](double x) { return x * x / 2; }),
                    FnClass::Aprime);
  const LogConcaveFn gamma = make_gaussian(1, g);

  std::printf("f = e^{-x^2/2}, g = standard gaussian density\n\n");

  const DeltaJEstimate self = delta_J_fd(f, f);
  std::printf("difference quotients for delta J(f; f):\n");
  std::printf("  %10s %18s\n", "step t", "quotient");
  for (const auto& [t, q] : self.t_sequence) std::printf("  %10.5f %18.12f\n", t, q);
  std::printf("  extrapolated   %18.12f  (error bar %.2g)\n", self.value,
              self.error_bar);
  std::printf("  closed form    %18.12f  = n J + int f log f\n\n",
              delta_J_self(f));

  const DeltaJEstimate cross = delta_J_fd(f, gamma);
  const double repr = delta_J_repr_Aprime(f, gamma);
  std::printf("delta J(f; gamma), the gaussian perimeter of f:\n");
  std::printf("  difference quotients  %18.12f  (error bar %.2g)\n", cross.value,
              cross.error_bar);
  std::printf("  measure representation %17.12f  = int (log h_gamma) d mu_f\n",
              repr);
  std::printf("  P(f) = %.12f\n\n", perimeter(f));

  const ParticleMeasure mu = area_measure_mu(f);
  std::printf("the measure behind the representation:\n");
  std::printf("  mu total        %18.12f  (J(f) = %.12f)\n", mu.total,
              total_mass(f));
  const NecessaryConditionReport rep = check_necessary_conditions(mu);
  std::printf("  barycenter      %18.3g  (must vanish)\n", rep.residual);
  return 0;
}
