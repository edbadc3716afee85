// A few conjugate pairs with closed forms, computed on grids and compared
// against the textbook answers. Run it to see how the transform behaves on
// smooth, kinked and indicator potentials.
#include <cmath>
#include <cstdio>

#include "logcave/convex.hpp"

using namespace logcave;

namespace {

double max_err(const PotentialGrid& star, double (*exact)(double)) {
  double worst = 0;
  for (std::size_t j = 0; j < star.grid.n[0]; ++j) {
    const double y = star.grid.coord(0, j);
    const double a = star.values[j], b = exact(y);
    if (!is_finite(a) && !is_finite(b)) continue;
    if (is_finite(a) != is_finite(b)) return kInf;
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

}  // namespace

int main() {
  std::printf("%-28s %-26s %12s %12s\n", "potential", "conjugate", "node error",
              "involution");

  const auto quad = sample_1d(-8, 8, 1601, [](double x) { return x * x / 2; });
  std::printf("%-28s %-26s %12.3g %12.3g\n", "x^2/2 on [-8,8]",
              "y^2/2 (self-dual)",
              max_err(fenchel_conjugate(quad, Grid::line(-7.9, 7.9, 1601), true),
                      [](double y) { return y * y / 2; }),
              fenchel_involution_residual(quad));

  const auto vee = sample_1d(-8, 8, 1601, [](double x) { return std::abs(x); });
  std::printf("%-28s %-26s %12.3g %12.3g\n", "|x| on [-8,8]",
              "indicator of [-1,1]",
              max_err(fenchel_conjugate(vee, Grid::line(-1, 1, 401), true),
                      [](double) { return 0.0; }),
              fenchel_involution_residual(vee));

  const auto quart = sample_1d(-6, 6, 1601, [](double x) { return x * x * x * x / 4; });
  std::printf("%-28s %-26s %12.3g %12.3g\n", "x^4/4 on [-6,6]",
              "(3/4) y^{4/3}",
              max_err(fenchel_conjugate(quart, Grid::line(-8, 8, 801), true),
                      [](double y) { return 0.75 * std::pow(std::abs(y), 4.0 / 3.0); }),
              fenchel_involution_residual(quart));

  const auto ind = indicator_of(ConvexBody::interval(-2, 3), Grid::line(-4, 5, 901));
  std::printf("%-28s %-26s %12.3g %12.3g\n", "indicator of [-2,3]",
              "support fn max(3y,-2y)",
              max_err(fenchel_conjugate(ind, Grid::line(-4, 4, 801), true),
                      [](double y) { return std::max(3 * y, -2 * y); }),
              fenchel_involution_residual(ind));

  std::printf("\nslope saturation: conjugating x^2/2 onto [-20,20] extends the\n"
              "result linearly past the attained slopes (|y| > 8):\n");
  const auto wide = fenchel_conjugate(quad, Grid::line(-20, 20, 11), true);
  for (std::size_t j = 0; j < wide.grid.n[0]; ++j)
    std::printf("  u*(%6.1f) = %10.4f\n", wide.grid.coord(0, j), wide.values[j]);
  return 0;
}
