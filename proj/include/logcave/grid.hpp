// Uniform tensor grids and sampled convex potentials, the substrate for
// everything else in the library. Potentials take values in R u {+inf};
// +inf marks points outside the effective domain.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "logcave/body.hpp"

namespace logcave {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_finite(double v) { return std::isfinite(v); }

// Thrown when a conjugation target cannot represent the attained slopes of
// the input (the transform would silently crop the result otherwise).
struct SlopeRangeError : std::runtime_error {
  SlopeRangeError() : std::runtime_error("slope range exceeded") {}
};

struct ClassError : std::runtime_error {
  explicit ClassError(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroMassError : std::runtime_error {
  ZeroMassError() : std::runtime_error("zero mass") {}
};

// Uniform grid on an axis-aligned box, dimension 1 or 2.
struct Grid {
  std::vector<double> lo, hi;
  std::vector<std::size_t> n;  // points per axis, >= 3

  static Grid line(double a, double b, std::size_t pts) {
    return Grid{{a}, {b}, {pts}};
  }
  static Grid box(double ax, double bx, std::size_t nx, double ay, double by,
                  std::size_t ny) {
    return Grid{{ax, ay}, {bx, by}, {nx, ny}};
  }

  std::size_t dim() const { return lo.size(); }

  double h(std::size_t ax) const {
    return (hi[ax] - lo[ax]) / static_cast<double>(n[ax] - 1);
  }

  double coord(std::size_t ax, std::size_t i) const {
    return lo[ax] + h(ax) * static_cast<double>(i);
  }

  std::size_t size() const {
    std::size_t s = 1;
    for (auto k : n) s *= k;
    return s;
  }

  // row-major: index = i0 * n[1] + i1 in dimension 2
  std::size_t idx(std::size_t i0, std::size_t i1 = 0) const {
    return dim() == 1 ? i0 : i0 * n[1] + i1;
  }

  void validate() const {
    if (dim() == 0 || dim() > 2 || hi.size() != dim() || n.size() != dim())
      throw std::invalid_argument("grid: dimension must be 1 or 2");
    for (std::size_t ax = 0; ax < dim(); ++ax) {
      if (!(lo[ax] < hi[ax])) throw std::invalid_argument("grid: lo >= hi");
      if (n[ax] < 3) throw std::invalid_argument("grid: fewer than 3 points");
    }
  }

  bool same_layout(const Grid& o) const {
    return lo == o.lo && hi == o.hi && n == o.n;
  }
};

enum class DomainKind {
  WholeSpaceTruncated,  // function continues beyond the sampling window
  ConvexBodyDomain      // +inf outside a known convex body
};

// A convex potential u sampled on a Grid. The finite-value set is the
// (discrete) effective domain; it must be contiguous along axis lines.
struct PotentialGrid {
  Grid grid;
  std::vector<double> values;
  DomainKind domain_kind = DomainKind::WholeSpaceTruncated;
  std::optional<ConvexBody> body;  // set when domain_kind is ConvexBodyDomain

  std::size_t dim() const { return grid.dim(); }

  double at(std::size_t i0, std::size_t i1 = 0) const {
    return values[grid.idx(i0, i1)];
  }
  double& at(std::size_t i0, std::size_t i1 = 0) {
    return values[grid.idx(i0, i1)];
  }

  // magnitude scale of the finite part, used for relative tolerances
  double scale() const {
    double s = 1.0;
    for (double v : values)
      if (is_finite(v)) s = std::max(s, std::abs(v));
    return s;
  }

  double tol_convex() const { return 1e-8 * scale(); }

  std::size_t count_finite() const {
    std::size_t c = 0;
    for (double v : values)
      if (is_finite(v)) ++c;
    return c;
  }

  // first/last finite index on an axis line; returns false if none.
  // In dimension 2, "line" fixes the other coordinate to `other`.
  bool finite_run(std::size_t ax, std::size_t other, std::size_t& first,
                  std::size_t& last) const {
    const std::size_t m = grid.n[ax];
    bool seen = false;
    for (std::size_t i = 0; i < m; ++i) {
      const double v = ax == 0 ? at(i, other) : at(other, i);
      if (is_finite(v)) {
        if (!seen) first = i;
        last = i;
        seen = true;
      }
    }
    return seen;
  }

  void validate() const {
    grid.validate();
    if (values.size() != grid.size())
      throw std::invalid_argument("potential: value count does not match grid");
    if (count_finite() == 0)
      throw std::invalid_argument("potential: no finite values (not proper)");
    const double tol = tol_convex();

    auto check_line = [&](std::size_t ax, std::size_t other) {
      std::size_t first = 0, last = 0;
      if (!finite_run(ax, other, first, last)) return;
      // contiguity of the finite run (convexity of the domain)
      for (std::size_t i = first; i <= last; ++i) {
        const double v = ax == 0 ? at(i, other) : at(other, i);
        if (!is_finite(v))
          throw std::invalid_argument("potential: finite region not contiguous");
      }
      for (std::size_t i = first + 1; i + 1 <= last; ++i) {
        const double a = ax == 0 ? at(i - 1, other) : at(other, i - 1);
        const double b = ax == 0 ? at(i, other) : at(other, i);
        const double c = ax == 0 ? at(i + 1, other) : at(other, i + 1);
        if (a - 2 * b + c < -tol)
          throw std::invalid_argument("potential: not convex along axis line");
      }
    };

    if (dim() == 1) {
      check_line(0, 0);
    } else {
      for (std::size_t j = 0; j < grid.n[1]; ++j) check_line(0, j);
      for (std::size_t i = 0; i < grid.n[0]; ++i) check_line(1, i);
    }
  }
};

// Convenience constructors used all over the tests.
inline PotentialGrid sample_1d(double a, double b, std::size_t n,
                               const std::function<double(double)>& u) {
  PotentialGrid p;
  p.grid = Grid::line(a, b, n);
  p.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.values[i] = u(p.grid.coord(0, i));
  return p;
}

inline PotentialGrid sample_2d(const Grid& g,
                               const std::function<double(double, double)>& u) {
  PotentialGrid p;
  p.grid = g;
  p.values.resize(g.size());
  for (std::size_t i = 0; i < g.n[0]; ++i)
    for (std::size_t j = 0; j < g.n[1]; ++j)
      p.values[g.idx(i, j)] = u(g.coord(0, i), g.coord(1, j));
  return p;
}

// Indicator potential of a body (0 inside, +inf outside), exact mask.
inline PotentialGrid indicator_of(const ConvexBody& K, const Grid& g,
                                  double level = 0.0) {
  PotentialGrid p;
  p.grid = g;
  p.values.assign(g.size(), kInf);
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < g.n[0]; ++i) {
      const double x = g.coord(0, i);
      if (K.contains(x, 0.0)) p.values[i] = level;
    }
  } else {
    for (std::size_t i = 0; i < g.n[0]; ++i)
      for (std::size_t j = 0; j < g.n[1]; ++j)
        if (K.contains(g.coord(0, i), g.coord(1, j)))
          p.values[g.idx(i, j)] = level;
  }
  p.domain_kind = DomainKind::ConvexBodyDomain;
  p.body = K;
  return p;
}

}  // namespace logcave
