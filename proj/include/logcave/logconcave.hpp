#pragma once

// Log-concave functions f = e^{-u} with convex potential u, the A / A' / A''
// class diagnostics, the (alpha . f) (+) (beta . g) algebra, and constructors
// for the named families (Gaussians, powers of support functions).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "logcave/body.hpp"
#include "logcave/convex.hpp"
#include "logcave/grid.hpp"

namespace logcave {

enum class FnClass { A, Aprime, Adoubleprime };

inline const char* to_string(FnClass c) {
  switch (c) {
    case FnClass::Aprime: return "Aprime";
    case FnClass::Adoubleprime: return "Adoubleprime";
    default: return "A";
  }
}

struct LogConcaveFn {
  PotentialGrid potential;
  FnClass class_tag = FnClass::A;
  std::optional<ConvexBody> domain_body;  // K, meaningful for class Adoubleprime
};

inline LogConcaveFn as_logconcave(PotentialGrid p, FnClass tag = FnClass::A) {
  LogConcaveFn f;
  f.domain_body = p.body;
  f.potential = std::move(p);
  f.class_tag = tag;
  return f;
}

// Every proper convex potential with finite mass sits above some line
// a||x|| + b with a > 0. The fit is crude on purpose: it only feeds the
// class-A sanity check and the truncation-window tail estimate.
struct LinearMinorant {
  double a = 0.0;
  double b = 0.0;
};

inline LinearMinorant fit_linear_minorant(const PotentialGrid& p) {
  const Grid& g = p.grid;
  const std::size_t d = p.dim();
  double umin = kInf;
  for (double v : p.values)
    if (is_finite(v)) umin = std::min(umin, v);

  double a = 0.0;
  if (p.count_finite() < g.size()) {
    // +inf outside the domain dominates any slope; pick one
    a = 1.0;
  } else {
    // half the slackest radial growth seen at the window boundary
    double fit = kInf;
    auto consider = [&](double x, double y, double v) {
      const double r = std::sqrt(x * x + y * y);
      if (r > 0) fit = std::min(fit, (v - umin) / r);
    };
    if (d == 1) {
      consider(g.coord(0, 0), 0, p.values.front());
      consider(g.coord(0, g.n[0] - 1), 0, p.values.back());
    } else {
      for (std::size_t i0 = 0; i0 < g.n[0]; ++i0)
        for (std::size_t i1 : {std::size_t{0}, g.n[1] - 1})
          consider(g.coord(0, i0), g.coord(1, i1), p.values[g.idx(i0, i1)]);
      for (std::size_t i1 = 0; i1 < g.n[1]; ++i1)
        for (std::size_t i0 : {std::size_t{0}, g.n[0] - 1})
          consider(g.coord(0, i0), g.coord(1, i1), p.values[g.idx(i0, i1)]);
    }
    a = is_finite(fit) ? 0.5 * std::max(fit, 0.0) : 0.0;
  }

  double b = kInf;
  if (d == 1) {
    for (std::size_t i = 0; i < g.n[0]; ++i)
      if (is_finite(p.values[i])) b = std::min(b, p.values[i] - a * std::abs(g.coord(0, i)));
  } else {
    for (std::size_t i0 = 0; i0 < g.n[0]; ++i0)
      for (std::size_t i1 = 0; i1 < g.n[1]; ++i1) {
        const double v = p.values[g.idx(i0, i1)];
        if (!is_finite(v)) continue;
        const double x = g.coord(0, i0), y = g.coord(1, i1);
        b = std::min(b, v - a * std::sqrt(x * x + y * y));
      }
  }
  return {a, is_finite(b) ? b : 0.0};
}

// Mass of e^{-(a r + b)} outside the ball inscribed in the window.
inline double tail_mass_estimate(const PotentialGrid& p, const LinearMinorant& m) {
  if (m.a <= 0) return kInf;
  double R = kInf;
  for (std::size_t ax = 0; ax < p.dim(); ++ax)
    R = std::min(R, std::min(std::abs(p.grid.lo[ax]), std::abs(p.grid.hi[ax])));
  if (!(R > 0)) return kInf;
  const double aR = m.a * R;
  if (p.dim() == 1) return 2.0 * std::exp(-(aR + m.b)) / m.a;
  return 2.0 * std::numbers::pi * std::exp(-m.b) * (aR + 1.0) * std::exp(-aR) / (m.a * m.a);
}

namespace detail {

inline double density(double u) { return u > 745.0 ? 0.0 : std::exp(-std::min(u, 745.0)); }

// plain trapezoid mass, only used for window-policy checks
inline double trapezoid_mass(const PotentialGrid& p) {
  const Grid& g = p.grid;
  auto fval = [&](std::size_t i) {
    const double u = p.values[i];
    return is_finite(u) ? density(u) : 0.0;
  };
  if (p.dim() == 1) {
    double s = 0;
    for (std::size_t i = 0; i + 1 < g.n[0]; ++i) s += 0.5 * (fval(i) + fval(i + 1));
    return s * g.h(0);
  }
  double s = 0;
  for (std::size_t i0 = 0; i0 < g.n[0]; ++i0)
    for (std::size_t i1 = 0; i1 < g.n[1]; ++i1) {
      double w = 1.0;
      if (i0 == 0 || i0 + 1 == g.n[0]) w *= 0.5;
      if (i1 == 0 || i1 + 1 == g.n[1]) w *= 0.5;
      s += w * fval(g.idx(i0, i1));
    }
  return s * g.h(0) * g.h(1);
}

inline bool is_indicator_potential(const PotentialGrid& p) {
  if (p.domain_kind != DomainKind::ConvexBodyDomain || !p.body) return false;
  for (double v : p.values)
    if (is_finite(v) && v != 0.0) return false;
  return true;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  return v[mid];
}

}  // namespace detail

// Finite-window diagnostics for the A' / A'' conditions. Superlinearity and
// gradient blowup are asymptotic statements, so the report is advisory: it
// says what the window shows, not what the function does at infinity.
struct ClassReport {
  FnClass tag = FnClass::A;
  bool whole_window = false;
  bool superlinear = false;
  bool strictly_convex = false;
  bool boundary_blowup = false;
  double superlinearity_ratio = 0.0;  // outer vs mid annulus of (u - min u)/r
  double convexity = 0.0;             // second-difference margin
  double blowup_ratio = 0.0;          // edge gradient vs interior median
};

inline ClassReport classify(const LogConcaveFn& fn) {
  const PotentialGrid& p = fn.potential;
  p.validate();
  ClassReport rep;
  const Grid& g = p.grid;
  rep.whole_window = p.count_finite() == g.size();
  rep.convexity = convexity_margin(p);
  rep.strictly_convex = rep.convexity > 1e-10 * p.scale();

  double umin = kInf;
  for (double v : p.values)
    if (is_finite(v)) umin = std::min(umin, v);

  // superlinearity: mean of (u - min u)/||x|| over the outer annulus
  // [0.8R, R] against the mid annulus [0.4R, 0.6R]
  {
    double R = kInf;
    for (std::size_t ax = 0; ax < p.dim(); ++ax)
      R = std::min(R, std::min(std::abs(g.lo[ax]), std::abs(g.hi[ax])));
    double souter = 0, smid = 0;
    std::size_t nouter = 0, nmid = 0;
    auto visit = [&](double r, double v) {
      if (!is_finite(v) || r <= 0) return;
      const double q = (v - umin) / r;
      if (r >= 0.8 * R) {
        souter += q;
        ++nouter;
      } else if (r >= 0.4 * R && r <= 0.6 * R) {
        smid += q;
        ++nmid;
      }
    };
    if (p.dim() == 1) {
      for (std::size_t i = 0; i < g.n[0]; ++i) visit(std::abs(g.coord(0, i)), p.values[i]);
    } else {
      for (std::size_t i0 = 0; i0 < g.n[0]; ++i0)
        for (std::size_t i1 = 0; i1 < g.n[1]; ++i1) {
          const double x = g.coord(0, i0), y = g.coord(1, i1);
          visit(std::sqrt(x * x + y * y), p.values[g.idx(i0, i1)]);
        }
    }
    if (nouter && nmid && smid / double(nmid) > 0) {
      rep.superlinearity_ratio = (souter / double(nouter)) / (smid / double(nmid));
      rep.superlinear = rep.superlinearity_ratio >= 1.5;
    }
  }

  // boundary gradient blowup: the 3 cells nearest each domain edge must all
  // exceed 10x the median interior gradient
  if (!rep.whole_window) {
    if (p.dim() == 1) {
      std::size_t first = 0, last = 0;
      if (p.finite_run(0, 0, first, last) && last - first >= 8) {
        const double h = g.h(0);
        std::vector<double> slopes;
        for (std::size_t i = first; i < last; ++i)
          slopes.push_back(std::abs(p.values[i + 1] - p.values[i]) / h);
        std::vector<double> interior(slopes.begin() + 3, slopes.end() - 3);
        const double med = detail::median(interior);
        double edge_min = kInf;
        for (std::size_t k = 0; k < 3; ++k) {
          edge_min = std::min(edge_min, slopes[k]);
          edge_min = std::min(edge_min, slopes[slopes.size() - 1 - k]);
        }
        rep.blowup_ratio = med > 0 ? edge_min / med : 0.0;
        rep.boundary_blowup = med > 0 && edge_min > 10.0 * med;
      }
    } else {
      const auto gx = gradient_axis(p, 0);
      const auto gy = gradient_axis(p, 1);
      std::vector<double> edge, interior;
      for (std::size_t i0 = 0; i0 < g.n[0]; ++i0)
        for (std::size_t i1 = 0; i1 < g.n[1]; ++i1) {
          const std::size_t i = g.idx(i0, i1);
          if (!is_finite(p.values[i])) continue;
          auto bad = [&](std::size_t j0, std::size_t j1) {
            return j0 >= g.n[0] || j1 >= g.n[1] || !is_finite(p.values[g.idx(j0, j1)]);
          };
          const bool near_edge = bad(i0 + 1, i1) || bad(i0 - 1, i1) || bad(i0, i1 + 1) || bad(i0, i1 - 1);
          const double norm = std::hypot(gx[i], gy[i]);
          if (!std::isnan(norm)) (near_edge ? edge : interior).push_back(norm);
        }
      const double med = detail::median(interior), edge_med = detail::median(edge);
      rep.blowup_ratio = med > 0 ? edge_med / med : 0.0;
      rep.boundary_blowup = med > 0 && !edge.empty() && edge_med > 10.0 * med;
    }
  }

  if (rep.whole_window)
    rep.tag = (rep.superlinear && rep.strictly_convex) ? FnClass::Aprime : FnClass::A;
  else
    rep.tag = rep.boundary_blowup ? FnClass::Adoubleprime : FnClass::A;
  return rep;
}

// alpha . f (+) beta . g = e^{ -[(u alpha) box (v beta)] }
inline LogConcaveFn oplus(const LogConcaveFn& f, const LogConcaveFn& g, double alpha, double beta) {
  if (alpha < 0 || beta < 0 || (alpha == 0 && beta == 0))
    throw std::invalid_argument("oplus: weights must be nonnegative and not both zero");
  if (alpha == 1.0 && beta == 0.0) return f;
  if (alpha == 0.0 && beta == 1.0) return g;
  if (beta == 0.0) return as_logconcave(right_scalar_mult(f.potential, alpha), f.class_tag);
  if (alpha == 0.0) return as_logconcave(right_scalar_mult(g.potential, beta), g.class_tag);

  // two indicators: the sum body is exact, skip the conjugate round trip
  if (detail::is_indicator_potential(f.potential) && detail::is_indicator_potential(g.potential)) {
    const ConvexBody sum = psum_body(*f.potential.body, *g.potential.body, alpha, beta, 1.0);
    double x0, x1, y0, y1;
    sum.bounds(x0, x1, y0, y1);
    const double pad0 = 0.5 * std::max(x1 - x0, 1e-6), pad1 = 0.5 * std::max(y1 - y0, 1e-6);
    Grid window;
    if (sum.is_interval) {
      window = Grid::line(x0 - pad0, x1 + pad0,
                          std::max(f.potential.grid.n[0], g.potential.grid.n[0]));
    } else {
      const std::size_t n0 = std::max(f.potential.grid.n[0], g.potential.grid.n[0]);
      const std::size_t n1 = std::max(f.potential.grid.n[1], g.potential.grid.n[1]);
      window = Grid::box(x0 - pad0, x1 + pad0, n0, y0 - pad1, y1 + pad1, n1);
    }
    return as_logconcave(indicator_of(sum, window), FnClass::A);
  }

  PotentialGrid w = inf_convolution(right_scalar_mult(f.potential, alpha),
                                    right_scalar_mult(g.potential, beta));
  // A' and A'' are each closed under (+) and scaling; mixed inputs get re-diagnosed
  LogConcaveFn out = as_logconcave(std::move(w), FnClass::A);
  if (f.class_tag == g.class_tag)
    out.class_tag = f.class_tag;
  else
    out.class_tag = classify(out).tag;
  return out;
}

inline LogConcaveFn translate(const LogConcaveFn& f, double dx, double dy = 0.0) {
  LogConcaveFn out = f;
  out.potential.grid.lo[0] += dx;
  out.potential.grid.hi[0] += dx;
  if (out.potential.dim() == 2) {
    out.potential.grid.lo[1] += dy;
    out.potential.grid.hi[1] += dy;
  }
  if (out.potential.body) out.potential.body = out.potential.body->translated(dx, dy);
  out.domain_body = out.potential.body;
  return out;
}

// gamma_n = c_n e^{-||x||^2/2}, c_n = (2 pi)^{-n/2}, as potential ||x||^2/2 - log c_n
inline LogConcaveFn make_gaussian(int dim, const Grid& grid,
                                  std::vector<std::string>* warnings = nullptr) {
  if ((dim != 1 && dim != 2) || grid.dim() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("make_gaussian: dim must be 1 or 2 and match the grid");
  const double shift = 0.5 * dim * std::log(2.0 * std::numbers::pi);
  PotentialGrid p;
  if (dim == 1)
    p = sample_1d(grid.lo[0], grid.hi[0], grid.n[0],
                  [&](double x) { return 0.5 * x * x + shift; });
  else
    p = sample_2d(grid, [&](double x, double y) { return 0.5 * (x * x + y * y) + shift; });
  double tail = 0.0;
  for (int ax = 0; ax < dim; ++ax)
    tail += 0.5 * (std::erfc(std::abs(grid.lo[ax]) / std::numbers::sqrt2) +
                   std::erfc(std::abs(grid.hi[ax]) / std::numbers::sqrt2));
  if (tail > 1e-6 && warnings)
    warnings->push_back("gaussian window leaves tail mass ~ " + std::to_string(tail) +
                        "; extend it past [-6,6]");
  return as_logconcave(std::move(p), FnClass::Aprime);
}

// u = (1/q) h_polar(K)^q = (1/q) gauge_K^q for q in (1, inf); q = inf gives e^{-I_K}.
// The window grows until the linear-minorant tail estimate drops below 1e-8 J.
inline LogConcaveFn make_power_of_support(const ConvexBody& body, double q, std::size_t n = 0) {
  if (!body.origin_interior())
    throw std::invalid_argument("make_power_of_support: origin must lie in the interior of the body");
  const bool indicator = !is_finite(q);
  if (!indicator && !(q > 1.0))
    throw std::invalid_argument("make_power_of_support: q must lie in (1, infinity]");

  double x0, x1, y0, y1;
  body.bounds(x0, x1, y0, y1);
  if (indicator) {
    const double pad0 = 0.75 * (x1 - x0), pad1 = 0.75 * (y1 - y0);
    Grid window = body.is_interval
                      ? Grid::line(x0 - pad0, x1 + pad0, n ? n : 801)
                      : Grid::box(x0 - pad0, x1 + pad0, n ? n : 321, y0 - pad1, y1 + pad1,
                                  n ? n : 321);
    return as_logconcave(indicator_of(body, window), FnClass::A);
  }

  const double rmax = std::max({std::abs(x0), std::abs(x1), std::abs(y0), std::abs(y1)});
  double R = rmax * std::pow(46.0 * q, 1.0 / q);
  for (int attempt = 0; attempt < 5; ++attempt) {
    PotentialGrid p;
    if (body.is_interval)
      p = sample_1d(-R, R, n ? n : 2001,
                    [&](double x) { return std::pow(body.gauge(x, 0), q) / q; });
    else
      p = sample_2d(Grid::box(-R, R, n ? n : 321, -R, R, n ? n : 321),
                    [&](double x, double y) { return std::pow(body.gauge(x, y), q) / q; });
    const double tail = tail_mass_estimate(p, fit_linear_minorant(p));
    if (tail < 1e-8 * detail::trapezoid_mass(p)) return as_logconcave(std::move(p), FnClass::Aprime);
    R *= 1.6;
  }
  throw std::runtime_error("make_power_of_support: window policy did not converge");
}

}  // namespace logcave
