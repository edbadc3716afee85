#pragma once

// The area measures mu(f) = (grad u)#(f H^n) and sigma(f) = (nu_K)#(f H^{n-1}),
// the admissible-perturbation test, and the integral representations of the
// first variation for the smooth classes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "logcave/convex.hpp"
#include "logcave/functionals.hpp"
#include "logcave/grid.hpp"
#include "logcave/logconcave.hpp"

namespace logcave {

struct ParticleMeasure {
  std::size_t dim = 1;
  std::vector<std::array<double, 2>> points;  // y_i = grad u at the cell center
  std::vector<double> weights;                // f(center) . cell volume
  double total = 0.0;
};

struct SphereMeasure {
  std::size_t dim = 1;
  double minus = 0.0, plus = 0.0;  // dim 1: atoms at the normals -1 and +1
  std::vector<double> theta;       // dim 2: outward normal angles, one per edge
  std::vector<double> weight;      // dim 2: integral of f over the edge
  double total() const {
    if (dim == 1) return minus + plus;
    double s = 0;
    for (double w : weight) s += w;
    return s;
  }
};

namespace detail {

inline double interp1(const PotentialGrid& p, double x) {
  const double h = p.grid.h(0);
  const double s = (x - p.grid.lo[0]) / h;
  const auto i = static_cast<std::size_t>(
      std::clamp(std::floor(s), 0.0, static_cast<double>(p.grid.n[0] - 2)));
  const double t = s - static_cast<double>(i);
  const double a = p.values[i], b = p.values[i + 1];
  if (!is_finite(a) || !is_finite(b)) return t < 0.5 ? a : b;
  return a + t * (b - a);
}

inline double interp2(const PotentialGrid& p, double x, double y) {
  const Grid& g = p.grid;
  const double s0 = std::clamp((x - g.lo[0]) / g.h(0), 0.0, static_cast<double>(g.n[0] - 2));
  const double s1 = std::clamp((y - g.lo[1]) / g.h(1), 0.0, static_cast<double>(g.n[1] - 2));
  const auto i0 = static_cast<std::size_t>(std::floor(s0));
  const auto i1 = static_cast<std::size_t>(std::floor(s1));
  const double a = s0 - static_cast<double>(i0), b = s1 - static_cast<double>(i1);
  const double v00 = p.values[g.idx(i0, i1)], v10 = p.values[g.idx(i0 + 1, i1)];
  const double v01 = p.values[g.idx(i0, i1 + 1)], v11 = p.values[g.idx(i0 + 1, i1 + 1)];
  if (!is_finite(v00) || !is_finite(v10) || !is_finite(v01) || !is_finite(v11)) return kInf;
  return (1 - a) * ((1 - b) * v00 + b * v01) + a * ((1 - b) * v10 + b * v11);
}

// exact mass of one cell of a piecewise-linear potential
inline double cell_mass(double h, double u0, double u1) {
  const double w0 = std::min(u0, 745.0), w1 = std::min(u1, 745.0);
  const double f0 = std::exp(-w0), f1 = std::exp(-w1), dw = w1 - w0;
  return std::abs(dw) > 1e-12 ? h * (f0 - f1) / dw : h * 0.5 * (f0 + f1);
}

}  // namespace detail

// mu(f): one particle per interior finite cell, positioned at the cell's
// gradient (exact for the piecewise-linear potential), weighted by its mass
inline ParticleMeasure area_measure_mu(const LogConcaveFn& f) {
  if (f.class_tag == FnClass::A)
    throw ClassError("area measure needs a smooth interior (class Aprime or Adoubleprime)");
  const PotentialGrid& p = f.potential;
  const Grid& g = p.grid;
  ParticleMeasure mu;
  mu.dim = p.dim();
  if (mu.dim == 1) {
    const double h = g.h(0);
    for (std::size_t i = 0; i + 1 < g.n[0]; ++i) {
      const double u0 = p.values[i], u1 = p.values[i + 1];
      if (!is_finite(u0) || !is_finite(u1)) continue;
      mu.points.push_back({(u1 - u0) / h, 0.0});
      mu.weights.push_back(detail::cell_mass(h, u0, u1));
    }
  } else {
    const double h0 = g.h(0), h1 = g.h(1);
    for (std::size_t i0 = 0; i0 + 1 < g.n[0]; ++i0)
      for (std::size_t i1 = 0; i1 + 1 < g.n[1]; ++i1) {
        const double v00 = p.values[g.idx(i0, i1)], v10 = p.values[g.idx(i0 + 1, i1)];
        const double v01 = p.values[g.idx(i0, i1 + 1)], v11 = p.values[g.idx(i0 + 1, i1 + 1)];
        if (!is_finite(v00) || !is_finite(v10) || !is_finite(v01) || !is_finite(v11)) continue;
        const double gx = (v10 + v11 - v00 - v01) / (2 * h0);
        const double gy = (v01 + v11 - v00 - v10) / (2 * h1);
        // corner-averaged density: exponentiating the averaged potential
        // instead would bias every cell by exp(-h^2/8 . tr Hess u)
        const double fbar = 0.25 * (detail::density(v00) + detail::density(v10) +
                                    detail::density(v01) + detail::density(v11));
        mu.points.push_back({gx, gy});
        mu.weights.push_back(fbar * h0 * h1);
      }
  }
  for (double w : mu.weights) mu.total += w;
  return mu;
}

// sigma(f): boundary values of f pushed to the outward normals of dom(u)
inline SphereMeasure area_measure_sigma(const LogConcaveFn& f) {
  if (!f.domain_body)
    throw ClassError("area measure sigma needs a domain body");
  const PotentialGrid& p = f.potential;
  const ConvexBody& K = *f.domain_body;
  SphereMeasure sg;
  sg.dim = p.dim();
  if (sg.dim == 1) {
    std::size_t first = 0, last = 0;
    if (!p.finite_run(0, 0, first, last)) throw ZeroMassError();
    sg.minus = detail::density(p.values[first]);
    sg.plus = detail::density(p.values[last]);
    return sg;
  }
  const std::vector<Point2>& poly = K.poly;
  const std::size_t m = poly.size();
  const double hstep = std::max(p.grid.h(0), p.grid.h(1));
  for (std::size_t e = 0; e < m; ++e) {
    const Point2& a = poly[e];
    const Point2& b = poly[(e + 1) % m];
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double len = std::hypot(ex, ey);
    if (len <= 0) continue;
    // outward normal of a counterclockwise polygon
    const double nx = ey / len, ny = -ex / len;
    // integrate f along the edge; boundary cells straddle the mask, so step
    // inward by whole cells until the interpolant is finite
    const int samples = 8;
    double acc = 0;
    for (int s = 0; s < samples; ++s) {
      const double r = (s + 0.5) / samples;
      double u = kInf;
      for (int k = 1; k <= 4 && !is_finite(u); ++k)
        u = detail::interp2(p, a[0] + r * ex - k * hstep * nx, a[1] + r * ey - k * hstep * ny);
      acc += is_finite(u) ? detail::density(u) : 0.0;
    }
    sg.theta.push_back(std::atan2(ny, nx));
    sg.weight.push_back(acc / samples * len);
  }
  return sg;
}

inline std::array<double, 2> mu_first_moment(const ParticleMeasure& mu) {
  std::array<double, 2> m{0, 0};
  for (std::size_t i = 0; i < mu.points.size(); ++i) {
    m[0] += mu.weights[i] * mu.points[i][0];
    m[1] += mu.weights[i] * mu.points[i][1];
  }
  return m;
}

inline std::array<double, 2> sigma_first_moment(const SphereMeasure& sg) {
  if (sg.dim == 1) return {sg.plus - sg.minus, 0.0};
  std::array<double, 2> m{0, 0};
  for (std::size_t i = 0; i < sg.theta.size(); ++i) {
    m[0] += sg.weight[i] * std::cos(sg.theta[i]);
    m[1] += sg.weight[i] * std::sin(sg.theta[i]);
  }
  return m;
}

namespace detail {

// widest spacing between consecutive cell slopes: the knot gap of the conjugate
inline double max_slope_gap(const PotentialGrid& c, std::size_t ax) {
  double gap = 0.0;
  auto line = [&](std::size_t off, std::size_t stride, std::size_t count, double h) {
    double prev = 0.0;
    bool have = false;
    for (std::size_t i = 0; i + 1 < count; ++i) {
      const double a = c.values[off + i * stride], b = c.values[off + (i + 1) * stride];
      if (!is_finite(a) || !is_finite(b)) {
        have = false;
        continue;
      }
      const double s = (b - a) / h;
      if (have) gap = std::max(gap, s - prev);
      prev = s;
      have = true;
    }
  };
  if (c.dim() == 1)
    line(0, 1, c.grid.n[0], c.grid.h(0));
  else if (ax == 0)
    for (std::size_t j = 0; j < c.grid.n[1]; ++j) line(j, c.grid.n[1], c.grid.n[0], c.grid.h(0));
  else
    for (std::size_t i = 0; i < c.grid.n[0]; ++i) line(i * c.grid.n[1], 1, c.grid.n[1], c.grid.h(1));
  return gap;
}

}  // namespace detail

// Largest c >= 0 with u* - c v* still convex: the infimum over the shared
// slope window of the ratio of smoothed curvatures of the two conjugates.
// Curvature is a wide-stencil second difference, wide enough to average over
// the conjugates' knots (they are piecewise linear, so adjacent-node second
// differences alias between 0 and twice the true curvature, and a bisection
// on them lands on the wrong constant). Windows where the perturbation has no
// curvature impose no constraint; if nothing constrains, the perturbation is
// admissible at any scale and the result is capped at 1e6.
inline double admissible_c_max(const LogConcaveFn& f, const LogConcaveFn& g) {
  const double cap = 1e6;
  const PotentialGrid ucx = convexify(f.potential);
  const PotentialGrid vcx = convexify(g.potential);
  const std::size_t d = ucx.dim();
  Grid win;
  win.lo.resize(d), win.hi.resize(d), win.n.resize(d);
  std::vector<std::size_t> stride_k(d);
  for (std::size_t ax = 0; ax < d; ++ax) {
    // genuine region: attained slopes for whole-space grids; body domains and
    // single-node grids have exact conjugate tails and do not restrict it
    double lo = -kInf, hi = kInf;
    auto genuine = [&](const PotentialGrid& p) {
      if (p.domain_kind == DomainKind::ConvexBodyDomain) return;
      double a, b;
      attained_slope_range(p, ax, a, b);
      if (!is_finite(a)) return;
      lo = std::max(lo, a);
      hi = std::min(hi, b);
    };
    genuine(ucx);
    genuine(vcx);
    if (!is_finite(lo) || !is_finite(hi)) {
      double a1, b1, a2, b2;
      attained_slope_range(ucx, ax, a1, b1);
      attained_slope_range(vcx, ax, a2, b2);
      lo = std::min(is_finite(a1) ? a1 : -1.0, is_finite(a2) ? a2 : -1.0);
      hi = std::max(is_finite(b1) ? b1 : 1.0, is_finite(b2) ? b2 : 1.0);
    }
    if (lo > hi) return 0.0;  // no shared genuine slope region to certify on
    if (hi - lo < 1e-6) {
      lo -= 0.5;
      hi += 0.5;
    }
    win.lo[ax] = lo;
    win.hi[ax] = hi;
    win.n[ax] = d == 1 ? 4097 : 257;
    const double span = hi - lo;
    const double gap =
        std::max(detail::max_slope_gap(ucx, ax), detail::max_slope_gap(vcx, ax));
    const double H = std::max(8.0 * gap, span / 16.0);
    const double hy = span / static_cast<double>(win.n[ax] - 1);
    stride_k[ax] = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(H / hy)),
                                           1, (win.n[ax] - 1) / 3);
  }
  const PotentialGrid phi = fenchel_conjugate(ucx, win, true);
  const PotentialGrid psi = fenchel_conjugate(vcx, win, true);
  double pmin = kInf, pmax = -kInf;
  for (double v : psi.values)
    if (is_finite(v)) {
      pmin = std::min(pmin, v);
      pmax = std::max(pmax, v);
    }
  const double floor_b = 1e-9 * std::max(1.0, pmax - pmin);
  double cmax = cap;
  auto stencil = [&](std::size_t c, std::ptrdiff_t step) {
    const std::size_t cl = c - step, cr = c + step;
    if (!is_finite(psi.values[cl]) || !is_finite(psi.values[c]) || !is_finite(psi.values[cr]) ||
        !is_finite(phi.values[cl]) || !is_finite(phi.values[c]) || !is_finite(phi.values[cr]))
      return;
    const double b = psi.values[cl] - 2 * psi.values[c] + psi.values[cr];
    if (!(b > floor_b)) return;
    const double a = phi.values[cl] - 2 * phi.values[c] + phi.values[cr];
    cmax = std::min(cmax, std::max(0.0, a) / b);
  };
  if (d == 1) {
    const std::size_t k = stride_k[0];
    for (std::size_t i = k; i + k < win.n[0]; ++i) stencil(i, static_cast<std::ptrdiff_t>(k));
    return cmax;
  }
  const std::size_t n0 = win.n[0], n1 = win.n[1], k0 = stride_k[0], k1 = stride_k[1];
  const auto sk0 = static_cast<std::ptrdiff_t>(k0 * n1);
  const auto sk1 = static_cast<std::ptrdiff_t>(k1);
  for (std::size_t i = k0; i + k0 < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) stencil(i * n1 + j, sk0);
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = k1; j + k1 < n1; ++j) stencil(i * n1 + j, sk1);
  for (std::size_t i = k0; i + k0 < n0; ++i)
    for (std::size_t j = k1; j + k1 < n1; ++j) {
      stencil(i * n1 + j, sk0 + sk1);
      stencil(i * n1 + j, sk0 - sk1);
    }
  return cmax;
}

namespace detail {

// integral of psi(grad u) f dx as a sum over cells: the cell slope is the
// exact gradient of the piecewise-linear potential, so steep boundary cells
// of class-Adoubleprime inputs contribute their (integrable) blowup correctly
inline double cell_slope_integral(const PotentialGrid& u, const PotentialGrid& psi) {
  const Grid& g = u.grid;
  double acc = 0;
  if (u.dim() == 1) {
    const double h = g.h(0);
    for (std::size_t i = 0; i + 1 < g.n[0]; ++i) {
      const double u0 = u.values[i], u1 = u.values[i + 1];
      if (!is_finite(u0) || !is_finite(u1)) continue;
      const double slope = (u1 - u0) / h;
      const double pv = interp1(psi, std::clamp(slope, psi.grid.lo[0], psi.grid.hi[0]));
      acc += pv * cell_mass(h, u0, u1);
    }
    return acc;
  }
  const double h0 = g.h(0), h1 = g.h(1);
  for (std::size_t i0 = 0; i0 + 1 < g.n[0]; ++i0)
    for (std::size_t i1 = 0; i1 + 1 < g.n[1]; ++i1) {
      const double v00 = u.values[g.idx(i0, i1)], v10 = u.values[g.idx(i0 + 1, i1)];
      const double v01 = u.values[g.idx(i0, i1 + 1)], v11 = u.values[g.idx(i0 + 1, i1 + 1)];
      if (!is_finite(v00) || !is_finite(v10) || !is_finite(v01) || !is_finite(v11)) continue;
      const double gx = std::clamp((v10 + v11 - v00 - v01) / (2 * h0), psi.grid.lo[0], psi.grid.hi[0]);
      const double gy = std::clamp((v01 + v11 - v00 - v10) / (2 * h1), psi.grid.lo[1], psi.grid.hi[1]);
      const double pv = interp2(psi, gx, gy);
      if (!is_finite(pv)) continue;
      const double fbar =
          0.25 * (density(v00) + density(v10) + density(v01) + density(v11));
      acc += pv * fbar * h0 * h1;
    }
  return acc;
}

// conjugate of v on the attained slope range of u
inline PotentialGrid conjugate_on_slopes(const PotentialGrid& u, const PotentialGrid& v) {
  const std::size_t d = u.dim();
  Grid target;
  target.lo.resize(d), target.hi.resize(d), target.n.resize(d);
  for (std::size_t ax = 0; ax < d; ++ax) {
    double smin, smax;
    attained_slope_range(u, ax, smin, smax);
    if (!is_finite(smin) || !is_finite(smax)) {
      smin = -1;
      smax = 1;
    }
    target.lo[ax] = smin;
    target.hi[ax] = smax;
    const double hsrc = v.grid.h(ax);
    target.n[ax] = std::clamp<std::size_t>(
        static_cast<std::size_t>((smax - smin) / hsrc) + 1, v.grid.n[ax], 65537);
  }
  return fenchel_conjugate(v, target, true);
}

}  // namespace detail

// delta J(f,g) = int v*(grad u) f dx for f, g in class Aprime
inline double delta_J_repr_Aprime(const LogConcaveFn& f, const LogConcaveFn& g,
                                  std::vector<std::string>* warnings = nullptr) {
  if (f.class_tag != FnClass::Aprime || g.class_tag != FnClass::Aprime)
    throw ClassError("representation formula needs class Aprime inputs");
  const std::size_t d = f.potential.dim();
  if (d == 1) {
    if (warnings)
      warnings->push_back(
          "admissibility precondition waived in dimension 1 (representation may read +inf = +inf)");
  } else if (!(admissible_c_max(f, g) > 0)) {
    throw std::runtime_error("hypothesis not met");
  }
  const PotentialGrid psi = detail::conjugate_on_slopes(f.potential, g.potential);
  return detail::cell_slope_integral(f.potential, psi);
}

// delta J(f,g) = int v*(grad u) f dx + int h_L d sigma(f) for class Adoubleprime
inline double delta_J_repr_Adoubleprime(const LogConcaveFn& f, const LogConcaveFn& g,
                                        std::vector<std::string>* warnings = nullptr) {
  if (f.potential.dim() != 1)
    throw std::runtime_error("boundary representation implemented in dimension 1 only");
  if (f.class_tag != FnClass::Adoubleprime || g.class_tag != FnClass::Adoubleprime)
    throw ClassError("representation formula needs class Adoubleprime inputs");
  if (!f.domain_body || !g.domain_body)
    throw ClassError("representation formula needs domain bodies");
  if (warnings)
    warnings->push_back(
        "admissibility precondition waived in dimension 1 (representation may read +inf = +inf)");
  const PotentialGrid psi = detail::conjugate_on_slopes(f.potential, g.potential);
  const double interior = detail::cell_slope_integral(f.potential, psi);
  const SphereMeasure sg = area_measure_sigma(f);
  const ConvexBody& L = *g.domain_body;
  const double boundary = L.support(1.0, 0.0) * sg.plus + L.support(-1.0, 0.0) * sg.minus;
  return interior + boundary;
}

// residual of d/dt u_t(x) = -v*(grad u_t(x)) at one (x, t)
inline double pointwise_derivative_check(const LogConcaveFn& f, const LogConcaveFn& g, double x,
                                         double t) {
  if (f.potential.dim() != 1 || g.potential.dim() != 1)
    throw std::invalid_argument("pointwise check is one-dimensional");
  if (!(t > 0)) throw std::invalid_argument("pointwise check needs t > 0");
  // the three potentials live on different grids, so their interpolation
  // errors at x do not cancel; dt has to sit above that noise
  const double dt = std::min(1e-2 * std::max(1.0, t), 0.5 * t);
  const PotentialGrid wm = oplus(f, g, 1.0, t - dt).potential;
  const PotentialGrid w0 = oplus(f, g, 1.0, t).potential;
  const PotentialGrid wp = oplus(f, g, 1.0, t + dt).potential;
  const double dudt = (detail::interp1(wp, x) - detail::interp1(wm, x)) / (2 * dt);
  // cell slopes are the exact gradient at cell midpoints; interpolate those
  const double h = w0.grid.h(0);
  const double pos = (x - w0.grid.lo[0]) / h - 0.5;
  const auto ci = static_cast<std::size_t>(
      std::clamp(std::floor(pos), 0.0, static_cast<double>(w0.grid.n[0] - 3)));
  const double frac = std::clamp(pos - static_cast<double>(ci), 0.0, 1.0);
  auto cell_slope = [&](std::size_t j) { return (w0.values[j + 1] - w0.values[j]) / h; };
  const double grad = (1 - frac) * cell_slope(ci) + frac * cell_slope(ci + 1);
  const PotentialGrid psi = fenchel_conjugate(g.potential);
  const double pv = detail::interp1(psi, std::clamp(grad, psi.grid.lo[0], psi.grid.hi[0]));
  return std::abs(dudt + pv);
}

}  // namespace logcave
