// Legendre-Fenchel conjugation on grids, infimal convolution, right scalar
// multiplication, gradients and convexity diagnostics.
//
// Conventions that matter for reproducibility:
//  * non-convex input is replaced by its lower convex envelope along the
//    transform axis before the fast transform runs;
//  * sup/inf ties resolve to the smallest grid index;
//  * a tail of the finite region that ends strictly inside the sampling
//    window is exact: the data itself says +inf beyond, the sup is attained
//    at the edge of the region (indicator and gauge conjugates are exact);
//  * a tail that touches the window edge belongs to a potential truncated
//    from whole space. If its outermost cell slopes have saturated (e.g.
//    |x|), the conjugate is +inf past the edge slope; otherwise values past
//    the attained range take the minimal affine extension the data supports.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "logcave/grid.hpp"

namespace logcave {

namespace detail {

// Lower convex envelope of the finite nodes of one line; infinite entries
// stay infinite. `stride` walks the line inside the flat array.
inline void convexify_line(std::vector<double>& v, std::size_t offset,
                           std::size_t stride, std::size_t count, double h) {
  std::size_t first = count, last = count;
  for (std::size_t i = 0; i < count; ++i) {
    if (is_finite(v[offset + i * stride])) {
      if (first == count) first = i;
      last = i;
    }
  }
  if (first == count) return;
  std::vector<std::size_t> hull;
  for (std::size_t i = first; i <= last; ++i) {
    const double vi = v[offset + i * stride];
    if (!is_finite(vi)) continue;
    while (hull.size() >= 2) {
      const std::size_t j = hull[hull.size() - 1], k = hull[hull.size() - 2];
      const double xj = static_cast<double>(j) * h, xk = static_cast<double>(k) * h;
      const double xi = static_cast<double>(i) * h;
      const double vj = v[offset + j * stride], vk = v[offset + k * stride];
      // drop j if it lies on or above the chord k -> i
      if ((vj - vk) * (xi - xk) >= (vi - vk) * (xj - xk))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
    const std::size_t i0 = hull[s], i1 = hull[s + 1];
    const double v0 = v[offset + i0 * stride], v1 = v[offset + i1 * stride];
    for (std::size_t i = i0 + 1; i < i1; ++i) {
      const double t = static_cast<double>(i - i0) / static_cast<double>(i1 - i0);
      v[offset + i * stride] = v0 + t * (v1 - v0);
    }
  }
}

// One line of convex data: finite nodes only, plus where the finite run sat
// inside the sampling window.
struct Line {
  std::vector<double> x, u;
  bool touches_lo = false, touches_hi = false;
};

inline Line finite_line(const std::vector<double>& v, std::size_t offset,
                        std::size_t stride, std::size_t count, double x0,
                        double h) {
  Line L;
  std::size_t first = count, last = count;
  for (std::size_t i = 0; i < count; ++i) {
    const double vi = v[offset + i * stride];
    if (is_finite(vi)) {
      if (first == count) first = i;
      last = i;
      L.x.push_back(x0 + static_cast<double>(i) * h);
      L.u.push_back(vi);
    }
  }
  L.touches_lo = first == 0;
  L.touches_hi = last + 1 == count;
  return L;
}

inline bool tail_saturated(const Line& L, bool right) {
  const std::size_t m = L.x.size();
  if (m < 3) return true;
  double d1, d2;
  if (right) {
    d1 = (L.u[m - 1] - L.u[m - 2]) / (L.x[m - 1] - L.x[m - 2]);
    d2 = (L.u[m - 2] - L.u[m - 3]) / (L.x[m - 2] - L.x[m - 3]);
  } else {
    d1 = (L.u[1] - L.u[0]) / (L.x[1] - L.x[0]);
    d2 = (L.u[2] - L.u[1]) / (L.x[2] - L.x[1]);
  }
  const double tol = 1e-9 * std::max(1.0, std::abs(d1));
  return std::abs(d1 - d2) <= tol;
}

// Per-tail semantics of a line for conjugation.
struct TailInfo {
  double slope_lo = -kInf, slope_hi = kInf;  // edge slopes of the data
  bool inf_below = false, inf_above = false; // conjugate +inf beyond them?
};

inline TailInfo tail_info(const Line& L, bool body_domain) {
  TailInfo t;
  const std::size_t m = L.x.size();
  if (m < 2) return t;  // single node: conjugate is globally affine
  t.slope_lo = (L.u[1] - L.u[0]) / (L.x[1] - L.x[0]);
  t.slope_hi = (L.u[m - 1] - L.u[m - 2]) / (L.x[m - 1] - L.x[m - 2]);
  // exact tails (body domain, or run ends inside the window) never go +inf;
  // truncated tails go +inf once the data shows no slopes beyond the edge
  if (!body_domain && L.touches_lo && tail_saturated(L, false)) t.inf_below = true;
  if (!body_domain && L.touches_hi && tail_saturated(L, true)) t.inf_above = true;
  return t;
}

inline bool conjugate_is_inf(const TailInfo& t, double y) {
  if (t.inf_above) {
    const double tol = 1e-12 * std::max(1.0, std::abs(t.slope_hi));
    if (y > t.slope_hi + tol) return true;
  }
  if (t.inf_below) {
    const double tol = 1e-12 * std::max(1.0, std::abs(t.slope_lo));
    if (y < t.slope_lo - tol) return true;
  }
  return false;
}

// Fast Legendre transform of one convex line onto ascending targets y.
// Linear time: the argmax index is monotone in y; ties keep the smallest
// index (advance only on strict improvement).
inline std::vector<double> conjugate_line(const Line& L,
                                          const std::vector<double>& y,
                                          bool body_domain) {
  std::vector<double> star(y.size(), kInf);
  const std::size_t m = L.x.size();
  if (m == 0) return star;
  const TailInfo t = tail_info(L, body_domain);
  std::size_t j = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double yk = y[k];
    if (conjugate_is_inf(t, yk)) continue;
    double best = L.x[j] * yk - L.u[j];
    while (j + 1 < m) {
      const double cand = L.x[j + 1] * yk - L.u[j + 1];
      if (cand > best) {
        ++j;
        best = cand;
      } else {
        break;
      }
    }
    star[k] = best;
  }
  return star;
}

}  // namespace detail

// Replace the potential with its lower convex envelope along every axis.
inline PotentialGrid convexify(const PotentialGrid& u) {
  PotentialGrid out = u;
  if (u.dim() == 1) {
    detail::convexify_line(out.values, 0, 1, u.grid.n[0], u.grid.h(0));
  } else {
    for (std::size_t j = 0; j < u.grid.n[1]; ++j)
      detail::convexify_line(out.values, j, u.grid.n[1], u.grid.n[0], u.grid.h(0));
    for (std::size_t i = 0; i < u.grid.n[0]; ++i)
      detail::convexify_line(out.values, i * u.grid.n[1], 1, u.grid.n[1],
                             u.grid.h(1));
  }
  return out;
}

// Attained slope range along one axis (cell slopes of the convexified data),
// used to build default conjugation targets and to detect clipping.
inline void attained_slope_range(const PotentialGrid& u, std::size_t ax,
                                 double& smin, double& smax) {
  smin = kInf;
  smax = -kInf;
  const PotentialGrid c = convexify(u);
  auto scan = [&](std::size_t offset, std::size_t stride, std::size_t count,
                  double h) {
    double prev = kInf, prev_x = 0.0;
    bool have_prev = false;
    for (std::size_t i = 0; i < count; ++i) {
      const double v = c.values[offset + i * stride];
      if (!is_finite(v)) continue;
      const double x = static_cast<double>(i) * h;
      if (have_prev) {
        const double s = (v - prev) / (x - prev_x);
        smin = std::min(smin, s);
        smax = std::max(smax, s);
      }
      prev = v;
      prev_x = x;
      have_prev = true;
    }
  };
  if (u.dim() == 1) {
    scan(0, 1, u.grid.n[0], u.grid.h(0));
  } else if (ax == 0) {
    for (std::size_t j = 0; j < u.grid.n[1]; ++j)
      scan(j, u.grid.n[1], u.grid.n[0], u.grid.h(0));
  } else {
    for (std::size_t i = 0; i < u.grid.n[0]; ++i)
      scan(i * u.grid.n[1], 1, u.grid.n[1], u.grid.h(1));
  }
  if (!is_finite(smin)) {
    // single finite node: the conjugate is globally affine and exact, so
    // every slope is representable
    smin = -kInf;
    smax = kInf;
  }
}

// Default conjugation target: attained slopes padded 10% (with a floor so
// indicator-like inputs, whose attained slopes collapse to a point, still
// get a usable window); resolution follows the source spacing, capped.
inline Grid default_conjugate_target(const PotentialGrid& u) {
  Grid t;
  t.lo.resize(u.dim());
  t.hi.resize(u.dim());
  t.n.resize(u.dim());
  for (std::size_t ax = 0; ax < u.dim(); ++ax) {
    double smin, smax;
    attained_slope_range(u, ax, smin, smax);
    if (!is_finite(smin)) {  // degenerate single-point domain
      smin = 0.0;
      smax = 0.0;
    }
    const double pad = std::max(0.1 * (smax - smin), 1.0);
    t.lo[ax] = smin - pad;
    t.hi[ax] = smax + pad;
    const double span = t.hi[ax] - t.lo[ax];
    const auto by_h = static_cast<std::size_t>(span / u.grid.h(ax)) + 1;
    t.n[ax] = std::clamp<std::size_t>(by_h, u.grid.n[ax], 65537);
  }
  return t;
}

// Fenchel conjugate u*(y) = sup_x <x,y> - u(x) sampled on target.
// Throws SlopeRangeError when an explicitly supplied target cannot contain
// the attained slope range of a whole-space potential: the conjugate's
// domain would be cropped and (u*)* would come back truncated. Dimension 2
// runs dimension-wise sweeps; the partially transformed field is concave in
// the remaining variable, so its negative is conjugated and signs restored.
inline PotentialGrid fenchel_conjugate(const PotentialGrid& u0, const Grid& target,
                                       bool target_is_default = false) {
  const PotentialGrid u = convexify(u0);
  const bool body_dom = u.domain_kind == DomainKind::ConvexBodyDomain;
  PotentialGrid out;
  out.grid = target;
  out.domain_kind = DomainKind::WholeSpaceTruncated;

  if (!target_is_default && !body_dom) {
    for (std::size_t ax = 0; ax < u.dim(); ++ax) {
      double smin, smax;
      attained_slope_range(u, ax, smin, smax);
      const double slack =
          1e-9 * std::max(1.0, std::max(std::abs(smin), std::abs(smax)));
      if (target.lo[ax] > smin + slack || target.hi[ax] < smax - slack)
        throw SlopeRangeError();
    }
  }

  if (u.dim() == 1) {
    std::vector<double> y(target.n[0]);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = target.coord(0, k);
    const auto L = detail::finite_line(u.values, 0, 1, u.grid.n[0],
                                       u.grid.lo[0], u.grid.h(0));
    out.values = detail::conjugate_line(L, y, body_dom);
    return out;
  }

  // inner sweep along axis 1: A(x0, y1) = sup_{x1} x1 y1 - u(x0, x1)
  const std::size_t n0 = u.grid.n[0], m1 = target.n[1], m0 = target.n[0];
  std::vector<double> y1(m1), y0(m0);
  for (std::size_t k = 0; k < m1; ++k) y1[k] = target.coord(1, k);
  for (std::size_t k = 0; k < m0; ++k) y0[k] = target.coord(0, k);

  std::vector<double> mid(n0 * m1, kInf);  // -A, convex in x0 for fixed y1
  for (std::size_t i = 0; i < n0; ++i) {
    const auto L = detail::finite_line(u.values, i * u.grid.n[1], 1,
                                       u.grid.n[1], u.grid.lo[1], u.grid.h(1));
    const auto s = detail::conjugate_line(L, y1, body_dom);
    for (std::size_t k = 0; k < m1; ++k)
      mid[i * m1 + k] = is_finite(s[k]) ? -s[k] : kInf;
  }

  out.values.assign(m0 * m1, kInf);
  for (std::size_t k = 0; k < m1; ++k) {
    detail::convexify_line(mid, k, m1, n0, u.grid.h(0));
    const auto L = detail::finite_line(mid, k, m1, n0, u.grid.lo[0], u.grid.h(0));
    const auto s = detail::conjugate_line(L, y0, body_dom);
    for (std::size_t i = 0; i < m0; ++i) out.values[i * m1 + k] = s[i];
  }
  return out;
}

inline PotentialGrid fenchel_conjugate(const PotentialGrid& u) {
  return fenchel_conjugate(u, default_conjugate_target(u), true);
}

// O(N*M) reference transform over the convexified grid values. Shares the
// tail semantics with the fast path; the two must agree to 1e-12. Public on
// purpose: it is the oracle the fast transform is verified against.
inline PotentialGrid fenchel_conjugate_brute(const PotentialGrid& u0,
                                             const Grid& target) {
  const PotentialGrid u = convexify(u0);
  const bool body_dom = u.domain_kind == DomainKind::ConvexBodyDomain;
  if (u.dim() != 1)
    throw std::invalid_argument("brute conjugate: dimension 1 only");
  PotentialGrid out;
  out.grid = target;
  out.domain_kind = DomainKind::WholeSpaceTruncated;
  out.values.assign(target.n[0], kInf);
  const auto L = detail::finite_line(u.values, 0, 1, u.grid.n[0], u.grid.lo[0],
                                     u.grid.h(0));
  if (L.x.empty()) return out;
  const auto t = detail::tail_info(L, body_dom);
  for (std::size_t k = 0; k < target.n[0]; ++k) {
    const double y = target.coord(0, k);
    if (detail::conjugate_is_inf(t, y)) continue;
    double best = -kInf;
    for (std::size_t i = 0; i < L.x.size(); ++i)
      best = std::max(best, L.x[i] * y - L.u[i]);
    out.values[k] = best;
  }
  return out;
}

// sup-norm of (u*)* - convexify(u) over the interior of the domain. The
// outermost finite node per side is excluded: the domain boundary is only
// resolved to one grid cell.
inline double fenchel_involution_residual(const PotentialGrid& u) {
  const PotentialGrid c = convexify(u);
  const PotentialGrid star = fenchel_conjugate(u);
  const PotentialGrid back = fenchel_conjugate(star, u.grid, true);
  double worst = 0.0;
  if (u.dim() == 1) {
    std::size_t first = 0, last = 0;
    if (!c.finite_run(0, 0, first, last)) return 0.0;
    for (std::size_t i = first + 1; i + 1 <= last; ++i) {
      if (!is_finite(back.values[i])) return kInf;
      worst = std::max(worst, std::abs(back.values[i] - c.values[i]));
    }
    return worst;
  }
  for (std::size_t i = 1; i + 1 < u.grid.n[0]; ++i)
    for (std::size_t j = 1; j + 1 < u.grid.n[1]; ++j) {
      const double v = c.values[c.grid.idx(i, j)];
      if (!is_finite(v)) continue;
      bool interior = true;
      for (int di = -1; di <= 1 && interior; ++di)
        for (int dj = -1; dj <= 1 && interior; ++dj)
          if (!is_finite(c.values[c.grid.idx(i + static_cast<std::size_t>(di + 1) - 1,
                                             j + static_cast<std::size_t>(dj + 1) - 1)]))
            interior = false;
      if (!interior) continue;
      const double w = back.values[back.grid.idx(i, j)];
      if (!is_finite(w)) return kInf;
      worst = std::max(worst, std::abs(w - v));
    }
  return worst;
}

// u box v = (u* + v*)* on a target covering dom(u) + dom(v).
// The shared slope grid is the overlap of the two attained ranges (padded);
// an empty overlap cannot support the sum of conjugates.
inline PotentialGrid inf_convolution(const PotentialGrid& u, const PotentialGrid& v) {
  const std::size_t d = u.dim();
  if (v.dim() != d) throw std::invalid_argument("inf_convolution: dim mismatch");

  Grid ygrid, target;
  ygrid.lo.resize(d);
  ygrid.hi.resize(d);
  ygrid.n.resize(d);
  target.lo.resize(d);
  target.hi.resize(d);
  target.n.resize(d);
  for (std::size_t ax = 0; ax < d; ++ax) {
    double au, bu, av, bv;
    attained_slope_range(u, ax, au, bu);
    attained_slope_range(v, ax, av, bv);
    double lo = std::max(au, av), hi = std::min(bu, bv);
    if (!is_finite(lo) && !is_finite(hi)) {  // two point masses
      lo = 0.0;
      hi = 0.0;
    }
    if (lo > hi) throw SlopeRangeError();
    const double pad = std::max(0.1 * (hi - lo), 1.0);
    ygrid.lo[ax] = lo - pad;
    ygrid.hi[ax] = hi + pad;
    const double hsrc = std::min(u.grid.h(ax), v.grid.h(ax));
    ygrid.n[ax] = std::clamp<std::size_t>(
        static_cast<std::size_t>((ygrid.hi[ax] - ygrid.lo[ax]) / hsrc) + 1,
        std::max(u.grid.n[ax], v.grid.n[ax]), 65537);
    target.lo[ax] = u.grid.lo[ax] + v.grid.lo[ax];
    target.hi[ax] = u.grid.hi[ax] + v.grid.hi[ax];
    target.n[ax] = std::clamp<std::size_t>(
        static_cast<std::size_t>((target.hi[ax] - target.lo[ax]) / hsrc) + 1,
        std::max(u.grid.n[ax], v.grid.n[ax]), 65537);
  }

  const PotentialGrid us = fenchel_conjugate(u, ygrid, true);
  const PotentialGrid vs = fenchel_conjugate(v, ygrid, true);
  PotentialGrid sum;
  sum.grid = ygrid;
  sum.domain_kind = DomainKind::WholeSpaceTruncated;
  sum.values.resize(us.values.size());
  for (std::size_t i = 0; i < sum.values.size(); ++i) {
    const double a = us.values[i], b = vs.values[i];
    sum.values[i] = (is_finite(a) && is_finite(b)) ? a + b : kInf;
  }

  PotentialGrid w = fenchel_conjugate(sum, target, true);
  if (u.body && v.body && u.body->dim() == v.body->dim()) {
    w.body = psum_body(*u.body, *v.body, 1.0, 1.0, 1.0);
    // dom(u box v) = dom u + dom v exactly, so the sum body is the true
    // domain; clip the conjugate round trip's asymptotic tails to it
    const double eps = 1e-12 * std::max(1.0, w.scale());
    if (d == 1) {
      for (std::size_t i = 0; i < w.grid.n[0]; ++i)
        if (!w.body->contains(w.grid.coord(0, i), 0, eps)) w.values[i] = kInf;
    } else {
      for (std::size_t i0 = 0; i0 < w.grid.n[0]; ++i0)
        for (std::size_t i1 = 0; i1 < w.grid.n[1]; ++i1)
          if (!w.body->contains(w.grid.coord(0, i0), w.grid.coord(1, i1), eps))
            w.values[w.grid.idx(i0, i1)] = kInf;
    }
  }
  if (u.domain_kind == DomainKind::ConvexBodyDomain &&
      v.domain_kind == DomainKind::ConvexBodyDomain && w.body)
    w.domain_kind = DomainKind::ConvexBodyDomain;
  return w;
}

// (u alpha)(x) = alpha * u(x / alpha); alpha = 0 degenerates to the
// indicator of {0}, the neutral element of infimal convolution.
inline PotentialGrid right_scalar_mult(const PotentialGrid& u, double alpha) {
  if (alpha < 0) throw std::invalid_argument("right_scalar_mult: alpha < 0");
  if (alpha == 0.0) {
    PotentialGrid spike;
    const double h = u.grid.h(0);
    if (u.dim() == 1) {
      spike.grid = Grid::line(-h, h, 3);
      spike.values = {kInf, 0.0, kInf};
    } else {
      spike.grid = Grid::box(-h, h, 3, -u.grid.h(1), u.grid.h(1), 3);
      spike.values.assign(9, kInf);
      spike.values[spike.grid.idx(1, 1)] = 0.0;
    }
    spike.domain_kind = DomainKind::ConvexBodyDomain;
    return spike;
  }
  PotentialGrid out = u;
  for (std::size_t ax = 0; ax < u.dim(); ++ax) {
    out.grid.lo[ax] = alpha * u.grid.lo[ax];
    out.grid.hi[ax] = alpha * u.grid.hi[ax];
  }
  // grid nodes scale with alpha, so u(x_i / alpha) is the stored u_i
  for (auto& val : out.values)
    if (is_finite(val)) val *= alpha;
  if (u.body) out.body = u.body->scaled(alpha);
  return out;
}

// Central differences on finite nodes, one-sided at the edge of the finite
// region. Entries outside the domain are NaN.
inline std::vector<double> gradient_axis(const PotentialGrid& u, std::size_t ax) {
  std::vector<double> g(u.grid.size(), std::numeric_limits<double>::quiet_NaN());
  const double h = u.grid.h(ax);
  auto line = [&](std::size_t offset, std::size_t stride, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      const double c = u.values[offset + i * stride];
      if (!is_finite(c)) continue;
      const double l = i > 0 ? u.values[offset + (i - 1) * stride] : kInf;
      const double r = i + 1 < count ? u.values[offset + (i + 1) * stride] : kInf;
      if (is_finite(l) && is_finite(r))
        g[offset + i * stride] = (r - l) / (2 * h);
      else if (is_finite(r))
        g[offset + i * stride] = (r - c) / h;
      else if (is_finite(l))
        g[offset + i * stride] = (c - l) / h;
    }
  };
  if (u.dim() == 1) {
    line(0, 1, u.grid.n[0]);
  } else if (ax == 0) {
    for (std::size_t j = 0; j < u.grid.n[1]; ++j) line(j, u.grid.n[1], u.grid.n[0]);
  } else {
    for (std::size_t i = 0; i < u.grid.n[0]; ++i)
      line(i * u.grid.n[1], 1, u.grid.n[1]);
  }
  return g;
}

// Minimal second difference / h^2 over axis lines (and diagonals in 2-D).
inline double convexity_margin(const PotentialGrid& u) {
  double margin = kInf;
  auto scan = [&](auto value_at, std::size_t count, double h2) {
    for (std::size_t i = 1; i + 1 < count; ++i) {
      const double a = value_at(i - 1), b = value_at(i), c = value_at(i + 1);
      if (is_finite(a) && is_finite(b) && is_finite(c))
        margin = std::min(margin, (a - 2 * b + c) / h2);
    }
  };
  if (u.dim() == 1) {
    const double h2 = u.grid.h(0) * u.grid.h(0);
    scan([&](std::size_t i) { return u.values[i]; }, u.grid.n[0], h2);
    return is_finite(margin) ? margin : 0.0;
  }
  const double h0 = u.grid.h(0), h1 = u.grid.h(1);
  for (std::size_t j = 0; j < u.grid.n[1]; ++j)
    scan([&](std::size_t i) { return u.at(i, j); }, u.grid.n[0], h0 * h0);
  for (std::size_t i = 0; i < u.grid.n[0]; ++i)
    scan([&](std::size_t jj) { return u.at(i, jj); }, u.grid.n[1], h1 * h1);
  const double hd2 = h0 * h0 + h1 * h1;
  for (std::size_t i = 1; i + 1 < u.grid.n[0]; ++i)
    for (std::size_t j = 1; j + 1 < u.grid.n[1]; ++j) {
      const double b = u.at(i, j);
      if (!is_finite(b)) continue;
      const double a1 = u.at(i - 1, j - 1), c1 = u.at(i + 1, j + 1);
      if (is_finite(a1) && is_finite(c1))
        margin = std::min(margin, (a1 - 2 * b + c1) / hd2);
      const double a2 = u.at(i - 1, j + 1), c2 = u.at(i + 1, j - 1);
      if (is_finite(a2) && is_finite(c2))
        margin = std::min(margin, (a2 - 2 * b + c2) / hd2);
    }
  return is_finite(margin) ? margin : 0.0;
}

}  // namespace logcave
