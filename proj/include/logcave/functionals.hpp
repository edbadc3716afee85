#pragma once

// Total mass J, entropy, the first variation delta J(f,g) by one-sided finite
// differences in t, its closed form at g = f, and the functional perimeter.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "logcave/convex.hpp"
#include "logcave/grid.hpp"
#include "logcave/logconcave.hpp"

namespace logcave {

enum class DeltaJMethod { FdExtrapolated, ClosedForm, Representation };

inline const char* to_string(DeltaJMethod m) {
  switch (m) {
    case DeltaJMethod::ClosedForm: return "closed-form";
    case DeltaJMethod::Representation: return "representation";
    default: return "fd-extrapolated";
  }
}

struct DeltaJEstimate {
  double value = 0.0;
  double error_bar = 0.0;
  std::vector<std::pair<double, double>> t_sequence;  // (t, quotient), t decreasing
  DeltaJMethod method = DeltaJMethod::FdExtrapolated;
};

namespace detail {

// trapezoid over every stride-th node; caller ensures (n-1) divides by stride
template <class NodeFn>
double trapezoid_nd(const PotentialGrid& p, NodeFn&& node, std::size_t stride) {
  const Grid& g = p.grid;
  if (p.dim() == 1) {
    const std::size_t last = g.n[0] - 1;
    double s = 0;
    for (std::size_t i = 0; i <= last; i += stride)
      s += ((i == 0 || i == last) ? 0.5 : 1.0) * node(i);
    return s * g.h(0) * static_cast<double>(stride);
  }
  const std::size_t l0 = g.n[0] - 1, l1 = g.n[1] - 1;
  double s = 0;
  for (std::size_t i0 = 0; i0 <= l0; i0 += stride)
    for (std::size_t i1 = 0; i1 <= l1; i1 += stride) {
      const double w =
          ((i0 == 0 || i0 == l0) ? 0.5 : 1.0) * ((i1 == 0 || i1 == l1) ? 0.5 : 1.0);
      s += w * node(g.idx(i0, i1));
    }
  return s * g.h(0) * g.h(1) * static_cast<double>(stride * stride);
}

// Integrate a node-valued integrand (must be 0 outside the finite mask).
// Whole-window data gets a Richardson-refined trapezoid; body domains get the
// plain rule over the finite run plus the slivers out to the exact edges.
template <class NodeFn>
double integrate_nodes(const PotentialGrid& p, NodeFn&& node, bool refine = true) {
  const Grid& g = p.grid;
  if (p.count_finite() == g.size()) {
    bool can2 = true;
    for (std::size_t ax = 0; ax < p.dim(); ++ax) can2 = can2 && ((g.n[ax] - 1) % 2 == 0);
    const double fine = trapezoid_nd(p, node, 1);
    if (refine && can2) return (4.0 * fine - trapezoid_nd(p, node, 2)) / 3.0;
    return fine;
  }
  if (p.dim() == 1) {
    std::size_t first = 0, last = 0;
    if (!p.finite_run(0, 0, first, last)) return 0.0;
    const double h = g.h(0);
    double s = 0;
    for (std::size_t i = first; i < last; ++i) s += 0.5 * (node(i) + node(i + 1)) * h;
    if (p.body) {
      s += std::max(0.0, g.coord(0, first) - p.body->a) * node(first);
      s += std::max(0.0, p.body->b - g.coord(0, last)) * node(last);
    } else {
      s += 0.5 * h * (node(first) + node(last));
    }
    return s;
  }
  return trapezoid_nd(p, node, 1);
}

}  // namespace detail

// J(f) = int e^{-u}
inline double total_mass(const LogConcaveFn& f) {
  const PotentialGrid& p = f.potential;
  if (detail::is_indicator_potential(p)) return p.body->volume();
  return detail::integrate_nodes(
      p, [&](std::size_t i) { return detail::density(p.values[i]); });
}

// int f log f, with the f log f = 0 convention below f = 1e-300
inline double flogf_integral(const LogConcaveFn& f) {
  const PotentialGrid& p = f.potential;
  if (detail::is_indicator_potential(p)) return 0.0;
  return detail::integrate_nodes(p, [&](std::size_t i) {
    const double u = p.values[i];
    if (!is_finite(u) || u > 690.0) return 0.0;
    return -u * std::exp(-u);
  });
}

inline double entropy(const LogConcaveFn& f) {
  const double J = total_mass(f);
  if (!(J > 0)) throw ZeroMassError();
  return flogf_integral(f) - J * std::log(J);
}

// delta J(f,f) = n J(f) + int f log f
inline double delta_J_self(const LogConcaveFn& f) {
  const double J = total_mass(f);
  if (!(J > 0)) throw ZeroMassError();
  return static_cast<double>(f.potential.dim()) * J + flogf_integral(f);
}

namespace detail {

// piecewise-linear view of the finite nodes of a 1-D potential
struct Pwl1 {
  std::vector<double> x, u;
  double lo = 0, hi = 0;
};

inline Pwl1 make_pwl(const PotentialGrid& p) {
  Pwl1 w;
  for (std::size_t i = 0; i < p.grid.n[0]; ++i)
    if (is_finite(p.values[i])) {
      w.x.push_back(p.grid.coord(0, i));
      w.u.push_back(p.values[i]);
    }
  if (w.x.empty()) throw ZeroMassError();
  w.lo = w.x.front();
  w.hi = w.x.back();
  return w;
}

inline double pwl_at(const Pwl1& w, double q) {
  if (q <= w.lo) return w.u.front();
  if (q >= w.hi) return w.u.back();
  const std::size_t i =
      static_cast<std::size_t>(std::upper_bound(w.x.begin(), w.x.end(), q) - w.x.begin()) - 1;
  const double t = (q - w.x[i]) / (w.x[i + 1] - w.x[i]);
  return w.u[i] + t * (w.u[i + 1] - w.u[i]);
}

// values of (u alpha) box (v beta) at the points X, all inside the exact domain.
// Feasible windows in j come from binary search; the minimizer pointer only
// moves forward, with a small guard band against flat stretches.
inline void inf_conv_values(const Pwl1& uf, const Pwl1& vf, double alpha, double beta,
                            const std::vector<double>& X, std::vector<double>& out) {
  out.resize(X.size());
  if (beta == 0.0) {
    for (std::size_t k = 0; k < X.size(); ++k)
      out[k] = alpha == 1.0 ? pwl_at(uf, X[k]) : alpha * pwl_at(uf, X[k] / alpha);
    return;
  }
  if (alpha == 0.0) {
    for (std::size_t k = 0; k < X.size(); ++k) out[k] = beta * pwl_at(vf, X[k] / beta);
    return;
  }
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(vf.x.size());
  std::vector<double> z(vf.x.size());
  for (std::size_t j = 0; j < vf.x.size(); ++j) z[j] = beta * vf.x[j];
  const double lou = alpha * uf.lo, hiu = alpha * uf.hi;
  std::ptrdiff_t j = 0;
  for (std::size_t k = 0; k < X.size(); ++k) {
    const double Xq = X[k];
    std::ptrdiff_t jlo = std::lower_bound(z.begin(), z.end(), Xq - hiu) - z.begin();
    std::ptrdiff_t jhi = (std::upper_bound(z.begin(), z.end(), Xq - lou) - z.begin()) - 1;
    jlo = std::max<std::ptrdiff_t>(jlo, 0);
    jhi = std::min(jhi, m - 1);
    if (jlo > jhi) jlo = jhi = std::min(std::max<std::ptrdiff_t>(jlo, 0), m - 1);
    j = std::min(std::max(j, jlo), jhi);
    auto val = [&](std::ptrdiff_t jj) {
      const double q = std::clamp((Xq - z[jj]) / alpha, uf.lo, uf.hi);
      return alpha * pwl_at(uf, q) + beta * vf.u[jj];
    };
    double best = val(j);
    while (j + 1 <= jhi) {
      const double c = val(j + 1);
      if (c < best) {
        ++j;
        best = c;
      } else {
        break;
      }
    }
    for (std::ptrdiff_t jj = std::max(jlo, j - 2); jj <= std::min(jhi, j + 2); ++jj)
      best = std::min(best, val(jj));
    out[k] = best;
  }
}

// J(alpha . f (+) beta . g) with the two exact domain endpoints inserted as
// integration nodes (the moving boundary otherwise sweeps grid cells and puts
// a sawtooth in t into the difference quotients), and exact per-cell
// integration of e^{-w} for piecewise-linear w.
inline double J_of_t(const Pwl1& uf, const Pwl1& vf, double alpha, double beta,
                     const std::vector<double>& Xbase) {
  const double lo = alpha * uf.lo + beta * vf.lo;
  const double hi = alpha * uf.hi + beta * vf.hi;
  std::vector<double> xs;
  xs.reserve(Xbase.size() + 2);
  xs.push_back(lo);
  for (double xq : Xbase)
    if (xq > lo && xq < hi) xs.push_back(xq);
  xs.push_back(hi);
  std::vector<double> ws;
  inf_conv_values(uf, vf, alpha, beta, xs, ws);
  double s = 0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double h = xs[i + 1] - xs[i];
    const double w0 = std::min(ws[i], 745.0), w1 = std::min(ws[i + 1], 745.0);
    const double f0 = std::exp(-w0), f1 = std::exp(-w1), dw = w1 - w0;
    s += std::abs(dw) > 1e-12 ? h * (f0 - f1) / dw : h * 0.5 * (f0 + f1);
  }
  return s;
}

// least-squares polynomial of degree <= 2 through (t_i, q_i), evaluated at 0
inline double extrapolate_to_zero(const double* t, const double* q, std::size_t m) {
  const std::size_t n = std::min<std::size_t>(3, m);
  double A[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double r[3] = {0, 0, 0};
  for (std::size_t i = 0; i < m; ++i) {
    const double basis[3] = {1.0, t[i], t[i] * t[i]};
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t c = 0; c < n; ++c) A[a][c] += basis[a] * basis[c];
      r[a] += basis[a] * q[i];
    }
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::abs(A[row][col]) > std::abs(A[piv][col])) piv = row;
    std::swap(A[col], A[piv]);
    std::swap(r[col], r[piv]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double fac = A[row][col] / A[col][col];
      for (std::size_t c = col; c < n; ++c) A[row][c] -= fac * A[col][c];
      r[row] -= fac * r[col];
    }
  }
  double coeff[3] = {0, 0, 0};
  for (std::size_t row = n; row-- > 0;) {
    double s = r[row];
    for (std::size_t c = row + 1; c < n; ++c) s -= A[row][c] * coeff[c];
    coeff[row] = s / A[row][row];
  }
  return coeff[0];
}

}  // namespace detail

// One-sided finite differences for delta J(f, g) = lim (J(f (+) t.g) - J(f)) / t:
// difference quotients at t_k = t0 2^{-k}, degree-2 extrapolation to t = 0+ on
// the last four, error bar from shifting the fit window by one level.
inline DeltaJEstimate delta_J_fd(const LogConcaveFn& f, const LogConcaveFn& g, double t0 = 0.1,
                                 int levels = 6) {
  if (!(t0 > 0) || levels < 3)
    throw std::invalid_argument("delta_J_fd: need t0 > 0 and levels >= 3");
  const std::size_t d = f.potential.dim();
  if (g.potential.dim() != d) throw std::invalid_argument("delta_J_fd: dimension mismatch");

  std::vector<double> ts(levels), qs(levels);
  for (int k = 0; k < levels; ++k) ts[k] = t0 * std::pow(2.0, -k);
  double J0 = 0;

  if (d == 1) {
    const detail::Pwl1 uf = detail::make_pwl(f.potential);
    const detail::Pwl1 vf = detail::make_pwl(g.potential);
    const double lo = uf.lo + t0 * std::min(0.0, vf.lo) - 1e-9;
    const double hi = uf.hi + t0 * std::max(0.0, vf.hi) + 1e-9;
    const std::size_t nx = 8 * std::max(f.potential.grid.n[0], g.potential.grid.n[0]) + 1;
    std::vector<double> X(nx);
    for (std::size_t i = 0; i < nx; ++i)
      X[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(nx - 1);
    J0 = detail::J_of_t(uf, vf, 1.0, 0.0, X);
    for (int k = 0; k < levels; ++k)
      qs[k] = (detail::J_of_t(uf, vf, 1.0, ts[k], X) - J0) / ts[k];
  } else {
    // conjugate route: (u* + t v*) on a shared slope grid, conjugated back to a
    // fixed x window; the t = 0 baseline runs through the same pipeline so the
    // discretization bias cancels in the quotients
    const PotentialGrid& up = f.potential;
    const PotentialGrid& vp = g.potential;
    Grid ygrid, xtarget;
    ygrid.lo.resize(2), ygrid.hi.resize(2), ygrid.n.resize(2);
    xtarget.lo.resize(2), xtarget.hi.resize(2), xtarget.n.resize(2);
    for (std::size_t ax = 0; ax < 2; ++ax) {
      double au, bu, av, bv;
      attained_slope_range(up, ax, au, bu);
      attained_slope_range(vp, ax, av, bv);
      double lo = std::max(au, av), hi = std::min(bu, bv);
      if (!is_finite(lo) && !is_finite(hi)) lo = hi = 0.0;
      if (lo > hi) throw SlopeRangeError();
      const double pad = std::max(0.1 * (hi - lo), 1.0);
      ygrid.lo[ax] = lo - pad;
      ygrid.hi[ax] = hi + pad;
      const double hsrc = std::min(up.grid.h(ax), vp.grid.h(ax));
      ygrid.n[ax] = std::clamp<std::size_t>(
          static_cast<std::size_t>((ygrid.hi[ax] - ygrid.lo[ax]) / hsrc) + 1, 385, 769);
      xtarget.lo[ax] = up.grid.lo[ax] + t0 * std::min(0.0, vp.grid.lo[ax]) - 1e-9;
      xtarget.hi[ax] = up.grid.hi[ax] + t0 * std::max(0.0, vp.grid.hi[ax]) + 1e-9;
      xtarget.n[ax] = 2 * std::max(up.grid.n[ax], vp.grid.n[ax]) + 1;
    }
    const PotentialGrid us = fenchel_conjugate(up, ygrid, true);
    const PotentialGrid vs = fenchel_conjugate(vp, ygrid, true);
    auto J_at = [&](double t) {
      PotentialGrid sum;
      sum.grid = ygrid;
      sum.domain_kind = DomainKind::WholeSpaceTruncated;
      sum.values.resize(us.values.size());
      for (std::size_t i = 0; i < sum.values.size(); ++i) {
        const double a = us.values[i], b = vs.values[i];
        sum.values[i] = (is_finite(a) && is_finite(b)) ? a + t * b : kInf;
      }
      const PotentialGrid w = fenchel_conjugate(sum, xtarget, true);
      return detail::trapezoid_nd(
          w, [&](std::size_t i) { return detail::density(w.values[i]); }, 1);
    };
    J0 = J_at(0.0);
    if (!(J0 > 0)) throw ZeroMassError();
    for (int k = 0; k < levels; ++k) qs[k] = (J_at(ts[k]) - J0) / ts[k];
  }

  DeltaJEstimate est;
  est.method = DeltaJMethod::FdExtrapolated;
  for (int k = 0; k < levels; ++k) est.t_sequence.emplace_back(ts[k], qs[k]);

  bool increasing = true;
  for (int k = 1; k < levels; ++k) increasing = increasing && qs[k] > qs[k - 1];
  if (increasing && qs[levels - 1] > 1e6 * std::max(J0, 1.0)) {
    est.value = kInf;
    est.error_bar = 0.0;
    return est;
  }

  const std::size_t m1 = std::min<std::size_t>(4, levels);
  const double e1 = detail::extrapolate_to_zero(ts.data() + (levels - m1), qs.data() + (levels - m1), m1);
  double e2;
  if (levels >= 5) {
    e2 = detail::extrapolate_to_zero(ts.data() + (levels - 5), qs.data() + (levels - 5), 4);
  } else {
    const std::size_t m2 = levels - 1;  // drop the smallest t instead
    e2 = detail::extrapolate_to_zero(ts.data() + (levels - 1 - m2), qs.data() + (levels - 1 - m2), m2);
  }
  est.value = e1;
  est.error_bar = std::abs(e1 - e2);
  return est;
}

// P(f) = delta J(f, gamma_n) via the closed form
// (1/2) int ||grad u||^2 e^{-u} + log(c_n) J(f).
// The (HG) curvature floor of u* is evaluated as a diagnostic, not enforced.
inline double perimeter(const LogConcaveFn& f, double* hg_margin = nullptr) {
  if (f.class_tag != FnClass::Aprime)
    throw ClassError("perimeter requires class Aprime");
  const PotentialGrid& p = f.potential;
  const double J = total_mass(f);
  if (!(J > 0)) throw ZeroMassError();
  std::vector<std::vector<double>> grads;
  for (std::size_t ax = 0; ax < p.dim(); ++ax) grads.push_back(gradient_axis(p, ax));
  const double dirichlet = detail::integrate_nodes(p, [&](std::size_t i) {
    const double u = p.values[i];
    if (!is_finite(u)) return 0.0;
    double g2 = 0;
    for (const auto& gax : grads) {
      if (std::isnan(gax[i])) return 0.0;
      g2 += gax[i] * gax[i];
    }
    return 0.5 * g2 * detail::density(u);
  });
  if (hg_margin) {
    // curvature floor of u* on the attained slope range; farther out the grid
    // conjugate is an affine extension whose zero curvature is an artifact
    Grid hg_target;
    hg_target.lo.resize(p.dim());
    hg_target.hi.resize(p.dim());
    hg_target.n.resize(p.dim());
    for (std::size_t ax = 0; ax < p.dim(); ++ax) {
      double smin, smax;
      attained_slope_range(p, ax, smin, smax);
      hg_target.lo[ax] = smin;
      hg_target.hi[ax] = smax;
      hg_target.n[ax] = p.grid.n[ax];
    }
    *hg_margin = convexity_margin(fenchel_conjugate(p, hg_target));
  }
  const double logcn = -0.5 * static_cast<double>(p.dim()) * std::log(2.0 * std::numbers::pi);
  return dirichlet + logcn * J;
}

// mean width of g: delta J(gamma_n, g)
inline DeltaJEstimate mean_width(const LogConcaveFn& g, double t0 = 0.1, int levels = 6) {
  const LogConcaveFn gamma = g.potential.dim() == 1
                                 ? make_gaussian(1, Grid::line(-8, 8, 2001))
                                 : make_gaussian(2, Grid::box(-6, 6, 241, -6, 6, 241));
  return delta_J_fd(gamma, g, t0, levels);
}

}  // namespace logcave
