// Convex bodies: 1-D intervals and 2-D convex polygons. Enough geometry for
// support functions, gauges, volumes, surface area measures and p-sums.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace logcave {

using Point2 = std::array<double, 2>;

struct ConvexBody {
  // exactly one representation is active
  bool is_interval = true;
  double a = -1.0, b = 1.0;          // interval [a, b]
  std::vector<Point2> poly;          // ccw vertex list, strictly convex

  static ConvexBody interval(double a_, double b_) {
    if (!(a_ < b_)) throw std::invalid_argument("body: need a < b");
    ConvexBody K;
    K.is_interval = true;
    K.a = a_;
    K.b = b_;
    return K;
  }

  static ConvexBody polygon(std::vector<Point2> verts) {
    if (verts.size() < 3) throw std::invalid_argument("body: need >= 3 vertices");
    ConvexBody K;
    K.is_interval = false;
    K.poly = std::move(verts);
    K.check_strictly_convex();
    return K;
  }

  // regular m-gon approximation of the disc of radius r
  static ConvexBody disc(double r, std::size_t m = 720) {
    std::vector<Point2> v(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double th = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(m);
      v[k] = {r * std::cos(th), r * std::sin(th)};
    }
    return polygon(std::move(v));
  }

  std::size_t dim() const { return is_interval ? 1 : 2; }

  void check_strictly_convex() const {
    if (is_interval) return;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Point2& p = poly[i];
      const Point2& q = poly[(i + 1) % m];
      const Point2& r = poly[(i + 2) % m];
      const double cross =
          (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]);
      if (!(cross > 0))
        throw std::invalid_argument("body: vertices not strictly convex ccw");
    }
  }

  // h_K(x) = sup over K of <x, .>
  double support(double x, double y = 0.0) const {
    if (is_interval) return std::max(a * x, b * x);
    double s = -std::numeric_limits<double>::infinity();
    for (const auto& v : poly) s = std::max(s, v[0] * x + v[1] * y);
    return s;
  }

  bool origin_interior() const {
    if (is_interval) return a < 0.0 && 0.0 < b;
    // 0 in int(K)  iff  h_K > 0 in every direction (K compact convex)
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Point2& p = poly[i];
      const Point2& q = poly[(i + 1) % m];
      // outward edge normal
      const double nx = q[1] - p[1], ny = -(q[0] - p[0]);
      const double hn = p[0] * nx + p[1] * ny;
      if (!(hn > 0)) return false;
    }
    return true;
  }

  // gauge (Minkowski functional) of K; requires 0 in int(K).
  // This equals the support function of the polar body K°.
  double gauge(double x, double y = 0.0) const {
    if (is_interval) {
      if (x >= 0.0) return x / b;
      return x / a;
    }
    double g = 0.0;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Point2& p = poly[i];
      const Point2& q = poly[(i + 1) % m];
      const double nx = q[1] - p[1], ny = -(q[0] - p[0]);
      const double hn = p[0] * nx + p[1] * ny;  // unnormalized h_K(edge normal)
      g = std::max(g, (x * nx + y * ny) / hn);
    }
    return g;
  }

  bool contains(double x, double y = 0.0, double tol = 0.0) const {
    if (is_interval) return x >= a - tol && x <= b + tol;
    return gauge(x, y) <= 1.0 + tol;
  }

  double volume() const {
    if (is_interval) return b - a;
    double s = 0.0;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Point2& p = poly[i];
      const Point2& q = poly[(i + 1) % m];
      s += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * s;
  }

  // bounding box, used when choosing sampling windows
  void bounds(double& xlo, double& xhi, double& ylo, double& yhi) const {
    if (is_interval) {
      xlo = a;
      xhi = b;
      ylo = yhi = 0.0;
      return;
    }
    xlo = ylo = std::numeric_limits<double>::infinity();
    xhi = yhi = -xlo;
    for (const auto& v : poly) {
      xlo = std::min(xlo, v[0]);
      xhi = std::max(xhi, v[0]);
      ylo = std::min(ylo, v[1]);
      yhi = std::max(yhi, v[1]);
    }
  }

  ConvexBody scaled(double alpha) const {
    if (!(alpha > 0)) throw std::invalid_argument("body: scale must be positive");
    if (is_interval) return interval(alpha * a, alpha * b);
    std::vector<Point2> v = poly;
    for (auto& p : v) {
      p[0] *= alpha;
      p[1] *= alpha;
    }
    return polygon(std::move(v));
  }

  ConvexBody translated(double tx, double ty = 0.0) const {
    if (is_interval) return interval(a + tx, b + tx);
    std::vector<Point2> v = poly;
    for (auto& p : v) {
      p[0] += tx;
      p[1] += ty;
    }
    return polygon(std::move(v));
  }
};

// Surface area measure of a body. In 1-D: unit atoms at the two normals
// -1/+1. For polygons: edge lengths attached to outward unit normals.
struct SurfaceAtom {
  double nx, ny;  // unit normal (ny = 0 in dimension 1)
  double weight;
};

inline std::vector<SurfaceAtom> surface_area_measure(const ConvexBody& K) {
  if (K.is_interval) return {{-1.0, 0.0, 1.0}, {1.0, 0.0, 1.0}};
  std::vector<SurfaceAtom> atoms;
  const std::size_t m = K.poly.size();
  atoms.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Point2& p = K.poly[i];
    const Point2& q = K.poly[(i + 1) % m];
    const double ex = q[0] - p[0], ey = q[1] - p[1];
    const double len = std::hypot(ex, ey);
    atoms.push_back({ey / len, -ex / len, len});
  }
  return atoms;
}

namespace detail {
// Rebuild a polygon from support values h_i on outward normals nu_i
// (consecutive directions): candidate vertices are intersections of
// consecutive support lines; a convex hull pass cleans up.
inline ConvexBody polygon_from_support(const std::vector<double>& theta,
                                       const std::vector<double>& h) {
  const std::size_t m = theta.size();
  std::vector<Point2> cand;
  cand.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = (i + 1) % m;
    const double c1 = std::cos(theta[i]), s1 = std::sin(theta[i]);
    const double c2 = std::cos(theta[j]), s2 = std::sin(theta[j]);
    const double det = c1 * s2 - c2 * s1;
    if (std::abs(det) < 1e-12) continue;
    cand.push_back({(h[i] * s2 - h[j] * s1) / det, (c1 * h[j] - c2 * h[i]) / det});
  }
  // monotone-chain hull
  std::sort(cand.begin(), cand.end());
  auto cross = [](const Point2& o, const Point2& p, const Point2& q) {
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0]);
  };
  std::vector<Point2> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = hull.size();
    for (const auto& p : cand) {
      while (hull.size() >= base + 2 &&
             cross(hull[hull.size() - 2], hull.back(), p) <= 0)
        hull.pop_back();
      hull.push_back(p);
    }
    hull.pop_back();
    std::reverse(cand.begin(), cand.end());
  }
  return ConvexBody::polygon(std::move(hull));
}
}  // namespace detail

// p-sum: the body whose support function is (alpha h_K^p + beta h_L^p)^(1/p).
// Exact for intervals; polygons go through support sampling + reconstruction
// (exact vertex arithmetic for the Minkowski sum p = 1).
inline ConvexBody psum_body(const ConvexBody& K, const ConvexBody& L,
                            double alpha, double beta, double p) {
  if (p < 1.0) throw std::invalid_argument("psum: p must be >= 1");
  if (alpha < 0 || beta < 0) throw std::invalid_argument("psum: negative weight");
  if (beta == 0.0 && alpha == 0.0)
    throw std::invalid_argument("psum: both weights zero");
  if (beta == 0.0) return p == 1.0 ? K.scaled(alpha) : K.scaled(std::pow(alpha, 1.0 / p));
  if (alpha == 0.0) return p == 1.0 ? L.scaled(beta) : L.scaled(std::pow(beta, 1.0 / p));

  if (K.is_interval && L.is_interval) {
    if (p == 1.0)  // plain Minkowski sum, no origin condition needed
      return ConvexBody::interval(alpha * K.a + beta * L.a,
                                  alpha * K.b + beta * L.b);
    if (!K.origin_interior() || !L.origin_interior())
      throw std::invalid_argument("psum: origin must be interior");
    const double hp = std::pow(alpha * std::pow(K.b, p) + beta * std::pow(L.b, p), 1.0 / p);
    const double hm = std::pow(alpha * std::pow(-K.a, p) + beta * std::pow(-L.a, p), 1.0 / p);
    return ConvexBody::interval(-hm, hp);
  }
  if (K.is_interval || L.is_interval)
    throw std::invalid_argument("psum: mixed interval/polygon not supported");

  if (p == 1.0) {
    // Minkowski sum: hull of pairwise vertex sums (exact)
    std::vector<Point2> pts;
    pts.reserve(K.poly.size() * L.poly.size());
    for (const auto& u : K.poly)
      for (const auto& v : L.poly)
        pts.push_back({alpha * u[0] + beta * v[0], alpha * u[1] + beta * v[1]});
    std::sort(pts.begin(), pts.end());
    auto cross = [](const Point2& o, const Point2& pp, const Point2& q) {
      return (pp[0] - o[0]) * (q[1] - o[1]) - (pp[1] - o[1]) * (q[0] - o[0]);
    };
    std::vector<Point2> hull;
    for (int pass = 0; pass < 2; ++pass) {
      const std::size_t base = hull.size();
      for (const auto& q : pts) {
        while (hull.size() >= base + 2 &&
               cross(hull[hull.size() - 2], hull.back(), q) <= 0)
          hull.pop_back();
        hull.push_back(q);
      }
      hull.pop_back();
      std::reverse(pts.begin(), pts.end());
    }
    return ConvexBody::polygon(std::move(hull));
  }

  const std::size_t m = 720;
  std::vector<double> theta(m), h(m);
  for (std::size_t i = 0; i < m; ++i) {
    theta[i] = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(m);
    const double c = std::cos(theta[i]), s = std::sin(theta[i]);
    h[i] = std::pow(alpha * std::pow(K.support(c, s), p) +
                        beta * std::pow(L.support(c, s), p),
                    1.0 / p);
  }
  return detail::polygon_from_support(theta, h);
}

}  // namespace logcave
