#pragma once

#include <array>
#include <limits>
#include <stdexcept>

#include "saf/vec3.hpp"

namespace saf {

struct Aabb {
  Vec3 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
          std::numeric_limits<double>::max()};
  Vec3 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
          std::numeric_limits<double>::lowest()};

  void expand(const Vec3& p) {
    lo = cmin(lo, p);
    hi = cmax(hi, p);
  }
  void expand(const Aabb& b) {
    lo = cmin(lo, b.lo);
    hi = cmax(hi, b.hi);
  }
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
  Aabb padded(double r) const { return {lo - Vec3{r, r, r}, hi + Vec3{r, r, r}}; }

  double dist_sq(const Vec3& p) const {
    double d = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double v = p[i] < lo[i] ? lo[i] - p[i] : (p[i] > hi[i] ? p[i] - hi[i] : 0.0);
      d += v * v;
    }
    return d;
  }
};

inline Vec3 triangle_raw_normal(const Vec3& a, const Vec3& b, const Vec3& c) {
  return cross(b - a, c - a);
}
inline double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(triangle_raw_normal(a, b, c));
}

// Interior angle at corner `a` of triangle (a, b, c).
inline double corner_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a, e2 = c - a;
  return std::atan2(norm(cross(e1, e2)), dot(e1, e2));
}

struct TriClosest {
  Vec3 point;
  std::array<double, 3> bary;
  double dist_sq;
};

// Closest point on a closed triangle, with matching barycentric coordinates.
// Throws std::invalid_argument for (near-)zero-area triangles.
inline TriClosest closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                            const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a;
  {
    const double cr = norm_sq(cross(ab, ac));
    const double scale = norm_sq(ab) * norm_sq(ac);
    if (scale == 0.0 || cr <= scale * 1e-28)
      throw std::invalid_argument("closest_point_on_triangle: degenerate triangle");
  }

  const Vec3 ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return {a, {1.0, 0.0, 0.0}, dist_sq(p, a)};

  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return {b, {0.0, 1.0, 0.0}, dist_sq(p, b)};

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    const Vec3 q = a + v * ab;
    return {q, {1.0 - v, v, 0.0}, dist_sq(p, q)};
  }

  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return {c, {0.0, 0.0, 1.0}, dist_sq(p, c)};

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    const Vec3 q = a + w * ac;
    return {q, {1.0 - w, 0.0, w}, dist_sq(p, q)};
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    const Vec3 q = b + w * (c - b);
    return {q, {0.0, 1.0 - w, w}, dist_sq(p, q)};
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  const Vec3 q = a + v * ab + w * ac;
  return {q, {1.0 - v - w, v, w}, dist_sq(p, q)};
}

struct PlaneBary {
  bool degenerate = false;
  std::array<double, 3> bary{0.0, 0.0, 0.0};
};

// Barycentric coordinates of p with respect to (a, b, c), computed in the
// triangle plane (the out-of-plane component of p is ignored).
inline PlaneBary barycentric_coords(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                                    double area_eps = 1e-12) {
  const Vec3 v0 = b - a, v1 = c - a, v2 = p - a;
  const double d00 = dot(v0, v0), d01 = dot(v0, v1), d11 = dot(v1, v1);
  const double denom = d00 * d11 - d01 * d01;  // (2 * area)^2
  if (denom <= 4.0 * area_eps * area_eps) return {true, {}};
  const double d20 = dot(v2, v0), d21 = dot(v2, v1);
  const double beta = (d11 * d20 - d01 * d21) / denom;
  const double gamma = (d00 * d21 - d01 * d20) / denom;
  return {false, {1.0 - beta - gamma, beta, gamma}};
}

// Signed solid angle of triangle (a, b, c) as seen from x (van Oosterom-Strackee).
inline double triangle_solid_angle(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ra = a - x, rb = b - x, rc = c - x;
  const double la = norm(ra), lb = norm(rb), lc = norm(rc);
  const double numer = dot(ra, cross(rb, rc));
  const double denom = la * lb * lc + dot(ra, rb) * lc + dot(rb, rc) * la + dot(rc, ra) * lb;
  return 2.0 * std::atan2(numer, denom);
}

// Slab test; on hit returns the clipped parametric interval along o + t*d.
inline bool ray_aabb(const Vec3& o, const Vec3& d, const Aabb& box, double& t0, double& t1) {
  t0 = 0.0;
  t1 = std::numeric_limits<double>::max();
  for (int i = 0; i < 3; ++i) {
    if (d[i] == 0.0) {
      if (o[i] < box.lo[i] || o[i] > box.hi[i]) return false;
      continue;
    }
    const double inv = 1.0 / d[i];
    double ta = (box.lo[i] - o[i]) * inv;
    double tb = (box.hi[i] - o[i]) * inv;
    if (ta > tb) std::swap(ta, tb);
    if (ta > t0) t0 = ta;
    if (tb < t1) t1 = tb;
    if (t0 > t1) return false;
  }
  return true;
}

// A projected point on a triangle mesh: face index, barycentric coordinates
// with respect to that face's vertices, and the interpolated world position.
struct SurfacePoint {
  int face = -1;
  std::array<double, 3> bary{0.0, 0.0, 0.0};
  Vec3 position;
};

}  // namespace saf
