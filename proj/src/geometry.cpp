#include "ppmom/geometry.hpp"

#include <algorithm>

namespace ppmom {

namespace {

double cross2(Vec2 o, Vec2 a, Vec2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool in_box(Vec2 p, Vec2 a, Vec2 b, double eps) {
  return std::min(a.x, b.x) - eps <= p.x && p.x <= std::max(a.x, b.x) + eps &&
         std::min(a.y, b.y) - eps <= p.y && p.y <= std::max(a.y, b.y) + eps;
}

double coord_scale(Vec2 p) { return std::max({std::abs(p.x), std::abs(p.y), 1.0}); }

}  // namespace

std::pair<Vec2, Vec2> segment_endpoints(const Segment2D& s) {
  const Vec2 h{0.5 * s.length * std::cos(s.phi), 0.5 * s.length * std::sin(s.phi)};
  return {s.center - h, s.center + h};
}

bool segments_intersect(const Segment2D& s, const Segment2D& t) {
  const auto [p1, p2] = segment_endpoints(s);
  const auto [q1, q2] = segment_endpoints(t);
  const double scale = std::max({coord_scale(p1), coord_scale(p2), coord_scale(q1), coord_scale(q2)});
  const double eps = kGeomTol * scale;        // point-on-line distances
  const double eps2 = eps * scale;            // cross products carry area units

  const double d1 = cross2(q1, q2, p1);
  const double d2 = cross2(q1, q2, p2);
  const double d3 = cross2(p1, p2, q1);
  const double d4 = cross2(p1, p2, q2);

  if (((d1 > eps2 && d2 < -eps2) || (d1 < -eps2 && d2 > eps2)) &&
      ((d3 > eps2 && d4 < -eps2) || (d3 < -eps2 && d4 > eps2)))
    return true;

  // touching / collinear cases
  if (std::abs(d1) <= eps2 && in_box(p1, q1, q2, eps)) return true;
  if (std::abs(d2) <= eps2 && in_box(p2, q1, q2, eps)) return true;
  if (std::abs(d3) <= eps2 && in_box(q1, p1, p2, eps)) return true;
  if (std::abs(d4) <= eps2 && in_box(q2, p1, p2, eps)) return true;
  return false;
}

double plate_area(const Plate3D& p) {
  return M_PI * p.radius * p.radius;
}

double plate_pair_chord_length(const Plate3D& a, const Plate3D& b) {
  const Vec3 u = cross(a.normal, b.normal);
  const double uu = dot(u, u);
  if (uu <= kGeomTol * kGeomTol) return 0.0;  // parallel or coplanar planes

  const double c = dot(a.normal, b.normal);
  const double da = dot(a.normal, a.center);
  const double db = dot(b.normal, b.center);
  const double denom = 1.0 - c * c;  // equals uu for unit normals
  const Vec3 p0 = ((da - db * c) / denom) * a.normal + ((db - da * c) / denom) * b.normal;
  const Vec3 dir = (1.0 / std::sqrt(uu)) * u;

  double lo = -1e300, hi = 1e300;
  for (const Plate3D* pl : {&a, &b}) {
    const Vec3 w = pl->center - p0;
    const double tc = dot(w, dir);
    const double m2 = dot(w, w) - tc * tc;  // squared distance center->line
    const double h2 = pl->radius * pl->radius - m2;
    if (h2 <= 0) return 0.0;
    const double h = std::sqrt(h2);
    lo = std::max(lo, tc - h);
    hi = std::min(hi, tc + h);
  }
  return std::max(0.0, hi - lo);
}

bool plates_triple_intersect(const Plate3D& a, const Plate3D& b, const Plate3D& c) {
  const double det = dot(a.normal, cross(b.normal, c.normal));
  if (std::abs(det) < 1e-12) return false;  // near-singular planes: empty by convention

  const double da = dot(a.normal, a.center);
  const double db = dot(b.normal, b.center);
  const double dc = dot(c.normal, c.center);
  const Vec3 p = (1.0 / det) * (da * cross(b.normal, c.normal) +
                                db * cross(c.normal, a.normal) +
                                dc * cross(a.normal, b.normal));
  for (const Plate3D* pl : {&a, &b, &c}) {
    const Vec3 w = p - pl->center;
    const double scale = std::max({norm(w), pl->radius, 1.0});
    if (norm(w) > pl->radius + kGeomTol * scale) return false;
  }
  return true;
}

}  // namespace ppmom
