#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ppmom/geometry.hpp"
#include "ppmom/rng.hpp"

using namespace ppmom;

namespace {

Segment2D rand_segment(Rng& rng, double box = 1.0, double b = 0.4) {
  return {{rng.uniform(0, box), rng.uniform(0, box)}, b * (1 - rng.uniform()),
          M_PI * rng.uniform()};
}

Plate3D rand_plate(Rng& rng, double box = 1.0, double b = 0.4) {
  const double z = 2 * rng.uniform() - 1;
  const double th = 2 * M_PI * rng.uniform();
  const double s = std::sqrt(std::max(0.0, 1 - z * z));
  Vec3 n{s * std::cos(th), s * std::sin(th), z};
  if (n.z < 0) n = -1.0 * n;
  return {{rng.uniform(0, box), rng.uniform(0, box), rng.uniform(0, box)},
          b * (1 - rng.uniform()), n};
}

// dense-sampling oracle: sample many points on s and test distance to t
bool segments_intersect_oracle(const Segment2D& s, const Segment2D& t, double eps) {
  const auto [p1, p2] = segment_endpoints(s);
  const auto [q1, q2] = segment_endpoints(t);
  const Vec2 d = q2 - q1;
  const double qq = dot(d, d);
  for (int i = 0; i <= 10000; ++i) {
    const Vec2 p = p1 + (i / 10000.0) * (p2 - p1);
    double u = qq > 0 ? dot(p - q1, d) / qq : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    const Vec2 c = q1 + u * d;
    if (norm(p - c) <= eps) return true;
  }
  return false;
}

// minimum over the sampled points of the distance to the other segment
double segments_min_distance(const Segment2D& s, const Segment2D& t) {
  const auto [p1, p2] = segment_endpoints(s);
  const auto [q1, q2] = segment_endpoints(t);
  const Vec2 d = q2 - q1;
  const double qq = dot(d, d);
  double best = 1e300;
  for (int i = 0; i <= 10000; ++i) {
    const Vec2 p = p1 + (i / 10000.0) * (p2 - p1);
    double u = qq > 0 ? dot(p - q1, d) / qq : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    best = std::min(best, norm(p - (q1 + u * d)));
  }
  return best;
}

// line-discretization oracle for the chord of two disks
double chord_oracle(const Plate3D& a, const Plate3D& b, int n_pts = 100000) {
  const Vec3 u = cross(a.normal, b.normal);
  const double uu = dot(u, u);
  if (uu < 1e-20) return 0.0;
  const double c = dot(a.normal, b.normal);
  const double da = dot(a.normal, a.center), db = dot(b.normal, b.center);
  const Vec3 p0 = ((da - db * c) / (1 - c * c)) * a.normal + ((db - da * c) / (1 - c * c)) * b.normal;
  const Vec3 dir = (1 / std::sqrt(uu)) * u;
  // span a window on the line that certainly covers both disks
  const double tmid = dot(0.5 * (a.center + b.center) - p0, dir);
  const double half = norm(a.center - b.center) + a.radius + b.radius + 1;
  long inside = 0;
  for (int i = 0; i < n_pts; ++i) {
    const double t = tmid - half + (2 * half * i) / (n_pts - 1);
    const Vec3 p = p0 + t * dir;
    if (norm(p - a.center) <= a.radius && norm(p - b.center) <= b.radius) ++inside;
  }
  return 2.0 * half * static_cast<double>(inside) / static_cast<double>(n_pts);
}

// interval oracle: clip the third plate's chord interval against the first
// pair's interval on the shared plane-intersection line
bool triple_oracle(const Plate3D& a, const Plate3D& b, const Plate3D& c) {
  const Vec3 u = cross(a.normal, b.normal);
  const double uu = dot(u, u);
  if (uu < 1e-20) return false;
  const double cc = dot(a.normal, b.normal);
  const double da = dot(a.normal, a.center), db = dot(b.normal, b.center);
  const Vec3 p0 = ((da - db * cc) / (1 - cc * cc)) * a.normal + ((db - da * cc) / (1 - cc * cc)) * b.normal;
  const Vec3 dir = (1 / std::sqrt(uu)) * u;
  double lo = -1e300, hi = 1e300;
  for (const Plate3D* pl : {&a, &b}) {
    const Vec3 w = pl->center - p0;
    const double tc = dot(w, dir);
    const double m2 = dot(w, w) - tc * tc;
    if (m2 >= pl->radius * pl->radius) return false;
    const double h = std::sqrt(pl->radius * pl->radius - m2);
    lo = std::max(lo, tc - h);
    hi = std::min(hi, tc + h);
  }
  if (lo > hi) return false;
  // points of the interval inside the third disk (it is a closed set)
  const double denom = dot(c.normal, dir);
  const double rhs = dot(c.normal, c.center - p0);
  if (std::abs(denom) < 1e-14) {
    if (std::abs(rhs) > 1e-12) return false;  // line parallel to the plane, off it
    // line lies in the third plane: clip against the disk
    const Vec3 w = c.center - p0;
    const double tc = dot(w, dir);
    const double m2 = dot(w, w) - tc * tc;
    if (m2 > c.radius * c.radius) return false;
    const double h = std::sqrt(std::max(0.0, c.radius * c.radius - m2));
    return std::max(lo, tc - h) <= std::min(hi, tc + h);
  }
  const double t = rhs / denom;
  if (t < lo - 1e-12 || t > hi + 1e-12) return false;
  return norm(p0 + t * dir - c.center) <= c.radius + 1e-12;
}

Vec3 rotz(Vec3 v, double a) {
  return {v.x * std::cos(a) - v.y * std::sin(a), v.x * std::sin(a) + v.y * std::cos(a), v.z};
}

}  // namespace

TEST_CASE("segment endpoints: axis aligned") {
  const auto [a, b] = segment_endpoints({{0, 0}, 2, 0});
  CHECK(a.x == doctest::Approx(-1).epsilon(1e-14));
  CHECK(a.y == doctest::Approx(0).epsilon(1e-14));
  CHECK(b.x == doctest::Approx(1).epsilon(1e-14));

  const auto [c, d] = segment_endpoints({{0, 0}, 2, M_PI / 2});
  CHECK(c.y == doctest::Approx(-1).epsilon(1e-14));
  CHECK(d.y == doctest::Approx(1).epsilon(1e-14));
  CHECK(std::abs(c.x) < 1e-12);
}

TEST_CASE("segment endpoints: midpoint and length round trip") {
  Rng rng(101);
  for (int i = 0; i < 200; ++i) {
    const Segment2D s = rand_segment(rng);
    const auto [a, b] = segment_endpoints(s);
    CHECK(norm(0.5 * (a + b) - s.center) < 1e-12);
    CHECK(norm(b - a) == doctest::Approx(s.length).epsilon(1e-12));
  }
}

TEST_CASE("segments_intersect: crossing and parallel cases") {
  const Segment2D s{{0.5, 0}, 1, 0};            // (0,0)-(1,0)
  const Segment2D t{{0.5, 0}, 1, M_PI / 2};     // (0.5,-0.5)-(0.5,0.5)
  CHECK(segments_intersect(s, t));
  const Segment2D u{{0.5, 1}, 1, 0};            // (0,1)-(1,1)
  CHECK_FALSE(segments_intersect(s, u));
}

TEST_CASE("segments_intersect: touching endpoint counts (closed sets)") {
  const Segment2D s{{0.5, 0}, 1, 0};
  const Segment2D t{{1.0, 0.5}, 1, M_PI / 2};  // lower endpoint exactly (1, 0)
  CHECK(segments_intersect(s, t));
}

TEST_CASE("segments_intersect: collinear overlap counts") {
  const Segment2D s{{0.5, 0}, 1, 0};
  const Segment2D t{{1.2, 0}, 1, 0};  // overlaps [0.7, 1.0]
  CHECK(segments_intersect(s, t));
  const Segment2D u{{2.2, 0}, 1, 0};  // disjoint collinear
  CHECK_FALSE(segments_intersect(s, u));
}

TEST_CASE("segments_intersect agrees with the dense-sampling oracle") {
  Rng rng(7);
  const double band = 2e-4;  // oracle resolution band
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const Segment2D s = rand_segment(rng);
    const Segment2D t = rand_segment(rng);
    const double dmin = segments_min_distance(s, t);
    if (dmin < band) continue;  // within the oracle band, skip
    ++checked;
    CHECK(segments_intersect(s, t) == segments_intersect_oracle(s, t, 1e-9));
  }
  CHECK(checked > 800);
}

TEST_CASE("plate_area") {
  CHECK(plate_area({{0, 0, 0}, 1, {0, 0, 1}}) == doctest::Approx(M_PI));
  CHECK(plate_area({{0, 0, 0}, 0.5, {0, 0, 1}}) == doctest::Approx(M_PI / 4));
  CHECK(plate_area({{0, 0, 0}, 2, {0, 0, 1}}) == doctest::Approx(4 * M_PI));
}

TEST_CASE("chord of perpendicular unit disks through the origin") {
  const Plate3D a{{0, 0, 0}, 1, {0, 0, 1}};
  const Plate3D b{{0, 0, 0}, 1, {1, 0, 0}};
  CHECK(plate_pair_chord_length(a, b) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("parallel and coplanar disks give zero chord") {
  const Plate3D a{{0, 0, 0}, 1, {0, 0, 1}};
  const Plate3D b{{0.3, 0, 0.5}, 1, {0, 0, 1}};
  CHECK(plate_pair_chord_length(a, b) == 0.0);
  const Plate3D c{{0.3, 0, 0}, 1, {0, 0, 1}};  // coplanar, overlapping disks
  CHECK(plate_pair_chord_length(a, c) == 0.0);
  CHECK(plate_pair_chord_length(a, a) == 0.0);
}

TEST_CASE("chord length against the line-discretization oracle") {
  Rng rng(13);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const Plate3D a = rand_plate(rng);
    const Plate3D b = rand_plate(rng);
    const double got = plate_pair_chord_length(a, b);
    const double want = chord_oracle(a, b);
    worst = std::max(worst, std::abs(got - want));
  }
  CHECK(worst <= 1e-3 * 0.4);  // tolerance scaled by the radius bound
}

TEST_CASE("chord is bounded by both diameters") {
  Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    const Plate3D a = rand_plate(rng);
    const Plate3D b = rand_plate(rng);
    CHECK(plate_pair_chord_length(a, b) <= 2 * std::min(a.radius, b.radius) + 1e-12);
  }
}

TEST_CASE("triple intersection of the three coordinate disks") {
  const Plate3D a{{0, 0, 0}, 1, {0, 0, 1}};
  const Plate3D b{{0, 0, 0}, 1, {1, 0, 0}};
  const Plate3D c{{0, 0, 0}, 1, {0, 1, 0}};
  CHECK(plates_triple_intersect(a, b, c));
  const Plate3D far{{10, 0, 0}, 1, {0, 1, 0}};
  CHECK_FALSE(plates_triple_intersect(a, b, far));
}

TEST_CASE("triple intersection agrees with the interval oracle") {
  Rng rng(23);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    // draw clustered plates so intersections actually occur
    const Plate3D a = rand_plate(rng, 0.4, 0.5);
    const Plate3D b = rand_plate(rng, 0.4, 0.5);
    const Plate3D c = rand_plate(rng, 0.4, 0.5);
    const bool got = plates_triple_intersect(a, b, c);
    const bool want = triple_oracle(a, b, c);
    if (got) ++hits;
    CHECK(got == want);
  }
  CHECK(hits > 10);  // the sample actually exercises the true branch
}

TEST_CASE("predicates are symmetric in their arguments") {
  Rng rng(31);
  for (int i = 0; i < 300; ++i) {
    const Segment2D s = rand_segment(rng);
    const Segment2D t = rand_segment(rng);
    CHECK(segments_intersect(s, t) == segments_intersect(t, s));
  }
  for (int i = 0; i < 300; ++i) {
    const Plate3D a = rand_plate(rng, 0.5, 0.5);
    const Plate3D b = rand_plate(rng, 0.5, 0.5);
    const Plate3D c = rand_plate(rng, 0.5, 0.5);
    const bool r = plates_triple_intersect(a, b, c);
    CHECK(r == plates_triple_intersect(b, a, c));
    CHECK(r == plates_triple_intersect(c, b, a));
    CHECK(r == plates_triple_intersect(a, c, b));
    CHECK(plate_pair_chord_length(a, b) == doctest::Approx(plate_pair_chord_length(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("rigid motions leave the predicates invariant") {
  Rng rng(37);
  for (int i = 0; i < 200; ++i) {
    const Segment2D s = rand_segment(rng);
    const Segment2D t = rand_segment(rng);
    const double a = 2 * M_PI * rng.uniform();
    const Vec2 shift{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    auto move = [&](const Segment2D& seg) {
      const Vec2 c{seg.center.x * std::cos(a) - seg.center.y * std::sin(a) + shift.x,
                   seg.center.x * std::sin(a) + seg.center.y * std::cos(a) + shift.y};
      double phi = std::fmod(seg.phi + a, M_PI);
      if (phi < 0) phi += M_PI;
      return Segment2D{c, seg.length, phi};
    };
    CHECK(segments_intersect(s, t) == segments_intersect(move(s), move(t)));
  }
  for (int i = 0; i < 200; ++i) {
    const Plate3D a = rand_plate(rng, 0.5, 0.5);
    const Plate3D b = rand_plate(rng, 0.5, 0.5);
    const double ang = 2 * M_PI * rng.uniform();
    const Vec3 shift{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    auto move = [&](const Plate3D& p) {
      Vec3 n = rotz(p.normal, ang);
      if (n.z < 0) n = -1.0 * n;
      return Plate3D{rotz(p.center, ang) + shift, p.radius, n};
    };
    const double c0 = plate_pair_chord_length(a, b);
    const double c1 = plate_pair_chord_length(move(a), move(b));
    CHECK(std::abs(c0 - c1) <= 1e-9 * (1 + std::abs(c0)));
  }
}
