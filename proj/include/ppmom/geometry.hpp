#pragma once

#include <cmath>
#include <utility>

namespace ppmom {

struct Vec2 {
  double x = 0, y = 0;
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
  double x = 0, y = 0, z = 0;
  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

// Single tolerance constant for all geometric comparisons; each predicate
// scales it by the magnitude of its inputs.
inline constexpr double kGeomTol = 1e-12;

// Line segment through `center` of the given length with axial orientation
// phi in [0, pi).
struct Segment2D {
  Vec2 center;
  double length = 0;
  double phi = 0;
};

// Circular plate (disk) in 3-space; `normal` is a unit vector with the upper
// hemisphere representative (normal.z >= 0).
struct Plate3D {
  Vec3 center;
  double radius = 0;
  Vec3 normal{0, 0, 1};
};

std::pair<Vec2, Vec2> segment_endpoints(const Segment2D& s);

// closed-set semantics: touching endpoints and collinear overlap count
bool segments_intersect(const Segment2D& s, const Segment2D& t);

double plate_area(const Plate3D& p);

// Length of the intersection segment of the two closed disks. Parallel or
// coplanar carrier planes give 0 by convention.
double plate_pair_chord_length(const Plate3D& a, const Plate3D& b);

// Whether the three closed disks share a point. Near-singular plane systems
// (|det| < 1e-12 with unit normals) count as empty.
bool plates_triple_intersect(const Plate3D& a, const Plate3D& b, const Plate3D& c);

}  // namespace ppmom
