#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace shelfmem {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }
inline Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  return n > 0.0 ? Vec2{a.x / n, a.y / n} : Vec2{};
}
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) {
  const double n = norm(a);
  return n > 0.0 ? Vec3{a.x / n, a.y / n, a.z / n} : Vec3{};
}
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

struct Aabb2 {
  Vec2 lo, hi;
  bool contains(Vec2 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
};

struct Aabb3 {
  Vec3 lo, hi;
  bool contains(Vec3 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
           p.z >= lo.z && p.z <= hi.z;
  }
  Vec3 center() const { return (lo + hi) * 0.5; }
};

/// Convex polygon with counter-clockwise vertices. All object footprints are
/// represented this way (rectangles as 4-gons, cylinders as regular 16-gons)
/// so overlap, sweep, and clearance queries share one code path.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  explicit ConvexPolygon(std::vector<Vec2> ccw_vertices);

  static ConvexPolygon rectangle(Vec2 center, double half_w, double half_d,
                                 double yaw);
  static ConvexPolygon regular(Vec2 center, double radius, int sides);

  const std::vector<Vec2>& vertices() const { return verts_; }
  Vec2 centroid() const;
  double area() const;
  bool contains(Vec2 p) const;  // boundary-inclusive
  ConvexPolygon translated(Vec2 d) const;

  /// [min, max] of the projection onto `axis`.
  std::array<double, 2> project(Vec2 axis) const;

  /// Width of the polygon measured along `dir` (max - min projection).
  double extent_along(Vec2 dir) const;

  Aabb2 bounds() const;

 private:
  std::vector<Vec2> verts_;
};

bool intersects(const ConvexPolygon& a, const ConvexPolygon& b);

/// Displacement interval [lo, hi] over which `moving` translated by s*dir
/// intersects `blocker`; nullopt when no displacement makes them touch.
std::optional<std::array<double, 2>> sweep_overlap_interval(
    const ConvexPolygon& moving, Vec2 dir, const ConvexPolygon& blocker);

/// Minimum distance between two convex polygons (0 when they intersect).
double polygon_distance(const ConvexPolygon& a, const ConvexPolygon& b);

/// Convex hull of a polygon and its translate: the region swept when the
/// polygon moves by `d`.
ConvexPolygon swept_hull(const ConvexPolygon& a, Vec2 d);

/// Smallest s >= 0 such that `moving` translated by s*dir no longer
/// intersects `blocker`; 0 when they are already disjoint.
double clearance_along(const ConvexPolygon& moving, Vec2 dir,
                       const ConvexPolygon& blocker);

/// Distance along the ray origin + t*dir (t in [0, max_len]) at which the ray
/// first enters the polygon; +inf when it misses.
double ray_polygon_entry(Vec2 origin, Vec2 dir, double max_len,
                         const ConvexPolygon& poly);

}  // namespace shelfmem
