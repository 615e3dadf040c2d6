#include "shelfmem/geometry.hpp"

#include <algorithm>
#include <limits>

#include "shelfmem/errors.hpp"

namespace shelfmem {

ConvexPolygon::ConvexPolygon(std::vector<Vec2> ccw_vertices)
    : verts_(std::move(ccw_vertices)) {
  if (verts_.size() < 3) throw ContractError("polygon needs >= 3 vertices");
}

ConvexPolygon ConvexPolygon::rectangle(Vec2 center, double half_w,
                                       double half_d, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  auto rot = [&](double x, double y) {
    return Vec2{center.x + c * x - s * y, center.y + s * x + c * y};
  };
  return ConvexPolygon({rot(-half_w, -half_d), rot(half_w, -half_d),
                        rot(half_w, half_d), rot(-half_w, half_d)});
}

ConvexPolygon ConvexPolygon::regular(Vec2 center, double radius, int sides) {
  std::vector<Vec2> v;
  v.reserve(sides);
  for (int i = 0; i < sides; ++i) {
    const double a = 2.0 * M_PI * i / sides;
    v.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return ConvexPolygon(std::move(v));
}

Vec2 ConvexPolygon::centroid() const {
  // Area-weighted centroid via the shoelace formula.
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  const std::size_t n = verts_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = verts_[i], q = verts_[(i + 1) % n];
    const double w = cross(p, q);
    a2 += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  if (std::abs(a2) < 1e-300) return verts_[0];
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

double ConvexPolygon::area() const {
  double a2 = 0.0;
  const std::size_t n = verts_.size();
  for (std::size_t i = 0; i < n; ++i) a2 += cross(verts_[i], verts_[(i + 1) % n]);
  return 0.5 * std::abs(a2);
}

bool ConvexPolygon::contains(Vec2 p) const {
  const std::size_t n = verts_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = verts_[i], b = verts_[(i + 1) % n];
    if (cross(b - a, p - a) < 0.0) return false;
  }
  return true;
}

ConvexPolygon ConvexPolygon::translated(Vec2 d) const {
  std::vector<Vec2> v = verts_;
  for (auto& p : v) p = p + d;
  return ConvexPolygon(std::move(v));
}

std::array<double, 2> ConvexPolygon::project(Vec2 axis) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : verts_) {
    const double d = dot(p, axis);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

double ConvexPolygon::extent_along(Vec2 dir) const {
  const auto [lo, hi] = project(dir);
  return hi - lo;
}

Aabb2 ConvexPolygon::bounds() const {
  Aabb2 b{verts_[0], verts_[0]};
  for (const auto& p : verts_) {
    b.lo.x = std::min(b.lo.x, p.x);
    b.lo.y = std::min(b.lo.y, p.y);
    b.hi.x = std::max(b.hi.x, p.x);
    b.hi.y = std::max(b.hi.y, p.y);
  }
  return b;
}

namespace {

void collect_axes(const ConvexPolygon& p, std::vector<Vec2>& axes) {
  const auto& v = p.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = v[(i + 1) % n] - v[i];
    const Vec2 a = normalized(perp(e));
    if (a.x != 0.0 || a.y != 0.0) axes.push_back(a);
  }
}

}  // namespace

bool intersects(const ConvexPolygon& a, const ConvexPolygon& b) {
  std::vector<Vec2> axes;
  collect_axes(a, axes);
  collect_axes(b, axes);
  for (const Vec2 ax : axes) {
    const auto pa = a.project(ax);
    const auto pb = b.project(ax);
    if (pa[1] < pb[0] || pb[1] < pa[0]) return false;
  }
  return true;
}

double polygon_distance(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (intersects(a, b)) return 0.0;
  auto seg_point = [](Vec2 p, Vec2 q, Vec2 x) {
    const Vec2 d = q - p;
    const double len2 = dot(d, d);
    double t = len2 > 0.0 ? dot(x - p, d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(x - (p + d * t));
  };
  double best = std::numeric_limits<double>::infinity();
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const Vec2 p = va[i], q = va[(i + 1) % va.size()];
    for (const auto& x : vb) best = std::min(best, seg_point(p, q, x));
  }
  for (std::size_t i = 0; i < vb.size(); ++i) {
    const Vec2 p = vb[i], q = vb[(i + 1) % vb.size()];
    for (const auto& x : va) best = std::min(best, seg_point(p, q, x));
  }
  return best;
}

ConvexPolygon swept_hull(const ConvexPolygon& a, Vec2 d) {
  // Monotone-chain hull over both footprint copies.
  std::vector<Vec2> pts = a.vertices();
  for (const auto& p : a.vertices()) pts.push_back(p + d);
  std::sort(pts.begin(), pts.end(), [](Vec2 p, Vec2 q) {
    return p.x < q.x || (p.x == q.x && p.y < q.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return a;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], *it - hull[k - 2]) <= 0.0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return ConvexPolygon(std::move(hull));
}

std::optional<std::array<double, 2>> sweep_overlap_interval(
    const ConvexPolygon& moving, Vec2 dir, const ConvexPolygon& blocker) {
  // SAT in displacement space: for each axis the set of displacements s at
  // which the projections still overlap is an interval; the shapes intersect
  // exactly on the intersection of those intervals.
  std::vector<Vec2> axes;
  collect_axes(moving, axes);
  collect_axes(blocker, axes);
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const Vec2 ax : axes) {
    const auto pm = moving.project(ax);
    const auto pb = blocker.project(ax);
    const double r = dot(dir, ax);
    if (std::abs(r) < 1e-12) {
      if (pm[1] < pb[0] || pb[1] < pm[0]) return std::nullopt;  // never overlaps
      continue;
    }
    // Overlap requires pm[0] + s*r <= pb[1] and pm[1] + s*r >= pb[0].
    double a = (pb[0] - pm[1]) / r;
    double b = (pb[1] - pm[0]) / r;
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    if (lo > hi) return std::nullopt;
  }
  return std::array<double, 2>{lo, hi};
}

double clearance_along(const ConvexPolygon& moving, Vec2 dir,
                       const ConvexPolygon& blocker) {
  const auto interval = sweep_overlap_interval(moving, dir, blocker);
  if (!interval) return 0.0;
  const auto [lo, hi] = *interval;
  if (hi < 0.0 || lo > 0.0) return 0.0;  // disjoint at s = 0
  return hi;
}

double ray_polygon_entry(Vec2 origin, Vec2 dir, double max_len,
                         const ConvexPolygon& poly) {
  // Clip the ray against each edge half-plane (Cyrus-Beck).
  double t_enter = 0.0;
  double t_exit = max_len;
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = v[i];
    const Vec2 normal = perp(v[(i + 1) % n] - a);  // inward for CCW
    const double denom = dot(normal, dir);
    const double num = dot(normal, a - origin);
    if (std::abs(denom) < 1e-15) {
      // Parallel ray: outside this half-plane means no intersection at all.
      if (num > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    const double t = num / denom;
    if (denom > 0.0)
      t_enter = std::max(t_enter, t);
    else
      t_exit = std::min(t_exit, t);
    if (t_enter > t_exit) return std::numeric_limits<double>::infinity();
  }
  return t_enter;
}

}  // namespace shelfmem
