#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shelfmem/geometry.hpp"
#include "shelfmem/raycast.hpp"
#include "shelfmem/rng.hpp"

using namespace shelfmem;

TEST_CASE("rectangle footprint basics") {
  const auto rect = ConvexPolygon::rectangle({1.0, 2.0}, 0.5, 0.25, 0.0);
  CHECK(rect.area() == doctest::Approx(0.5).epsilon(1e-12));
  const Vec2 c = rect.centroid();
  CHECK(c.x == doctest::Approx(1.0));
  CHECK(c.y == doctest::Approx(2.0));
  CHECK(rect.contains({1.0, 2.0}));
  CHECK(rect.contains({1.49, 2.24}));
  CHECK(!rect.contains({1.6, 2.0}));
}

TEST_CASE("rotated rectangles intersect correctly") {
  const auto a = ConvexPolygon::rectangle({0, 0}, 0.5, 0.5, 0.0);
  const auto b = ConvexPolygon::rectangle({1.2, 0}, 0.5, 0.5, M_PI / 4);
  CHECK(intersects(a, b));  // diagonal reaches ~0.707
  const auto c = ConvexPolygon::rectangle({2.0, 0}, 0.5, 0.5, M_PI / 4);
  CHECK(!intersects(a, c));
}

TEST_CASE("polygon distance") {
  const auto a = ConvexPolygon::rectangle({0, 0}, 0.5, 0.5, 0.0);
  const auto b = ConvexPolygon::rectangle({2.0, 0}, 0.5, 0.5, 0.0);
  CHECK(polygon_distance(a, b) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(polygon_distance(a, a) == 0.0);
}

TEST_CASE("swept hull covers start, end, and midpoints") {
  const auto a = ConvexPolygon::regular({0, 0}, 0.5, 16);
  const Vec2 d{2.0, 1.0};
  const auto hull = swept_hull(a, d);
  CHECK(hull.contains({0, 0}));
  CHECK(hull.contains({2.0, 1.0}));
  CHECK(hull.contains({1.0, 0.5}));
  CHECK(!hull.contains({-1.0, 1.0}));
}

TEST_CASE("clearance along direction") {
  const auto blocker = ConvexPolygon::rectangle({0, 0}, 1.0, 1.0, 0.0);
  const auto moving = ConvexPolygon::rectangle({0.5, 0}, 0.5, 0.5, 0.0);
  // moving spans x in [0,1], blocker x in [-1,1]: needs s = 1 to clear.
  const double s = clearance_along(moving, {1, 0}, blocker);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  const auto far_poly = ConvexPolygon::rectangle({5, 0}, 0.5, 0.5, 0.0);
  CHECK(clearance_along(far_poly, {1, 0}, blocker) == 0.0);
}

TEST_CASE("clearance result actually clears across random configurations") {
  Rng rng(71);
  for (int i = 0; i < 300; ++i) {
    const auto blocker = ConvexPolygon::rectangle(
        {rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.uniform(0.2, 1.0),
        rng.uniform(0.2, 1.0), rng.uniform(0.0, M_PI));
    const auto moving = ConvexPolygon::regular(
        {rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.uniform(0.2, 0.8), 16);
    const double ang = rng.uniform(0.0, 2 * M_PI);
    const Vec2 dir{std::cos(ang), std::sin(ang)};
    const double s = clearance_along(moving, dir, blocker);
    if (s > 0.0) {
      CHECK(!intersects(moving.translated(dir * (s + 1e-9)), blocker));
      CHECK(intersects(moving.translated(dir * (s * 0.5)), blocker));
    } else {
      CHECK(!intersects(moving, blocker));
    }
  }
}

TEST_CASE("ray polygon entry distance") {
  const auto box = ConvexPolygon::rectangle({2.0, 0.0}, 0.5, 0.5, 0.0);
  const double t = ray_polygon_entry({0, 0}, {1, 0}, 10.0, box);
  CHECK(t == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(std::isinf(ray_polygon_entry({0, 2}, {1, 0}, 10.0, box)));
  CHECK(std::isinf(ray_polygon_entry({0, 0}, {-1, 0}, 10.0, box)));
}

TEST_CASE("integer cell trace matches the open-interior oracle") {
  // Oracle: a cell is crossed iff the segment clipped to the cell square has
  // positive length. Endpoint cells count via their half-open neighborhoods.
  auto oracle = [](CellIdx a, CellIdx b) {
    std::vector<CellIdx> cells;
    const double x0 = a.c + 0.5, y0 = a.r + 0.5;
    const double x1 = b.c + 0.5, y1 = b.r + 0.5;
    const int rlo = std::min(a.r, b.r), rhi = std::max(a.r, b.r);
    const int clo = std::min(a.c, b.c), chi = std::max(a.c, b.c);
    for (int r = rlo; r <= rhi; ++r) {
      for (int c = clo; c <= chi; ++c) {
        double t0 = 0.0, t1 = 1.0;
        const double dx = x1 - x0, dy = y1 - y0;
        bool ok = true;
        auto clip = [&](double p, double d, double lo, double hi) {
          if (d == 0.0) return p >= lo && p <= hi;
          double ta = (lo - p) / d, tb = (hi - p) / d;
          if (ta > tb) std::swap(ta, tb);
          t0 = std::max(t0, ta);
          t1 = std::min(t1, tb);
          return t0 <= t1;
        };
        ok = clip(x0, dx, c, c + 1.0) && clip(y0, dy, r, r + 1.0);
        if (ok && (t1 - t0) > 1e-12) cells.push_back({r, c});
      }
    }
    return cells;
  };

  Rng rng(97);
  for (int trial = 0; trial < 400; ++trial) {
    const CellIdx a{rng.uniform_int(0, 25), rng.uniform_int(0, 25)};
    const CellIdx b{rng.uniform_int(0, 25), rng.uniform_int(0, 25)};
    auto traced = trace_cells_2d(a, b);
    auto expected = oracle(a, b);
    std::sort(traced.begin(), traced.end());
    std::sort(expected.begin(), expected.end());
    CAPTURE(a.r);
    CAPTURE(a.c);
    CAPTURE(b.r);
    CAPTURE(b.c);
    CHECK(traced == expected);
  }
}

TEST_CASE("integer cell trace handles exact corner crossings diagonally") {
  // From (0,0) to (2,2) the segment passes exactly through the corner at
  // (1,1): only the diagonal cells are crossed.
  const auto cells = trace_cells_2d({0, 0}, {2, 2});
  CHECK(cells == std::vector<CellIdx>{{0, 0}, {1, 1}, {2, 2}});
}

TEST_CASE("voxel traversal visits the straight column") {
  const GridSpec spec{4, 4, 4, 1.0, 2};
  std::vector<VoxelIdx> visited;
  traverse_voxels({-2.0, 1.5, 1.5}, {1, 0, 0}, 100.0, spec,
                  [&](VoxelIdx v, double) {
                    visited.push_back(v);
                    return false;
                  });
  REQUIRE(visited.size() == 4);
  for (int c = 0; c < 4; ++c) {
    CHECK(visited[c].r == 1);
    CHECK(visited[c].c == c);
    CHECK(visited[c].k == 1);
  }
}

TEST_CASE("voxel traversal entry distances are consistent") {
  const GridSpec spec{8, 8, 8, 0.5, 2};
  std::vector<double> entries;
  traverse_voxels({-1.0, 0.25, 0.25}, {1, 0, 0}, 100.0, spec,
                  [&](VoxelIdx, double t) {
                    entries.push_back(t);
                    return false;
                  });
  REQUIRE(entries.size() == 8);
  CHECK(entries[0] == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 1; i < entries.size(); ++i)
    CHECK(entries[i] - entries[i - 1] == doctest::Approx(0.5).epsilon(1e-9));
}
