#include "shelfmem/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace shelfmem {

std::vector<CellIdx> trace_cells_2d(CellIdx from, CellIdx to) {
  std::vector<CellIdx> out;
  int r = from.r, c = from.c;
  const int dr = to.r - from.r;
  const int dc = to.c - from.c;
  const int sr = dr > 0 ? 1 : (dr < 0 ? -1 : 0);
  const int sc = dc > 0 ? 1 : (dc < 0 ? -1 : 0);
  const std::int64_t ar = std::abs(static_cast<std::int64_t>(dr));
  const std::int64_t ac = std::abs(static_cast<std::int64_t>(dc));
  out.reserve(static_cast<std::size_t>(ar + ac + 1));
  out.push_back({r, c});

  // Boundary crossing times from a cell center are (i + 1/2) / |d| per axis.
  // Comparing (i + 1/2)/ar against (j + 1/2)/ac cross-multiplies to exact
  // integers, so corner crossings (equality) are detected exactly and
  // stepped diagonally.
  std::int64_t i = 0, j = 0;
  while (i < ar || j < ac) {
    const std::int64_t lhs = (2 * i + 1) * ac;
    const std::int64_t rhs = (2 * j + 1) * ar;
    if (j >= ac || (i < ar && lhs < rhs)) {
      r += sr;
      ++i;
    } else if (i >= ar || lhs > rhs) {
      c += sc;
      ++j;
    } else {
      r += sr;
      c += sc;
      ++i;
      ++j;
    }
    out.push_back({r, c});
  }
  return out;
}

std::vector<CellIdx> trace_cells_2d_continuous(Vec2 a, Vec2 b, int rows, int cols) {
  // 2D Amanatides-Woo in cell units; coordinates are (x=col, y=row).
  std::vector<CellIdx> out;
  const Vec2 d = b - a;
  const double len = norm(d);
  if (len <= 0.0) return out;
  const Vec2 u{d.x / len, d.y / len};

  double t0 = 0.0, t1 = len;
  const double o[2] = {a.x, a.y};
  const double dd[2] = {u.x, u.y};
  const double lim[2] = {static_cast<double>(cols), static_cast<double>(rows)};
  for (int ax = 0; ax < 2; ++ax) {
    if (dd[ax] == 0.0) {
      if (o[ax] < 0.0 || o[ax] > lim[ax]) return out;
      continue;
    }
    double ta = (0.0 - o[ax]) / dd[ax];
    double tb = (lim[ax] - o[ax]) / dd[ax];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return out;
  }

  const double ts = t0 + 1e-9;
  if (ts >= t1) return out;
  int idx[2];
  const int dims[2] = {cols, rows};
  for (int ax = 0; ax < 2; ++ax) {
    int v = static_cast<int>(o[ax] + dd[ax] * ts);
    idx[ax] = std::clamp(v, 0, dims[ax] - 1);
  }
  int step[2];
  double t_max[2], t_delta[2];
  for (int ax = 0; ax < 2; ++ax) {
    if (dd[ax] > 0.0) {
      step[ax] = 1;
      t_max[ax] = (idx[ax] + 1 - o[ax]) / dd[ax];
      t_delta[ax] = 1.0 / dd[ax];
    } else if (dd[ax] < 0.0) {
      step[ax] = -1;
      t_max[ax] = (idx[ax] - o[ax]) / dd[ax];
      t_delta[ax] = -1.0 / dd[ax];
    } else {
      step[ax] = 0;
      t_max[ax] = std::numeric_limits<double>::infinity();
      t_delta[ax] = std::numeric_limits<double>::infinity();
    }
  }
  double t = t0;
  while (t <= t1) {
    out.push_back({idx[1], idx[0]});
    const int ax = t_max[0] <= t_max[1] ? 0 : 1;
    t = t_max[ax];
    idx[ax] += step[ax];
    if (idx[ax] < 0 || idx[ax] >= dims[ax]) break;
    t_max[ax] += t_delta[ax];
  }
  return out;
}

}  // namespace shelfmem
