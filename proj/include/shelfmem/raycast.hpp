#pragma once

#include <limits>
#include <vector>

#include "shelfmem/geometry.hpp"
#include "shelfmem/grid.hpp"

namespace shelfmem {

/// Cells crossed by the segment between the centers of `from` and `to`,
/// ordered from `from` to `to`. Exact integer arithmetic; a cell is included
/// iff the open segment crosses its interior, so an exact corner crossing
/// steps diagonally and excludes the two side cells.
std::vector<CellIdx> trace_cells_2d(CellIdx from, CellIdx to);

/// Cells crossed by the continuous 2D segment from `a` to `b` (grid
/// coordinates in cell units). Floating-point stepping; used for radial
/// sector rays where endpoints are not lattice-aligned.
std::vector<CellIdx> trace_cells_2d_continuous(Vec2 a, Vec2 b, int rows, int cols);

/// Walks voxels along origin + t*dir for t in [0, max_t], restricted to the
/// grid volume. Calls visit(voxel, t_entry) per voxel in order; stops early
/// when visit returns true.
template <typename Visit>
void traverse_voxels(Vec3 origin, Vec3 dir, double max_t, const GridSpec& grid,
                     Visit&& visit) {
  const double res = grid.resolution;
  const Vec3 lo{0.0, 0.0, 0.0};
  const Vec3 hi{grid.width(), grid.depth(), grid.height()};

  // Slab-clip the segment to the grid volume.
  double t0 = 0.0, t1 = max_t;
  const double o[3] = {origin.x, origin.y, origin.z};
  const double d[3] = {dir.x, dir.y, dir.z};
  const double blo[3] = {lo.x, lo.y, lo.z};
  const double bhi[3] = {hi.x, hi.y, hi.z};
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] < blo[a] || o[a] > bhi[a]) return;
      continue;
    }
    double ta = (blo[a] - o[a]) / d[a];
    double tb = (bhi[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = ta > t0 ? ta : t0;
    t1 = tb < t1 ? tb : t1;
    if (t0 > t1) return;
  }

  const double start_eps = 1e-9;
  const double ts = t0 + start_eps;
  if (ts >= t1) return;
  int idx[3];
  int dims[3] = {grid.cols, grid.rows, grid.levels};  // x->col, y->row, z->level
  for (int a = 0; a < 3; ++a) {
    int v = static_cast<int>((o[a] + d[a] * ts) / res);
    if (v < 0) v = 0;
    if (v >= dims[a]) v = dims[a] - 1;
    idx[a] = v;
  }

  int step[3];
  double t_max[3], t_delta[3];
  for (int a = 0; a < 3; ++a) {
    if (d[a] > 0.0) {
      step[a] = 1;
      t_max[a] = ((idx[a] + 1) * res - o[a]) / d[a];
      t_delta[a] = res / d[a];
    } else if (d[a] < 0.0) {
      step[a] = -1;
      t_max[a] = (idx[a] * res - o[a]) / d[a];
      t_delta[a] = res / -d[a];
    } else {
      step[a] = 0;
      t_max[a] = std::numeric_limits<double>::infinity();
      t_delta[a] = std::numeric_limits<double>::infinity();
    }
  }

  double t_entry = t0;
  while (t_entry <= t1) {
    if (visit(VoxelIdx{idx[1], idx[0], idx[2]}, t_entry)) return;
    int a = 0;
    if (t_max[1] < t_max[a]) a = 1;
    if (t_max[2] < t_max[a]) a = 2;
    t_entry = t_max[a];
    idx[a] += step[a];
    if (idx[a] < 0 || idx[a] >= dims[a]) return;
    t_max[a] += t_delta[a];
  }
}

}  // namespace shelfmem
