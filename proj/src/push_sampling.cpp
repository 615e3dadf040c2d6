#include "shelfmem/push_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "shelfmem/errors.hpp"
#include "shelfmem/raycast.hpp"

namespace shelfmem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Felzenszwalb-Huttenlocher 1D squared distance transform, exact for
/// integer sample positions. Infinite inputs (no site in that slice yet)
/// contribute no parabola.
void dt_1d(const std::vector<double>& f, std::vector<double>& d) {
  const int n = static_cast<int>(f.size());
  d.assign(n, kInf);
  std::vector<int> v(n, 0);
  std::vector<double> z(n + 1, 0.0);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + q * static_cast<double>(q)) - (f[p] + p * static_cast<double>(p))) /
          (2.0 * (q - p));
      if (s <= z[k]) {
        --k;  // z[0] = -inf keeps k >= 0
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) return;
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const int p = v[k];
    const double dq = q - static_cast<double>(p);
    d[q] = dq * dq + f[p];
  }
}

/// Exact squared Euclidean distance to the nearest zero cell; kInf when no
/// zero cell exists.
Grid2<double> squared_distance_transform(const Grid2<std::uint8_t>& certain) {
  const int rows = certain.rows(), cols = certain.cols();
  Grid2<double> sq(rows, cols, kInf);
  std::vector<double> f, d;
  // Pass 1: per column over rows.
  f.resize(rows);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) f[r] = certain.at(r, c) ? 0.0 : kInf;
    dt_1d(f, d);
    for (int r = 0; r < rows; ++r) sq.at(r, c) = d[r];
  }
  // Pass 2: per row over columns.
  f.resize(cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) f[c] = sq.at(r, c);
    dt_1d(f, d);
    for (int c = 0; c < cols; ++c) sq.at(r, c) = d[c];
  }
  return sq;
}

}  // namespace

Grid2<double> uncertainty_distance_map(const Grid2<double>& u_s,
                                       const Grid2<double>& u_o,
                                       const PushConfig& cfg) {
  if (u_s.rows() != u_o.rows() || u_s.cols() != u_o.cols())
    throw ContractError("uncertainty_distance_map: map shapes differ");
  const int rows = u_s.rows(), cols = u_s.cols();
  Grid2<std::uint8_t> certain(rows, cols, 0);
  bool any_certain = false;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (u_s.at(r, c) < cfg.sem_uncertainty_floor) {
        certain.at(r, c) = 1;
        any_certain = true;
      }
    }
  }
  Grid2<double> dmap(rows, cols, 0.0);
  if (!any_certain) return dmap;  // no reference frame yet
  const Grid2<double> sq = squared_distance_transform(certain);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (certain.at(r, c)) continue;
      const double scale = std::clamp(u_o.at(r, c) / kPriorOccVariance, 0.0, 1.0);
      dmap.at(r, c) = std::sqrt(sq.at(r, c)) * scale;
    }
  }
  return dmap;
}

std::vector<CellIdx> select_target_locations(const Grid2<double>& dmap,
                                             const PushConfig& cfg) {
  struct Entry {
    double value;
    int r, c;
  };
  std::vector<Entry> entries;
  for (int r = 0; r < dmap.rows(); ++r)
    for (int c = 0; c < dmap.cols(); ++c)
      if (dmap.at(r, c) > 0.0) entries.push_back({dmap.at(r, c), r, c});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.r != b.r) return a.r < b.r;
    return a.c < b.c;
  });
  std::vector<CellIdx> out;
  for (const Entry& e : entries) {
    if (static_cast<int>(out.size()) >= cfg.max_targets) break;
    bool ok = true;
    for (const CellIdx& t : out) {
      const double d = std::hypot(static_cast<double>(e.r - t.r),
                                  static_cast<double>(e.c - t.c));
      if (d < cfg.min_target_separation) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back({e.r, e.c});
  }
  return out;
}

Segmentation segment_hard_labels(const Grid2<int>& labels) {
  const int rows = labels.rows(), cols = labels.cols();
  Segmentation seg;
  seg.component_ids = Grid2<int>(rows, cols, -1);
  std::vector<CellIdx> stack;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (labels.at(r, c) == 0 || seg.component_ids.at(r, c) >= 0) continue;
      const int id = static_cast<int>(seg.components.size());
      const int cls = labels.at(r, c);
      Segmentation::Component comp;
      comp.id = id;
      comp.cls = cls;
      stack.push_back({r, c});
      seg.component_ids.at(r, c) = id;
      while (!stack.empty()) {
        const CellIdx cur = stack.back();
        stack.pop_back();
        comp.cells.push_back(cur);
        const int nr[4] = {cur.r - 1, cur.r + 1, cur.r, cur.r};
        const int nc[4] = {cur.c, cur.c, cur.c - 1, cur.c + 1};
        for (int i = 0; i < 4; ++i) {
          if (nr[i] < 0 || nr[i] >= rows || nc[i] < 0 || nc[i] >= cols) continue;
          if (labels.at(nr[i], nc[i]) != cls) continue;
          if (seg.component_ids.at(nr[i], nc[i]) >= 0) continue;
          seg.component_ids.at(nr[i], nc[i]) = id;
          stack.push_back({nr[i], nc[i]});
        }
      }
      Vec2 sum{};
      for (const CellIdx& cell : comp.cells)
        sum = sum + Vec2{cell.c + 0.5, cell.r + 0.5};
      comp.centroid = sum * (1.0 / static_cast<double>(comp.cells.size()));
      double rad = 0.0;
      for (const CellIdx& cell : comp.cells)
        rad = std::max(rad, norm(Vec2{cell.c + 0.5, cell.r + 0.5} - comp.centroid));
      comp.radius_cells = rad + 0.5;
      seg.components.push_back(std::move(comp));
    }
  }
  return seg;
}

namespace {

struct RayStats {
  std::vector<int> occluders;  // front-of-shelf first
  double mean_weighted_occ = 0.0;
  int unknown_cells = 0;
  int total_cells = 0;
  double length_cells = 0.0;
};

}  // namespace

std::vector<VisibilityCorridor> visibility_corridors(const BeliefState& belief,
                                                     CellIdx target,
                                                     const Segmentation& seg,
                                                     const PushConfig& cfg) {
  const GridSpec& spec = belief.spec();
  if (!spec.in_bounds(target.r, target.c))
    throw ContractError("visibility_corridors: target outside grid");

  const Grid2<double> occ2d = belief.column_max_mean();
  const UncertaintyMaps maps = belief.uncertainty_maps();

  std::vector<RayStats> rays(spec.cols);
  for (int x = 0; x < spec.cols; ++x) {
    RayStats& stats = rays[x];
    const auto cells = trace_cells_2d(target, {0, x});
    double weighted = 0.0;
    for (const CellIdx& cell : cells) {
      const double u_norm =
          std::clamp(maps.occupancy.at(cell) / kPriorOccVariance, 0.0, 1.0);
      weighted += occ2d.at(cell) * u_norm;
      if (u_norm > cfg.unknown_uo_fraction) ++stats.unknown_cells;
      const int comp = seg.component_ids.at(cell);
      if (comp >= 0 && (stats.occluders.empty() || stats.occluders.back() != comp))
        stats.occluders.push_back(comp);
    }
    stats.total_cells = static_cast<int>(cells.size());
    stats.mean_weighted_occ = cells.empty() ? 0.0 : weighted / cells.size();
    stats.length_cells = std::hypot(static_cast<double>(target.r),
                                    static_cast<double>(target.c - x));
    // Traversal runs target->front; occluder order is front-of-shelf first.
    std::reverse(stats.occluders.begin(), stats.occluders.end());
  }

  const double diag = std::hypot(static_cast<double>(spec.rows),
                                 static_cast<double>(spec.cols));
  std::vector<VisibilityCorridor> corridors;
  int x = 0;
  while (x < spec.cols) {
    int run_end = x + 1;
    while (run_end < spec.cols && rays[run_end].occluders == rays[x].occluders)
      ++run_end;
    for (int chunk = x; chunk < run_end; chunk += cfg.corridor_width_cap) {
      const int end = std::min(chunk + cfg.corridor_width_cap, run_end);
      VisibilityCorridor c;
      c.start = {0, chunk};
      c.width = end - chunk;
      c.occluders = rays[x].occluders;
      c.n_occluding = static_cast<int>(c.occluders.size());
      double occ_sum = 0.0, len_sum = 0.0;
      long unknown = 0, total = 0;
      for (int i = chunk; i < end; ++i) {
        occ_sum += rays[i].mean_weighted_occ;
        len_sum += rays[i].length_cells;
        unknown += rays[i].unknown_cells;
        total += rays[i].total_cells;
      }
      const double unknown_share = total > 0 ? static_cast<double>(unknown) / total : 0.0;
      c.mean_occupancy = (occ_sum / c.width) * unknown_share;
      c.length = (len_sum / c.width) / diag;
      c.score = score_corridor(c.width, c.length, c.mean_occupancy, c.n_occluding, cfg);
      corridors.push_back(std::move(c));
    }
    x = run_end;
  }
  return corridors;
}

std::optional<int> select_occluder(const std::vector<VisibilityCorridor>& corridors) {
  if (corridors.empty()) return std::nullopt;
  const VisibilityCorridor* best = &corridors.front();
  for (const auto& c : corridors) {
    if (c.score > best->score ||
        (c.score == best->score &&
         (c.width > best->width ||
          (c.width == best->width && c.start.c < best->start.c))))
      best = &c;
  }
  if (best->occluders.empty()) return std::nullopt;
  return best->occluders.front();
}

std::vector<PushSector> pushing_corridor(const BeliefState& belief, int component_id,
                                         const Segmentation& seg, const PushConfig& cfg,
                                         double theta_occ) {
  if (component_id < 0 || component_id >= static_cast<int>(seg.components.size()))
    throw ContractError("pushing_corridor: unknown component id");
  const auto& comp = seg.components[component_id];
  const GridSpec& spec = belief.spec();
  const Grid2<double> occ2d = belief.column_max_mean();

  const double radius = comp.radius_cells;
  const double ray_len = radius + cfg.corridor_width_cap;
  const int n_sectors = static_cast<int>(std::round(360.0 / cfg.sector_angle_deg));
  const int rays_per_sector = 15;

  std::vector<PushSector> sectors(n_sectors);
  for (int s = 0; s < n_sectors; ++s) {
    PushSector& sec = sectors[s];
    sec.index = s;
    const double a0 = s * cfg.sector_angle_deg * M_PI / 180.0;
    const double a1 = (s + 1) * cfg.sector_angle_deg * M_PI / 180.0;
    sec.dir_a = {std::cos(a0), std::sin(a0)};
    sec.dir_b = {std::cos(a1), std::sin(a1)};
    sec.direction = normalized(sec.dir_a + sec.dir_b);

    double occ_sum = 0.0;
    int occ_count = 0;
    double min_clear = ray_len;
    for (int i = 0; i < rays_per_sector; ++i) {
      const double ang = a0 + (i + 0.5) * (a1 - a0) / rays_per_sector;
      const Vec2 dir{std::cos(ang), std::sin(ang)};
      const Vec2 end = comp.centroid + dir * ray_len;
      const auto cells = trace_cells_2d_continuous(comp.centroid, end, spec.rows, spec.cols);
      double clear = ray_len;
      bool blocked = false;
      for (const CellIdx& cell : cells) {
        if (seg.component_ids.at(cell) == component_id) continue;
        const Vec2 center{cell.c + 0.5, cell.r + 0.5};
        const double dist = norm(center - comp.centroid);
        occ_sum += std::clamp(occ2d.at(cell), 0.0, 1.0);
        ++occ_count;
        const int other = seg.component_ids.at(cell);
        if (other >= 0 || occ2d.at(cell) >= theta_occ) {
          clear = std::min(clear, dist);
          blocked = true;
          break;
        }
      }
      if (!blocked) {
        // Distance at which the ray leaves the grid counts as the boundary.
        double t_exit = ray_len;
        const double o[2] = {comp.centroid.x, comp.centroid.y};
        const double d[2] = {dir.x, dir.y};
        const double lim[2] = {static_cast<double>(spec.cols),
                               static_cast<double>(spec.rows)};
        for (int ax = 0; ax < 2; ++ax) {
          if (d[ax] == 0.0) continue;
          const double t = d[ax] > 0.0 ? (lim[ax] - o[ax]) / d[ax] : (0.0 - o[ax]) / d[ax];
          t_exit = std::min(t_exit, t);
        }
        clear = std::min(clear, t_exit);
      }
      min_clear = std::min(min_clear, clear);
    }
    sec.mean_occupancy = occ_count > 0 ? occ_sum / occ_count : 0.0;
    sec.clearance = min_clear * spec.resolution;
    sec.disqualified =
        min_clear <= radius + cfg.sector_disqualify_margin_cells;
  }

  std::sort(sectors.begin(), sectors.end(), [](const PushSector& a, const PushSector& b) {
    if (a.disqualified != b.disqualified) return !a.disqualified;
    if (a.mean_occupancy != b.mean_occupancy) return a.mean_occupancy < b.mean_occupancy;
    if (a.clearance != b.clearance) return a.clearance > b.clearance;
    return a.index < b.index;
  });
  return sectors;
}

std::vector<PushCandidate> sample_push_candidates(const BeliefState& belief,
                                                  const Segmentation& seg,
                                                  int component_id,
                                                  const PushSector& sector,
                                                  const PushConfig& cfg, Rng& rng) {
  if (component_id < 0 || component_id >= static_cast<int>(seg.components.size()))
    throw ContractError("sample_push_candidates: unknown component id");
  const auto& comp = seg.components[component_id];
  const GridSpec& spec = belief.spec();

  std::vector<PushCandidate> out;
  for (int i = 0; i < cfg.n_candidates; ++i) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      const double t = rng.uniform();
      const Vec2 dir = normalized(sector.dir_a * (1.0 - t) + sector.dir_b * t);
      const Vec2 opposite = -dir;

      // Exit of the component contour on the side opposite the push.
      double exit_dist = 0.0;
      double lo = kInf, hi = -kInf;
      for (const CellIdx& cell : comp.cells) {
        const Vec2 center{cell.c + 0.5, cell.r + 0.5};
        exit_dist = std::max(exit_dist, dot(center - comp.centroid, opposite));
        const double proj = dot(center, dir);
        lo = std::min(lo, proj);
        hi = std::max(hi, proj);
      }
      exit_dist += 0.5;

      const double offset = rng.uniform(1.0, cfg.start_margin_cells);
      const Vec2 start_cells = comp.centroid + opposite * (exit_dist + offset);
      const int sr = static_cast<int>(std::floor(start_cells.y));
      const int sc = static_cast<int>(std::floor(start_cells.x));
      if (!spec.in_bounds(sr, sc)) continue;
      if (seg.component_ids.at(sr, sc) >= 0) continue;  // inside a footprint

      PushCandidate cand;
      cand.start = {start_cells.x * spec.resolution, start_cells.y * spec.resolution};
      cand.direction = dir;
      cand.length = (hi - lo + 1.0 + cfg.length_margin_cells) * spec.resolution;
      cand.target_object = component_id;
      out.push_back(cand);
      break;
    }
  }
  return out;
}

BeliefState push_forward_belief(const BeliefState& belief, const Segmentation& seg,
                                const PushCandidate& push) {
  const GridSpec& spec = belief.spec();
  if (push.target_object < 0 ||
      push.target_object >= static_cast<int>(seg.components.size()))
    throw ContractError("push_forward_belief: unknown component id");
  const auto& comp = seg.components[push.target_object];

  BeliefState out = belief;
  const double len_cells = push.length / spec.resolution;
  if (len_cells < 1e-9) return out;
  const Vec2 delta = normalized(push.direction) * len_cells;

  // Cells touched while the segment slides from source to destination.
  std::vector<CellIdx> touched;
  Grid2<std::uint8_t> mark(spec.rows, spec.cols, 0);
  auto touch = [&](int r, int c) {
    if (!spec.in_bounds(r, c) || mark.at(r, c)) return;
    mark.at(r, c) = 1;
    touched.push_back({r, c});
  };
  const int steps = std::max(1, static_cast<int>(std::ceil(len_cells / 0.5)));
  for (const CellIdx& cell : comp.cells) {
    for (int s = 0; s <= steps; ++s) {
      const double f = static_cast<double>(s) / steps;
      const double cc = cell.c + delta.x * f;
      const double rr = cell.r + delta.y * f;
      const int c0 = static_cast<int>(std::floor(cc));
      const int r0 = static_cast<int>(std::floor(rr));
      for (int dr = 0; dr <= 1; ++dr)
        for (int dc = 0; dc <= 1; ++dc) touch(r0 + dr, c0 + dc);
    }
  }

  // Snapshot evidence above the prior, then reset everything touched.
  const int n_classes = spec.n_classes;
  std::vector<std::vector<double>> sem_excess(comp.cells.size());
  std::vector<std::vector<BetaParams>> occ_excess(comp.cells.size());
  for (std::size_t i = 0; i < comp.cells.size(); ++i) {
    const CellIdx& cell = comp.cells[i];
    const auto sem = belief.semantic(cell.r, cell.c);
    sem_excess[i].assign(sem.begin(), sem.end());
    for (double& v : sem_excess[i]) v -= 1.0;
    occ_excess[i].resize(spec.levels);
    for (int k = 0; k < spec.levels; ++k) {
      const BetaParams p = belief.occupancy(cell.r, cell.c, k);
      occ_excess[i][k] = {p.alpha - 1.0, p.beta - 1.0};
    }
  }
  for (const CellIdx& cell : touched) out.reset_cell_to_prior(cell.r, cell.c);

  // Bilinear deposit of the moved evidence; mass pushed past the grid edge
  // is dropped (the forecast of an object leaving the shelf).
  for (std::size_t i = 0; i < comp.cells.size(); ++i) {
    const CellIdx& cell = comp.cells[i];
    const double cc = cell.c + delta.x;
    const double rr = cell.r + delta.y;
    const int c0 = static_cast<int>(std::floor(cc));
    const int r0 = static_cast<int>(std::floor(rr));
    const double fc = cc - c0;
    const double fr = rr - r0;
    const double w[4] = {(1 - fr) * (1 - fc), (1 - fr) * fc, fr * (1 - fc), fr * fc};
    const int rs[4] = {r0, r0, r0 + 1, r0 + 1};
    const int cs[4] = {c0, c0 + 1, c0, c0 + 1};
    for (int q = 0; q < 4; ++q) {
      if (w[q] <= 0.0 || !spec.in_bounds(rs[q], cs[q])) continue;
      auto sem = out.semantic(rs[q], cs[q]);
      for (int n = 0; n < n_classes; ++n) sem[n] += w[q] * sem_excess[i][n];
      for (int k = 0; k < spec.levels; ++k) {
        BetaParams p = out.occupancy(rs[q], cs[q], k);
        p.alpha += w[q] * occ_excess[i][k].alpha;
        p.beta += w[q] * occ_excess[i][k].beta;
        out.set_occupancy(rs[q], cs[q], k, p);
      }
    }
  }
  return out;
}

BeliefState push_forward_belief(const BeliefState& belief, const PushCandidate& push) {
  const Segmentation seg = segment_hard_labels(belief.hard_label_map());
  return push_forward_belief(belief, seg, push);
}

double push_vig(const BeliefState& belief, const Segmentation& seg,
                const PushCandidate& push, const ActionBoxes& boxes,
                const ShelfSpec& shelf, const CameraModel& vig_cam,
                const VigParams& vig, const PushConfig& cfg, Rng& rng) {
  const BeliefState forecast = push_forward_belief(belief, seg, push);
  NbvParams params;
  params.n_candidates = cfg.view_candidates;
  try {
    return greedy_nbv(forecast, boxes, shelf, vig_cam, vig, params, rng).vig;
  } catch (const PlanningError&) {
    return 0.0;
  }
}

}  // namespace shelfmem
