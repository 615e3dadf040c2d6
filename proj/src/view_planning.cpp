#include "shelfmem/view_planning.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "shelfmem/errors.hpp"
#include "shelfmem/raycast.hpp"

namespace shelfmem {

namespace {

double norm_component(double v, double lo, double hi) {
  return 2.0 * (v - lo) / (hi - lo) - 1.0;
}

double denorm_component(double n, double lo, double hi) {
  return lo + (n + 1.0) * 0.5 * (hi - lo);
}

}  // namespace

std::array<double, 6> normalize_action(const ViewPose& v, const ActionBoxes& boxes) {
  if (!boxes.cam_box.contains(v.cam) || !boxes.target_box.contains(v.target))
    throw ContractError("normalize_action: pose outside its sampling boxes");
  const Aabb3& cb = boxes.cam_box;
  const Aabb3& tb = boxes.target_box;
  return {norm_component(v.cam.x, cb.lo.x, cb.hi.x),
          norm_component(v.cam.y, cb.lo.y, cb.hi.y),
          norm_component(v.cam.z, cb.lo.z, cb.hi.z),
          norm_component(v.target.x, tb.lo.x, tb.hi.x),
          norm_component(v.target.y, tb.lo.y, tb.hi.y),
          norm_component(v.target.z, tb.lo.z, tb.hi.z)};
}

ViewPose denormalize_action(const std::array<double, 6>& a, const ActionBoxes& boxes) {
  const Aabb3& cb = boxes.cam_box;
  const Aabb3& tb = boxes.target_box;
  // Clamped so denorm(+-1) cannot leave the box by a rounding ulp.
  auto d = [](double n, double lo, double hi) {
    return std::clamp(denorm_component(n, lo, hi), lo, hi);
  };
  return {{d(a[0], cb.lo.x, cb.hi.x), d(a[1], cb.lo.y, cb.hi.y),
           d(a[2], cb.lo.z, cb.hi.z)},
          {d(a[3], tb.lo.x, tb.hi.x), d(a[4], tb.lo.y, tb.hi.y),
           d(a[5], tb.lo.z, tb.hi.z)}};
}

std::vector<std::uint8_t> EnrichedObservation::to_bytes() const {
  std::vector<std::uint8_t> out;
  auto add = [&out](std::span<const double> vals) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(vals.data());
    out.insert(out.end(), p, p + vals.size() * sizeof(double));
  };
  add(height.data());
  add(semantic.data());
  add(occ_uncertainty.data());
  add(sem_uncertainty.data());
  for (const auto& g : past_heights) add(g.data());
  for (const auto& a : past_actions) add(std::span<const double>(a));
  return out;
}

EnrichedObservation encode_observation(const BeliefState& belief,
                                       const ViewHistory& history, double theta_occ,
                                       double shelf_height, int n_hist) {
  const GridSpec& spec = belief.spec();
  EnrichedObservation obs;
  obs.height = belief.project_height_map(theta_occ);
  for (double& h : obs.height.data()) h = std::clamp(h / shelf_height, 0.0, 1.0);

  obs.semantic = Grid2<double>(spec.rows, spec.cols, 0.0);
  const Grid2<int> labels = belief.hard_label_map();
  const double label_scale = spec.n_classes > 1 ? 1.0 / (spec.n_classes - 1) : 1.0;
  for (int r = 0; r < spec.rows; ++r)
    for (int c = 0; c < spec.cols; ++c)
      obs.semantic.at(r, c) = labels.at(r, c) * label_scale;

  const UncertaintyMaps maps = belief.uncertainty_maps();
  obs.occ_uncertainty = maps.occupancy;
  for (double& v : obs.occ_uncertainty.data())
    v = std::clamp(v / kPriorOccVariance, 0.0, 1.0);
  obs.sem_uncertainty = maps.semantic;
  for (double& v : obs.sem_uncertainty.data()) v = std::clamp(v, 0.0, 1.0);

  obs.past_heights.assign(n_hist, Grid2<double>(spec.rows, spec.cols, 0.0));
  obs.past_actions.assign(n_hist, {});
  const auto& entries = history.entries();
  const int n = static_cast<int>(entries.size());
  for (int i = 0; i < std::min(n, n_hist); ++i) {
    // Newest entry lands in the last slot.
    const int slot = n_hist - std::min(n, n_hist) + i;
    const auto& e = entries[n - std::min(n, n_hist) + i];
    obs.past_heights[slot] = e.height_map;
    obs.past_actions[slot] = e.normalized;
  }
  return obs;
}

namespace {

bool inside_walls(Vec3 p, const ShelfSpec& shelf) {
  const double t = shelf.wall_thickness;
  const bool in_outer = p.x >= -t && p.x <= shelf.width + t && p.y >= 0.0 &&
                        p.y <= shelf.depth + t && p.z >= -t && p.z <= shelf.height + t;
  if (!in_outer) return false;
  const bool in_interior = p.x >= 0.0 && p.x <= shelf.width && p.y >= 0.0 &&
                           p.y < shelf.depth && p.z >= 0.0 && p.z <= shelf.height;
  return !in_interior;
}

template <typename OccupiedAt>
bool feasible_impl(const ViewPose& v, const ActionBoxes& boxes, const ShelfSpec& shelf,
                   const GridSpec& grid, OccupiedAt&& occupied) {
  if (!boxes.cam_box.contains(v.cam)) return false;
  if (!boxes.target_box.contains(v.target)) return false;
  if (norm(v.target - v.cam) < 1e-9) return false;
  if (inside_walls(v.cam, shelf)) return false;
  const int c = static_cast<int>(std::floor(v.cam.x / grid.resolution));
  const int r = static_cast<int>(std::floor(v.cam.y / grid.resolution));
  const int k = static_cast<int>(std::floor(v.cam.z / grid.resolution));
  if (grid.in_bounds(r, c, k) && occupied(r, c, k)) return false;
  return true;
}

}  // namespace

bool view_feasible(const ViewPose& v, const ActionBoxes& boxes, const ShelfSpec& shelf,
                   const GridSpec& grid, const GroundTruthMaps& gt) {
  return feasible_impl(v, boxes, shelf, grid,
                       [&](int r, int c, int k) { return gt.occupancy.at(r, c, k) != 0; });
}

bool view_feasible(const ViewPose& v, const ActionBoxes& boxes, const ShelfSpec& shelf,
                   const BeliefState& belief, double theta_occ) {
  return feasible_impl(v, boxes, shelf, belief.spec(), [&](int r, int c, int k) {
    return beta_mean(belief.occupancy(r, c, k)) >= theta_occ;
  });
}

double repeat_penalty(const ViewPose& v, const ViewHistory& history,
                      const RewardConfig& cfg) {
  const Vec3 dir = v.direction();
  double penalty = 0.0;
  for (const auto& e : history.entries()) {
    const double p_dist = norm(v.cam - e.pose.cam);
    const double e_dist = 1.0 - dot(dir, e.pose.direction());
    if (p_dist <= cfg.theta_p && e_dist <= cfg.theta_e) {
      penalty -= cfg.gamma_p * (cfg.theta_p - p_dist) / cfg.theta_p +
                 cfg.gamma_e * (cfg.theta_e - e_dist) / cfg.theta_e;
    }
  }
  return penalty;
}

double uncertainty_reward(const BeliefState& before, const BeliefState& after) {
  if (before.spec() != after.spec())
    throw ContractError("uncertainty_reward: belief grids do not match");
  const double d_occ =
      (before.mean_occupancy_uncertainty() - after.mean_occupancy_uncertainty()) /
      kPriorOccVariance;
  const double d_sem =
      before.mean_semantic_uncertainty() - after.mean_semantic_uncertainty();
  return d_occ + d_sem;
}

double step_reward(bool feasible, double r_uncertainty, double r_repeat,
                   const RewardConfig& cfg) {
  if (!feasible) return -cfg.r_feasibility;
  return cfg.w1 * r_uncertainty + cfg.w2 * r_repeat;
}

double expected_vig(const BeliefState& belief, const ViewPose& pose,
                    const CameraModel& cam, const VigParams& params) {
  const GridSpec& spec = belief.spec();
  const auto& occ = belief.occupancy_grid();

  // Epoch-stamped visit mask so repeated evaluations avoid re-clearing.
  thread_local std::vector<std::uint32_t> visited;
  thread_local std::uint32_t epoch = 0;
  if (visited.size() != spec.voxel_count()) {
    visited.assign(spec.voxel_count(), 0);
    epoch = 0;
  }
  if (++epoch == 0) {
    visited.assign(visited.size(), 0);
    epoch = 1;
  }

  auto info = [&](BetaParams p) {
    if (params.measure == VigParams::Measure::entropy) {
      const double m = beta_mean(p);
      if (m <= 0.0 || m >= 1.0) return 0.0;
      return -(m * std::log2(m) + (1.0 - m) * std::log2(1.0 - m)) * kPriorOccVariance;
    }
    return beta_variance(p);
  };

  double sum = 0.0;
  const auto dirs = camera_ray_directions(pose, cam);
  for (const Vec3& d : dirs) {
    traverse_voxels(pose.cam, d, cam.max_range, spec, [&](VoxelIdx v, double) {
      const std::size_t i = occ.index(v.r, v.c, v.k);
      const BetaParams p = occ.data()[i];
      if (visited[i] != epoch) {
        visited[i] = epoch;
        const double gain = info(p);
        if (gain >= params.info_floor) sum += gain;
      }
      return beta_mean(p) >= params.theta_occ;
    });
  }
  return sum;
}

NbvResult greedy_nbv(const BeliefState& belief, const ActionBoxes& boxes,
                     const ShelfSpec& shelf, const CameraModel& vig_cam,
                     const VigParams& vig, const NbvParams& params, Rng& rng) {
  const GridSpec& spec = belief.spec();

  // Look-at bias: rank footprint cells by semantic uncertainty and aim a
  // fraction of candidates at the most uncertain ones.
  struct Ranked {
    double u_s;
    int r, c;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(spec.cell_count());
  for (int r = 0; r < spec.rows; ++r)
    for (int c = 0; c < spec.cols; ++c)
      ranked.push_back({dirichlet_uncertainty(belief.semantic(r, c)), r, c});
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.u_s != b.u_s) return a.u_s > b.u_s;
    if (a.r != b.r) return a.r < b.r;
    return a.c < b.c;
  });
  const int top_n = std::max(
      1, static_cast<int>(params.target_bias_fraction * static_cast<double>(ranked.size())));

  auto sample_pose = [&]() {
    ViewPose v;
    const Aabb3& cb = boxes.cam_box;
    v.cam = {rng.uniform(cb.lo.x, cb.hi.x), rng.uniform(cb.lo.y, cb.hi.y),
             rng.uniform(cb.lo.z, cb.hi.z)};
    const Aabb3& tb = boxes.target_box;
    if (rng.uniform() < params.target_bias_prob) {
      const Ranked& cell = ranked[rng.uniform_int(0, top_n - 1)];
      const double x = (cell.c + 0.5) * spec.resolution;
      const double y = (cell.r + 0.5) * spec.resolution;
      v.target = {std::clamp(x, tb.lo.x, tb.hi.x), std::clamp(y, tb.lo.y, tb.hi.y),
                  rng.uniform(tb.lo.z, tb.hi.z)};
    } else {
      v.target = {rng.uniform(tb.lo.x, tb.hi.x), rng.uniform(tb.lo.y, tb.hi.y),
                  rng.uniform(tb.lo.z, tb.hi.z)};
    }
    return v;
  };

  NbvResult best;
  bool found = false;
  for (int i = 0; i < params.n_candidates; ++i) {
    ViewPose candidate;
    bool ok = false;
    for (int attempt = 0; attempt < params.max_retries_per_candidate; ++attempt) {
      candidate = sample_pose();
      if (view_feasible(candidate, boxes, shelf, belief, vig.theta_occ)) {
        ok = true;
        break;
      }
    }
    if (!ok) continue;
    const double gain = expected_vig(belief, candidate, vig_cam, vig);
    if (!found || gain > best.vig) {
      best = {candidate, gain};
      found = true;
    }
  }
  if (!found) throw PlanningError("greedy_nbv: no feasible candidate view");
  return best;
}

std::array<double, 6> GreedyViewPolicy::propose(const EnrichedObservation&) {
  if (belief_ == nullptr || rng_ == nullptr)
    throw PlanningError("GreedyViewPolicy: propose() before sync()");
  const NbvResult r =
      greedy_nbv(*belief_, boxes_, shelf_, vig_cam_, vig_, params_, *rng_);
  return normalize_action(r.pose, boxes_);
}

std::array<double, 6> ReplayViewPolicy::propose(const EnrichedObservation&) {
  if (next_ >= actions_.size())
    throw PlanningError("ReplayViewPolicy: action sequence exhausted");
  return actions_[next_++];
}

}  // namespace shelfmem
