#include "shelfmem/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "shelfmem/errors.hpp"
#include "shelfmem/metrics.hpp"
#include "shelfmem/pgm.hpp"
#include "shelfmem/raycast.hpp"

namespace shelfmem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int EpisodeLog::num_pushes() const {
  int n = 0;
  for (const StepRecord& s : steps)
    if (s.action == "push") ++n;
  return n;
}

double EpisodeLog::total_displacement() const {
  double d = 0.0;
  for (const StepRecord& s : steps)
    if (s.outcome) d += s.outcome->total_displacement();
  return d;
}

bool EpisodeLog::collided() const {
  for (const StepRecord& s : steps)
    if (s.outcome && (s.outcome->secondary_contacts > 0 || !s.outcome->fallen.empty()))
      return true;
  return false;
}

double map_certainty(const BeliefState& belief, double sem_floor, double occ_floor,
                     double theta_occ) {
  const GridSpec& spec = belief.spec();
  int certain = 0;
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      if (dirichlet_uncertainty(belief.semantic(r, c)) >= sem_floor) continue;
      bool has_confident_occupied = false;
      bool all_confident = true;
      for (const BetaParams p : belief.occupancy_column(r, c)) {
        const double var = beta_variance(p);
        if (var >= occ_floor)
          all_confident = false;
        else if (beta_mean(p) >= theta_occ)
          has_confident_occupied = true;
      }
      if (has_confident_occupied || all_confident) ++certain;
    }
  }
  return static_cast<double>(certain) / spec.cell_count();
}

namespace {

ViewPose sample_random_feasible_view(const BeliefState& belief, const ActionBoxes& boxes,
                                     const ShelfSpec& shelf, double theta_occ, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Aabb3& cb = boxes.cam_box;
    const Aabb3& tb = boxes.target_box;
    ViewPose v{{rng.uniform(cb.lo.x, cb.hi.x), rng.uniform(cb.lo.y, cb.hi.y),
                rng.uniform(cb.lo.z, cb.hi.z)},
               {rng.uniform(tb.lo.x, tb.hi.x), rng.uniform(tb.lo.y, tb.hi.y),
                rng.uniform(tb.lo.z, tb.hi.z)}};
    if (view_feasible(v, boxes, shelf, belief, theta_occ)) return v;
  }
  throw PlanningError("random view sampling found no feasible pose");
}

PushSector synthetic_sector(double center_angle, double span_deg) {
  PushSector sec;
  sec.index = -1;
  const double half = span_deg * 0.5 * M_PI / 180.0;
  sec.dir_a = {std::cos(center_angle - half), std::sin(center_angle - half)};
  sec.dir_b = {std::cos(center_angle + half), std::sin(center_angle + half)};
  sec.direction = {std::cos(center_angle), std::sin(center_angle)};
  return sec;
}

void dump_push_panels(const std::string& dump_dir, int step, const BeliefState& belief,
                      const Grid2<double>& dmap, const Segmentation& seg,
                      CellIdx best_target, const std::vector<VisibilityCorridor>& corrs,
                      const PushSector& sector, int occluder,
                      const std::vector<PushCandidate>& candidates) {
  namespace fs = std::filesystem;
  fs::create_directories(dump_dir);
  const GridSpec& spec = belief.spec();
  char prefix[64];
  std::snprintf(prefix, sizeof(prefix), "step_%03d_", step);
  const std::string base = dump_dir + "/" + prefix;

  write_pgm(base + "belief.pgm", belief.hard_label_map(), spec.n_classes - 1);

  double dmax = 0.0;
  for (const double v : dmap.data()) dmax = std::max(dmax, v);
  write_pgm(base + "distance_map.pgm", dmap, 0.0, dmax > 0 ? dmax : 1.0);

  Grid2<int> corridor_mask(spec.rows, spec.cols, 0);
  const VisibilityCorridor* best = nullptr;
  for (const auto& c : corrs)
    if (!best || c.score > best->score) best = &c;
  for (const auto& c : corrs) {
    const int value = best == &c ? 255 : 100;
    for (int x = c.start.c; x < c.start.c + c.width; ++x)
      for (const CellIdx& cell : trace_cells_2d(best_target, {0, x}))
        corridor_mask.at(cell) = std::max(corridor_mask.at(cell), value);
  }
  write_pgm(base + "visibility_corridor.pgm", corridor_mask, 255);

  Grid2<int> sector_mask(spec.rows, spec.cols, 0);
  if (occluder >= 0 && occluder < static_cast<int>(seg.components.size())) {
    const auto& comp = seg.components[occluder];
    for (const CellIdx& cell : comp.cells) sector_mask.at(cell) = 60;
    const double len = comp.radius_cells + 12.0;
    for (int i = 0; i <= 20; ++i) {
      const double t = i / 20.0;
      const Vec2 dir = normalized(sector.dir_a * (1.0 - t) + sector.dir_b * t);
      for (const CellIdx& cell : trace_cells_2d_continuous(
               comp.centroid, comp.centroid + dir * len, spec.rows, spec.cols))
        sector_mask.at(cell) = std::max(sector_mask.at(cell), 128);
    }
  }
  for (const auto& cand : candidates) {
    const int r = static_cast<int>(cand.start.y / spec.resolution);
    const int c = static_cast<int>(cand.start.x / spec.resolution);
    if (spec.in_bounds(r, c)) sector_mask.at(r, c) = 255;
  }
  write_pgm(base + "pushing_corridor.pgm", sector_mask, 255);
}

}  // namespace

ActionDecision select_action(const BeliefState& belief, const ExperimentConfig& cfg,
                             Method method, bool first_step, double certainty,
                             Rng& view_rng, Rng& push_rng, ViewPolicy* policy,
                             const ViewHistory& history, int* clamp_warnings,
                             const std::string& dump_dir, int step) {
  ActionDecision d;
  const CameraModel vig_cam = cfg.vig_camera();
  const auto view_t0 = Clock::now();

  if (policy != nullptr) {
    policy->sync(belief, view_rng);
    const EnrichedObservation obs =
        encode_observation(belief, history, cfg.view.theta_occ,
                           cfg.scene.shelf.height, cfg.reward.n_hist);
    std::array<double, 6> a = policy->propose(obs);
    for (double& x : a) {
      if (x < -1.0 || x > 1.0) {
        x = std::clamp(x, -1.0, 1.0);
        if (clamp_warnings) ++*clamp_warnings;
      }
    }
    d.normalized = a;
    d.view = denormalize_action(a, cfg.view.boxes);
  } else if (method == Method::random_view) {
    const ViewPose v = sample_random_feasible_view(belief, cfg.view.boxes,
                                                   cfg.scene.shelf,
                                                   cfg.view.theta_occ, view_rng);
    d.normalized = normalize_action(v, cfg.view.boxes);
    d.view = denormalize_action(d.normalized, cfg.view.boxes);
  } else {
    const NbvResult r = greedy_nbv(belief, cfg.view.boxes, cfg.scene.shelf, vig_cam,
                                   cfg.view.vig, cfg.view.nbv, view_rng);
    // Route through the action encoding so a policy behind the seam executes
    // bit-identical poses.
    d.normalized = normalize_action(r.pose, cfg.view.boxes);
    d.view = denormalize_action(d.normalized, cfg.view.boxes);
  }
  d.vig_nbv = expected_vig(belief, d.view, vig_cam, cfg.view.vig);
  d.view_select_seconds = seconds_since(view_t0);

  if (first_step) {
    d.push_gate = "first_step";
    return d;
  }
  if (method == Method::view_only || method == Method::random_view) {
    d.push_gate = "method";
    return d;
  }
  if (certainty >= cfg.planner.completion_certainty) {
    d.push_gate = "certainty";
    return d;
  }

  const auto push_t0 = Clock::now();
  PushTelemetry telemetry;
  Segmentation seg = segment_hard_labels(belief.hard_label_map());
  std::vector<PushCandidate> candidates;
  CellIdx panel_target{};
  std::vector<VisibilityCorridor> panel_corridors;
  PushSector panel_sector;
  int panel_occluder = -1;

  if (method == Method::informed_push) {
    const UncertaintyMaps maps = belief.uncertainty_maps();
    const Grid2<double> dmap =
        uncertainty_distance_map(maps.semantic, maps.occupancy, cfg.push);
    const std::vector<CellIdx> targets = select_target_locations(dmap, cfg.push);
    telemetry.targets = targets;
    if (targets.empty()) {
      d.push_gate = "no_targets";
      d.push_select_seconds = seconds_since(push_t0);
      d.telemetry = telemetry;
      return d;
    }
    std::vector<int> occluders;
    for (const CellIdx& target : targets) {
      const auto corridors = visibility_corridors(belief, target, seg, cfg.push);
      telemetry.corridors_evaluated += static_cast<int>(corridors.size());
      double best_score = 0.0;
      for (const auto& c : corridors) best_score = std::max(best_score, c.score);
      telemetry.best_corridor_scores.push_back(best_score);
      const std::optional<int> occ = select_occluder(corridors);
      if (occ && std::find(occluders.begin(), occluders.end(), *occ) == occluders.end()) {
        occluders.push_back(*occ);
        if (occluders.size() == 1) {
          panel_target = target;
          panel_corridors = corridors;
        }
      }
    }
    telemetry.selected_occluders = occluders;
    if (occluders.empty()) {
      d.push_gate = "no_occluders";
      d.push_select_seconds = seconds_since(push_t0);
      d.telemetry = telemetry;
      return d;
    }
    int stream = 0;
    for (const int comp_id : occluders) {
      const auto sectors = pushing_corridor(belief, comp_id, seg, cfg.push,
                                            cfg.view.theta_occ);
      if (sectors.empty() || sectors.front().disqualified) continue;
      if (comp_id == occluders.front()) {
        panel_sector = sectors.front();
        panel_occluder = comp_id;
      }
      Rng sample_rng = push_rng.child(100 + comp_id);
      auto cands = sample_push_candidates(belief, seg, comp_id, sectors.front(),
                                          cfg.push, sample_rng);
      for (auto& cand : cands) {
        Rng eval_rng = push_rng.child(1000 + stream++);
        cand.predicted_vig = push_vig(belief, seg, cand, cfg.view.boxes,
                                      cfg.scene.shelf, vig_cam, cfg.view.vig,
                                      cfg.push, eval_rng);
        telemetry.candidate_vigs.push_back(cand.predicted_vig);
        candidates.push_back(cand);
      }
    }
  } else {  // random_push baseline: uniform component, uniform direction
    if (seg.components.empty()) {
      d.push_gate = "no_components";
      d.push_select_seconds = seconds_since(push_t0);
      d.telemetry = telemetry;
      return d;
    }
    const int comp_id =
        push_rng.uniform_int(0, static_cast<int>(seg.components.size()) - 1);
    const double angle = push_rng.uniform(0.0, 2.0 * M_PI);
    const PushSector sector = synthetic_sector(angle, cfg.push.sector_angle_deg);
    telemetry.selected_occluders.push_back(comp_id);
    panel_sector = sector;
    panel_occluder = comp_id;
    Rng sample_rng = push_rng.child(100);
    auto cands = sample_push_candidates(belief, seg, comp_id, sector, cfg.push,
                                        sample_rng);
    int stream = 0;
    for (auto& cand : cands) {
      Rng eval_rng = push_rng.child(1000 + stream++);
      cand.predicted_vig = push_vig(belief, seg, cand, cfg.view.boxes,
                                    cfg.scene.shelf, vig_cam, cfg.view.vig,
                                    cfg.push, eval_rng);
      telemetry.candidate_vigs.push_back(cand.predicted_vig);
      candidates.push_back(cand);
    }
  }

  if (candidates.empty()) {
    d.push_gate = "no_candidates";
    d.push_select_seconds = seconds_since(push_t0);
    d.telemetry = telemetry;
    return d;
  }

  const PushCandidate* best = &candidates.front();
  for (const auto& c : candidates)
    if (c.predicted_vig > best->predicted_vig) best = &c;
  d.vig_push = best->predicted_vig;
  d.segmentation = std::move(seg);
  d.telemetry = telemetry;

  if (d.vig_nbv * cfg.planner.delta_view > *d.vig_push) {
    d.push_gate = "arbitration";
  } else {
    d.is_push = true;
    d.push = *best;
    d.push_gate = "pushed";
    if (!dump_dir.empty() && method == Method::informed_push) {
      const UncertaintyMaps maps = belief.uncertainty_maps();
      const Grid2<double> dmap =
          uncertainty_distance_map(maps.semantic, maps.occupancy, cfg.push);
      dump_push_panels(dump_dir, step, belief, dmap, *d.segmentation, panel_target,
                       panel_corridors, panel_sector, panel_occluder, candidates);
    }
  }
  d.push_select_seconds = seconds_since(push_t0);
  return d;
}

EpisodeLog run_episode(const Scene& scene0, const ExperimentConfig& cfg, Method method,
                       std::uint64_t planner_seed, ViewPolicy* policy,
                       const std::string& dump_dir) {
  const GridSpec& grid = cfg.grid;
  Scene scene = scene0;
  BeliefState belief(grid);
  GroundTruthMaps gt = ground_truth_maps(scene, grid);
  ViewHistory history(cfg.reward.n_hist);
  Rng root(planner_seed);

  EpisodeLog log;
  log.scene_seed = scene.seed;
  log.planner_seed = planner_seed;
  log.method = method_to_string(method);
  log.grid = grid;
  log.budget = cfg.planner.action_budget;
  log.terminal_reason = "budget";

  for (int t = 1; t <= cfg.planner.action_budget; ++t) {
    Rng view_rng = root.child(2 * static_cast<std::uint64_t>(t));
    Rng push_rng = root.child(2 * static_cast<std::uint64_t>(t) + 1);
    const double certainty =
        map_certainty(belief, cfg.push.sem_uncertainty_floor,
                      cfg.planner.occ_certainty_floor, cfg.view.theta_occ);

    ActionDecision d;
    try {
      d = select_action(belief, cfg, method, t == 1, certainty, view_rng, push_rng,
                        policy, history, &log.clamp_warnings, dump_dir, t);
    } catch (const Error& e) {
      log.terminal_reason = "error";
      log.error = e.what();
      break;
    }

    StepRecord rec;
    rec.t = t;
    rec.pose = d.view;
    rec.normalized_action = d.normalized;
    rec.vig_nbv = d.vig_nbv;
    rec.vig_push = d.vig_push;
    rec.push_gate = d.push_gate;
    rec.telemetry = d.telemetry;
    rec.view_select_seconds = d.view_select_seconds;
    rec.push_select_seconds = d.push_select_seconds;

    const auto exec_t0 = Clock::now();
    if (d.is_push) {
      rec.action = "push";
      rec.push = d.push;
      auto [next_scene, outcome] = apply_push(scene, d.push, cfg.dynamics);
      scene = std::move(next_scene);
      rec.outcome = outcome;
      belief = push_forward_belief(belief, *d.segmentation, d.push);
      gt = ground_truth_maps(scene, grid);
    } else {
      rec.action = "view";
      rec.feasible = view_feasible(d.view, cfg.view.boxes, cfg.scene.shelf, grid, gt);
      if (rec.feasible) {
        const double uo_before = belief.mean_occupancy_uncertainty();
        const double us_before = belief.mean_semantic_uncertainty();
        const Observation obs = render_view(gt, grid, d.view, cfg.camera.model);
        integrate_observation(belief, obs, cfg.camera.fusion_weight);
        rec.r_uncertainty =
            (uo_before - belief.mean_occupancy_uncertainty()) / kPriorOccVariance +
            (us_before - belief.mean_semantic_uncertainty());
        rec.r_repeat = repeat_penalty(d.view, history, cfg.reward);
        rec.reward = step_reward(true, rec.r_uncertainty, rec.r_repeat, cfg.reward);
        Grid2<double> h = belief.project_height_map(cfg.view.theta_occ);
        for (double& v : h.data())
          v = std::clamp(v / cfg.scene.shelf.height, 0.0, 1.0);
        history.push({d.view, rec.normalized_action, std::move(h)});
      } else {
        // Failed execution: sparse penalty, empty partial observation.
        rec.reward = step_reward(false, 0.0, 0.0, cfg.reward);
        history.push({d.view, rec.normalized_action,
                      Grid2<double>(grid.rows, grid.cols, 0.0)});
      }
    }
    rec.execute_seconds = seconds_since(exec_t0);

    rec.occ_miou = occupancy_miou(belief, gt.occupancy, cfg.view.theta_occ);
    rec.sem_miou = miou(belief.hard_label_map(), gt.semantics, grid.n_classes);
    rec.certainty = map_certainty(belief, cfg.push.sem_uncertainty_floor,
                                  cfg.planner.occ_certainty_floor, cfg.view.theta_occ);
    rec.mean_u_o = belief.mean_occupancy_uncertainty();
    rec.mean_u_s = belief.mean_semantic_uncertainty();
    log.steps.push_back(std::move(rec));

    const StepRecord& last = log.steps.back();
    if (last.certainty >= cfg.planner.completion_certainty) {
      log.terminal_reason = "certainty";
      break;
    }
    if (cfg.planner.tof_enabled && last.outcome && !last.outcome->fallen.empty()) {
      log.terminal_reason = "fall";
      break;
    }
  }

  if (!log.steps.empty()) {
    log.final_occ_miou = log.steps.back().occ_miou;
    log.final_sem_miou = log.steps.back().sem_miou;
    log.final_certainty = log.steps.back().certainty;
  }
  return log;
}

ReplayResult replay_episode(const Scene& scene0, const ExperimentConfig& cfg,
                            const EpisodeLog& logged, double tolerance) {
  ReplayResult result;
  const GridSpec& grid = cfg.grid;
  Scene scene = scene0;
  BeliefState belief(grid);
  GroundTruthMaps gt = ground_truth_maps(scene, grid);

  EpisodeLog fresh;
  fresh.scene_seed = scene.seed;
  fresh.planner_seed = logged.planner_seed;
  fresh.method = logged.method;
  fresh.grid = grid;
  fresh.budget = logged.budget;

  auto fail = [&](int t, const std::string& what, double a, double b) {
    std::ostringstream os;
    os << "step " << t << " " << what << ": logged " << a << " recomputed " << b;
    result.mismatch = os.str();
    result.ok = false;
  };

  for (const StepRecord& step : logged.steps) {
    StepRecord rec;
    rec.t = step.t;
    rec.action = step.action;
    if (step.action == "push") {
      if (!step.push) {
        result.mismatch = "push step without candidate";
        return result;
      }
      const Segmentation seg = segment_hard_labels(belief.hard_label_map());
      auto [next_scene, outcome] = apply_push(scene, *step.push, cfg.dynamics);
      scene = std::move(next_scene);
      rec.outcome = outcome;
      rec.push = step.push;
      belief = push_forward_belief(belief, seg, *step.push);
      gt = ground_truth_maps(scene, grid);
      if (step.outcome &&
          std::abs(outcome.total_displacement() - step.outcome->total_displacement()) >
              tolerance) {
        fail(step.t, "total_displacement", step.outcome->total_displacement(),
             outcome.total_displacement());
        return result;
      }
    } else {
      rec.pose = step.pose;
      rec.feasible = view_feasible(step.pose, cfg.view.boxes, cfg.scene.shelf, grid, gt);
      if (rec.feasible != step.feasible) {
        fail(step.t, "feasible", step.feasible, rec.feasible);
        return result;
      }
      if (rec.feasible) {
        const Observation obs = render_view(gt, grid, step.pose, cfg.camera.model);
        integrate_observation(belief, obs, cfg.camera.fusion_weight);
      }
    }
    rec.occ_miou = occupancy_miou(belief, gt.occupancy, cfg.view.theta_occ);
    rec.sem_miou = miou(belief.hard_label_map(), gt.semantics, grid.n_classes);
    rec.certainty = map_certainty(belief, cfg.push.sem_uncertainty_floor,
                                  cfg.planner.occ_certainty_floor, cfg.view.theta_occ);
    rec.mean_u_o = belief.mean_occupancy_uncertainty();
    rec.mean_u_s = belief.mean_semantic_uncertainty();
    fresh.steps.push_back(rec);

    if (std::abs(rec.occ_miou - step.occ_miou) > tolerance) {
      fail(step.t, "occ_miou", step.occ_miou, rec.occ_miou);
      return result;
    }
    if (std::abs(rec.sem_miou - step.sem_miou) > tolerance) {
      fail(step.t, "sem_miou", step.sem_miou, rec.sem_miou);
      return result;
    }
    if (std::abs(rec.certainty - step.certainty) > tolerance) {
      fail(step.t, "certainty", step.certainty, rec.certainty);
      return result;
    }
    if (std::abs(rec.mean_u_o - step.mean_u_o) > tolerance) {
      fail(step.t, "mean_u_o", step.mean_u_o, rec.mean_u_o);
      return result;
    }
    if (std::abs(rec.mean_u_s - step.mean_u_s) > tolerance) {
      fail(step.t, "mean_u_s", step.mean_u_s, rec.mean_u_s);
      return result;
    }
  }

  if (!fresh.steps.empty()) {
    fresh.final_occ_miou = fresh.steps.back().occ_miou;
    fresh.final_sem_miou = fresh.steps.back().sem_miou;
    fresh.final_certainty = fresh.steps.back().certainty;
  }
  if (std::abs(fresh.final_occ_miou - logged.final_occ_miou) > tolerance ||
      std::abs(fresh.final_sem_miou - logged.final_sem_miou) > tolerance) {
    result.mismatch = "final metrics diverged";
    result.ok = false;
    result.log = std::move(fresh);
    return result;
  }
  result.ok = true;
  result.log = std::move(fresh);
  return result;
}

}  // namespace shelfmem
