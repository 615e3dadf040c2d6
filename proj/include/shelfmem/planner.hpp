#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shelfmem/config.hpp"
#include "shelfmem/push_sampling.hpp"

namespace shelfmem {

struct PushTelemetry {
  std::vector<CellIdx> targets;
  int corridors_evaluated = 0;
  std::vector<double> best_corridor_scores;  // per target
  std::vector<int> selected_occluders;       // belief component ids
  std::vector<double> candidate_vigs;
};

struct StepRecord {
  int t = 0;
  std::string action;  // "view" | "push"
  bool feasible = true;

  ViewPose pose;
  std::array<double, 6> normalized_action{};
  double vig_nbv = 0.0;
  std::optional<double> vig_push;  // present iff push candidates were scored
  std::string push_gate;  // why no push was evaluated / how the step resolved

  std::optional<PushCandidate> push;
  std::optional<PushOutcome> outcome;
  std::optional<PushTelemetry> telemetry;

  double r_uncertainty = 0.0;
  double r_repeat = 0.0;
  double reward = 0.0;

  // Belief quality after executing the step.
  double occ_miou = 0.0;
  double sem_miou = 0.0;
  double certainty = 0.0;
  double mean_u_o = 0.0;
  double mean_u_s = 0.0;

  // Wall-clock timings; kept out of the replayable log bytes.
  double view_select_seconds = 0.0;
  double push_select_seconds = 0.0;
  double execute_seconds = 0.0;
};

struct EpisodeLog {
  std::uint64_t scene_seed = 0;
  std::uint64_t planner_seed = 0;
  std::string method;
  GridSpec grid;
  int budget = 0;
  std::vector<StepRecord> steps;
  std::string terminal_reason;  // budget | certainty | fall | error
  std::string error;
  int clamp_warnings = 0;

  double final_occ_miou = 0.0;
  double final_sem_miou = 0.0;
  double final_certainty = 0.0;

  int num_pushes() const;
  double total_displacement() const;
  bool collided() const;  // any secondary contact or fall
};

/// Fraction of footprint cells whose semantics are confidently classified
/// and whose occupancy column is resolved (a confidently occupied voxel
/// exists, or every voxel is confidently free).
double map_certainty(const BeliefState& belief, double sem_floor, double occ_floor,
                     double theta_occ);

struct ActionDecision {
  bool is_push = false;
  ViewPose view;
  std::array<double, 6> normalized{};
  double vig_nbv = 0.0;
  std::optional<double> vig_push;
  std::string push_gate;
  PushCandidate push;
  std::optional<Segmentation> segmentation;  // reused when executing the push
  std::optional<PushTelemetry> telemetry;
  double view_select_seconds = 0.0;
  double push_select_seconds = 0.0;
};

/// One arbitration decision: greedy view versus best sampled push, compared
/// as vig_nbv * delta_view > vig_push. Exposed for tests; run_episode drives
/// it per step.
ActionDecision select_action(const BeliefState& belief, const ExperimentConfig& cfg,
                             Method method, bool first_step, double certainty,
                             Rng& view_rng, Rng& push_rng, ViewPolicy* policy,
                             const ViewHistory& history, int* clamp_warnings,
                             const std::string& dump_dir = "", int step = 0);

/// Full episode: alternate select/execute/fuse until the action budget is
/// spent, the certainty threshold is reached, or (with tof_enabled) an
/// object falls. Optional dump_dir writes per-step PGM panels.
EpisodeLog run_episode(const Scene& scene, const ExperimentConfig& cfg, Method method,
                       std::uint64_t planner_seed, ViewPolicy* policy = nullptr,
                       const std::string& dump_dir = "");

struct ReplayResult {
  bool ok = false;
  std::string mismatch;  // first divergence description
  EpisodeLog log;        // freshly recomputed
};

/// Re-executes a logged action sequence against the scene and compares the
/// per-step and final metrics within `tolerance`.
ReplayResult replay_episode(const Scene& scene, const ExperimentConfig& cfg,
                            const EpisodeLog& logged, double tolerance = 1e-9);

}  // namespace shelfmem
