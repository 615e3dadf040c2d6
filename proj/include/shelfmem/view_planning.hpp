#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <vector>

#include "shelfmem/evidential.hpp"
#include "shelfmem/rng.hpp"
#include "shelfmem/scene.hpp"
#include "shelfmem/sensor.hpp"

namespace shelfmem {

/// Sampling boxes of the 6D view action: camera positions live in cam_box
/// (in front of the shelf), look-at targets in target_box (inside it).
struct ActionBoxes {
  Aabb3 cam_box{{0.0, -0.25, 0.02}, {0.785, -0.05, 0.18}};
  Aabb3 target_box{{0.0, 0.05, 0.0}, {0.785, 0.25, 0.2}};
};

/// Affine map of a pose into [-1,1]^6. Throws ContractError when the pose
/// lies outside its boxes.
std::array<double, 6> normalize_action(const ViewPose& v, const ActionBoxes& boxes);
ViewPose denormalize_action(const std::array<double, 6>& a, const ActionBoxes& boxes);

struct RewardConfig {
  double w1 = 10.0;
  double w2 = 2.0;
  double gamma_p = 0.5;
  double gamma_e = 0.5;
  double theta_p = 0.1;    // meters
  double theta_e = 0.034;  // cosine distance between view directions
  double r_feasibility = 1.0;
  int n_hist = 4;
};

struct HistoryEntry {
  ViewPose pose;
  std::array<double, 6> normalized{};
  Grid2<double> height_map;  // normalized [0,1]
};

/// Ring buffer of the last n_hist executed views, oldest first.
class ViewHistory {
 public:
  explicit ViewHistory(int capacity = 4) : capacity_(capacity) {}

  void push(HistoryEntry e) {
    entries_.push_back(std::move(e));
    while (static_cast<int>(entries_.size()) > capacity_) entries_.pop_front();
  }
  const std::deque<HistoryEntry>& entries() const { return entries_; }
  int capacity() const { return capacity_; }

 private:
  int capacity_;
  std::deque<HistoryEntry> entries_;
};

/// Observation stack consumed by view policies. Map channels are normalized
/// to [0,1]; history slots are zero-filled at the front so the newest entry
/// is always last.
struct EnrichedObservation {
  Grid2<double> height;       // max height / shelf height
  Grid2<double> semantic;     // hard label / (n_classes - 1)
  Grid2<double> occ_uncertainty;  // column-max variance / prior variance
  Grid2<double> sem_uncertainty;  // u_s / prior u_s
  std::vector<Grid2<double>> past_heights;        // n_hist maps
  std::vector<std::array<double, 6>> past_actions;  // n_hist actions

  std::vector<std::uint8_t> to_bytes() const;
};

EnrichedObservation encode_observation(const BeliefState& belief,
                                       const ViewHistory& history, double theta_occ,
                                       double shelf_height, int n_hist);

/// Geometric stand-in for motion-planned reachability: the camera must sit
/// inside its box and outside shelf walls and occupied cells; the target
/// must lie in the target box.
bool view_feasible(const ViewPose& v, const ActionBoxes& boxes, const ShelfSpec& shelf,
                   const GridSpec& grid, const GroundTruthMaps& gt);
bool view_feasible(const ViewPose& v, const ActionBoxes& boxes, const ShelfSpec& shelf,
                   const BeliefState& belief, double theta_occ);

/// Penalizes views close to history entries in both position and direction;
/// entries failing either gate contribute nothing.
double repeat_penalty(const ViewPose& v, const ViewHistory& history,
                      const RewardConfig& cfg);

/// Drop in mean occupancy plus semantic uncertainty, each normalized by its
/// prior value. Throws ContractError on grid mismatch.
double uncertainty_reward(const BeliefState& before, const BeliefState& after);

double step_reward(bool feasible, double r_uncertainty, double r_repeat,
                   const RewardConfig& cfg);

struct VigParams {
  enum class Measure { variance, entropy };
  Measure measure = Measure::variance;
  double info_floor = 0.005;  // voxels below this contribute nothing
  double theta_occ = 0.87;    // belief occupancy treated as blocking
};

/// Occlusion-aware volumetric information gain: residual information summed
/// over the voxels visible from the pose under the current belief.
double expected_vig(const BeliefState& belief, const ViewPose& pose,
                    const CameraModel& cam, const VigParams& params);

struct NbvParams {
  int n_candidates = 64;
  double target_bias_prob = 0.75;      // chance to aim at a high-u_s cell
  double target_bias_fraction = 0.2;   // top fraction of u_s cells to aim at
  int max_retries_per_candidate = 40;
};

struct NbvResult {
  ViewPose pose;
  double vig = 0.0;
};

/// Samples feasible candidate views and returns the one with the largest
/// expected VIG. Throws PlanningError when no feasible candidate is found.
NbvResult greedy_nbv(const BeliefState& belief, const ActionBoxes& boxes,
                     const ShelfSpec& shelf, const CameraModel& vig_cam,
                     const VigParams& vig, const NbvParams& params, Rng& rng);

/// Seam for external view policies: anything mapping the observation stack
/// to a normalized 6D action can drive the planner. sync() is called by the
/// episode loop before each propose() with the live planning state;
/// observation-only policies ignore it.
class ViewPolicy {
 public:
  virtual ~ViewPolicy() = default;
  virtual void sync(const BeliefState& /*belief*/, Rng& /*rng*/) {}
  virtual std::array<double, 6> propose(const EnrichedObservation& obs) = 0;
};

/// Adapter running the greedy VIG planner behind the policy seam.
class GreedyViewPolicy final : public ViewPolicy {
 public:
  GreedyViewPolicy(ActionBoxes boxes, ShelfSpec shelf, CameraModel vig_cam,
                   VigParams vig, NbvParams params)
      : boxes_(boxes), shelf_(shelf), vig_cam_(vig_cam), vig_(vig), params_(params) {}

  void sync(const BeliefState& belief, Rng& rng) override {
    belief_ = &belief;
    rng_ = &rng;
  }
  std::array<double, 6> propose(const EnrichedObservation&) override;

 private:
  ActionBoxes boxes_;
  ShelfSpec shelf_;
  CameraModel vig_cam_;
  VigParams vig_;
  NbvParams params_;
  const BeliefState* belief_ = nullptr;
  Rng* rng_ = nullptr;
};

/// Replays a recorded normalized action sequence through the seam.
class ReplayViewPolicy final : public ViewPolicy {
 public:
  explicit ReplayViewPolicy(std::vector<std::array<double, 6>> actions)
      : actions_(std::move(actions)) {}
  std::array<double, 6> propose(const EnrichedObservation&) override;

 private:
  std::vector<std::array<double, 6>> actions_;
  std::size_t next_ = 0;
};

}  // namespace shelfmem
