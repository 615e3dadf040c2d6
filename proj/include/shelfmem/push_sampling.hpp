#pragma once

#include <optional>
#include <vector>

#include "shelfmem/evidential.hpp"
#include "shelfmem/rng.hpp"
#include "shelfmem/scene.hpp"
#include "shelfmem/view_planning.hpp"

namespace shelfmem {

struct PushConfig {
  double sem_uncertainty_floor = 0.1;  // below this a cell counts as certain
  int max_targets = 5;
  double min_target_separation = 10.0;  // cells
  int corridor_width_cap = 8;           // n_c, also the sector ray margin
  int n_candidates = 8;                 // n_p
  double sector_angle_deg = 30.0;
  double k1 = 2.0, k2 = 3.0, k3 = 4.0, k4 = 5.0;
  double start_margin_cells = 3.0;   // sampled pusher offset behind the contour
  double length_margin_cells = 1.5;  // push length beyond the object extent
  double unknown_uo_fraction = 0.5;  // normalized u_o above this counts unknown
  double sector_disqualify_margin_cells = 2.0;
  int view_candidates = 16;  // greedy views evaluated on forecast beliefs
};

/// Distance transform over the semantically uncertain region: certain cells
/// (u_s below the floor) are 0; the rest carry their exact Euclidean
/// distance to the nearest certain cell, scaled by normalized occupancy
/// uncertainty. All zeros when no certain cell exists yet.
Grid2<double> uncertainty_distance_map(const Grid2<double>& u_s,
                                       const Grid2<double>& u_o,
                                       const PushConfig& cfg);

/// Greedy descending-value selection with a minimum pairwise separation.
std::vector<CellIdx> select_target_locations(const Grid2<double>& dmap,
                                             const PushConfig& cfg);

/// Object instances in belief space: 4-connected components of equal
/// non-free hard labels.
struct Segmentation {
  struct Component {
    int id = 0;
    int cls = 0;
    std::vector<CellIdx> cells;
    Vec2 centroid;  // cell units, (x=col, y=row)
    double radius_cells = 0.0;
  };
  Grid2<int> component_ids;  // -1 where free
  std::vector<Component> components;
};

Segmentation segment_hard_labels(const Grid2<int>& labels);

struct VisibilityCorridor {
  CellIdx start;              // front cell of the first merged ray
  int width = 1;              // merged rays (cells), capped at n_c
  double length = 0.0;        // mean ray length / grid diagonal
  std::vector<int> occluders; // component ids, front of shelf first
  double mean_occupancy = 0.0;  // uncertainty-weighted, scaled by unknown share
  int n_occluding = 0;
  double score = 0.0;
};

/// One 2D ray per front-face column from the target cell; adjacent rays with
/// identical occluder sequences merge into corridors.
std::vector<VisibilityCorridor> visibility_corridors(const BeliefState& belief,
                                                     CellIdx target,
                                                     const Segmentation& seg,
                                                     const PushConfig& cfg);

inline double score_corridor(double width, double length, double mean_occupancy,
                             int n_occluding, const PushConfig& cfg) {
  return cfg.k1 * width + cfg.k2 * length + cfg.k3 * mean_occupancy +
         cfg.k4 * n_occluding;
}

/// Front-most occluder of the highest-scoring corridor; nullopt when that
/// corridor is occluder-free (the target is viewable without manipulation).
/// Score ties break toward larger width, then lower start column.
std::optional<int> select_occluder(const std::vector<VisibilityCorridor>& corridors);

struct PushSector {
  int index = 0;       // 0..11, 30 degrees each
  Vec2 dir_a, dir_b;   // unit boundary directions (cell/world frame)
  Vec2 direction;      // bisector
  double mean_occupancy = 0.0;
  double clearance = 0.0;  // meters to the nearest obstacle or boundary
  bool disqualified = false;
};

/// Radial occupancy/clearance scan around a belief component, ranked best
/// push direction first (lowest occupancy, then largest clearance). Throws
/// ContractError when the component id does not exist.
std::vector<PushSector> pushing_corridor(const BeliefState& belief, int component_id,
                                         const Segmentation& seg, const PushConfig& cfg,
                                         double theta_occ);

/// Samples push start points in the region opposite the chosen sector, with
/// directions blended between the sector's boundary rays. May return fewer
/// than n_candidates (empty when the start region degenerates).
std::vector<PushCandidate> sample_push_candidates(const BeliefState& belief,
                                                  const Segmentation& seg,
                                                  int component_id,
                                                  const PushSector& sector,
                                                  const PushConfig& cfg, Rng& rng);

/// Kinematic belief forecast of a push: evidence of the target segment's
/// cells translates along the push (bilinear redistribution); vacated and
/// swept cells reset to the prior. Cells elsewhere are untouched.
BeliefState push_forward_belief(const BeliefState& belief, const Segmentation& seg,
                                const PushCandidate& push);
BeliefState push_forward_belief(const BeliefState& belief, const PushCandidate& push);

/// Information gain attributed to a push: the best greedy view's expected
/// VIG on the forecast post-push belief.
double push_vig(const BeliefState& belief, const Segmentation& seg,
                const PushCandidate& push, const ActionBoxes& boxes,
                const ShelfSpec& shelf, const CameraModel& vig_cam,
                const VigParams& vig, const PushConfig& cfg, Rng& rng);

}  // namespace shelfmem
