#pragma once

#include <string>
#include <vector>

#include "shelfmem/evidential.hpp"
#include "shelfmem/grid.hpp"
#include "shelfmem/scene.hpp"

namespace shelfmem {

struct EpisodeLog;

/// Mean per-class IoU over the classes present in the ground truth; classes
/// absent from both maps are skipped. Throws ContractError on shape mismatch.
double miou(const Grid2<int>& pred, const Grid2<int>& gt, int n_classes);

/// Binary IoU averaged over {occupied, free}. The belief is first
/// transformed into the map representation: each column is extruded up to
/// its topmost voxel whose Beta mean passes theta_occ, mirroring the
/// board-resting solid objects of the world model.
double occupancy_miou(const BeliefState& belief, const Grid3<std::uint8_t>& gt,
                      double theta_occ);

struct RunMetrics {
  int scenes = 0;
  double occ_miou_mean = 0.0, occ_miou_std = 0.0;
  double sem_miou_mean = 0.0, sem_miou_std = 0.0;
  double mad_mean = 0.0, mad_std = 0.0;       // total displacement per scene (m)
  double num_push_mean = 0.0, num_push_std = 0.0;
  double collision_rate = 0.0;                // share of scenes with a collision
  double view_select_median_s = 0.0;
  double push_select_median_s = 0.0;
  double episode_wall_mean_s = 0.0;
};

/// Final per-scene metrics averaged over a batch (sample standard deviation,
/// 0 for a single scene). Throws ContractError on an empty batch.
RunMetrics aggregate_batch(const std::vector<EpisodeLog>& logs);

struct MethodReport {
  std::string method;
  RunMetrics metrics;
  std::vector<std::uint64_t> seeds;
};

struct ComparisonReport {
  std::vector<MethodReport> methods;
  std::vector<std::uint64_t> seeds;  // identical for every method

  std::string to_csv() const;
  std::string to_json_string() const;
};

}  // namespace shelfmem
