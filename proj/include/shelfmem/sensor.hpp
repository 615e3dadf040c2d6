#pragma once

#include <vector>

#include "shelfmem/evidential.hpp"
#include "shelfmem/geometry.hpp"
#include "shelfmem/grid.hpp"
#include "shelfmem/scene.hpp"

namespace shelfmem {

/// Camera action: position plus look-at point; orientation follows the
/// look-at direction (roll-free, z-up).
struct ViewPose {
  Vec3 cam;
  Vec3 target;

  Vec3 direction() const { return normalized(target - cam); }
  friend bool operator==(const ViewPose&, const ViewPose&) = default;
};

struct CameraModel {
  double fov_h = 70.0 * M_PI / 180.0;
  double fov_v = 55.0 * M_PI / 180.0;
  int rays_x = 64;
  int rays_y = 48;
  double max_range = 1.5;

  CameraModel with_rays(int x, int y) const {
    CameraModel c = *this;
    c.rays_x = x;
    c.rays_y = y;
    return c;
  }
};

struct RayRecord {
  bool hit = false;
  double distance = 0.0;
  int hit_class = 0;
  VoxelIdx hit_voxel;
  std::vector<VoxelIdx> traversed;  // free voxels crossed before the hit
};

struct Observation {
  ViewPose pose;
  CameraModel camera;
  std::vector<RayRecord> rays;
};

/// Unit ray directions for the camera's angular grid, row-major
/// (rays_y rows of rays_x directions). Deterministic for a given pose.
std::vector<Vec3> camera_ray_directions(const ViewPose& pose, const CameraModel& cam);

/// Marches every camera ray through the ground-truth voxel grid; the first
/// occupied voxel is the hit, its class read from the ground-truth semantic
/// map.
Observation render_view(const GroundTruthMaps& gt, const GridSpec& grid,
                        const ViewPose& pose, const CameraModel& cam);

/// Conjugate fusion of one rendered observation: traversed voxels receive
/// miss evidence, hit voxels hit evidence plus semantic evidence for the hit
/// class on their footprint column. Traversed board-level voxels (k = 0)
/// also add free-space semantic evidence, since every object occupies its
/// footprint down to the board.
void integrate_observation(BeliefState& belief, const Observation& obs, double weight);

/// Voxels a render from `pose` would traverse or hit, computed against the
/// belief's thresholded occupancy (planning) or against ground truth
/// (simulation). Deduplicated across rays.
std::vector<VoxelIdx> visible_voxel_set(const BeliefState& belief, double theta_occ,
                                        const ViewPose& pose, const CameraModel& cam);
std::vector<VoxelIdx> visible_voxel_set(const GroundTruthMaps& gt, const GridSpec& grid,
                                        const ViewPose& pose, const CameraModel& cam);

}  // namespace shelfmem
