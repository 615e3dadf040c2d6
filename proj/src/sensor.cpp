#include "shelfmem/sensor.hpp"

#include <cmath>

#include "shelfmem/raycast.hpp"

namespace shelfmem {

std::vector<Vec3> camera_ray_directions(const ViewPose& pose, const CameraModel& cam) {
  const Vec3 fwd = pose.direction();
  Vec3 up{0.0, 0.0, 1.0};
  if (std::abs(dot(fwd, up)) > 0.999) up = {0.0, 1.0, 0.0};
  const Vec3 right = normalized(cross(fwd, up));
  const Vec3 cam_up = cross(right, fwd);

  std::vector<Vec3> dirs;
  dirs.reserve(static_cast<std::size_t>(cam.rays_x) * cam.rays_y);
  for (int iy = 0; iy < cam.rays_y; ++iy) {
    const double fy = cam.rays_y > 1 ? (iy + 0.5) / cam.rays_y - 0.5 : 0.0;
    const double ty = std::tan(fy * cam.fov_v);
    for (int ix = 0; ix < cam.rays_x; ++ix) {
      const double fx = cam.rays_x > 1 ? (ix + 0.5) / cam.rays_x - 0.5 : 0.0;
      const double tx = std::tan(fx * cam.fov_h);
      dirs.push_back(normalized(fwd + right * tx + cam_up * ty));
    }
  }
  return dirs;
}

Observation render_view(const GroundTruthMaps& gt, const GridSpec& grid,
                        const ViewPose& pose, const CameraModel& cam) {
  Observation obs;
  obs.pose = pose;
  obs.camera = cam;
  const auto dirs = camera_ray_directions(pose, cam);
  obs.rays.resize(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    RayRecord& rec = obs.rays[i];
    traverse_voxels(pose.cam, dirs[i], cam.max_range, grid,
                    [&](VoxelIdx v, double t_entry) {
                      if (gt.occupancy.at(v)) {
                        rec.hit = true;
                        rec.distance = t_entry;
                        rec.hit_voxel = v;
                        rec.hit_class = gt.semantics.at(v.r, v.c);
                        return true;
                      }
                      rec.traversed.push_back(v);
                      return false;
                    });
  }
  return obs;
}

void integrate_observation(BeliefState& belief, const Observation& obs, double weight) {
  for (const RayRecord& rec : obs.rays) {
    for (const VoxelIdx v : rec.traversed) {
      belief.fuse_occupancy_at(v.r, v.c, v.k, OccEvidence::miss, weight);
      if (v.k == 0) belief.fuse_semantic_at(v.r, v.c, 0, weight);
    }
    if (rec.hit) {
      const VoxelIdx v = rec.hit_voxel;
      belief.fuse_occupancy_at(v.r, v.c, v.k, OccEvidence::hit, weight);
      belief.fuse_semantic_at(v.r, v.c, rec.hit_class, weight);
    }
  }
}

namespace {

template <typename Blocked>
std::vector<VoxelIdx> visible_set_impl(const GridSpec& grid, const ViewPose& pose,
                                       const CameraModel& cam, Blocked&& blocked) {
  std::vector<VoxelIdx> out;
  Grid3<std::uint8_t> seen(grid.rows, grid.cols, grid.levels, 0);
  const auto dirs = camera_ray_directions(pose, cam);
  for (const Vec3& d : dirs) {
    traverse_voxels(pose.cam, d, cam.max_range, grid, [&](VoxelIdx v, double) {
      if (!seen.at(v)) {
        seen.at(v) = 1;
        out.push_back(v);
      }
      return blocked(v);
    });
  }
  return out;
}

}  // namespace

std::vector<VoxelIdx> visible_voxel_set(const BeliefState& belief, double theta_occ,
                                        const ViewPose& pose, const CameraModel& cam) {
  return visible_set_impl(belief.spec(), pose, cam, [&](VoxelIdx v) {
    return beta_mean(belief.occupancy(v.r, v.c, v.k)) >= theta_occ;
  });
}

std::vector<VoxelIdx> visible_voxel_set(const GroundTruthMaps& gt, const GridSpec& grid,
                                        const ViewPose& pose, const CameraModel& cam) {
  return visible_set_impl(grid, pose, cam,
                          [&](VoxelIdx v) { return gt.occupancy.at(v) != 0; });
}

}  // namespace shelfmem
