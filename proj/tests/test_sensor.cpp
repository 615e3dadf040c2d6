#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "shelfmem/scene_gen.hpp"
#include "shelfmem/sensor.hpp"

using namespace shelfmem;

namespace {

const GridSpec kGrid{82, 157, 40, 0.005, 12};
const ShelfSpec kShelf{};

Scene box_scene(std::vector<SceneObject> objects) {
  Scene s;
  s.shelf = kShelf;
  s.objects = std::move(objects);
  return s;
}

SceneObject make_box(int id, int cls, double w, double d, double h, Vec2 pos) {
  SceneObject o;
  o.id = id;
  o.cls = cls;
  o.dim_a = w;
  o.dim_b = d;
  o.height = h;
  o.position = pos;
  return o;
}

ViewPose frontal_view(Vec3 target) {
  return {{target.x, -0.15, 0.12}, target};
}

}  // namespace

TEST_CASE("empty shelf view has no hits") {
  const Scene s = box_scene({});
  const GroundTruthMaps gt = ground_truth_maps(s, kGrid);
  const CameraModel cam;
  const Observation obs = render_view(gt, kGrid, frontal_view({0.4, 0.2, 0.1}), cam);
  for (const RayRecord& r : obs.rays) CHECK(!r.hit);
}

TEST_CASE("hit distances match the analytic box intersection") {
  // A box centered in front of the camera; each hit must land within one
  // voxel diagonal of the exact entry distance into the box.
  const Scene s = box_scene({make_box(0, 3, 0.08, 0.08, 0.15, {0.4, 0.2})});
  const GroundTruthMaps gt = ground_truth_maps(s, kGrid);
  const CameraModel cam;
  const ViewPose pose = frontal_view({0.4, 0.2, 0.05});
  const Observation obs = render_view(gt, kGrid, pose, cam);
  const auto dirs = camera_ray_directions(pose, cam);

  const ConvexPolygon foot = s.objects[0].footprint();
  const double diag = kGrid.resolution * std::sqrt(3.0);
  int checked = 0;
  for (std::size_t i = 0; i < obs.rays.size(); ++i) {
    const RayRecord& r = obs.rays[i];
    if (!r.hit || r.hit_class != 3) continue;
    // 2D entry of the ray into the footprint, lifted by the ray's z slope.
    const Vec3 d3 = dirs[i];
    const Vec2 o2{pose.cam.x, pose.cam.y};
    const double n2 = std::hypot(d3.x, d3.y);
    const Vec2 d2{d3.x / n2, d3.y / n2};
    const double t2 = ray_polygon_entry(o2, d2, 10.0, foot);
    if (std::isinf(t2)) continue;
    const double t3 = t2 / n2;  // 3D distance at the footprint entry
    const double z = pose.cam.z + d3.z * t3;
    if (z < 0.0 || z > s.objects[0].height) continue;  // enters over the top
    CHECK(std::abs(r.distance - t3) < diag + 1e-9);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("a box behind a box receives no frontal hits") {
  const Scene s = box_scene({make_box(0, 2, 0.1, 0.06, 0.18, {0.4, 0.12}),
                             make_box(1, 5, 0.06, 0.06, 0.12, {0.4, 0.3})});
  const GroundTruthMaps gt = ground_truth_maps(s, kGrid);
  const CameraModel cam;
  const Observation obs = render_view(gt, kGrid, frontal_view({0.4, 0.2, 0.08}), cam);
  for (const RayRecord& r : obs.rays) {
    if (r.hit) CHECK(r.hit_class != 5);
  }
}

TEST_CASE("occlusion soundness: no evidence behind a hit along any ray") {
  const Scene s = box_scene({make_box(0, 2, 0.1, 0.06, 0.18, {0.4, 0.12})});
  const GroundTruthMaps gt = ground_truth_maps(s, kGrid);
  const CameraModel cam;
  const ViewPose pose = frontal_view({0.4, 0.25, 0.08});
  const Observation obs = render_view(gt, kGrid, pose, cam);
  for (const RayRecord& r : obs.rays) {
    if (!r.hit) continue;
    // Traversed (miss-evidence) voxels precede the hit.
    for (const VoxelIdx v : r.traversed) {
      const double d_free = norm(Vec3{(v.c + 0.5) * kGrid.resolution,
                                      (v.r + 0.5) * kGrid.resolution,
                                      (v.k + 0.5) * kGrid.resolution} -
                                 pose.cam);
      const double d_hit = norm(Vec3{(r.hit_voxel.c + 0.5) * kGrid.resolution,
                                     (r.hit_voxel.r + 0.5) * kGrid.resolution,
                                     (r.hit_voxel.k + 0.5) * kGrid.resolution} -
                                pose.cam);
      CHECK(d_free < d_hit + kGrid.resolution * 2.0);
    }
  }
}

TEST_CASE("integrating an empty view drops uncertainty and adds free evidence") {
  const Scene s = box_scene({});
  const GroundTruthMaps gt = ground_truth_maps(s, kGrid);
  BeliefState belief(kGrid);
  const double u_o_before = belief.mean_occupancy_uncertainty();
  const double u_s_before = belief.mean_semantic_uncertainty();
  const Observation obs =
      render_view(gt, kGrid, frontal_view({0.4, 0.2, 0.05}), CameraModel{});
  integrate_observation(belief, obs, 4.0);
  CHECK(belief.mean_occupancy_uncertainty() < u_o_before);
  CHECK(belief.mean_semantic_uncertainty() < u_s_before);
  // Free-space semantic evidence only: no non-free class may gain mass.
  for (int r = 0; r < kGrid.rows; ++r)
    for (int c = 0; c < kGrid.cols; ++c) {
      const auto sem = belief.semantic(r, c);
      for (int n = 1; n < kGrid.n_classes; ++n) CHECK(sem[n] == 1.0);
    }
}

TEST_CASE("integrating twice equals integrating once with double weight") {
  const Scene s = box_scene({make_box(0, 4, 0.08, 0.08, 0.12, {0.35, 0.2})});
  const GroundTruthMaps gt = ground_truth_maps(s, kGrid);
  const Observation obs =
      render_view(gt, kGrid, frontal_view({0.35, 0.2, 0.06}), CameraModel{});
  BeliefState twice(kGrid), once(kGrid);
  integrate_observation(twice, obs, 2.0);
  integrate_observation(twice, obs, 2.0);
  integrate_observation(once, obs, 4.0);
  CHECK(twice == once);
}

TEST_CASE("repeated renders converge hit cells above 0.99") {
  const Scene s = box_scene({make_box(0, 4, 0.08, 0.08, 0.12, {0.35, 0.2})});
  const GroundTruthMaps gt = ground_truth_maps(s, kGrid);
  const Observation obs =
      render_view(gt, kGrid, frontal_view({0.35, 0.2, 0.06}), CameraModel{});
  BeliefState belief(kGrid);
  for (int i = 0; i < 100; ++i) integrate_observation(belief, obs, 1.0);
  for (const RayRecord& r : obs.rays) {
    if (!r.hit) continue;
    CHECK(beta_mean(belief.occupancy(r.hit_voxel.r, r.hit_voxel.c, r.hit_voxel.k)) >
          0.99);
  }
}

TEST_CASE("visible set equals traversed plus hit voxels on ground truth") {
  const Scene s = generate_scene(57, 18, kShelf, default_catalog());
  const GroundTruthMaps gt = ground_truth_maps(s, kGrid);
  const CameraModel cam = CameraModel{}.with_rays(24, 18);
  const ViewPose pose = frontal_view({0.33, 0.22, 0.07});
  const Observation obs = render_view(gt, kGrid, pose, cam);
  std::set<VoxelIdx> from_render;
  for (const RayRecord& r : obs.rays) {
    for (const VoxelIdx v : r.traversed) from_render.insert(v);
    if (r.hit) from_render.insert(r.hit_voxel);
  }
  const auto visible = visible_voxel_set(gt, kGrid, pose, cam);
  const std::set<VoxelIdx> from_visible(visible.begin(), visible.end());
  CHECK(from_render == from_visible);
}

TEST_CASE("visible set respects belief occlusion") {
  BeliefState belief(kGrid);
  // Confidently occupied wall across the shelf at rows 19..21.
  for (int r = 19; r <= 21; ++r)
    for (int c = 0; c < kGrid.cols; ++c)
      for (int k = 0; k < 30; ++k)
        belief.fuse_occupancy_at(r, c, k, OccEvidence::hit, 50.0);
  const CameraModel cam = CameraModel{}.with_rays(24, 18);
  const ViewPose pose{{0.4, -0.15, 0.05}, {0.4, 0.2, 0.05}};
  const auto visible = visible_voxel_set(belief, 0.87, pose, cam);
  for (const VoxelIdx v : visible) {
    if (v.k < 30) CHECK(v.r <= 21);
  }
  // At the prior everything in the frustum is reachable.
  BeliefState open(kGrid);
  const auto visible_open = visible_voxel_set(open, 0.87, pose, cam);
  CHECK(visible_open.size() > visible.size());
  int behind = 0;
  for (const VoxelIdx v : visible_open)
    if (v.r > 21 && v.k < 30) ++behind;
  CHECK(behind > 0);
}

TEST_CASE("a 40-view sweep maps a simple scene accurately") {
  const Scene s = box_scene({make_box(0, 3, 0.1, 0.08, 0.14, {0.25, 0.2}),
                             make_box(1, 6, 0.08, 0.08, 0.1, {0.55, 0.25})});
  const GroundTruthMaps gt = ground_truth_maps(s, kGrid);
  BeliefState belief(kGrid);
  const CameraModel cam;
  for (int i = 0; i < 40; ++i) {
    const double x = 0.05 + 0.70 * (i % 8) / 7.0;
    const double z = 0.04 + 0.12 * (i / 8) / 4.0;
    const ViewPose pose{{x, -0.12, z}, {0.785 - x * 0.6, 0.25, 0.05}};
    const Observation obs = render_view(gt, kGrid, pose, cam);
    integrate_observation(belief, obs, 4.0);
  }
  // Occupancy IoU over {occupied, free} on the extruded thresholded belief
  // (columns filled to their topmost confident voxel).
  const Grid2<double> height = belief.project_height_map(0.87);
  long inter[2] = {0, 0}, uni[2] = {0, 0};
  for (int r = 0; r < kGrid.rows; ++r)
    for (int c = 0; c < kGrid.cols; ++c)
      for (int k = 0; k < kGrid.levels; ++k) {
        const int p = (k + 0.5) * kGrid.resolution < height.at(r, c) ? 1 : 0;
        const int g = gt.occupancy.at(r, c, k) ? 1 : 0;
        if (p == 1 || g == 1) ++uni[1];
        if (p == 1 && g == 1) ++inter[1];
        if (p == 0 || g == 0) ++uni[0];
        if (p == 0 && g == 0) ++inter[0];
      }
  const double iou_free = static_cast<double>(inter[0]) / uni[0];
  const double iou_occ = static_cast<double>(inter[1]) / uni[1];
  const double miou = 0.5 * (iou_free + iou_occ);
  // Pilot value for this fixture is ~0.58: fusion-only mapping confirms the
  // faces a front-of-shelf camera can see, not full object volumes. The
  // threshold is pinned just below the observed pilot value.
  CHECK(miou >= 0.55);
  CHECK(iou_free >= 0.95);
}
