#include "shelfmem/scene_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "shelfmem/errors.hpp"
#include "shelfmem/rng.hpp"

namespace shelfmem {

SceneGenConfig default_catalog() {
  SceneGenConfig cfg;
  cfg.catalog = {
      {1, FootprintShape::box, 0.06, 0.10, 0.06, 0.10, 0.10, 0.18},
      {2, FootprintShape::box, 0.08, 0.12, 0.04, 0.06, 0.12, 0.19},
      {3, FootprintShape::box, 0.04, 0.07, 0.04, 0.07, 0.06, 0.12},
      {4, FootprintShape::box, 0.03, 0.05, 0.03, 0.05, 0.04, 0.08},
      {5, FootprintShape::cylinder, 0.035, 0.05, 0.0, 0.0, 0.08, 0.15},
      {6, FootprintShape::cylinder, 0.025, 0.035, 0.0, 0.0, 0.06, 0.12},
      {7, FootprintShape::cylinder, 0.015, 0.025, 0.0, 0.0, 0.08, 0.16},
      {8, FootprintShape::box, 0.05, 0.09, 0.03, 0.05, 0.08, 0.14},
      {9, FootprintShape::cylinder, 0.02, 0.03, 0.0, 0.0, 0.04, 0.09},
      {10, FootprintShape::box, 0.03, 0.06, 0.02, 0.04, 0.05, 0.10},
      {11, FootprintShape::box, 0.10, 0.16, 0.03, 0.05, 0.10, 0.17},
  };
  return cfg;
}

namespace {

struct Draft {
  SceneObject object;
  double area;
};

Draft draw_object(Rng& rng, const CatalogTemplate& t) {
  Draft d;
  d.object.cls = t.cls;
  d.object.shape = t.shape;
  d.object.dim_a = rng.uniform(t.min_a, t.max_a);
  d.object.dim_b =
      t.shape == FootprintShape::box ? rng.uniform(t.min_b, t.max_b) : 0.0;
  d.object.height = rng.uniform(t.min_h, t.max_h);
  d.area = t.shape == FootprintShape::box
               ? d.object.dim_a * d.object.dim_b
               : M_PI * d.object.dim_a * d.object.dim_a;
  return d;
}

double footprint_radius(const SceneObject& o) {
  if (o.shape == FootprintShape::cylinder) return o.dim_a;
  return 0.5 * std::hypot(o.dim_a, o.dim_b);
}

}  // namespace

Scene generate_scene(std::uint64_t seed, int n_objects, const ShelfSpec& shelf,
                     const SceneGenConfig& cfg) {
  if (cfg.catalog.empty()) throw ContractError("generate_scene: empty catalog");
  Rng rng(Rng::mix(seed, 0x5ce9e));
  Scene scene;
  scene.shelf = shelf;
  scene.seed = seed;

  std::vector<Draft> drafts;
  drafts.reserve(n_objects);
  for (int i = 0; i < n_objects; ++i) {
    const auto& t = cfg.catalog[rng.uniform_int(0, static_cast<int>(cfg.catalog.size()) - 1)];
    drafts.push_back(draw_object(rng, t));
  }

  // Median footprint area of this draw decides which objects are "large"
  // (biased to the front) and which are "small" (biased to the back).
  std::vector<double> areas;
  for (const auto& d : drafts) areas.push_back(d.area);
  std::vector<double> sorted_areas = areas;
  std::sort(sorted_areas.begin(), sorted_areas.end());
  const double median =
      n_objects % 2 == 1
          ? sorted_areas[n_objects / 2]
          : 0.5 * (sorted_areas[n_objects / 2 - 1] + sorted_areas[n_objects / 2]);

  // Place large-first: packing succeeds far more often when the bulky
  // objects claim space before the small ones fill the gaps.
  std::vector<int> order(n_objects);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return areas[a] > areas[b]; });

  std::vector<ConvexPolygon> placed;
  std::vector<SceneObject> placed_objects;

  auto try_place = [&](SceneObject obj, bool front_biased, bool fixed_pose,
                       bool random_x) -> bool {
    const double rad = footprint_radius(obj);
    const double xlo = rad + cfg.edge_margin;
    const double xhi = shelf.width - rad - cfg.edge_margin;
    const double ylo = rad + cfg.edge_margin;
    const double yhi = shelf.depth - rad - cfg.edge_margin;
    if (xlo >= xhi || ylo >= yhi) return false;
    for (int attempt = 0; attempt < cfg.max_attempts_per_object; ++attempt) {
      if (!fixed_pose) {
        obj.position.x = rng.uniform(xlo, xhi);
        obj.position.y = front_biased ? rng.triangular(ylo, ylo, yhi)
                                      : rng.triangular(ylo, yhi, yhi);
        obj.yaw = obj.shape == FootprintShape::box ? rng.uniform(0.0, M_PI) : 0.0;
      } else if (random_x) {
        obj.position.x = rng.uniform(xlo, xhi);
      }
      const ConvexPolygon foot = obj.footprint();
      bool ok = true;
      for (const auto& v : foot.vertices()) {
        if (v.x < cfg.edge_margin || v.x > shelf.width - cfg.edge_margin ||
            v.y < cfg.edge_margin || v.y > shelf.depth - cfg.edge_margin) {
          ok = false;
          break;
        }
      }
      if (ok) {
        for (const auto& other : placed) {
          if (polygon_distance(foot, other) < cfg.min_gap) {
            ok = false;
            break;
          }
        }
      }
      if (ok) {
        placed.push_back(foot);
        placed_objects.push_back(obj);
        return true;
      }
      if (fixed_pose && !random_x) return false;  // nothing to resample
    }
    return false;
  };

  int next_id = 0;
  if (cfg.place_first) {
    SceneObject first = cfg.place_first->object;
    first.id = next_id++;
    if (!try_place(first, false, true, cfg.place_first->random_x))
      throw SceneGenError("scene generation failed for seed " + std::to_string(seed) +
                          ": fixed placement does not fit");
  }

  for (const int idx : order) {
    SceneObject obj = drafts[idx].object;
    obj.id = next_id++;
    const bool front = drafts[idx].area > median;
    if (!try_place(obj, front, false, false))
      throw SceneGenError("scene generation failed for seed " + std::to_string(seed) +
                          ": could not place object " + std::to_string(obj.id) +
                          " within attempt budget");
  }

  std::sort(placed_objects.begin(), placed_objects.end(),
            [](const SceneObject& a, const SceneObject& b) { return a.id < b.id; });
  scene.objects = std::move(placed_objects);
  return scene;
}

}  // namespace shelfmem
