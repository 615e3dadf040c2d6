#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "shelfmem/scene.hpp"

namespace shelfmem {

struct CatalogTemplate {
  int cls = 1;
  FootprintShape shape = FootprintShape::box;
  double min_a = 0.04, max_a = 0.08;  // box: width range; cylinder: radius range
  double min_b = 0.04, max_b = 0.08;  // box: depth range
  double min_h = 0.06, max_h = 0.16;
};

/// Fixed object placed first (e.g. a wide box near the front that fully
/// occludes the region behind it). Used by occlusion-heavy scenarios.
struct FixedPlacement {
  SceneObject object;
  bool random_x = false;  // keep y/yaw, draw x uniformly inside bounds
};

struct SceneGenConfig {
  std::vector<CatalogTemplate> catalog;
  int max_attempts_per_object = 400;
  double min_gap = 0.004;      // meters between footprints at placement time
  double edge_margin = 0.005;  // meters from shelf interior bounds
  std::optional<FixedPlacement> place_first;
};

SceneGenConfig default_catalog();

/// Deterministic rejection-sampled shelf scene. Objects with footprint area
/// above the sample median draw their depth from a front-weighted triangular
/// distribution, the rest from a back-weighted one. Throws SceneGenError
/// (naming the seed) when placement exhausts the attempt budget.
Scene generate_scene(std::uint64_t seed, int n_objects, const ShelfSpec& shelf,
                     const SceneGenConfig& cfg);

}  // namespace shelfmem
