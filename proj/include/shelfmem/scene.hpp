#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "shelfmem/geometry.hpp"
#include "shelfmem/grid.hpp"

namespace shelfmem {

enum class FootprintShape : std::uint8_t { box = 0, cylinder = 1 };

/// Cylinders are represented as regular 16-gons for all geometric queries.
inline constexpr int kCylinderSides = 16;

struct SceneObject {
  int id = 0;
  int cls = 1;
  FootprintShape shape = FootprintShape::box;
  double dim_a = 0.05;  // box: full width; cylinder: radius
  double dim_b = 0.05;  // box: full depth; cylinder: unused
  double height = 0.1;
  Vec2 position;  // footprint center, shelf frame (x width, y depth from front)
  double yaw = 0.0;
  bool fallen = false;

  ConvexPolygon footprint() const;
  double footprint_area() const;
};

/// Shelf interior dimensions. The front face (y = 0) is open; the other
/// sides are walls of the given thickness.
struct ShelfSpec {
  double width = 0.785;
  double depth = 0.41;
  double height = 0.2;
  double wall_thickness = 0.02;

  Aabb2 interior() const { return {{0.0, 0.0}, {width, depth}}; }
  friend bool operator==(const ShelfSpec&, const ShelfSpec&) = default;
};

struct Scene {
  ShelfSpec shelf;
  std::vector<SceneObject> objects;
  std::uint64_t seed = 0;

  const SceneObject* find(int id) const;

  /// Objects still standing on the shelf.
  std::vector<const SceneObject*> active_objects() const;

  std::string to_json_string() const;  // canonical (sorted keys, sorted ids)
  static Scene from_json_string(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static Scene load(const std::filesystem::path& path);
};

struct GroundTruthMaps {
  Grid3<std::uint8_t> occupancy;  // 1 = inside an object's extruded footprint
  Grid2<int> semantics;           // class of the covering object, 0 = free
  Grid2<int> object_ids;          // covering object id, -1 = none
};

GroundTruthMaps ground_truth_maps(const Scene& scene, const GridSpec& grid);

/// A push in the shelf plane: the pusher travels from `start` along
/// `direction` for `length` meters.
struct PushCandidate {
  Vec2 start;
  Vec2 direction;  // unit
  double length = 0.0;
  int target_object = -1;   // belief-segment id the sampler aimed at
  double predicted_vig = 0.0;
};

struct PushOutcome {
  int pushed_object = -1;  // scene object actually contacted, -1 if none
  std::map<int, Vec2> displacements;
  std::set<int> fallen;
  int secondary_contacts = 0;

  double total_displacement() const;
};

struct PushDynamicsConfig {
  double tip_threshold = 0.15;  // forced clearance above this marks a fall
  int chain_depth = 4;
  double clear_margin = 1e-4;
};

/// Quasi-static push: the contacted object translates by the push length;
/// objects in the swept path are chained aside just far enough to clear.
/// Pure - returns the evolved scene. Throws ContractError when the start
/// point lies inside a footprint or the length is not positive.
std::pair<Scene, PushOutcome> apply_push(const Scene& scene,
                                         const PushCandidate& push,
                                         const PushDynamicsConfig& cfg);

inline bool check_termination_fall(const PushOutcome& o) {
  return !o.fallen.empty();
}

}  // namespace shelfmem
