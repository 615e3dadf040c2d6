#include "shelfmem/scene.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "shelfmem/errors.hpp"

namespace shelfmem {

ConvexPolygon SceneObject::footprint() const {
  if (shape == FootprintShape::cylinder)
    return ConvexPolygon::regular(position, dim_a, kCylinderSides);
  return ConvexPolygon::rectangle(position, dim_a / 2.0, dim_b / 2.0, yaw);
}

double SceneObject::footprint_area() const { return footprint().area(); }

const SceneObject* Scene::find(int id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

std::vector<const SceneObject*> Scene::active_objects() const {
  std::vector<const SceneObject*> out;
  for (const auto& o : objects)
    if (!o.fallen) out.push_back(&o);
  return out;
}

namespace {

nlohmann::json object_to_json(const SceneObject& o) {
  return {{"id", o.id},
          {"class", o.cls},
          {"shape", o.shape == FootprintShape::box ? "box" : "cylinder"},
          {"dim_a", o.dim_a},
          {"dim_b", o.dim_b},
          {"height", o.height},
          {"x", o.position.x},
          {"y", o.position.y},
          {"yaw", o.yaw},
          {"fallen", o.fallen}};
}

SceneObject object_from_json(const nlohmann::json& j) {
  SceneObject o;
  o.id = j.at("id").get<int>();
  o.cls = j.at("class").get<int>();
  o.shape = j.at("shape").get<std::string>() == "cylinder" ? FootprintShape::cylinder
                                                           : FootprintShape::box;
  o.dim_a = j.at("dim_a").get<double>();
  o.dim_b = j.at("dim_b").get<double>();
  o.height = j.at("height").get<double>();
  o.position = {j.at("x").get<double>(), j.at("y").get<double>()};
  o.yaw = j.at("yaw").get<double>();
  o.fallen = j.value("fallen", false);
  return o;
}

}  // namespace

std::string Scene::to_json_string() const {
  nlohmann::json j;
  j["shelf"] = {{"width", shelf.width},
                {"depth", shelf.depth},
                {"height", shelf.height},
                {"wall_thickness", shelf.wall_thickness}};
  j["seed"] = seed;
  auto sorted = objects;
  std::sort(sorted.begin(), sorted.end(),
            [](const SceneObject& a, const SceneObject& b) { return a.id < b.id; });
  j["objects"] = nlohmann::json::array();
  for (const auto& o : sorted) j["objects"].push_back(object_to_json(o));
  return j.dump(2) + "\n";
}

Scene Scene::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("scene parse error: ") + e.what());
  }
  Scene s;
  const auto& sh = j.at("shelf");
  s.shelf.width = sh.at("width").get<double>();
  s.shelf.depth = sh.at("depth").get<double>();
  s.shelf.height = sh.at("height").get<double>();
  s.shelf.wall_thickness = sh.at("wall_thickness").get<double>();
  s.seed = j.value("seed", std::uint64_t{0});
  for (const auto& oj : j.at("objects")) s.objects.push_back(object_from_json(oj));
  return s;
}

void Scene::save(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << to_json_string();
  if (!f) throw IoError("write failed: " + path.string());
}

Scene Scene::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return from_json_string(text);
}

GroundTruthMaps ground_truth_maps(const Scene& scene, const GridSpec& grid) {
  GroundTruthMaps maps{Grid3<std::uint8_t>(grid.rows, grid.cols, grid.levels, 0),
                       Grid2<int>(grid.rows, grid.cols, 0),
                       Grid2<int>(grid.rows, grid.cols, -1)};
  const double res = grid.resolution;
  for (const auto& o : scene.objects) {
    if (o.fallen) continue;
    const ConvexPolygon foot = o.footprint();
    const Aabb2 bb = foot.bounds();
    const int c0 = std::max(0, static_cast<int>(std::floor(bb.lo.x / res)));
    const int c1 = std::min(grid.cols - 1, static_cast<int>(std::floor(bb.hi.x / res)));
    const int r0 = std::max(0, static_cast<int>(std::floor(bb.lo.y / res)));
    const int r1 = std::min(grid.rows - 1, static_cast<int>(std::floor(bb.hi.y / res)));
    // A voxel belongs to the object when its center lies inside the extruded
    // footprint.
    int kmax = 0;
    while (kmax < grid.levels && (kmax + 0.5) * res < o.height) ++kmax;
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const Vec2 center{(c + 0.5) * res, (r + 0.5) * res};
        if (!foot.contains(center)) continue;
        maps.semantics.at(r, c) = o.cls;
        maps.object_ids.at(r, c) = o.id;
        for (int k = 0; k < kmax; ++k) maps.occupancy.at(r, c, k) = 1;
      }
    }
  }
  return maps;
}

double PushOutcome::total_displacement() const {
  double s = 0.0;
  for (const auto& [id, d] : displacements) s += norm(d);
  return s;
}

namespace {

struct Motion {
  int id;
  ConvexPolygon from;
  double distance;
  int depth;
};

bool footprint_inside(const ConvexPolygon& poly, const ShelfSpec& shelf) {
  const Aabb2 interior = shelf.interior();
  for (const auto& v : poly.vertices())
    if (!interior.contains(v)) return false;
  return true;
}

}  // namespace

std::pair<Scene, PushOutcome> apply_push(const Scene& scene,
                                         const PushCandidate& push,
                                         const PushDynamicsConfig& cfg) {
  if (!(push.length > 0.0)) throw ContractError("apply_push: length must be > 0");
  const Vec2 dir = normalized(push.direction);
  PushOutcome outcome;
  Scene next = scene;

  std::map<int, ConvexPolygon> feet;
  for (const auto& o : next.objects) {
    if (o.fallen) continue;
    const ConvexPolygon f = o.footprint();
    if (f.contains(push.start))
      throw ContractError("apply_push: start point inside object footprint");
    feet.emplace(o.id, f);
  }

  // Resolve the contacted object: first footprint the pusher segment enters.
  double best_t = std::numeric_limits<double>::infinity();
  int target_id = -1;
  for (const auto& [id, f] : feet) {
    const double t = ray_polygon_entry(push.start, dir, push.length, f);
    if (t < best_t) {
      best_t = t;
      target_id = id;
    }
  }
  outcome.pushed_object = target_id;
  if (target_id < 0) return {next, outcome};  // pushed through empty space

  std::map<int, double> forced;  // largest single clearance step per object
  std::deque<Motion> queue;
  {
    const ConvexPolygon& from = feet.at(target_id);
    const Vec2 delta = dir * push.length;
    queue.push_back({target_id, from, push.length, 0});
    outcome.displacements[target_id] = delta;
    feet[target_id] = from.translated(delta);
  }

  // An object is contacted when the mover's time of impact falls within its
  // travel distance; it then translates along the push direction just far
  // enough to clear the mover's swept footprint, chained up to the
  // configured depth.
  while (!queue.empty()) {
    const Motion m = queue.front();
    queue.pop_front();
    if (m.depth >= cfg.chain_depth) continue;
    const ConvexPolygon swept = swept_hull(m.from, dir * m.distance);
    for (auto& [id, f] : feet) {
      if (id == m.id) continue;
      const auto impact = sweep_overlap_interval(m.from, dir, f);
      if (!impact) continue;
      const auto [enter, exit] = *impact;
      // Strictly positive impact time: every motion shares the push
      // direction, so anything overlapping at s <= 0 sits behind the mover
      // (or in its vacated space) and is not contacted.
      if (enter <= 1e-12 || enter > m.distance) continue;
      const double s = clearance_along(f, dir, swept);
      if (s <= 0.0) continue;
      const double step = s + cfg.clear_margin;
      forced[id] = std::max(forced[id], step);
      outcome.displacements[id] =
          (outcome.displacements.count(id) ? outcome.displacements[id] : Vec2{}) +
          dir * step;
      queue.push_back({id, f, step, m.depth + 1});
      f = f.translated(dir * step);
    }
  }

  for (const auto& [id, d] : outcome.displacements)
    if (id != target_id) ++outcome.secondary_contacts;

  for (auto& o : next.objects) {
    if (o.fallen) continue;
    const auto it = outcome.displacements.find(o.id);
    if (it == outcome.displacements.end()) continue;
    o.position = o.position + it->second;
    const bool crossed = !footprint_inside(feet.at(o.id), next.shelf);
    const bool tipped =
        o.id != target_id && forced.count(o.id) && forced.at(o.id) > cfg.tip_threshold;
    if (crossed || tipped) {
      o.fallen = true;
      outcome.fallen.insert(o.id);
    }
  }
  return {next, outcome};
}

}  // namespace shelfmem
