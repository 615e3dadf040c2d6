#include "shelfmem/config.hpp"

#include <fstream>

#include <json.hpp>

#include "shelfmem/errors.hpp"

namespace shelfmem {

using nlohmann::json;

Method method_from_string(const std::string& name) {
  if (name == "informed-push") return Method::informed_push;
  if (name == "random-push") return Method::random_push;
  if (name == "view-only") return Method::view_only;
  if (name == "random-view") return Method::random_view;
  throw ConfigError("unknown method: " + name);
}

std::string method_to_string(Method m) {
  switch (m) {
    case Method::informed_push: return "informed-push";
    case Method::random_push: return "random-push";
    case Method::view_only: return "view-only";
    case Method::random_view: return "random-view";
  }
  return "informed-push";
}

namespace {

json aabb3_to_json(const Aabb3& b) {
  return {{"lo", {b.lo.x, b.lo.y, b.lo.z}}, {"hi", {b.hi.x, b.hi.y, b.hi.z}}};
}

Aabb3 aabb3_from_json(const json& j) {
  const auto& lo = j.at("lo");
  const auto& hi = j.at("hi");
  return {{lo.at(0), lo.at(1), lo.at(2)}, {hi.at(0), hi.at(1), hi.at(2)}};
}

json catalog_to_json(const std::vector<CatalogTemplate>& cat) {
  json arr = json::array();
  for (const auto& t : cat) {
    arr.push_back({{"class", t.cls},
                   {"shape", t.shape == FootprintShape::box ? "box" : "cylinder"},
                   {"min_a", t.min_a},
                   {"max_a", t.max_a},
                   {"min_b", t.min_b},
                   {"max_b", t.max_b},
                   {"min_h", t.min_h},
                   {"max_h", t.max_h}});
  }
  return arr;
}

std::vector<CatalogTemplate> catalog_from_json(const json& arr) {
  std::vector<CatalogTemplate> cat;
  for (const auto& j : arr) {
    CatalogTemplate t;
    t.cls = j.at("class");
    t.shape = j.at("shape").get<std::string>() == "cylinder" ? FootprintShape::cylinder
                                                             : FootprintShape::box;
    t.min_a = j.at("min_a");
    t.max_a = j.at("max_a");
    t.min_b = j.at("min_b");
    t.max_b = j.at("max_b");
    t.min_h = j.at("min_h");
    t.max_h = j.at("max_h");
    cat.push_back(t);
  }
  return cat;
}

json object_to_json(const SceneObject& o) {
  return {{"id", o.id},
          {"class", o.cls},
          {"shape", o.shape == FootprintShape::box ? "box" : "cylinder"},
          {"dim_a", o.dim_a},
          {"dim_b", o.dim_b},
          {"height", o.height},
          {"x", o.position.x},
          {"y", o.position.y},
          {"yaw", o.yaw}};
}

SceneObject object_from_json(const json& j) {
  SceneObject o;
  o.id = j.value("id", 0);
  o.cls = j.at("class");
  o.shape = j.at("shape").get<std::string>() == "cylinder" ? FootprintShape::cylinder
                                                           : FootprintShape::box;
  o.dim_a = j.at("dim_a");
  o.dim_b = j.at("dim_b");
  o.height = j.at("height");
  o.position = {j.at("x").get<double>(), j.at("y").get<double>()};
  o.yaw = j.value("yaw", 0.0);
  return o;
}

}  // namespace

std::string ExperimentConfig::to_json_string() const {
  json j;
  j["version"] = version;
  j["scene"] = {{"seed_start", scene.seed_start},
                {"seed_count", scene.seed_count},
                {"n_objects_min", scene.n_objects_min},
                {"n_objects_max", scene.n_objects_max},
                {"shelf",
                 {{"width", scene.shelf.width},
                  {"depth", scene.shelf.depth},
                  {"height", scene.shelf.height},
                  {"wall_thickness", scene.shelf.wall_thickness}}},
                {"gen",
                 {{"catalog", catalog_to_json(scene.gen.catalog)},
                  {"max_attempts_per_object", scene.gen.max_attempts_per_object},
                  {"min_gap", scene.gen.min_gap},
                  {"edge_margin", scene.gen.edge_margin}}}};
  if (scene.gen.place_first) {
    j["scene"]["gen"]["place_first"] = {
        {"object", object_to_json(scene.gen.place_first->object)},
        {"random_x", scene.gen.place_first->random_x}};
  }
  j["grid"] = {{"rows", grid.rows},
               {"cols", grid.cols},
               {"levels", grid.levels},
               {"resolution", grid.resolution},
               {"n_classes", grid.n_classes}};
  j["camera"] = {{"fov_h_deg", camera.model.fov_h * 180.0 / M_PI},
                 {"fov_v_deg", camera.model.fov_v * 180.0 / M_PI},
                 {"rays_x", camera.model.rays_x},
                 {"rays_y", camera.model.rays_y},
                 {"max_range", camera.model.max_range},
                 {"fusion_weight", camera.fusion_weight},
                 {"vig_rays_x", camera.vig_rays_x},
                 {"vig_rays_y", camera.vig_rays_y}};
  j["view"] = {{"cam_box", aabb3_to_json(view.boxes.cam_box)},
               {"target_box", aabb3_to_json(view.boxes.target_box)},
               {"n_candidates", view.nbv.n_candidates},
               {"target_bias_prob", view.nbv.target_bias_prob},
               {"target_bias_fraction", view.nbv.target_bias_fraction},
               {"max_retries_per_candidate", view.nbv.max_retries_per_candidate},
               {"info_measure",
                view.vig.measure == VigParams::Measure::variance ? "variance" : "entropy"},
               {"info_floor", view.vig.info_floor},
               {"theta_occ", view.theta_occ}};
  j["reward"] = {{"w1", reward.w1},
                 {"w2", reward.w2},
                 {"gamma_p", reward.gamma_p},
                 {"gamma_e", reward.gamma_e},
                 {"theta_p", reward.theta_p},
                 {"theta_e", reward.theta_e},
                 {"r_feasibility", reward.r_feasibility},
                 {"n_hist", reward.n_hist}};
  j["push"] = {{"sem_uncertainty_floor", push.sem_uncertainty_floor},
               {"max_targets", push.max_targets},
               {"min_target_separation", push.min_target_separation},
               {"corridor_width_cap", push.corridor_width_cap},
               {"n_candidates", push.n_candidates},
               {"sector_angle_deg", push.sector_angle_deg},
               {"k1", push.k1},
               {"k2", push.k2},
               {"k3", push.k3},
               {"k4", push.k4},
               {"start_margin_cells", push.start_margin_cells},
               {"length_margin_cells", push.length_margin_cells},
               {"unknown_uo_fraction", push.unknown_uo_fraction},
               {"sector_disqualify_margin_cells", push.sector_disqualify_margin_cells},
               {"view_candidates", push.view_candidates}};
  j["planner"] = {{"delta_view", planner.delta_view},
                  {"action_budget", planner.action_budget},
                  {"completion_certainty", planner.completion_certainty},
                  {"tof_enabled", planner.tof_enabled},
                  {"occ_certainty_floor", planner.occ_certainty_floor}};
  j["dynamics"] = {{"tip_threshold", dynamics.tip_threshold},
                   {"chain_depth", dynamics.chain_depth},
                   {"clear_margin", dynamics.clear_margin}};
  j["run"] = {{"method", run.method},
              {"compare_methods", run.compare_methods},
              {"workers", run.workers},
              {"out_dir", run.out_dir},
              {"dump_maps", run.dump_maps},
              {"seed_offset", run.seed_offset}};
  return j.dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.version = j.value("version", 1);
    if (j.contains("scene")) {
      const auto& s = j["scene"];
      cfg.scene.seed_start = s.value("seed_start", cfg.scene.seed_start);
      cfg.scene.seed_count = s.value("seed_count", cfg.scene.seed_count);
      cfg.scene.n_objects_min = s.value("n_objects_min", cfg.scene.n_objects_min);
      cfg.scene.n_objects_max = s.value("n_objects_max", cfg.scene.n_objects_max);
      if (s.contains("shelf")) {
        const auto& sh = s["shelf"];
        cfg.scene.shelf.width = sh.value("width", cfg.scene.shelf.width);
        cfg.scene.shelf.depth = sh.value("depth", cfg.scene.shelf.depth);
        cfg.scene.shelf.height = sh.value("height", cfg.scene.shelf.height);
        cfg.scene.shelf.wall_thickness =
            sh.value("wall_thickness", cfg.scene.shelf.wall_thickness);
      }
      if (s.contains("gen")) {
        const auto& g = s["gen"];
        if (g.contains("catalog")) cfg.scene.gen.catalog = catalog_from_json(g["catalog"]);
        cfg.scene.gen.max_attempts_per_object =
            g.value("max_attempts_per_object", cfg.scene.gen.max_attempts_per_object);
        cfg.scene.gen.min_gap = g.value("min_gap", cfg.scene.gen.min_gap);
        cfg.scene.gen.edge_margin = g.value("edge_margin", cfg.scene.gen.edge_margin);
        if (g.contains("place_first")) {
          FixedPlacement fp;
          fp.object = object_from_json(g["place_first"].at("object"));
          fp.random_x = g["place_first"].value("random_x", false);
          cfg.scene.gen.place_first = fp;
        }
      }
    }
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      cfg.grid.rows = g.value("rows", cfg.grid.rows);
      cfg.grid.cols = g.value("cols", cfg.grid.cols);
      cfg.grid.levels = g.value("levels", cfg.grid.levels);
      cfg.grid.resolution = g.value("resolution", cfg.grid.resolution);
      cfg.grid.n_classes = g.value("n_classes", cfg.grid.n_classes);
    }
    if (j.contains("camera")) {
      const auto& c = j["camera"];
      if (c.contains("fov_h_deg")) cfg.camera.model.fov_h = c["fov_h_deg"].get<double>() * M_PI / 180.0;
      if (c.contains("fov_v_deg")) cfg.camera.model.fov_v = c["fov_v_deg"].get<double>() * M_PI / 180.0;
      cfg.camera.model.rays_x = c.value("rays_x", cfg.camera.model.rays_x);
      cfg.camera.model.rays_y = c.value("rays_y", cfg.camera.model.rays_y);
      cfg.camera.model.max_range = c.value("max_range", cfg.camera.model.max_range);
      cfg.camera.fusion_weight = c.value("fusion_weight", cfg.camera.fusion_weight);
      cfg.camera.vig_rays_x = c.value("vig_rays_x", cfg.camera.vig_rays_x);
      cfg.camera.vig_rays_y = c.value("vig_rays_y", cfg.camera.vig_rays_y);
    }
    if (j.contains("view")) {
      const auto& v = j["view"];
      if (v.contains("cam_box")) cfg.view.boxes.cam_box = aabb3_from_json(v["cam_box"]);
      if (v.contains("target_box"))
        cfg.view.boxes.target_box = aabb3_from_json(v["target_box"]);
      cfg.view.nbv.n_candidates = v.value("n_candidates", cfg.view.nbv.n_candidates);
      cfg.view.nbv.target_bias_prob =
          v.value("target_bias_prob", cfg.view.nbv.target_bias_prob);
      cfg.view.nbv.target_bias_fraction =
          v.value("target_bias_fraction", cfg.view.nbv.target_bias_fraction);
      cfg.view.nbv.max_retries_per_candidate =
          v.value("max_retries_per_candidate", cfg.view.nbv.max_retries_per_candidate);
      if (v.contains("info_measure"))
        cfg.view.vig.measure = v["info_measure"].get<std::string>() == "entropy"
                                   ? VigParams::Measure::entropy
                                   : VigParams::Measure::variance;
      cfg.view.vig.info_floor = v.value("info_floor", cfg.view.vig.info_floor);
      cfg.view.theta_occ = v.value("theta_occ", cfg.view.theta_occ);
      cfg.view.vig.theta_occ = cfg.view.theta_occ;
    }
    if (j.contains("reward")) {
      const auto& r = j["reward"];
      cfg.reward.w1 = r.value("w1", cfg.reward.w1);
      cfg.reward.w2 = r.value("w2", cfg.reward.w2);
      cfg.reward.gamma_p = r.value("gamma_p", cfg.reward.gamma_p);
      cfg.reward.gamma_e = r.value("gamma_e", cfg.reward.gamma_e);
      cfg.reward.theta_p = r.value("theta_p", cfg.reward.theta_p);
      cfg.reward.theta_e = r.value("theta_e", cfg.reward.theta_e);
      cfg.reward.r_feasibility = r.value("r_feasibility", cfg.reward.r_feasibility);
      cfg.reward.n_hist = r.value("n_hist", cfg.reward.n_hist);
    }
    if (j.contains("push")) {
      const auto& p = j["push"];
      cfg.push.sem_uncertainty_floor =
          p.value("sem_uncertainty_floor", cfg.push.sem_uncertainty_floor);
      cfg.push.max_targets = p.value("max_targets", cfg.push.max_targets);
      cfg.push.min_target_separation =
          p.value("min_target_separation", cfg.push.min_target_separation);
      cfg.push.corridor_width_cap =
          p.value("corridor_width_cap", cfg.push.corridor_width_cap);
      cfg.push.n_candidates = p.value("n_candidates", cfg.push.n_candidates);
      cfg.push.sector_angle_deg = p.value("sector_angle_deg", cfg.push.sector_angle_deg);
      cfg.push.k1 = p.value("k1", cfg.push.k1);
      cfg.push.k2 = p.value("k2", cfg.push.k2);
      cfg.push.k3 = p.value("k3", cfg.push.k3);
      cfg.push.k4 = p.value("k4", cfg.push.k4);
      cfg.push.start_margin_cells =
          p.value("start_margin_cells", cfg.push.start_margin_cells);
      cfg.push.length_margin_cells =
          p.value("length_margin_cells", cfg.push.length_margin_cells);
      cfg.push.unknown_uo_fraction =
          p.value("unknown_uo_fraction", cfg.push.unknown_uo_fraction);
      cfg.push.sector_disqualify_margin_cells = p.value(
          "sector_disqualify_margin_cells", cfg.push.sector_disqualify_margin_cells);
      cfg.push.view_candidates = p.value("view_candidates", cfg.push.view_candidates);
    }
    if (j.contains("planner")) {
      const auto& p = j["planner"];
      cfg.planner.delta_view = p.value("delta_view", cfg.planner.delta_view);
      cfg.planner.action_budget = p.value("action_budget", cfg.planner.action_budget);
      cfg.planner.completion_certainty =
          p.value("completion_certainty", cfg.planner.completion_certainty);
      cfg.planner.tof_enabled = p.value("tof_enabled", cfg.planner.tof_enabled);
      cfg.planner.occ_certainty_floor =
          p.value("occ_certainty_floor", cfg.planner.occ_certainty_floor);
    }
    if (j.contains("dynamics")) {
      const auto& d = j["dynamics"];
      cfg.dynamics.tip_threshold = d.value("tip_threshold", cfg.dynamics.tip_threshold);
      cfg.dynamics.chain_depth = d.value("chain_depth", cfg.dynamics.chain_depth);
      cfg.dynamics.clear_margin = d.value("clear_margin", cfg.dynamics.clear_margin);
    }
    if (j.contains("run")) {
      const auto& r = j["run"];
      cfg.run.method = r.value("method", cfg.run.method);
      if (r.contains("compare_methods"))
        cfg.run.compare_methods = r["compare_methods"].get<std::vector<std::string>>();
      cfg.run.workers = r.value("workers", cfg.run.workers);
      cfg.run.out_dir = r.value("out_dir", cfg.run.out_dir);
      cfg.run.dump_maps = r.value("dump_maps", cfg.run.dump_maps);
      cfg.run.seed_offset = r.value("seed_offset", cfg.run.seed_offset);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& field, const std::string& why) {
    if (!ok) throw ConfigError("config field '" + field + "' invalid: " + why);
  };
  require(scene.seed_count >= 1, "scene.seed_count", "must be >= 1");
  require(scene.n_objects_min >= 15, "scene.n_objects_min", "must be >= 15");
  require(scene.n_objects_max <= 30, "scene.n_objects_max", "must be <= 30");
  require(scene.n_objects_min <= scene.n_objects_max, "scene.n_objects_min",
          "must be <= n_objects_max");
  require(!scene.gen.catalog.empty(), "scene.gen.catalog", "must not be empty");
  for (const auto& t : scene.gen.catalog) {
    require(t.cls >= 1 && t.cls < grid.n_classes, "scene.gen.catalog.class",
            "must be in [1, n_classes)");
    require(t.min_a > 0 && t.min_a <= t.max_a, "scene.gen.catalog.min_a",
            "must be positive and <= max_a");
    require(t.min_h > 0 && t.min_h <= t.max_h, "scene.gen.catalog.min_h",
            "must be positive and <= max_h");
  }
  require(scene.shelf.width > 0, "scene.shelf.width", "must be > 0");
  require(scene.shelf.depth > 0, "scene.shelf.depth", "must be > 0");
  require(scene.shelf.height > 0, "scene.shelf.height", "must be > 0");
  require(grid.rows >= 8 && grid.cols >= 8, "grid.rows/cols", "must be >= 8");
  require(grid.levels >= 1, "grid.levels", "must be >= 1");
  require(grid.resolution > 0, "grid.resolution", "must be > 0");
  require(grid.n_classes >= 2, "grid.n_classes", "must be >= 2");
  require(std::abs(grid.width() - scene.shelf.width) < grid.resolution,
          "grid.cols", "grid width must match shelf width");
  require(std::abs(grid.depth() - scene.shelf.depth) < grid.resolution,
          "grid.rows", "grid depth must match shelf depth");
  require(camera.model.fov_h > 0 && camera.model.fov_h < M_PI, "camera.fov_h_deg",
          "must be in (0, 180)");
  require(camera.model.fov_v > 0 && camera.model.fov_v < M_PI, "camera.fov_v_deg",
          "must be in (0, 180)");
  require(camera.model.rays_x >= 8 && camera.model.rays_y >= 8, "camera.rays_x/rays_y",
          "must be >= 8");
  require(camera.model.max_range > 0, "camera.max_range", "must be > 0");
  require(camera.fusion_weight > 0, "camera.fusion_weight", "must be > 0");
  require(camera.vig_rays_x >= 8 && camera.vig_rays_y >= 8, "camera.vig_rays_x/y",
          "must be >= 8");
  require(view.theta_occ > 0 && view.theta_occ < 1, "view.theta_occ",
          "must be in (0, 1)");
  require(view.nbv.n_candidates >= 1, "view.n_candidates", "must be >= 1");
  require(view.vig.info_floor >= 0, "view.info_floor", "must be >= 0");
  require(reward.theta_p > 0, "reward.theta_p", "must be > 0");
  require(reward.theta_e > 0, "reward.theta_e", "must be > 0");
  require(reward.r_feasibility > 0, "reward.r_feasibility", "must be > 0");
  require(reward.n_hist >= 1, "reward.n_hist", "must be >= 1");
  require(push.sem_uncertainty_floor > 0 && push.sem_uncertainty_floor < 1,
          "push.sem_uncertainty_floor", "must be in (0, 1)");
  require(push.max_targets >= 1, "push.max_targets", "must be >= 1");
  require(push.min_target_separation > 0, "push.min_target_separation", "must be > 0");
  require(push.corridor_width_cap >= 1, "push.corridor_width_cap", "must be >= 1");
  require(push.n_candidates >= 1, "push.n_candidates", "must be >= 1");
  require(push.sector_angle_deg > 0 &&
              std::abs(std::round(360.0 / push.sector_angle_deg) -
                       360.0 / push.sector_angle_deg) < 1e-9,
          "push.sector_angle_deg", "must divide 360 evenly");
  require(push.view_candidates >= 1, "push.view_candidates", "must be >= 1");
  require(planner.delta_view >= 1, "planner.delta_view", "must be >= 1");
  require(planner.action_budget >= 1, "planner.action_budget", "must be >= 1");
  require(planner.completion_certainty > 0 && planner.completion_certainty < 1,
          "planner.completion_certainty", "must be in (0, 1)");
  require(dynamics.tip_threshold > 0, "dynamics.tip_threshold", "must be > 0");
  require(dynamics.chain_depth >= 1, "dynamics.chain_depth", "must be >= 1");
  require(run.workers >= 1, "run.workers", "must be >= 1");
  method_from_string(run.method);
  for (const auto& m : run.compare_methods) method_from_string(m);
}

void ExperimentConfig::save(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << to_json_string();
  if (!f) throw IoError("write failed: " + path.string());
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config: " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return from_json_string(text);
}

void ExperimentConfig::set_override(const std::string& json_pointer,
                                    const std::string& json_value) {
  json j;
  try {
    j = json::parse(to_json_string());
    j[json::json_pointer(json_pointer)] = json::parse(json_value);
  } catch (const json::exception& e) {
    throw ConfigError("config override '" + json_pointer + "' failed: " + e.what());
  }
  *this = from_json_string(j.dump());
}

}  // namespace shelfmem
