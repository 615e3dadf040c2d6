#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shelfmem/push_sampling.hpp"
#include "shelfmem/scene_gen.hpp"
#include "shelfmem/view_planning.hpp"

namespace shelfmem {

enum class Method { informed_push, random_push, view_only, random_view };

Method method_from_string(const std::string& name);
std::string method_to_string(Method m);

struct PlannerConfig {
  double delta_view = 2.0;
  int action_budget = 40;
  double completion_certainty = 0.99;
  bool tof_enabled = false;
  double occ_certainty_floor = 0.005;  // variance below this is "resolved"
};

/// Whole-experiment settings, loaded from a versioned JSON file. validate()
/// throws ConfigError naming the offending field.
struct ExperimentConfig {
  int version = 1;

  struct SceneBlock {
    std::uint64_t seed_start = 1;
    int seed_count = 25;
    int n_objects_min = 15;
    int n_objects_max = 30;
    ShelfSpec shelf;
    SceneGenConfig gen = default_catalog();
  } scene;

  GridSpec grid;

  struct CameraBlock {
    CameraModel model;
    double fusion_weight = 4.0;
    int vig_rays_x = 32;
    int vig_rays_y = 24;
  } camera;

  struct ViewBlock {
    ActionBoxes boxes;
    NbvParams nbv;
    VigParams vig;
    double theta_occ = 0.87;
  } view;

  RewardConfig reward;
  PushConfig push;
  PlannerConfig planner;
  PushDynamicsConfig dynamics;

  struct RunBlock {
    std::string method = "informed-push";
    std::vector<std::string> compare_methods = {"informed-push", "random-push",
                                                "view-only", "random-view"};
    int workers = 1;
    std::string out_dir = "out";
    bool dump_maps = false;
    std::uint64_t seed_offset = 0;
  } run;

  CameraModel vig_camera() const {
    return camera.model.with_rays(camera.vig_rays_x, camera.vig_rays_y);
  }

  void validate() const;
  std::string to_json_string() const;
  static ExperimentConfig from_json_string(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Applies a JSON-pointer override, e.g. ("/run/method", "\"view-only\"").
  void set_override(const std::string& json_pointer, const std::string& json_value);
};

}  // namespace shelfmem
