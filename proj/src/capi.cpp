#include "shelfmem.h"

#include <cstring>
#include <string>

#include "shelfmem/episode_io.hpp"
#include "shelfmem/errors.hpp"
#include "shelfmem/harness.hpp"
#include "shelfmem/scene_gen.hpp"

using namespace shelfmem;

struct shelfmem_config {
  ExperimentConfig cfg;
};

struct shelfmem_scene {
  Scene scene;
};

struct shelfmem_episode {
  EpisodeLog log;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

shelfmem_status classify(const std::exception& e) {
  set_error(e.what());
  if (dynamic_cast<const ConfigError*>(&e)) return SHELFMEM_ERR_CONFIG;
  if (dynamic_cast<const ReplayMismatchError*>(&e)) return SHELFMEM_ERR_REPLAY_MISMATCH;
  if (dynamic_cast<const IoError*>(&e)) return SHELFMEM_ERR_IO;
  if (dynamic_cast<const ContractError*>(&e)) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return SHELFMEM_ERR_RUN;
}

template <typename Fn>
shelfmem_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SHELFMEM_OK;
  } catch (const std::exception& e) {
    return classify(e);
  } catch (...) {
    set_error("unknown error");
    return SHELFMEM_ERR_RUN;
  }
}

}  // namespace

extern "C" {

const char* shelfmem_version(void) { return "0.1.0"; }

const char* shelfmem_last_error(void) { return g_last_error.c_str(); }

shelfmem_status shelfmem_config_default(shelfmem_config** out) {
  if (!out) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] { *out = new shelfmem_config{ExperimentConfig{}}; });
}

shelfmem_status shelfmem_config_load(const char* path, shelfmem_config** out) {
  if (!path || !out) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] { *out = new shelfmem_config{ExperimentConfig::load(path)}; });
}

shelfmem_status shelfmem_config_save(const shelfmem_config* cfg, const char* path) {
  if (!cfg || !path) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] { cfg->cfg.save(path); });
}

shelfmem_status shelfmem_config_set(shelfmem_config* cfg, const char* json_pointer,
                                    const char* json_value) {
  if (!cfg || !json_pointer || !json_value) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] { cfg->cfg.set_override(json_pointer, json_value); });
}

shelfmem_status shelfmem_config_validate(const shelfmem_config* cfg) {
  if (!cfg) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] { cfg->cfg.validate(); });
}

void shelfmem_config_free(shelfmem_config* cfg) { delete cfg; }

shelfmem_status shelfmem_scene_generate(const shelfmem_config* cfg, uint64_t seed,
                                        shelfmem_scene** out) {
  if (!cfg || !out) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    Rng rng(Rng::mix(seed, 0xc0u));
    const int n =
        rng.uniform_int(cfg->cfg.scene.n_objects_min, cfg->cfg.scene.n_objects_max);
    *out = new shelfmem_scene{
        generate_scene(seed, n, cfg->cfg.scene.shelf, cfg->cfg.scene.gen)};
  });
}

shelfmem_status shelfmem_scene_load(const char* path, shelfmem_scene** out) {
  if (!path || !out) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] { *out = new shelfmem_scene{Scene::load(path)}; });
}

shelfmem_status shelfmem_scene_save(const shelfmem_scene* scene, const char* path) {
  if (!scene || !path) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] { scene->scene.save(path); });
}

int shelfmem_scene_object_count(const shelfmem_scene* scene) {
  return scene ? static_cast<int>(scene->scene.objects.size()) : -1;
}

void shelfmem_scene_free(shelfmem_scene* scene) { delete scene; }

shelfmem_status shelfmem_episode_run(const shelfmem_config* cfg,
                                     const shelfmem_scene* scene, const char* method,
                                     uint64_t planner_seed, shelfmem_episode** out) {
  if (!cfg || !scene || !method || !out) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    cfg->cfg.validate();
    const Method m = method_from_string(method);
    *out = new shelfmem_episode{run_episode(scene->scene, cfg->cfg, m, planner_seed)};
  });
}

int shelfmem_episode_step_count(const shelfmem_episode* ep) {
  return ep ? static_cast<int>(ep->log.steps.size()) : -1;
}

int shelfmem_episode_push_count(const shelfmem_episode* ep) {
  return ep ? ep->log.num_pushes() : -1;
}

const char* shelfmem_episode_terminal_reason(const shelfmem_episode* ep) {
  return ep ? ep->log.terminal_reason.c_str() : "";
}

shelfmem_status shelfmem_episode_metric(const shelfmem_episode* ep, const char* name,
                                        double* out) {
  if (!ep || !name || !out) return SHELFMEM_ERR_INVALID_ARGUMENT;
  const std::string key = name;
  if (key == "occ_miou")
    *out = ep->log.final_occ_miou;
  else if (key == "sem_miou")
    *out = ep->log.final_sem_miou;
  else if (key == "certainty")
    *out = ep->log.final_certainty;
  else if (key == "total_displacement")
    *out = ep->log.total_displacement();
  else {
    set_error("unknown metric name: " + key);
    return SHELFMEM_ERR_INVALID_ARGUMENT;
  }
  return SHELFMEM_OK;
}

shelfmem_status shelfmem_episode_save_log(const shelfmem_episode* ep, const char* path) {
  if (!ep || !path) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] { write_episode_log(ep->log, path); });
}

void shelfmem_episode_free(shelfmem_episode* ep) { delete ep; }

shelfmem_status shelfmem_cmd_generate(const shelfmem_config* cfg, const char* out_dir) {
  if (!cfg || !out_dir) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] { cmd_generate(cfg->cfg, out_dir); });
}

shelfmem_status shelfmem_cmd_run(const shelfmem_config* cfg, const char* scene_dir,
                                 const char* out_dir) {
  if (!cfg || !scene_dir || !out_dir) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const BatchResult batch = cmd_run(cfg->cfg, scene_dir, out_dir);
    if (!batch.failures.empty()) {
      std::string msg = "batch completed with failures:";
      for (const auto& f : batch.failures) msg += "\n  " + f;
      throw Error(msg);
    }
  });
}

shelfmem_status shelfmem_cmd_compare(const shelfmem_config* cfg, const char* scene_dir,
                                     const char* out_dir) {
  if (!cfg || !scene_dir || !out_dir) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] { cmd_compare(cfg->cfg, scene_dir, out_dir); });
}

shelfmem_status shelfmem_cmd_replay(const shelfmem_config* cfg, const char* log_path,
                                    const char* scene_path) {
  if (!cfg || !log_path || !scene_path) return SHELFMEM_ERR_INVALID_ARGUMENT;
  return guarded([&] {
    const ReplayVerdict v = cmd_replay(cfg->cfg, log_path, scene_path);
    if (!v.ok) throw ReplayMismatchError(v.detail);
    set_error("");
  });
}

}  // extern "C"
