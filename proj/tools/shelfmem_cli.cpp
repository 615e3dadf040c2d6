// Command-line front end. Talks to the library exclusively through the C API
// in shelfmem.h.

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "shelfmem.h"

namespace {

// Exit codes: 0 ok, 1 config error, 2 run failure, 3 replay mismatch.
int exit_code(shelfmem_status s) {
  switch (s) {
    case SHELFMEM_OK: return 0;
    case SHELFMEM_ERR_CONFIG: return 1;
    case SHELFMEM_ERR_REPLAY_MISMATCH: return 3;
    default: return 2;
  }
}

int finish(shelfmem_status s, const std::string& verb) {
  if (s != SHELFMEM_OK) {
    std::fprintf(stderr, "shelfmem %s failed: %s\n", verb.c_str(),
                 shelfmem_last_error());
  }
  return exit_code(s);
}

struct ConfigHandle {
  shelfmem_config* cfg = nullptr;
  ~ConfigHandle() { shelfmem_config_free(cfg); }
};

shelfmem_status load_config(const std::string& path, ConfigHandle& handle) {
  if (path.empty()) return shelfmem_config_default(&handle.cfg);
  return shelfmem_config_load(path.c_str(), &handle.cfg);
}

shelfmem_status apply_overrides(shelfmem_config* cfg, const std::string& method,
                                int workers, long long seed_offset) {
  shelfmem_status s = SHELFMEM_OK;
  if (!method.empty())
    s = shelfmem_config_set(cfg, "/run/method", ("\"" + method + "\"").c_str());
  if (s == SHELFMEM_OK && workers > 0)
    s = shelfmem_config_set(cfg, "/run/workers", std::to_string(workers).c_str());
  if (s == SHELFMEM_OK && seed_offset > 0)
    s = shelfmem_config_set(cfg, "/run/seed_offset",
                            std::to_string(seed_offset).c_str());
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shelf-world mapping and manipulation-enhanced planning"};
  app.require_subcommand(1);

  std::string config_path;
  const char* env_cfg = std::getenv("SHELFMEM_CONFIG");
  if (env_cfg) config_path = env_cfg;

  std::string out_dir = "out";
  std::string scenes_dir;
  std::string method;
  int workers = 0;
  long long seed_offset = 0;

  app.add_option("--config", config_path,
                 "experiment config JSON (env SHELFMEM_CONFIG sets the default)");

  auto* gen = app.add_subcommand("generate", "write canonical scene files per seed");
  gen->add_option("--out", out_dir, "output directory");
  gen->add_option("--seed-offset", seed_offset, "shift the configured seed range");

  auto* run = app.add_subcommand("run", "run episodes over a scene batch");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--scenes", scenes_dir, "scene directory (default <out>/scenes)");
  run->add_option("--method", method,
                  "informed-push | random-push | view-only | random-view");
  run->add_option("--workers", workers, "parallel scenes");
  run->add_option("--seed-offset", seed_offset, "shift the configured seed range");

  auto* cmp = app.add_subcommand("compare", "run every configured method on one batch");
  cmp->add_option("--out", out_dir, "output directory");
  cmp->add_option("--scenes", scenes_dir, "scene directory (default <out>/scenes)");
  cmp->add_option("--workers", workers, "parallel scenes");
  cmp->add_option("--seed-offset", seed_offset, "shift the configured seed range");

  std::string log_path, scene_path;
  auto* rep = app.add_subcommand("replay", "re-execute a logged episode and verify it");
  rep->add_option("--log", log_path, "episode JSON-lines log")->required();
  rep->add_option("--scene", scene_path, "scene file the episode ran on")->required();

  CLI11_PARSE(app, argc, argv);

  ConfigHandle handle;
  shelfmem_status s = load_config(config_path, handle);
  if (s != SHELFMEM_OK) return finish(s, "config");
  s = apply_overrides(handle.cfg, method, workers, seed_offset);
  if (s != SHELFMEM_OK) return finish(s, "config");
  s = shelfmem_config_validate(handle.cfg);
  if (s != SHELFMEM_OK) return finish(s, "config");

  if (scenes_dir.empty()) scenes_dir = out_dir + "/scenes";

  if (gen->parsed()) {
    s = shelfmem_cmd_generate(handle.cfg, (out_dir + "/scenes").c_str());
    if (s == SHELFMEM_OK) std::printf("scenes written to %s/scenes\n", out_dir.c_str());
    return finish(s, "generate");
  }
  if (run->parsed()) {
    s = shelfmem_cmd_run(handle.cfg, scenes_dir.c_str(), (out_dir + "/runs").c_str());
    if (s == SHELFMEM_OK) std::printf("runs written to %s/runs\n", out_dir.c_str());
    return finish(s, "run");
  }
  if (cmp->parsed()) {
    s = shelfmem_cmd_compare(handle.cfg, scenes_dir.c_str(),
                             (out_dir + "/compare").c_str());
    if (s == SHELFMEM_OK)
      std::printf("comparison written to %s/compare\n", out_dir.c_str());
    return finish(s, "compare");
  }
  if (rep->parsed()) {
    s = shelfmem_cmd_replay(handle.cfg, log_path.c_str(), scene_path.c_str());
    if (s == SHELFMEM_OK)
      std::printf("replay ok: %s\n", log_path.c_str());
    else if (s == SHELFMEM_ERR_REPLAY_MISMATCH)
      std::fprintf(stderr, "replay mismatch: %s\n", shelfmem_last_error());
    return finish(s, "replay");
  }
  return 0;
}
