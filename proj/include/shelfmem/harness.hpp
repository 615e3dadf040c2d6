#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "shelfmem/config.hpp"
#include "shelfmem/metrics.hpp"
#include "shelfmem/planner.hpp"

namespace shelfmem {

/// Writes one canonical scene file per configured seed; idempotent.
/// Returns the scene file paths in seed order.
std::vector<std::filesystem::path> cmd_generate(const ExperimentConfig& cfg,
                                                const std::filesystem::path& out_dir);

struct SceneRunResult {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  EpisodeLog log;
};

struct BatchResult {
  std::string method;
  std::vector<SceneRunResult> scenes;  // seed order
  RunMetrics metrics;                  // over successful scenes
  std::vector<std::string> failures;

  std::vector<EpisodeLog> successful_logs() const;
};

/// Runs the configured method over every scene file, isolating per-scene
/// failures. Writes one JSON-lines log and one timing CSV per scene plus a
/// metrics CSV. Scene-level parallelism follows cfg.run.workers.
BatchResult cmd_run(const ExperimentConfig& cfg,
                    const std::filesystem::path& scene_dir,
                    const std::filesystem::path& out_dir);

/// Same batch over every configured method with identical scene seeds;
/// writes comparison CSV + JSON reports.
ComparisonReport cmd_compare(const ExperimentConfig& cfg,
                             const std::filesystem::path& scene_dir,
                             const std::filesystem::path& out_dir);

struct ReplayVerdict {
  bool ok = false;
  std::string detail;
};

/// Re-executes a logged episode against its stored scene and verifies the
/// logged metrics.
ReplayVerdict cmd_replay(const ExperimentConfig& cfg,
                         const std::filesystem::path& log_path,
                         const std::filesystem::path& scene_path);

/// Runs one method over already-loaded scenes (library entry point used by
/// cmd_run/cmd_compare and by tests). Log files are written under out_dir
/// when it is non-empty.
BatchResult run_batch(const ExperimentConfig& cfg, Method method,
                      const std::vector<Scene>& scenes,
                      const std::filesystem::path& out_dir);

}  // namespace shelfmem
