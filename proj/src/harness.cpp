#include "shelfmem/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include "shelfmem/episode_io.hpp"
#include "shelfmem/errors.hpp"
#include "shelfmem/pgm.hpp"
#include "shelfmem/scene_gen.hpp"

namespace shelfmem {

namespace fs = std::filesystem;

namespace {

std::string scene_filename(std::uint64_t seed) {
  return "scene_" + std::to_string(seed) + ".json";
}

std::vector<std::uint64_t> configured_seeds(const ExperimentConfig& cfg) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < cfg.scene.seed_count; ++i)
    seeds.push_back(cfg.scene.seed_start + cfg.run.seed_offset + i);
  return seeds;
}

}  // namespace

std::vector<fs::path> cmd_generate(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  std::vector<fs::path> paths;
  for (const std::uint64_t seed : configured_seeds(cfg)) {
    Rng rng(Rng::mix(seed, 0xc0u));
    const int n = rng.uniform_int(cfg.scene.n_objects_min, cfg.scene.n_objects_max);
    const Scene scene = generate_scene(seed, n, cfg.scene.shelf, cfg.scene.gen);
    const fs::path path = out_dir / scene_filename(seed);
    scene.save(path);
    paths.push_back(path);
  }
  return paths;
}

std::vector<EpisodeLog> BatchResult::successful_logs() const {
  std::vector<EpisodeLog> logs;
  for (const SceneRunResult& r : scenes)
    if (r.ok) logs.push_back(r.log);
  return logs;
}

BatchResult run_batch(const ExperimentConfig& cfg, Method method,
                      const std::vector<Scene>& scenes, const fs::path& out_dir) {
  BatchResult batch;
  batch.method = method_to_string(method);
  batch.scenes.resize(scenes.size());
  if (!out_dir.empty()) fs::create_directories(out_dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= scenes.size()) return;
      SceneRunResult& r = batch.scenes[i];
      r.seed = scenes[i].seed;
      try {
        const std::uint64_t planner_seed =
            Rng::mix(scenes[i].seed, static_cast<std::uint64_t>(method) + 1);
        std::string dump_dir;
        if (cfg.run.dump_maps && !out_dir.empty())
          dump_dir = (out_dir / ("panels_" + std::to_string(r.seed))).string();
        r.log = run_episode(scenes[i], cfg, method, planner_seed, nullptr, dump_dir);
        if (r.log.terminal_reason == "error") {
          r.ok = false;
          r.error = r.log.error;
        } else {
          r.ok = true;
        }
        if (!out_dir.empty()) {
          const std::string stem = "episode_" + std::to_string(r.seed);
          write_episode_log(r.log, out_dir / (stem + ".jsonl"));
          write_timing_csv(r.log, out_dir / (stem + "_timing.csv"));
        }
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      }
    }
  };

  const int workers = std::max(1, std::min<int>(cfg.run.workers,
                                                static_cast<int>(scenes.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const SceneRunResult& r : batch.scenes)
    if (!r.ok)
      batch.failures.push_back("seed " + std::to_string(r.seed) + ": " + r.error);
  const auto logs = batch.successful_logs();
  if (!logs.empty()) batch.metrics = aggregate_batch(logs);
  return batch;
}

namespace {

std::vector<Scene> load_scene_dir(const ExperimentConfig& cfg, const fs::path& scene_dir) {
  std::vector<Scene> scenes;
  for (const std::uint64_t seed : configured_seeds(cfg)) {
    const fs::path path = scene_dir / scene_filename(seed);
    if (!fs::exists(path))
      throw IoError("scene file missing: " + path.string() +
                    " (run the generate command first)");
    scenes.push_back(Scene::load(path));
  }
  return scenes;
}

void write_metrics_csv(const BatchResult& batch, const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << "seed,ok,steps,terminal_reason,occ_miou,sem_miou,certainty,num_push,"
       "total_displacement,collided\n";
  f.precision(12);
  for (const SceneRunResult& r : batch.scenes) {
    f << r.seed << ',' << (r.ok ? 1 : 0) << ',' << r.log.steps.size() << ','
      << r.log.terminal_reason << ',' << r.log.final_occ_miou << ','
      << r.log.final_sem_miou << ',' << r.log.final_certainty << ','
      << r.log.num_pushes() << ',' << r.log.total_displacement() << ','
      << (r.log.collided() ? 1 : 0) << '\n';
  }
}

}  // namespace

BatchResult cmd_run(const ExperimentConfig& cfg, const fs::path& scene_dir,
                    const fs::path& out_dir) {
  cfg.validate();
  const Method method = method_from_string(cfg.run.method);
  const std::vector<Scene> scenes = load_scene_dir(cfg, scene_dir);
  const fs::path method_dir = out_dir / cfg.run.method;
  BatchResult batch = run_batch(cfg, method, scenes, method_dir);
  write_metrics_csv(batch, method_dir / "metrics.csv");
  return batch;
}

ComparisonReport cmd_compare(const ExperimentConfig& cfg, const fs::path& scene_dir,
                             const fs::path& out_dir) {
  cfg.validate();
  if (cfg.run.compare_methods.size() < 2)
    throw ConfigError("config field 'run.compare_methods' invalid: need >= 2 methods");
  const std::vector<Scene> scenes = load_scene_dir(cfg, scene_dir);
  fs::create_directories(out_dir);

  ComparisonReport report;
  for (const Scene& s : scenes) report.seeds.push_back(s.seed);
  for (const std::string& name : cfg.run.compare_methods) {
    const Method method = method_from_string(name);
    const BatchResult batch = run_batch(cfg, method, scenes, out_dir / name);
    write_metrics_csv(batch, out_dir / name / "metrics.csv");
    MethodReport mr;
    mr.method = name;
    mr.metrics = batch.metrics;
    for (const SceneRunResult& r : batch.scenes)
      if (r.ok) mr.seeds.push_back(r.seed);
    report.methods.push_back(std::move(mr));
  }

  std::ofstream csv(out_dir / "comparison.csv", std::ios::binary);
  csv << report.to_csv();
  std::ofstream js(out_dir / "comparison.json", std::ios::binary);
  js << report.to_json_string();
  return report;
}

ReplayVerdict cmd_replay(const ExperimentConfig& cfg, const fs::path& log_path,
                         const fs::path& scene_path) {
  cfg.validate();
  const EpisodeLog logged = read_episode_log(log_path);
  const Scene scene = Scene::load(scene_path);
  if (scene.seed != logged.scene_seed)
    return {false, "scene seed " + std::to_string(scene.seed) +
                       " does not match log seed " + std::to_string(logged.scene_seed)};
  const ReplayResult r = replay_episode(scene, cfg, logged);
  if (!r.ok) return {false, r.mismatch};
  return {true, "replayed " + std::to_string(logged.steps.size()) + " steps"};
}

}  // namespace shelfmem
