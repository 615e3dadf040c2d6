/* C API of the shelfmem library: shelf-world simulation, evidential mapping,
 * and manipulation-enhanced view/push planning behind opaque handles.
 *
 * All functions returning shelfmem_status report failures through the return
 * code; shelfmem_last_error() describes the most recent failure on the
 * calling thread. Every *_create/_load/_generate output handle must be
 * released with the matching *_free.
 */
#ifndef SHELFMEM_H
#define SHELFMEM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum shelfmem_status {
  SHELFMEM_OK = 0,
  SHELFMEM_ERR_CONFIG = 1,
  SHELFMEM_ERR_RUN = 2,
  SHELFMEM_ERR_REPLAY_MISMATCH = 3,
  SHELFMEM_ERR_INVALID_ARGUMENT = 4,
  SHELFMEM_ERR_IO = 5
} shelfmem_status;

typedef struct shelfmem_config shelfmem_config;
typedef struct shelfmem_scene shelfmem_scene;
typedef struct shelfmem_episode shelfmem_episode;

const char* shelfmem_version(void);

/* Message of the last failure on this thread; empty string if none. */
const char* shelfmem_last_error(void);

/* --- configuration ------------------------------------------------------ */

shelfmem_status shelfmem_config_default(shelfmem_config** out);
shelfmem_status shelfmem_config_load(const char* path, shelfmem_config** out);
shelfmem_status shelfmem_config_save(const shelfmem_config* cfg, const char* path);

/* Applies a JSON-pointer override, e.g.
 *   shelfmem_config_set(cfg, "/run/method", "\"view-only\"");
 *   shelfmem_config_set(cfg, "/run/workers", "4");
 */
shelfmem_status shelfmem_config_set(shelfmem_config* cfg, const char* json_pointer,
                                    const char* json_value);
shelfmem_status shelfmem_config_validate(const shelfmem_config* cfg);
void shelfmem_config_free(shelfmem_config* cfg);

/* --- scenes -------------------------------------------------------------- */

shelfmem_status shelfmem_scene_generate(const shelfmem_config* cfg, uint64_t seed,
                                        shelfmem_scene** out);
shelfmem_status shelfmem_scene_load(const char* path, shelfmem_scene** out);
shelfmem_status shelfmem_scene_save(const shelfmem_scene* scene, const char* path);
int shelfmem_scene_object_count(const shelfmem_scene* scene);
void shelfmem_scene_free(shelfmem_scene* scene);

/* --- episodes ------------------------------------------------------------ */

/* method: "informed-push" | "random-push" | "view-only" | "random-view" */
shelfmem_status shelfmem_episode_run(const shelfmem_config* cfg,
                                     const shelfmem_scene* scene, const char* method,
                                     uint64_t planner_seed, shelfmem_episode** out);
int shelfmem_episode_step_count(const shelfmem_episode* ep);
int shelfmem_episode_push_count(const shelfmem_episode* ep);
const char* shelfmem_episode_terminal_reason(const shelfmem_episode* ep);

/* name: "occ_miou" | "sem_miou" | "certainty" | "total_displacement" */
shelfmem_status shelfmem_episode_metric(const shelfmem_episode* ep, const char* name,
                                        double* out);
shelfmem_status shelfmem_episode_save_log(const shelfmem_episode* ep, const char* path);
void shelfmem_episode_free(shelfmem_episode* ep);

/* --- batch commands (the CLI verbs) -------------------------------------- */

shelfmem_status shelfmem_cmd_generate(const shelfmem_config* cfg, const char* out_dir);
shelfmem_status shelfmem_cmd_run(const shelfmem_config* cfg, const char* scene_dir,
                                 const char* out_dir);
shelfmem_status shelfmem_cmd_compare(const shelfmem_config* cfg, const char* scene_dir,
                                     const char* out_dir);
shelfmem_status shelfmem_cmd_replay(const shelfmem_config* cfg, const char* log_path,
                                    const char* scene_path);

#ifdef __cplusplus
}
#endif

#endif /* SHELFMEM_H */
