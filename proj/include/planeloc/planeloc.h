/*
 * Copyright 2026 The planeloc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of libplaneloc. Every call returns a planeloc_status; on
 * failure planeloc_last_error() holds a message for the calling thread until
 * its next call. Handles are opaque and owned by the caller. */

#ifndef PLANELOC_PLANELOC_H_
#define PLANELOC_PLANELOC_H_

#include <stddef.h>

#if defined(_WIN32)
#define PLANELOC_API __declspec(dllexport)
#else
#define PLANELOC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum planeloc_status {
  PLANELOC_OK = 0,
  PLANELOC_ERR_INVALID_ARGUMENT = 1,
  PLANELOC_ERR_NON_POSITIVE_DEPTH = 2,
  PLANELOC_ERR_DEGENERATE_DISPARITY = 3,
  PLANELOC_ERR_INSUFFICIENT_NEIGHBORS = 4,
  PLANELOC_ERR_EMPTY_RESULT = 5,
  PLANELOC_ERR_DEGENERATE_GEOMETRY = 6,
  PLANELOC_ERR_SINGULAR_SYSTEM = 7,
  PLANELOC_ERR_INSUFFICIENT_OBSERVATIONS = 8,
  PLANELOC_ERR_INVALID_CONFIG = 9,
  PLANELOC_ERR_NO_OVERLAP = 10,
  PLANELOC_ERR_PARSE = 11,
  PLANELOC_ERR_NON_RIGID_POSE = 12,
  PLANELOC_ERR_IO = 13,
  PLANELOC_ERR_INTERNAL = 100
} planeloc_status;

typedef struct planeloc_config planeloc_config;
typedef struct planeloc_plane_map planeloc_plane_map;
typedef struct planeloc_session planeloc_session;

/* Receives human-readable command output; may be NULL to discard it. */
typedef void (*planeloc_text_fn)(void* user, const char* text);

PLANELOC_API const char* planeloc_version(void);
PLANELOC_API const char* planeloc_status_name(planeloc_status status);
PLANELOC_API const char* planeloc_last_error(void);

/* Configuration: flat key = value settings, defaults on creation. */
PLANELOC_API planeloc_status planeloc_config_create(planeloc_config** out);
PLANELOC_API void planeloc_config_destroy(planeloc_config* config);
PLANELOC_API planeloc_status planeloc_config_load(planeloc_config* config, const char* path);
PLANELOC_API planeloc_status planeloc_config_set(planeloc_config* config, const char* key,
                                                 const char* value);
/* Copies the value with its terminator into buf. *needed (if not NULL)
 * receives the required size including the terminator. A NULL buf only
 * queries the size; a buf that is too small yields INVALID_ARGUMENT. */
PLANELOC_API planeloc_status planeloc_config_get(const planeloc_config* config, const char* key,
                                                 char* buf, size_t size, size_t* needed);
PLANELOC_API planeloc_status planeloc_config_validate(const planeloc_config* config);
PLANELOC_API planeloc_status planeloc_config_write(const planeloc_config* config,
                                                   const char* path);

/* Plane maps. A map read from a file carries no supporting points. */
PLANELOC_API planeloc_status planeloc_plane_map_read(const char* path, planeloc_plane_map** out);
PLANELOC_API planeloc_status planeloc_plane_map_extract(const planeloc_config* config,
                                                        const char* cloud_path,
                                                        planeloc_plane_map** out);
PLANELOC_API planeloc_status planeloc_plane_map_write(const planeloc_plane_map* map,
                                                      const char* path);
PLANELOC_API size_t planeloc_plane_map_size(const planeloc_plane_map* map);
PLANELOC_API planeloc_status planeloc_plane_map_get(const planeloc_plane_map* map, size_t index,
                                                    int* id, double normal[3], double* offset,
                                                    int* support_count);
PLANELOC_API void planeloc_plane_map_destroy(planeloc_plane_map* map);

/* Incremental localization. Poses cross the boundary as row-major 3x4
 * world-from-camera matrices, as in KITTI pose files. map may be NULL. */
PLANELOC_API planeloc_status planeloc_session_create(const planeloc_config* config,
                                                     const planeloc_plane_map* map,
                                                     const double initial_pose[12],
                                                     planeloc_session** out);
/* uv holds 2 * count pixels; disparity may be NULL, NaN marks a missing
 * value. */
PLANELOC_API planeloc_status planeloc_session_process_frame(planeloc_session* session,
                                                            int frame_id, size_t count,
                                                            const int* landmark_ids,
                                                            const double* uv,
                                                            const double* disparity,
                                                            double pose_out[12]);
PLANELOC_API void planeloc_session_destroy(planeloc_session* session);

/* File-level commands. */
PLANELOC_API planeloc_status planeloc_extract_planes_file(const planeloc_config* config,
                                                          const char* cloud_path,
                                                          const char* out_path,
                                                          planeloc_text_fn sink, void* user);
PLANELOC_API planeloc_status planeloc_localize_files(const planeloc_config* config,
                                                     const char* observations_path,
                                                     const char* planes_path,
                                                     const char* initial_pose_path,
                                                     const char* out_path,
                                                     planeloc_text_fn sink, void* user);
PLANELOC_API planeloc_status planeloc_simulate(const planeloc_config* config,
                                               const char* out_dir, planeloc_text_fn sink,
                                               void* user);
PLANELOC_API planeloc_status planeloc_evaluate_files(const planeloc_config* config,
                                                     const char* est_path, const char* gt_path,
                                                     const char* out_dir, planeloc_text_fn sink,
                                                     void* user);

#ifdef __cplusplus
}
#endif

#endif /* PLANELOC_PLANELOC_H_ */
