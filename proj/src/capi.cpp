// Copyright 2026 The planeloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "planeloc/planeloc.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "planeloc/config.hpp"
#include "planeloc/error.hpp"
#include "planeloc/io.hpp"
#include "planeloc/pipeline.hpp"
#include "planeloc/random.hpp"

struct planeloc_config {
  planeloc::RunConfig value;
};

struct planeloc_plane_map {
  std::shared_ptr<const planeloc::PlaneMap> value;
};

struct planeloc_session {
  std::unique_ptr<planeloc::Localizer> value;
};

namespace {

thread_local std::string g_last_error;

planeloc_status ToStatus(planeloc::ErrorCode code) {
  return static_cast<planeloc_status>(static_cast<int>(code) + 1);
}

template <class Fn>
planeloc_status Guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return PLANELOC_OK;
  } catch (const planeloc::Error& e) {
    g_last_error = e.what();
    return ToStatus(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PLANELOC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return PLANELOC_ERR_INTERNAL;
  }
}

void Require(bool ok, const std::string& what) {
  if (!ok) throw planeloc::Error(planeloc::ErrorCode::kInvalidArgument, what);
}

planeloc::Pose FromKitti(const double m[12]) {
  planeloc::Mat3 r;
  planeloc::Vec3 t;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) r(row, col) = m[row * 4 + col];
    t[row] = m[row * 4 + 3];
  }
  const planeloc::Pose wc(r, t);
  if (!(wc.RigidityError() <= 1e-6)) {
    throw planeloc::Error(planeloc::ErrorCode::kNonRigidPose, "pose rotation is not a rotation");
  }
  return wc.Inverse();
}

void ToKitti(const planeloc::Pose& pose, double m[12]) {
  const planeloc::Pose wc = pose.Inverse();
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) m[row * 4 + col] = wc.rotation()(row, col);
    m[row * 4 + 3] = wc.translation()[row];
  }
}

void Emit(planeloc_text_fn sink, void* user, const std::ostringstream& text) {
  if (sink) sink(user, text.str().c_str());
}

}  // namespace

extern "C" {

const char* planeloc_version(void) { return "1.0.0"; }

const char* planeloc_status_name(planeloc_status status) {
  if (status == PLANELOC_OK) return "Ok";
  if (status == PLANELOC_ERR_INTERNAL) return "Internal";
  if (status >= PLANELOC_ERR_INVALID_ARGUMENT && status <= PLANELOC_ERR_IO) {
    return planeloc::ErrorCodeName(static_cast<planeloc::ErrorCode>(status - 1));
  }
  return "Unknown";
}

const char* planeloc_last_error(void) { return g_last_error.c_str(); }

planeloc_status planeloc_config_create(planeloc_config** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    *out = new planeloc_config();
  });
}

void planeloc_config_destroy(planeloc_config* config) { delete config; }

planeloc_status planeloc_config_load(planeloc_config* config, const char* path) {
  return Guard([&] {
    Require(config && path, "null argument");
    config->value.LoadFile(path);
  });
}

planeloc_status planeloc_config_set(planeloc_config* config, const char* key, const char* value) {
  return Guard([&] {
    Require(config && key && value, "null argument");
    config->value.Set(key, value);
  });
}

planeloc_status planeloc_config_get(const planeloc_config* config, const char* key, char* buf,
                                    size_t size, size_t* needed) {
  return Guard([&] {
    Require(config && key, "null argument");
    const std::string value = config->value.Get(key);
    if (needed) *needed = value.size() + 1;
    if (!buf) return;
    Require(size > value.size(), "buffer too small for value of " + std::string(key));
    std::memcpy(buf, value.c_str(), value.size() + 1);
  });
}

planeloc_status planeloc_config_validate(const planeloc_config* config) {
  return Guard([&] {
    Require(config != nullptr, "config is null");
    config->value.Validate();
  });
}

planeloc_status planeloc_config_write(const planeloc_config* config, const char* path) {
  return Guard([&] {
    Require(config && path, "null argument");
    std::ofstream out(path, std::ios::binary);
    out << config->value.Serialize();
    out.close();
    if (!out) throw planeloc::Error(planeloc::ErrorCode::kIo, std::string("cannot write ") + path);
  });
}

planeloc_status planeloc_plane_map_read(const char* path, planeloc_plane_map** out) {
  return Guard([&] {
    Require(path && out, "null argument");
    auto map = std::make_shared<const planeloc::PlaneMap>(planeloc::ReadPlanes(path));
    *out = new planeloc_plane_map{std::move(map)};
  });
}

planeloc_status planeloc_plane_map_extract(const planeloc_config* config, const char* cloud_path,
                                           planeloc_plane_map** out) {
  return Guard([&] {
    Require(config && cloud_path && out, "null argument");
    config->value.Validate();
    const planeloc::PointCloud cloud = planeloc::ReadCloud(cloud_path);
    if (cloud.points.empty()) {
      throw planeloc::Error(planeloc::ErrorCode::kEmptyResult, "no points");
    }
    planeloc::PlaneExtractionParams params = config->value.planes;
    params.workers = config->value.workers;
    auto map = std::make_shared<const planeloc::PlaneMap>(planeloc::BuildPlaneMap(
        cloud, params, planeloc::Random::SubSeed(config->value.seed, "planes")));
    *out = new planeloc_plane_map{std::move(map)};
  });
}

planeloc_status planeloc_plane_map_write(const planeloc_plane_map* map, const char* path) {
  return Guard([&] {
    Require(map && path, "null argument");
    planeloc::WritePlanes(map->value->planes(), path);
  });
}

size_t planeloc_plane_map_size(const planeloc_plane_map* map) {
  return map ? map->value->planes().size() : 0;
}

planeloc_status planeloc_plane_map_get(const planeloc_plane_map* map, size_t index, int* id,
                                       double normal[3], double* offset, int* support_count) {
  return Guard([&] {
    Require(map != nullptr, "map is null");
    Require(index < map->value->planes().size(), "plane index out of range");
    const planeloc::Plane& p = map->value->planes()[index];
    if (id) *id = p.id;
    if (normal) {
      for (int i = 0; i < 3; ++i) normal[i] = p.normal[i];
    }
    if (offset) *offset = p.offset;
    if (support_count) *support_count = p.support_count;
  });
}

void planeloc_plane_map_destroy(planeloc_plane_map* map) { delete map; }

planeloc_status planeloc_session_create(const planeloc_config* config,
                                        const planeloc_plane_map* map,
                                        const double initial_pose[12], planeloc_session** out) {
  return Guard([&] {
    Require(config && initial_pose && out, "null argument");
    config->value.Validate();
    auto planes = map ? map->value : std::make_shared<const planeloc::PlaneMap>();
    *out = new planeloc_session{std::make_unique<planeloc::Localizer>(
        config->value.localize, std::move(planes), FromKitti(initial_pose))};
  });
}

planeloc_status planeloc_session_process_frame(planeloc_session* session, int frame_id,
                                               size_t count, const int* landmark_ids,
                                               const double* uv, const double* disparity,
                                               double pose_out[12]) {
  return Guard([&] {
    Require(session != nullptr, "session is null");
    Require(count == 0 || (landmark_ids && uv), "null observation arrays");
    std::vector<planeloc::Observation> obs(count);
    for (size_t i = 0; i < count; ++i) {
      obs[i].frame_id = frame_id;
      obs[i].landmark_id = landmark_ids[i];
      obs[i].pixel = planeloc::Vec2(uv[2 * i], uv[2 * i + 1]);
      if (disparity && !std::isnan(disparity[i])) obs[i].disparity = disparity[i];
    }
    const planeloc::FrameResult r = session->value->ProcessFrame(frame_id, obs);
    if (pose_out) ToKitti(r.pose, pose_out);
  });
}

void planeloc_session_destroy(planeloc_session* session) { delete session; }

planeloc_status planeloc_extract_planes_file(const planeloc_config* config,
                                             const char* cloud_path, const char* out_path,
                                             planeloc_text_fn sink, void* user) {
  return Guard([&] {
    Require(config && cloud_path && out_path, "null argument");
    std::ostringstream text;
    planeloc::RunExtractPlanes(cloud_path, config->value, out_path, text);
    Emit(sink, user, text);
  });
}

planeloc_status planeloc_localize_files(const planeloc_config* config,
                                        const char* observations_path, const char* planes_path,
                                        const char* initial_pose_path, const char* out_path,
                                        planeloc_text_fn sink, void* user) {
  return Guard([&] {
    Require(config && observations_path && planes_path && initial_pose_path && out_path,
            "null argument");
    std::ostringstream text;
    planeloc::RunLocalize(observations_path, planes_path, initial_pose_path, config->value,
                          out_path, text);
    Emit(sink, user, text);
  });
}

planeloc_status planeloc_simulate(const planeloc_config* config, const char* out_dir,
                                  planeloc_text_fn sink, void* user) {
  return Guard([&] {
    Require(config && out_dir, "null argument");
    std::ostringstream text;
    planeloc::RunSimulate(config->value, out_dir, text);
    Emit(sink, user, text);
  });
}

planeloc_status planeloc_evaluate_files(const planeloc_config* config, const char* est_path,
                                        const char* gt_path, const char* out_dir,
                                        planeloc_text_fn sink, void* user) {
  return Guard([&] {
    Require(config && est_path && gt_path && out_dir, "null argument");
    std::ostringstream text;
    planeloc::RunEvaluate(est_path, gt_path, config->value, out_dir, text);
    Emit(sink, user, text);
  });
}

}  // extern "C"
