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

#include "planeloc/pipeline.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "planeloc/error.hpp"
#include "planeloc/io.hpp"
#include "planeloc/random.hpp"

namespace planeloc {
namespace {

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

std::filesystem::path WithSuffix(const std::filesystem::path& path, const char* suffix) {
  return std::filesystem::path(path.string() + suffix);
}

void EnsureDirectory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "cannot create directory " + dir.string());
  }
}

RunConfig Checked(const RunConfig& config) {
  config.Validate();
  return config;
}

}  // namespace

LocalizationRun LocalizeSequence(std::span<const Observation> observations,
                                 std::shared_ptr<const PlaneMap> plane_map,
                                 const Pose& initial_pose, const LocalizerConfig& config,
                                 std::ostream* log) {
  std::map<int, std::vector<Observation>> frames;
  for (const Observation& obs : observations) frames[obs.frame_id].push_back(obs);

  LocalizationRun run;
  if (frames.empty()) return run;
  Localizer localizer(config, std::move(plane_map), initial_pose);
  Pose current = initial_pose;
  const int last = frames.rbegin()->first;
  for (int f = 0; f <= last; ++f) {
    auto it = frames.find(f);
    const std::span<const Observation> batch =
        it == frames.end() ? std::span<const Observation>() : std::span(it->second);
    try {
      const FrameResult r = localizer.ProcessFrame(f, batch);
      current = r.pose;
      run.accepted.push_back(r);
      if (log) {
        *log << "frame=" << f << " status=ok cost=" << FormatDouble(r.cost)
             << " iterations=" << r.iterations << " window=" << r.window_size
             << " landmarks=" << r.landmarks << " plane_landmarks=" << r.plane_landmarks
             << " tracked=" << r.tracked_observations << " new=" << r.new_landmarks << '\n';
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInsufficientObservations) throw;
      run.rejected.push_back(f);
      if (log) *log << "frame=" << f << " status=rejected reason=\"" << e.what() << "\"\n";
    }
    run.trajectory.frame_ids.push_back(f);
    run.trajectory.poses.push_back(current);
  }
  return run;
}

SceneConfig SimulationConfig(const RunConfig& config) {
  SceneConfig scene = PresetScene(config.sim.preset, config.seed);
  scene.sigma_map = config.sim.sigma_map;
  scene.sigma_px = config.sim.sigma_px;
  scene.outlier_rate = config.sim.outlier_rate;
  if (config.sim.frames > 0) scene.frame_count = config.sim.frames;
  if (config.sim.landmarks > 0) scene.landmark_count = config.sim.landmarks;
  if (config.sim.on_plane_fraction >= 0.0) scene.on_plane_fraction = config.sim.on_plane_fraction;
  scene.image_width = config.sim.image_width;
  scene.image_height = config.sim.image_height;
  scene.camera = config.localize.camera;
  return scene;
}

std::vector<Plane> RunExtractPlanes(const std::filesystem::path& cloud_path,
                                    const RunConfig& config,
                                    const std::filesystem::path& out_path, std::ostream& out) {
  const RunConfig cfg = Checked(config);
  const PointCloud cloud = ReadCloud(cloud_path);
  if (cloud.points.empty()) throw Error(ErrorCode::kEmptyResult, "no points in " + cloud_path.string());
  PlaneExtractionParams params = cfg.planes;
  params.workers = cfg.workers;
  const PlaneMap map = BuildPlaneMap(cloud, params, Random::SubSeed(cfg.seed, "planes"));
  WritePlanes(map.planes(), out_path);
  WriteText(WithSuffix(out_path, ".config"), cfg.Serialize());
  out << "planes=" << map.planes().size() << '\n';
  for (const Plane& p : map.planes()) {
    out << "plane id=" << p.id << " normal=" << FormatDouble(p.normal.x()) << ','
        << FormatDouble(p.normal.y()) << ',' << FormatDouble(p.normal.z())
        << " offset=" << FormatDouble(p.offset) << " support=" << p.support_count
        << " rms=" << FormatDouble(p.rms) << '\n';
  }
  return map.planes();
}

LocalizationRun RunLocalize(const std::filesystem::path& observations_path,
                            const std::filesystem::path& planes_path,
                            const std::filesystem::path& initial_pose_path,
                            const RunConfig& config, const std::filesystem::path& out_path,
                            std::ostream& out) {
  const RunConfig cfg = Checked(config);
  const std::vector<Observation> observations = ReadObservations(observations_path);
  auto plane_map = std::make_shared<const PlaneMap>(ReadPlanes(planes_path));
  const Trajectory init = ReadTrajectory(initial_pose_path);
  if (init.poses.empty()) {
    throw Error(ErrorCode::kInvalidArgument, initial_pose_path.string() + " holds no pose");
  }
  if (observations.empty()) {
    throw Error(ErrorCode::kInvalidArgument, observations_path.string() + " holds no observations");
  }

  std::ostringstream log;
  const LocalizationRun run =
      LocalizeSequence(observations, plane_map, init.poses.front(), cfg.localize, &log);
  WriteTrajectory(run.trajectory, out_path);
  WriteText(WithSuffix(out_path, ".log"), log.str());
  WriteText(WithSuffix(out_path, ".config"), cfg.Serialize());
  out << "frames=" << run.trajectory.size() << " accepted=" << run.accepted.size()
      << " rejected=" << run.rejected.size() << '\n';
  return run;
}

Scene RunSimulate(const RunConfig& config, const std::filesystem::path& out_dir,
                  std::ostream& out) {
  const RunConfig cfg = Checked(config);
  const Scene scene = GenerateScene(SimulationConfig(cfg));
  EnsureDirectory(out_dir);

  WriteCloud(scene.cloud, out_dir / "cloud.txt");
  WriteObservations(scene.observations, out_dir / "observations.csv");
  Trajectory gt;
  for (std::size_t i = 0; i < scene.trajectory.size(); ++i) {
    gt.frame_ids.push_back(static_cast<int>(i));
    gt.poses.push_back(scene.trajectory[i]);
  }
  WriteTrajectory(gt, out_dir / "groundtruth.txt");
  WriteText(out_dir / "init_pose.txt", FormatKittiLine(scene.trajectory.front()));
  WritePlanes(scene.planes, out_dir / "planes.txt");
  std::string landmarks = "landmark_id,x,y,z,plane_id\n";
  for (const Landmark& lm : scene.landmarks) {
    landmarks += std::to_string(lm.id) + ',' + FormatDouble(lm.position.x()) + ',' +
                 FormatDouble(lm.position.y()) + ',' + FormatDouble(lm.position.z()) + ',' +
                 (lm.plane_id ? std::to_string(*lm.plane_id) : std::string()) + '\n';
  }
  WriteText(out_dir / "landmarks.csv", landmarks);
  WriteText(out_dir / "run.config", cfg.Serialize());
  out << "preset=" << cfg.sim.preset << " seed=" << cfg.seed
      << " points=" << scene.cloud.points.size() << " planes=" << scene.planes.size()
      << " frames=" << scene.trajectory.size() << " landmarks=" << scene.landmarks.size()
      << " observations=" << scene.observations.size() << '\n';
  return scene;
}

AteReport RunEvaluate(const std::filesystem::path& est_path,
                      const std::filesystem::path& gt_path, const RunConfig& config,
                      const std::filesystem::path& out_dir, std::ostream& out) {
  const RunConfig cfg = Checked(config);
  const Trajectory est = ReadTrajectory(est_path);
  const Trajectory gt = ReadTrajectory(gt_path);
  const AteReport report = ComputeAte(est, gt, cfg.eval_mode, cfg.eval_align);
  WriteReport({{"estimate", report}}, out_dir);
  WriteText(out_dir / "run.config", cfg.Serialize());
  out << "method,mean,rmse,std,max,min\n" << SummaryRow("estimate", report) << '\n';
  return report;
}

}  // namespace planeloc
