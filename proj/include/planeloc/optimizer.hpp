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

// Plane-constrained bundle adjustment over a sliding window of frames.
//
// The objective is
//
//   E = lambda * sum_obs r_obs^T Q r_obs + (1 - lambda) * sum_plane w r_plane^2
//
// where r_obs is the left-camera reprojection error of a landmark and r_plane
// its signed distance to the associated map plane. It is minimized with
// Levenberg-Marquardt using additive damping (J^T J + mu I) and landmark
// Schur elimination.

#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "planeloc/geometry.hpp"
#include "planeloc/plane_map.hpp"

namespace planeloc {

struct Observation {
  int frame_id = 0;
  int landmark_id = 0;
  Vec2 pixel = Vec2::Zero();
  std::optional<double> disparity;
  Eigen::Matrix2d info = Eigen::Matrix2d::Identity();  // 1/px^2
};

struct PlaneFactor {
  int landmark_id = 0;
  int plane_id = 0;
  double info = 100.0;  // 1/m^2
};

struct PoseNode {
  Pose pose;
  bool fixed = false;
};

struct FactorGraph {
  CameraIntrinsics camera;
  double lambda_weight = 0.5;  // reprojection share of the objective
  double depth_epsilon = kDefaultDepthEpsilon;

  std::map<int, PoseNode> poses;      // keyed by frame id
  std::map<int, Landmark> landmarks;  // keyed by landmark id
  std::vector<Observation> observations;
  std::vector<PlaneFactor> plane_factors;
  std::map<int, Plane> planes;  // read-only plane table

  // Throws Error(kInvalidArgument) when an edge dangles, no pose is fixed,
  // lambda_weight leaves [0, 1], or an information weight is not positive
  // definite.
  void Validate() const;
};

Vec2 ReprojectionResidual(const CameraIntrinsics& k, const Pose& pose, const Landmark& landmark,
                          const Observation& obs,
                          double depth_epsilon = kDefaultDepthEpsilon);

// Signed distance (W.p + b) / |W|; W need not be unit length.
double PlaneResidual(const Vec3& normal, double offset, const Vec3& point);
inline double PlaneResidual(const Plane& plane, const Landmark& landmark) {
  return PlaneResidual(plane.normal, plane.offset, landmark.position);
}

struct CostBreakdown {
  double total = 0.0;
  double reprojection = 0.0;  // unweighted sum r^T Q r over active edges
  double coplanarity = 0.0;   // unweighted sum w r^2
  int inactive_edges = 0;     // reprojection edges skipped for depth
};

CostBreakdown TotalCost(const FactorGraph& graph);

// Column layout of the Jacobian: free poses (6 columns each, rho then phi)
// in frame order followed by landmarks (3 columns each) in id order.
struct VariableOrdering {
  std::vector<int> pose_ids;
  std::vector<int> landmark_ids;
  std::map<int, int> pose_column;
  std::map<int, int> landmark_column;
  int num_columns = 0;
};

VariableOrdering MakeOrdering(const FactorGraph& graph);

// Whitened first-order model r(x + dx) ~ r + J dx. Rows are pre-multiplied
// by sqrt(weight) * info^(1/2) so that |r|^2 equals TotalCost. Pose columns
// use the increment T <- exp(dx) * T; landmark columns are additive.
struct LinearizedSystem {
  VariableOrdering ordering;
  Eigen::SparseMatrix<double> jacobian;
  Eigen::VectorXd residual;
  int inactive_edges = 0;
};

LinearizedSystem Linearize(const FactorGraph& graph);

struct LmConfig {
  double initial_damping = 1e-3;
  double damping_up = 10.0;
  double damping_down = 0.1;
  double min_damping = 1e-9;  // floor applied after accepted steps
  int max_iters = 50;
  double cost_tol = 1e-10;  // relative decrease
  double step_tol = 1e-10;

  void Validate() const;
};

struct LmIteration {
  int iteration = 0;
  double cost = 0.0;  // candidate cost
  double damping = 0.0;
  double step_norm = 0.0;
  bool accepted = false;
};

struct LmSummary {
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int accepted_steps = 0;
  std::vector<LmIteration> iterations;
  std::string termination;
};

// State and normal-equation access for the Levenberg-Marquardt driver.
class LmProblem {
 public:
  virtual ~LmProblem() = default;

  struct Cost {
    double value = 0.0;
    int inactive = 0;
  };
  virtual Cost Evaluate() = 0;
  // Rebuild J^T J and J^T r at the current state.
  virtual void Linearize() = 0;
  // Solve (J^T J + damping I) step = -J^T r; false if the factorization fails.
  virtual bool SolveDamped(double damping, Eigen::VectorXd* step) = 0;
  virtual void Apply(const Eigen::VectorXd& step) = 0;
  virtual void Save() = 0;
  virtual void Restore() = 0;
};

// Steps are accepted only when the cost strictly decreases without losing
// additional active edges. Throws Error(kSingularSystem) if the system cannot
// be factored even at damping > 1e10.
LmSummary RunLevenbergMarquardt(LmProblem& problem, const LmConfig& config);

// Optimizes all free poses and landmarks of `graph` in place.
LmSummary LmSolve(FactorGraph* graph, const LmConfig& config);

struct WindowConfig {
  int capacity = 10;
  // When set, capacity grows by boost_frames while the window contains an
  // inter-frame rotation above turn_threshold_deg.
  bool turn_boost = false;
  double turn_threshold_deg = 15.0;
  int boost_frames = 5;

  void Validate() const;
};

class SlidingWindow {
 public:
  explicit SlidingWindow(WindowConfig config = {});

  const WindowConfig& config() const { return config_; }
  const std::deque<int>& frames() const { return frames_; }
  bool Contains(int frame_id) const;

 private:
  friend struct WindowUpdater;
  WindowConfig config_;
  std::deque<int> frames_;
};

struct WindowUpdateResult {
  std::vector<int> dropped_frames;
  std::vector<int> removed_landmarks;
  int effective_capacity = 0;
};

// Adds frame_id (whose pose must already be in the graph) and drops the oldest
// frames beyond capacity together with their observations. Landmarks left
// without observations are removed with their plane factors; the oldest
// remaining frame becomes the fixed gauge anchor.
WindowUpdateResult WindowUpdate(SlidingWindow* window, int frame_id, FactorGraph* graph);

struct LocalizerConfig {
  CameraIntrinsics camera;
  double lambda_weight = 0.5;
  double sigma_px = 1.0;     // reprojection noise, pixels
  double sigma_plane = 0.1;  // coplanarity noise, meters
  double assoc_dist = 0.2;
  double disparity_epsilon = kDefaultDisparityEpsilon;
  double depth_epsilon = kDefaultDepthEpsilon;
  int min_obs = 10;
  WindowConfig window;
  LmConfig lm;

  void Validate() const;
};

struct FrameResult {
  int frame_id = 0;
  Pose pose;
  double cost = 0.0;
  int iterations = 0;
  int window_size = 0;
  int landmarks = 0;
  int plane_landmarks = 0;
  int tracked_observations = 0;
  int new_landmarks = 0;
};

// One localization session: owns the factor graph and sliding window.
class Localizer {
 public:
  Localizer(LocalizerConfig config, std::shared_ptr<const PlaneMap> plane_map,
            const Pose& initial_pose);

  // The first frame is placed at the initial pose and held fixed. Later
  // frames need at least min_obs observations of landmarks already in the
  // window, otherwise Error(kInsufficientObservations) is thrown and the
  // session state is left untouched. Frame ids must increase.
  FrameResult ProcessFrame(int frame_id, std::span<const Observation> observations);

  const FactorGraph& graph() const { return graph_; }
  const SlidingWindow& window() const { return window_; }
  const LocalizerConfig& config() const { return config_; }

 private:
  void AddLandmarkFromStereo(const Observation& obs, const Pose& pose);

  LocalizerConfig config_;
  std::shared_ptr<const PlaneMap> plane_map_;
  Pose initial_pose_;
  FactorGraph graph_;
  SlidingWindow window_;
  std::vector<Pose> history_;  // accepted poses, oldest first
  std::optional<int> last_frame_;
};

}  // namespace planeloc
