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

#include "planeloc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include <Eigen/Cholesky>

#include "planeloc/error.hpp"

namespace planeloc {
namespace {

using Mat23 = Eigen::Matrix<double, 2, 3>;
using Mat26 = Eigen::Matrix<double, 2, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;
using Mat66 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

constexpr double kMaxDamping = 1e10;

// Whitened reprojection edge. jp is meaningful only when the pose is free.
struct ReprojectionBlock {
  bool active = false;
  Vec2 r = Vec2::Zero();
  Mat26 jp = Mat26::Zero();
  Mat23 jl = Mat23::Zero();
};

// Upper Cholesky factor U of the information matrix, so r^T Q r = |U r|^2.
Eigen::Matrix2d SqrtInfo(const Eigen::Matrix2d& info) {
  Eigen::LLT<Eigen::Matrix2d> llt(info);
  return llt.matrixU();
}

ReprojectionBlock EvaluateReprojection(const CameraIntrinsics& k, const Pose& pose,
                                       const Vec3& point, const Observation& obs,
                                       const Eigen::Matrix2d& whiten, double depth_epsilon) {
  ReprojectionBlock b;
  const Vec3 pc = pose * point;
  if (!(pc.z() > depth_epsilon)) return b;
  b.active = true;
  const double iz = 1.0 / pc.z();
  const Vec2 projected(k.fx * pc.x() * iz + k.cx, k.fy * pc.y() * iz + k.cy);
  Mat23 dpi;
  dpi << k.fx * iz, 0.0, -k.fx * pc.x() * iz * iz,
         0.0, k.fy * iz, -k.fy * pc.y() * iz * iz;
  // d(exp(dx) * T * p) / d(dx) = [I, -hat(T * p)]
  Eigen::Matrix<double, 3, 6> dpc;
  dpc.leftCols<3>().setIdentity();
  dpc.rightCols<3>() = -Hat(pc);
  b.r = whiten * (obs.pixel - projected);
  b.jp = -whiten * dpi * dpc;
  b.jl = -whiten * dpi * pose.rotation();
  return b;
}

}  // namespace

void FactorGraph::Validate() const {
  camera.Validate();
  if (!(lambda_weight >= 0.0 && lambda_weight <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda_weight must lie in [0, 1]");
  }
  bool any_fixed = false;
  for (const auto& [id, node] : poses) any_fixed = any_fixed || node.fixed;
  if (!poses.empty() && !any_fixed) {
    throw Error(ErrorCode::kInvalidArgument, "factor graph has no fixed pose");
  }
  for (const Observation& obs : observations) {
    if (!poses.contains(obs.frame_id) || !landmarks.contains(obs.landmark_id)) {
      throw Error(ErrorCode::kInvalidArgument, "observation references a missing node");
    }
    const Eigen::Matrix2d& q = obs.info;
    if (std::abs(q(0, 1) - q(1, 0)) > 1e-12 * q.cwiseAbs().maxCoeff() ||
        Eigen::LLT<Eigen::Matrix2d>(q).info() != Eigen::Success) {
      throw Error(ErrorCode::kInvalidArgument, "observation information is not SPD");
    }
  }
  for (const PlaneFactor& f : plane_factors) {
    if (!landmarks.contains(f.landmark_id) || !planes.contains(f.plane_id)) {
      throw Error(ErrorCode::kInvalidArgument, "plane factor references a missing node");
    }
    if (!(f.info > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "plane factor information must be positive");
    }
  }
}

Vec2 ReprojectionResidual(const CameraIntrinsics& k, const Pose& pose, const Landmark& landmark,
                          const Observation& obs, double depth_epsilon) {
  return obs.pixel - Project(k, pose, landmark.position, depth_epsilon);
}

double PlaneResidual(const Vec3& normal, double offset, const Vec3& point) {
  return (normal.dot(point) + offset) / normal.norm();
}

CostBreakdown TotalCost(const FactorGraph& graph) {
  CostBreakdown c;
  for (const Observation& obs : graph.observations) {
    const Pose& pose = graph.poses.at(obs.frame_id).pose;
    const Vec3& p = graph.landmarks.at(obs.landmark_id).position;
    auto pixel = TryProject(graph.camera, pose, p, graph.depth_epsilon);
    if (!pixel) {
      ++c.inactive_edges;
      continue;
    }
    const Vec2 r = obs.pixel - *pixel;
    c.reprojection += r.dot(obs.info * r);
  }
  for (const PlaneFactor& f : graph.plane_factors) {
    const double r = PlaneResidual(graph.planes.at(f.plane_id), graph.landmarks.at(f.landmark_id));
    c.coplanarity += f.info * r * r;
  }
  c.total = graph.lambda_weight * c.reprojection + (1.0 - graph.lambda_weight) * c.coplanarity;
  return c;
}

VariableOrdering MakeOrdering(const FactorGraph& graph) {
  VariableOrdering o;
  for (const auto& [id, node] : graph.poses) {
    if (node.fixed) continue;
    o.pose_column[id] = o.num_columns;
    o.pose_ids.push_back(id);
    o.num_columns += 6;
  }
  for (const auto& [id, lm] : graph.landmarks) {
    o.landmark_column[id] = o.num_columns;
    o.landmark_ids.push_back(id);
    o.num_columns += 3;
  }
  return o;
}

LinearizedSystem Linearize(const FactorGraph& graph) {
  LinearizedSystem sys;
  sys.ordering = MakeOrdering(graph);
  const double w_ba = std::sqrt(graph.lambda_weight);
  const double w_pl = std::sqrt(1.0 - graph.lambda_weight);

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> residual;
  int row = 0;
  for (const Observation& obs : graph.observations) {
    const PoseNode& node = graph.poses.at(obs.frame_id);
    const Vec3& p = graph.landmarks.at(obs.landmark_id).position;
    const ReprojectionBlock b = EvaluateReprojection(graph.camera, node.pose, p, obs,
                                                     w_ba * SqrtInfo(obs.info),
                                                     graph.depth_epsilon);
    if (!b.active) {
      ++sys.inactive_edges;
      continue;
    }
    const int lc = sys.ordering.landmark_column.at(obs.landmark_id);
    for (int i = 0; i < 2; ++i) {
      if (!node.fixed) {
        const int pc = sys.ordering.pose_column.at(obs.frame_id);
        for (int j = 0; j < 6; ++j) triplets.emplace_back(row + i, pc + j, b.jp(i, j));
      }
      for (int j = 0; j < 3; ++j) triplets.emplace_back(row + i, lc + j, b.jl(i, j));
      residual.push_back(b.r[i]);
    }
    row += 2;
  }
  for (const PlaneFactor& f : graph.plane_factors) {
    const Plane& plane = graph.planes.at(f.plane_id);
    const Vec3& p = graph.landmarks.at(f.landmark_id).position;
    const double s = w_pl * std::sqrt(f.info);
    const Vec3 grad = plane.normal / plane.normal.norm();
    const int lc = sys.ordering.landmark_column.at(f.landmark_id);
    for (int j = 0; j < 3; ++j) triplets.emplace_back(row, lc + j, s * grad[j]);
    residual.push_back(s * PlaneResidual(plane.normal, plane.offset, p));
    ++row;
  }
  sys.jacobian.resize(row, sys.ordering.num_columns);
  sys.jacobian.setFromTriplets(triplets.begin(), triplets.end());
  sys.residual = Eigen::Map<const Eigen::VectorXd>(residual.data(), row);
  return sys;
}

void LmConfig::Validate() const {
  if (!(initial_damping > 0.0) || !(damping_down > 0.0 && damping_down < 1.0) ||
      !(damping_up > 1.0) || !(min_damping >= 0.0) || max_iters < 1 || !(cost_tol > 0.0) || !(step_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "LM config requires positive values and damping_down < 1 < damping_up");
  }
}

LmSummary RunLevenbergMarquardt(LmProblem& problem, const LmConfig& config) {
  config.Validate();
  LmSummary summary;
  LmProblem::Cost cost = problem.Evaluate();
  summary.initial_cost = cost.value;
  summary.termination = "max_iters";
  double damping = config.initial_damping;
  bool stale = true;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    if (cost.value == 0.0) {
      summary.termination = "zero_cost";
      break;
    }
    if (stale) problem.Linearize();
    Eigen::VectorXd step;
    while (!problem.SolveDamped(damping, &step) || !step.allFinite()) {
      damping *= config.damping_up;
      if (damping > kMaxDamping) {
        throw Error(ErrorCode::kSingularSystem,
                    "normal equations could not be factored; graph is under-constrained");
      }
    }
    const double step_norm = step.norm();
    if (step_norm < config.step_tol) {
      summary.termination = "step_tol";
      break;
    }
    problem.Save();
    problem.Apply(step);
    const LmProblem::Cost candidate = problem.Evaluate();
    const bool accepted = candidate.value < cost.value && candidate.inactive <= cost.inactive;
    summary.iterations.push_back({iter, candidate.value, damping, step_norm, accepted});
    if (accepted) {
      const double relative = (cost.value - candidate.value) / cost.value;
      cost = candidate;
      ++summary.accepted_steps;
      damping = std::max(damping * config.damping_down, config.min_damping);
      stale = true;
      if (relative < config.cost_tol) {
        summary.termination = "cost_tol";
        break;
      }
    } else {
      problem.Restore();
      damping *= config.damping_up;
      stale = false;
      if (damping > kMaxDamping) {
        summary.termination = "damping_limit";
        break;
      }
    }
  }
  summary.final_cost = cost.value;
  return summary;
}

namespace {

// Bundle adjustment normal equations with landmarks eliminated by Schur
// complement; the reduced pose system is dense and factored by Cholesky.
class BundleProblem : public LmProblem {
 public:
  explicit BundleProblem(FactorGraph* graph) : graph_(graph) {
    for (auto& [id, node] : graph_->poses) {
      if (node.fixed) continue;
      pose_index_[id] = static_cast<int>(free_poses_.size());
      free_poses_.push_back(&node);
    }
    for (auto& [id, lm] : graph_->landmarks) {
      landmark_index_[id] = static_cast<int>(landmarks_.size());
      landmarks_.push_back(&lm);
    }
    if (free_poses_.empty() && landmarks_.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "factor graph has no free variables");
    }
    const double w_ba = std::sqrt(graph_->lambda_weight);
    for (const Observation& obs : graph_->observations) {
      auto it = pose_index_.find(obs.frame_id);
      edges_.push_back({&graph_->poses.at(obs.frame_id).pose,
                        it == pose_index_.end() ? -1 : it->second,
                        landmark_index_.at(obs.landmark_id), &obs,
                        w_ba * SqrtInfo(obs.info)});
    }
    const double w_pl = std::sqrt(1.0 - graph_->lambda_weight);
    for (const PlaneFactor& f : graph_->plane_factors) {
      const Plane& plane = graph_->planes.at(f.plane_id);
      const double s = w_pl * std::sqrt(f.info);
      const double norm = plane.normal.norm();
      plane_edges_.push_back({landmark_index_.at(f.landmark_id), s * plane.normal / norm,
                              s * plane.offset / norm});
    }
    const int np = static_cast<int>(free_poses_.size());
    const int nl = static_cast<int>(landmarks_.size());
    hpp_.resize(6 * np, 6 * np);
    gp_.resize(6 * np);
    hll_.resize(nl);
    gl_.resize(nl);
    hpl_.resize(nl);
    hll_inv_.resize(nl);
  }

  Cost Evaluate() override {
    const CostBreakdown c = TotalCost(*graph_);
    return {c.total, c.inactive_edges};
  }

  void Linearize() override {
    hpp_.setZero();
    gp_.setZero();
    for (std::size_t l = 0; l < landmarks_.size(); ++l) {
      hll_[l].setZero();
      gl_[l].setZero();
      hpl_[l].clear();
    }
    for (const Edge& e : edges_) {
      const ReprojectionBlock b =
          EvaluateReprojection(graph_->camera, *e.pose, landmarks_[e.landmark]->position,
                               *e.obs, e.whiten, graph_->depth_epsilon);
      if (!b.active) continue;
      hll_[e.landmark].noalias() += b.jl.transpose() * b.jl;
      gl_[e.landmark].noalias() += b.jl.transpose() * b.r;
      if (e.pose_index < 0) continue;
      const int pc = 6 * e.pose_index;
      hpp_.block<6, 6>(pc, pc).noalias() += b.jp.transpose() * b.jp;
      gp_.segment<6>(pc).noalias() += b.jp.transpose() * b.r;
      CouplingBlock(e.landmark, e.pose_index).noalias() += b.jp.transpose() * b.jl;
    }
    for (const PlaneEdge& e : plane_edges_) {
      const double r = e.scaled_normal.dot(landmarks_[e.landmark]->position) + e.scaled_offset;
      hll_[e.landmark].noalias() += e.scaled_normal * e.scaled_normal.transpose();
      gl_[e.landmark] += e.scaled_normal * r;
    }
  }

  bool SolveDamped(double damping, Eigen::VectorXd* step) override {
    const int np = static_cast<int>(free_poses_.size());
    const int nl = static_cast<int>(landmarks_.size());
    Eigen::MatrixXd s = hpp_;
    s.diagonal().array() += damping;
    Eigen::VectorXd rhs = -gp_;

    std::vector<Mat63> scaled;
    for (int l = 0; l < nl; ++l) {
      Mat3 a = hll_[l];
      a.diagonal().array() += damping;
      Eigen::LLT<Mat3> llt(a);
      if (llt.info() != Eigen::Success) return false;
      hll_inv_[l] = llt.solve(Mat3::Identity());
      const auto& couplings = hpl_[l];
      scaled.resize(couplings.size());
      for (std::size_t i = 0; i < couplings.size(); ++i) {
        scaled[i] = couplings[i].second * hll_inv_[l];
        rhs.segment<6>(6 * couplings[i].first).noalias() += scaled[i] * gl_[l];
      }
      for (std::size_t i = 0; i < couplings.size(); ++i) {
        const int pi = 6 * couplings[i].first;
        for (std::size_t j = 0; j < couplings.size(); ++j) {
          const int pj = 6 * couplings[j].first;
          s.block<6, 6>(pi, pj).noalias() -= scaled[i] * couplings[j].second.transpose();
        }
      }
    }

    step->resize(6 * np + 3 * nl);
    if (np > 0) {
      Eigen::LLT<Eigen::MatrixXd> llt(s);
      if (llt.info() != Eigen::Success) return false;
      step->head(6 * np) = llt.solve(rhs);
    }
    for (int l = 0; l < nl; ++l) {
      Vec3 b = -gl_[l];
      for (const auto& [pose, block] : hpl_[l]) {
        b.noalias() -= block.transpose() * step->segment<6>(6 * pose);
      }
      step->segment<3>(6 * np + 3 * l) = hll_inv_[l] * b;
    }
    return true;
  }

  void Apply(const Eigen::VectorXd& step) override {
    const int np = static_cast<int>(free_poses_.size());
    for (int i = 0; i < np; ++i) {
      const Vec6 d = step.segment<6>(6 * i);
      free_poses_[i]->pose = (Se3Exp(Twist::FromVector(d)) * free_poses_[i]->pose).Normalized();
    }
    for (std::size_t l = 0; l < landmarks_.size(); ++l) {
      landmarks_[l]->position += step.segment<3>(6 * np + 3 * l);
    }
  }

  void Save() override {
    saved_poses_.clear();
    saved_landmarks_.clear();
    for (const PoseNode* p : free_poses_) saved_poses_.push_back(p->pose);
    for (const Landmark* l : landmarks_) saved_landmarks_.push_back(l->position);
  }

  void Restore() override {
    for (std::size_t i = 0; i < free_poses_.size(); ++i) free_poses_[i]->pose = saved_poses_[i];
    for (std::size_t i = 0; i < landmarks_.size(); ++i) {
      landmarks_[i]->position = saved_landmarks_[i];
    }
  }

 private:
  struct Edge {
    const Pose* pose;
    int pose_index;  // -1 for fixed poses
    int landmark;
    const Observation* obs;
    Eigen::Matrix2d whiten;
  };
  struct PlaneEdge {
    int landmark;
    Vec3 scaled_normal;
    double scaled_offset;
  };

  Mat63& CouplingBlock(int landmark, int pose) {
    auto& list = hpl_[landmark];
    for (auto& [p, block] : list) {
      if (p == pose) return block;
    }
    list.emplace_back(pose, Mat63::Zero());
    return list.back().second;
  }

  FactorGraph* graph_;
  std::map<int, int> pose_index_;
  std::map<int, int> landmark_index_;
  std::vector<PoseNode*> free_poses_;
  std::vector<Landmark*> landmarks_;
  std::vector<Edge> edges_;
  std::vector<PlaneEdge> plane_edges_;

  Eigen::MatrixXd hpp_;
  Eigen::VectorXd gp_;
  std::vector<Mat3> hll_;
  std::vector<Vec3> gl_;
  std::vector<std::vector<std::pair<int, Mat63>>> hpl_;
  std::vector<Mat3> hll_inv_;

  std::vector<Pose> saved_poses_;
  std::vector<Vec3> saved_landmarks_;
};

double RotationAngle(const Mat3& a, const Mat3& b) {
  const double c = std::clamp(((a * b.transpose()).trace() - 1.0) * 0.5, -1.0, 1.0);
  return std::acos(c);
}

}  // namespace

LmSummary LmSolve(FactorGraph* graph, const LmConfig& config) {
  graph->Validate();
  BundleProblem problem(graph);
  return RunLevenbergMarquardt(problem, config);
}

void WindowConfig::Validate() const {
  if (capacity < 2 || boost_frames < 0 || !(turn_threshold_deg > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "window capacity must be >= 2 and boost settings non-negative");
  }
}

SlidingWindow::SlidingWindow(WindowConfig config) : config_(config) { config_.Validate(); }

bool SlidingWindow::Contains(int frame_id) const {
  return std::find(frames_.begin(), frames_.end(), frame_id) != frames_.end();
}

struct WindowUpdater {
  static std::deque<int>& Frames(SlidingWindow* w) { return w->frames_; }
};

WindowUpdateResult WindowUpdate(SlidingWindow* window, int frame_id, FactorGraph* graph) {
  if (window->Contains(frame_id)) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame " + std::to_string(frame_id) + " is already in the window");
  }
  if (!graph->poses.contains(frame_id)) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame " + std::to_string(frame_id) + " has no pose node");
  }
  std::deque<int>& frames = WindowUpdater::Frames(window);
  frames.push_back(frame_id);

  const WindowConfig& cfg = window->config();
  WindowUpdateResult result;
  result.effective_capacity = cfg.capacity;
  if (cfg.turn_boost) {
    const double threshold = cfg.turn_threshold_deg * std::numbers::pi / 180.0;
    for (std::size_t i = 1; i < frames.size(); ++i) {
      if (RotationAngle(graph->poses.at(frames[i - 1]).pose.rotation(),
                        graph->poses.at(frames[i]).pose.rotation()) > threshold) {
        result.effective_capacity = cfg.capacity + cfg.boost_frames;
        break;
      }
    }
  }

  std::set<int> dropped;
  while (static_cast<int>(frames.size()) > result.effective_capacity) {
    dropped.insert(frames.front());
    result.dropped_frames.push_back(frames.front());
    graph->poses.erase(frames.front());
    frames.pop_front();
  }
  if (!dropped.empty()) {
    std::erase_if(graph->observations,
                  [&](const Observation& o) { return dropped.contains(o.frame_id); });
    std::set<int> observed;
    for (const Observation& o : graph->observations) observed.insert(o.landmark_id);
    for (auto it = graph->landmarks.begin(); it != graph->landmarks.end();) {
      if (observed.contains(it->first)) {
        ++it;
      } else {
        result.removed_landmarks.push_back(it->first);
        it = graph->landmarks.erase(it);
      }
    }
    std::erase_if(graph->plane_factors, [&](const PlaneFactor& f) {
      return !graph->landmarks.contains(f.landmark_id);
    });
  }
  for (int id : frames) graph->poses.at(id).fixed = (id == frames.front());
  return result;
}

void LocalizerConfig::Validate() const {
  camera.Validate();
  window.Validate();
  lm.Validate();
  if (!(lambda_weight >= 0.0 && lambda_weight <= 1.0) || !(sigma_px > 0.0) ||
      !(sigma_plane > 0.0) || !(assoc_dist > 0.0) || min_obs < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid localizer configuration");
  }
}

Localizer::Localizer(LocalizerConfig config, std::shared_ptr<const PlaneMap> plane_map,
                     const Pose& initial_pose)
    : config_(std::move(config)),
      plane_map_(std::move(plane_map)),
      initial_pose_(initial_pose),
      window_(config_.window) {
  config_.Validate();
  graph_.camera = config_.camera;
  graph_.lambda_weight = config_.lambda_weight;
  graph_.depth_epsilon = config_.depth_epsilon;
  if (plane_map_) {
    for (const Plane& p : plane_map_->planes()) graph_.planes[p.id] = p;
  }
}

void Localizer::AddLandmarkFromStereo(const Observation& obs, const Pose& pose) {
  if (!obs.disparity) return;
  Vec3 pc;
  try {
    pc = TriangulateStereo(config_.camera, obs.pixel, *obs.disparity, config_.disparity_epsilon);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDegenerateDisparity) return;
    throw;
  }
  Landmark lm{obs.landmark_id, pose.Inverse() * pc, std::nullopt};
  if (plane_map_ && !plane_map_->empty()) {
    lm.plane_id = plane_map_->Associate(lm.position, config_.assoc_dist);
  }
  if (lm.plane_id) {
    graph_.plane_factors.push_back(
        {lm.id, *lm.plane_id, 1.0 / (config_.sigma_plane * config_.sigma_plane)});
  }
  graph_.landmarks[lm.id] = lm;
  graph_.observations.push_back(obs);
}

FrameResult Localizer::ProcessFrame(int frame_id, std::span<const Observation> observations) {
  if (last_frame_ && frame_id <= *last_frame_) {
    throw Error(ErrorCode::kInvalidArgument,
                "frame " + std::to_string(frame_id) + " does not follow frame " +
                    std::to_string(*last_frame_));
  }
  const Eigen::Matrix2d info =
      Eigen::Matrix2d::Identity() / (config_.sigma_px * config_.sigma_px);
  std::vector<Observation> tracked;
  std::vector<Observation> fresh;
  std::set<int> seen;
  for (Observation obs : observations) {
    if (!seen.insert(obs.landmark_id).second) continue;
    obs.frame_id = frame_id;
    obs.info = info;
    (graph_.landmarks.contains(obs.landmark_id) ? tracked : fresh).push_back(obs);
  }

  FrameResult result;
  result.frame_id = frame_id;
  const bool first = history_.empty();
  if (!first && static_cast<int>(tracked.size()) < config_.min_obs) {
    throw Error(ErrorCode::kInsufficientObservations,
                "frame " + std::to_string(frame_id) + " tracks " +
                    std::to_string(tracked.size()) + " landmarks, need " +
                    std::to_string(config_.min_obs));
  }

  Pose pose;
  if (first) {
    pose = initial_pose_;
    graph_.poses[frame_id] = {pose, true};
    for (const Observation& obs : fresh) AddLandmarkFromStereo(obs, pose);
    WindowUpdate(&window_, frame_id, &graph_);
  } else {
    // Constant-velocity prediction from the last two accepted poses.
    const Pose& last = history_.back();
    Pose predicted = last;
    if (history_.size() >= 2) {
      predicted = ((last * history_[history_.size() - 2].Inverse()) * last).Normalized();
    }
    graph_.poses[frame_id] = {predicted, false};
    for (const Observation& obs : tracked) graph_.observations.push_back(obs);
    WindowUpdate(&window_, frame_id, &graph_);

    LmSummary summary = LmSolve(&graph_, config_.lm);
    result.iterations = static_cast<int>(summary.iterations.size());
    const Pose solved = graph_.poses.at(frame_id).pose;
    const std::size_t before = graph_.landmarks.size();
    for (const Observation& obs : fresh) AddLandmarkFromStereo(obs, solved);
    result.new_landmarks = static_cast<int>(graph_.landmarks.size() - before);
    if (result.new_landmarks > 0) {
      summary = LmSolve(&graph_, config_.lm);
      result.iterations += static_cast<int>(summary.iterations.size());
    }
    pose = graph_.poses.at(frame_id).pose;
  }
  if (first) result.new_landmarks = static_cast<int>(graph_.landmarks.size());

  history_.push_back(pose);
  last_frame_ = frame_id;
  result.pose = pose;
  result.cost = TotalCost(graph_).total;
  result.window_size = static_cast<int>(window_.frames().size());
  result.landmarks = static_cast<int>(graph_.landmarks.size());
  for (const auto& [id, lm] : graph_.landmarks) result.plane_landmarks += lm.plane_id ? 1 : 0;
  result.tracked_observations = static_cast<int>(tracked.size());
  return result;
}

}  // namespace planeloc
