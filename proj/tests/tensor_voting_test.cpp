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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "planeloc/error.hpp"
#include "planeloc/tensor_voting.hpp"
#include "test_util.hpp"

namespace planeloc {
namespace {

using testing::RandomRotation;
using testing::RandomUnit;

double AngleDeg(const Vec3& a, const Vec3& b) {
  const double c = std::min(1.0, std::abs(a.normalized().dot(b.normalized())));
  return std::acos(c) * 180.0 / std::numbers::pi;
}

Mat3 WithSpectrum(Random& rng, const Vec3& values) {
  const Mat3 r = RandomRotation(rng);
  Mat3 m = r * values.asDiagonal() * r.transpose();
  return 0.5 * (m + m.transpose());
}

void ExpectValidDecomposition(const Mat3& a, const SymmetricEigen3& e, const char* what) {
  const double scale = std::max(1.0, std::abs(e.values[0]));
  EXPECT_GE(e.values[0], e.values[1]) << what;
  EXPECT_GE(e.values[1], e.values[2]) << what;
  EXPECT_LT((e.vectors.transpose() * e.vectors - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9)
      << what;
  for (int i = 0; i < 3; ++i) {
    EXPECT_LT((a * e.vectors.col(i) - e.values[i] * e.vectors.col(i)).cwiseAbs().maxCoeff(),
              1e-7 * scale)
        << what << " column " << i;
  }
  const Mat3 rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  EXPECT_LT((rebuilt - a).cwiseAbs().maxCoeff(), 1e-7 * scale) << what;
}

TEST(DecomposeSymmetric3, AgreesWithEigenSolver) {
  Random rng(21);
  for (int i = 0; i < 2000; ++i) {
    Mat3 a;
    for (int r = 0; r < 3; ++r) {
      for (int c = r; c < 3; ++c) a(r, c) = a(c, r) = rng.Uniform(-10, 10);
    }
    const SymmetricEigen3 e = DecomposeSymmetric3(a);
    Eigen::SelfAdjointEigenSolver<Mat3> ref(a);
    const Vec3 expected = ref.eigenvalues().reverse();  // ascending -> descending
    EXPECT_LT((e.values - expected).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, expected.cwiseAbs().maxCoeff())) << i;
    ExpectValidDecomposition(a, e, "random");
  }
}

TEST(DecomposeSymmetric3, DegenerateSpectra) {
  Random rng(22);
  const std::vector<Vec3> spectra = {
      {1, 1, 1},        {1, 1, 0},      {1, 0, 0},      {0, 0, 0},   {5, 5, 2},
      {3, 1, 1},        {1, 1 - 1e-13, 0}, {1, 1e-13, 0}, {1e-8, 1e-8, 0}, {2, 2, 2 - 1e-12},
      {1e6, 1e6, 1e-6}, {1, -1, -1},
  };
  for (const Vec3& s : spectra) {
    for (int k = 0; k < 50; ++k) {
      const Mat3 a = WithSpectrum(rng, s);
      const SymmetricEigen3 e = DecomposeSymmetric3(a);
      Eigen::SelfAdjointEigenSolver<Mat3> ref(a);
      const Vec3 expected = ref.eigenvalues().reverse();
      EXPECT_LT((e.values - expected).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, s.cwiseAbs().maxCoeff()))
          << s.transpose();
      ExpectValidDecomposition(a, e, "degenerate");
    }
  }
  // Exactly diagonal input, including repeated entries.
  ExpectValidDecomposition(Mat3::Identity(), DecomposeSymmetric3(Mat3::Identity()), "identity");
  const Mat3 d = Vec3(2, 7, 2).asDiagonal();
  const SymmetricEigen3 e = DecomposeSymmetric3(d);
  EXPECT_EQ(e.values, Vec3(7, 2, 2));
  ExpectValidDecomposition(d, e, "diagonal");
}

TEST(JacobiSymmetric3, AgreesWithEigenSolver) {
  Random rng(23);
  for (int i = 0; i < 200; ++i) {
    const Mat3 a = WithSpectrum(rng, Vec3(rng.Uniform(-3, 3), rng.Uniform(-3, 3), rng.Uniform(-3, 3)));
    const SymmetricEigen3 e = JacobiSymmetric3(a);
    Eigen::SelfAdjointEigenSolver<Mat3> ref(a);
    EXPECT_LT((e.values - ref.eigenvalues().reverse()).cwiseAbs().maxCoeff(), 1e-12);
    ExpectValidDecomposition(a, e, "jacobi");
  }
}

TEST(Decay, Examples) {
  EXPECT_EQ(Decay(0.0, 0.5), 1.0);
  for (double sigma : {0.1, 0.5, 1.0, 3.0}) {
    EXPECT_NEAR(Decay(sigma * sigma, sigma), 0.36787944117144233, 1e-15);
  }
  EXPECT_LT(Decay(4.0, 1.0), Decay(1.0, 1.0));
  EXPECT_GT(Decay(1e3, 1.0), 0.0 - 1e-300);
}

TEST(SplitComponents, SumsToTensor) {
  Random rng(24);
  for (int i = 0; i < 1000; ++i) {
    Eigen::Matrix3d b;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) b(r, c) = rng.Normal();
    }
    const Mat3 a = b * b.transpose();
    const TensorComponents parts = SplitComponents(PointTensor::FromMatrix(a));
    EXPECT_LT((parts.stick + parts.plate + parts.ball - a).cwiseAbs().maxCoeff(), 1e-9) << i;
  }
}

TEST(AccumulateTensor, CoplanarNeighbors) {
  PointCloud cloud;
  cloud.points = {{0, 0, 0}, {0.3, 0, 0}, {0, 0.4, 0}, {-0.2, -0.1, 0}, {0.25, 0.3, 0}};
  const PointTensor t = AccumulateTensor(0, cloud, VotingParams{});
  EXPECT_LT(t.eigenvalues[2] / t.eigenvalues[0], 1e-9);
  EXPECT_LT(AngleDeg(t.eigenvectors.col(2), Vec3::UnitZ()), 1e-6);
}

TEST(AccumulateTensor, CollinearNeighbors) {
  PointCloud cloud;
  cloud.points = {{0, 0, 0}, {0.1, 0, 0}, {-0.3, 0, 0}, {0.5, 0, 0}, {0.7, 0, 0}};
  const PointTensor t = AccumulateTensor(0, cloud, VotingParams{});
  EXPECT_LT(t.eigenvalues[1] / t.eigenvalues[0], 1e-9);
  EXPECT_LT(t.eigenvalues[2] / t.eigenvalues[0], 1e-9);
  EXPECT_LT(AngleDeg(t.eigenvectors.col(0), Vec3::UnitX()), 1e-6);
}

TEST(AccumulateTensor, IsolatedPoint) {
  PointCloud cloud;
  cloud.points = {{0, 0, 0}, {5, 0, 0}, {5.1, 0, 0}, {5, 0.1, 0}, {5, 0, 0.1}};
  try {
    AccumulateTensor(0, cloud, VotingParams{});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientNeighbors);
  }
}

TEST(AccumulateTensor, SymmetricPositiveSemidefinite) {
  Random rng(25);
  PointCloud cloud;
  for (int i = 0; i < 500; ++i) cloud.points.push_back(testing::RandomVec(rng, 0, 2));
  for (int i = 0; i < 500; i += 7) {
    const PointTensor t = AccumulateTensor(i, cloud, VotingParams{});
    EXPECT_EQ(t.tensor, t.tensor.transpose());
    EXPECT_GE(t.eigenvalues[2], -1e-9);
  }
}

PointTensor FromSpectrum(const Vec3& values) {
  PointTensor t;
  t.eigenvalues = values;
  t.eigenvectors = Mat3::Identity();
  t.tensor = values.asDiagonal();
  return t;
}

TEST(Classify, SpectrumExamples) {
  const SaliencyLabel plate = Classify(FromSpectrum({1, 1, 0}));
  EXPECT_EQ(plate.saliency, Saliency::kPlate);
  EXPECT_EQ(plate.orientation, Vec3::UnitZ());
  const SaliencyLabel stick = Classify(FromSpectrum({1, 0, 0}));
  EXPECT_EQ(stick.saliency, Saliency::kStick);
  EXPECT_EQ(stick.orientation, Vec3::UnitX());
  const SaliencyLabel ball = Classify(FromSpectrum({1, 1, 1}));
  EXPECT_EQ(ball.saliency, Saliency::kBall);
  EXPECT_EQ(ball.orientation, Vec3::Zero());
  // Stick and plate tie: stick wins.
  EXPECT_EQ(Classify(FromSpectrum({2, 1, 0})).saliency, Saliency::kStick);
}

TEST(Classify, ScaleInvariant) {
  Random rng(26);
  for (int i = 0; i < 500; ++i) {
    Vec3 v(rng.Uniform01(), rng.Uniform01(), rng.Uniform01());
    std::sort(v.data(), v.data() + 3, std::greater<>());
    const Mat3 a = WithSpectrum(rng, v);
    const Saliency base = Classify(PointTensor::FromMatrix(a)).saliency;
    for (double c : {1e-6, 0.5, 4.0, 1e5}) {
      EXPECT_EQ(Classify(PointTensor::FromMatrix(c * a)).saliency, base) << i << " " << c;
    }
  }
}

TEST(Classify, OrientationIsUnit) {
  Random rng(27);
  for (int i = 0; i < 200; ++i) {
    const Mat3 a = WithSpectrum(rng, Vec3(rng.Uniform01(), rng.Uniform01(), rng.Uniform01()));
    const SaliencyLabel l = Classify(PointTensor::FromMatrix(a));
    if (l.saliency != Saliency::kBall) EXPECT_NEAR(l.orientation.norm(), 1.0, 1e-9);
  }
}

// Three 10 m patches meeting at `corner`, one per axis normal.
PointCloud OrthogonalPlanes(Random& rng, const Vec3& corner, int per_plane, double noise,
                            std::vector<int>* plane_of) {
  PointCloud cloud;
  for (int axis = 0; axis < 3; ++axis) {
    for (int i = 0; i < per_plane; ++i) {
      Vec3 p = corner;
      p[(axis + 1) % 3] += rng.Uniform(0, 10);
      p[(axis + 2) % 3] += rng.Uniform(0, 10);
      for (int c = 0; c < 3; ++c) p[c] += rng.Normal(0, noise);
      cloud.points.push_back(p);
      plane_of->push_back(axis);
    }
  }
  return cloud;
}

TEST(LabelCloud, OrthogonalPlanesArePlate) {
  Random rng(28);
  const Vec3 corner(2, -3, 1);
  std::vector<int> plane_of;
  const PointCloud cloud = OrthogonalPlanes(rng, corner, 5000, 0.01, &plane_of);
  const VotingParams params;  // sigma 0.5, radius 1.0
  const auto labels = LabelCloud(cloud, params);
  int eligible = 0, good = 0;
  for (const LabeledPoint& l : labels) {
    const Vec3 d = cloud.points[l.index] - corner;
    const int axis = plane_of[l.index];
    // Farther than 2 sigma from both intersection lines of this patch.
    if (std::abs(d[(axis + 1) % 3]) <= 2 * params.sigma ||
        std::abs(d[(axis + 2) % 3]) <= 2 * params.sigma) {
      continue;
    }
    ++eligible;
    if (l.label.saliency == Saliency::kPlate &&
        AngleDeg(l.label.orientation, Vec3::Unit(axis)) <= 2.0) {
      ++good;
    }
  }
  ASSERT_GT(eligible, 10000);
  EXPECT_GE(static_cast<double>(good) / eligible, 0.95) << good << "/" << eligible;
}

TEST(LabelCloud, GaussianBlobIsMostlyBall) {
  Random rng(29);
  PointCloud cloud;
  for (int i = 0; i < 10000; ++i) {
    cloud.points.emplace_back(rng.Normal(), rng.Normal(), rng.Normal());
  }
  VotingParams params;
  params.sigma = 100.0;
  params.radius = 100.0;
  const auto labels = LabelCloud(cloud, params, 1, false);
  ASSERT_EQ(labels.size(), cloud.points.size());
  const long balls = std::count_if(labels.begin(), labels.end(), [](const LabeledPoint& l) {
    return l.label.saliency == Saliency::kBall;
  });
  EXPECT_GT(balls, 5000);

  // Oracle: with a kernel this wide every point sees the whole cloud, so its
  // class is the class of the global covariance.
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : cloud.points) mean += p;
  mean /= cloud.points.size();
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : cloud.points) cov += (p - mean) * (p - mean).transpose();
  cov /= cloud.points.size();
  Eigen::SelfAdjointEigenSolver<Mat3> ref(cov);
  EXPECT_EQ(Classify(FromSpectrum(ref.eigenvalues().reverse())).saliency, Saliency::kBall);
}

TEST(LabelCloud, LineIsAllStick) {
  PointCloud cloud;
  for (int i = 0; i < 200; ++i) cloud.points.emplace_back(0.05 * i, 0.02 * i, -0.01 * i);
  const auto labels = LabelCloud(cloud, VotingParams{}, 1, false);
  ASSERT_EQ(labels.size(), cloud.points.size());
  for (const LabeledPoint& l : labels) {
    EXPECT_EQ(l.label.saliency, Saliency::kStick) << l.index;
    EXPECT_LT(AngleDeg(l.label.orientation, Vec3(0.05, 0.02, -0.01)), 1e-6);
  }
  // Plane extraction needs plate points.
  try {
    LabelCloud(cloud, VotingParams{});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyResult);
  }
}

TEST(LabelCloud, IndependentOfOrderAndWorkers) {
  Random rng(30);
  std::vector<int> plane_of;
  const PointCloud cloud = OrthogonalPlanes(rng, Vec3::Zero(), 800, 0.01, &plane_of);
  const auto base = LabelCloud(cloud, VotingParams{});

  const auto threaded = LabelCloud(cloud, VotingParams{}, 3);
  ASSERT_EQ(threaded.size(), base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_EQ(threaded[i].index, base[i].index);
    EXPECT_EQ(threaded[i].label.saliency, base[i].label.saliency);
    EXPECT_EQ(threaded[i].label.orientation, base[i].label.orientation);
  }

  std::vector<int> perm(cloud.points.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = static_cast<int>(perm.size()) - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.UniformInt(i + 1)]);
  }
  PointCloud shuffled;
  for (int i : perm) shuffled.points.push_back(cloud.points[i]);
  const auto moved = LabelCloud(shuffled, VotingParams{});
  std::vector<const SaliencyLabel*> by_original(cloud.points.size(), nullptr);
  for (const LabeledPoint& l : moved) by_original[perm[l.index]] = &l.label;
  for (const LabeledPoint& l : base) {
    const SaliencyLabel* other = by_original[l.index];
    ASSERT_NE(other, nullptr);
    EXPECT_EQ(other->saliency, l.label.saliency) << l.index;
    if (l.label.saliency != Saliency::kBall) {
      EXPECT_LT(AngleDeg(other->orientation, l.label.orientation), 1e-6) << l.index;
    }
  }
}

}  // namespace
}  // namespace planeloc
