#include "poselift/camera.hpp"

#include <gtest/gtest.h>

#include <random>

#include "poselift/eval.hpp"
#include "oracles.hpp"

namespace poselift {
namespace {

TEST(Project, OrthographicDropsZ) {
  Camera cam;  // rows (1,0,0), (0,1,0)
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0, 1);
  Pose3D pose;
  for (int i = 0; i < kPose3Size; ++i) pose[i] = gauss(rng);
  const Pose2D x = project(pose, cam);
  for (int j = 0; j < kJointCount; ++j) {
    EXPECT_DOUBLE_EQ(x[2 * j], pose[3 * j]);
    EXPECT_DOUBLE_EQ(x[2 * j + 1], pose[3 * j + 1]);
  }
}

TEST(Project, ZeroCameraGivesZeroPose) {
  Camera cam;
  cam.m1.setZero();
  cam.m2.setZero();
  Pose3D pose = Pose3D::Ones();
  EXPECT_EQ(project(pose, cam).norm(), 0.0);
}

TEST(Project, MatchesPerJointMultiply) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    Camera cam;
    for (int i = 0; i < 3; ++i) {
      cam.m1[i] = gauss(rng);
      cam.m2[i] = gauss(rng);
    }
    Pose3D pose;
    for (int i = 0; i < kPose3Size; ++i) pose[i] = gauss(rng);
    const Pose2D x = project(pose, cam);
    for (int j = 0; j < kJointCount; ++j) {
      const Eigen::Vector3d y = pose.segment<3>(3 * j);
      EXPECT_NEAR(x[2 * j], cam.m1.dot(y), 1e-12);
      EXPECT_NEAR(x[2 * j + 1], cam.m2.dot(y), 1e-12);
    }
  }
}

TEST(Project, Linearity) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0, 1);
  SeededRng cam_rng(9);
  const Camera cam = random_camera(cam_rng);
  Pose3D p, q;
  for (int i = 0; i < kPose3Size; ++i) {
    p[i] = gauss(rng);
    q[i] = gauss(rng);
  }
  const double a = 0.37, b = -1.91;
  const Pose2D lhs = project(a * p + b * q, cam);
  const Pose2D rhs = a * project(p, cam) + b * project(q, cam);
  EXPECT_LT((lhs - rhs).norm(), 1e-12);
}

TEST(SoftThreshold, KnownValues) {
  Eigen::VectorXd v(3);
  v << 3.0, -0.5, 0.0;
  const Eigen::VectorXd out = soft_threshold(v, 1.0);
  EXPECT_DOUBLE_EQ(out[0], 2.0);
  EXPECT_DOUBLE_EQ(out[1], 0.0);
  EXPECT_DOUBLE_EQ(out[2], 0.0);
  EXPECT_THROW(soft_threshold(v, -1.0), DataError);
}

TEST(SoftThreshold, MatchesGridSearchOracle) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0, 2);
  for (int trial = 0; trial < 5; ++trial) {
    const double t = trial * 0.35;
    Eigen::VectorXd v(8);
    for (int i = 0; i < 8; ++i) v[i] = gauss(rng);
    const Eigen::VectorXd out = soft_threshold(v, t);
    for (int i = 0; i < 8; ++i)
      EXPECT_NEAR(out[i], oracles::shrinkage_grid_search(v[i], t), 1e-8);
  }
}

class CameraEstimation : public ::testing::Test {
 protected:
  // clean centered instance with a known orthogonal-row camera
  void make_instance(std::uint64_t seed, Eigen::Matrix2Xd* image,
                     Eigen::Matrix3Xd* world, Camera* truth) {
    SeededRng rng(seed);
    const Pose3D pose = make_synthetic_poses(1, seed)[0];
    *truth = random_camera(rng);
    Eigen::Matrix3Xd y = pose_as_columns(pose);
    y.colwise() -= y.rowwise().mean().eval();
    Eigen::Matrix2Xd x = truth->matrix() * y;
    x.colwise() -= x.rowwise().mean().eval();
    *image = x;
    *world = y;
  }
};

TEST_F(CameraEstimation, RecoversNoiselessCamera) {
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Matrix2Xd image;
    Eigen::Matrix3Xd world;
    Camera truth;
    make_instance(100 + trial, &image, &world, &truth);
    CameraDiagnostics diag;
    const Camera cam = estimate_camera(image, world, {}, &diag);
    EXPECT_LT((image - cam.matrix() * world).cwiseAbs().sum(), 1e-6);
    EXPECT_LT(std::abs(cam.row_dot()), 1e-6);
    EXPECT_TRUE(diag.converged);
  }
}

TEST_F(CameraEstimation, PlanarSceneRecoversScaledOrthographicRows) {
  // all joints in the z = 0 plane, image = scaled xy coordinates
  Eigen::Matrix3Xd world(3, kJointCount);
  SeededRng rng(77);
  for (int j = 0; j < kJointCount; ++j)
    world.col(j) = Eigen::Vector3d(rng.gaussian(), rng.gaussian(), 0.0);
  world.colwise() -= world.rowwise().mean().eval();
  const double scale = 1.7;
  const Eigen::Matrix2Xd image = scale * world.topRows<2>();
  const Camera cam = estimate_camera(image, world);
  EXPECT_LT((image - cam.matrix() * world).cwiseAbs().sum(), 1e-6);
  EXPECT_NEAR(cam.m1[0], scale, 1e-5);
  EXPECT_NEAR(cam.m1[1], 0.0, 1e-5);
  EXPECT_NEAR(cam.m2[0], 0.0, 1e-5);
  EXPECT_NEAR(cam.m2[1], scale, 1e-5);
}

TEST_F(CameraEstimation, CleanConvergenceWithinFewIterations) {
  std::vector<int> iterations;
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::Matrix2Xd image;
    Eigen::Matrix3Xd world;
    Camera truth;
    make_instance(300 + trial, &image, &world, &truth);
    CameraDiagnostics diag;
    estimate_camera(image, world, {}, &diag);
    iterations.push_back(diag.iterations);
  }
  std::sort(iterations.begin(), iterations.end());
  EXPECT_LE(iterations[iterations.size() / 2], 30);
}

TEST_F(CameraEstimation, SweepNeverIncreasesAugmentedLagrangian) {
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::Matrix2Xd image;
    Eigen::Matrix3Xd world;
    Camera truth;
    make_instance(500 + trial, &image, &world, &truth);
    // perturb the image so the problem is not solved at the start
    SeededRng rng(600 + trial);
    for (int j = 0; j < kJointCount; ++j) image(0, j) += 0.3 * rng.gaussian();

    Camera cam = initial_camera(image, world);
    CameraAdmState state;
    state.residual = Eigen::MatrixXd::Zero(2, kJointCount);
    state.multiplier = Eigen::MatrixXd::Zero(2, kJointCount);
    state.tau = 1.0;
    const Eigen::Matrix3d gram = world * world.transpose();
    for (int it = 0; it < 25; ++it) {
      const double before = camera_lagrangian(cam, state, image, world);
      camera_sweep(cam, state, image, world, gram);
      const double after = camera_lagrangian(cam, state, image, world);
      EXPECT_LE(after, before + 1e-9);
      camera_multiplier_ascent(cam, state, image, world);
      state.tau = std::min(state.tau * 1.1, 1e8);
    }
  }
}

TEST_F(CameraEstimation, InvariantToSimultaneousScaling) {
  Eigen::Matrix2Xd image;
  Eigen::Matrix3Xd world;
  Camera truth;
  make_instance(900, &image, &world, &truth);
  const Camera cam = estimate_camera(image, world);
  const double s = 3.7;
  const Camera scaled = estimate_camera((s * image).eval(), (s * world).eval());
  EXPECT_LT((cam.m1 - scaled.m1).norm(), 1e-6);
  EXPECT_LT((cam.m2 - scaled.m2).norm(), 1e-6);
}

TEST_F(CameraEstimation, RankDeficientWorldThrows) {
  // all joints on one line: rank 1
  Eigen::Matrix3Xd world(3, kJointCount);
  for (int j = 0; j < kJointCount; ++j)
    world.col(j) = j * Eigen::Vector3d(1, 2, 3);
  world.colwise() -= world.rowwise().mean().eval();
  Eigen::Matrix2Xd image = world.topRows<2>();
  EXPECT_THROW(estimate_camera(image, world), SingularError);
}

TEST_F(CameraEstimation, DimensionMismatchThrows) {
  Eigen::Matrix2Xd image(2, 5);
  Eigen::Matrix3Xd world(3, 6);
  EXPECT_THROW(estimate_camera(image, world), DimensionError);
}

}  // namespace
}  // namespace poselift
