#include "poselift/pipeline.hpp"

#include <gtest/gtest.h>

#include "poselift/eval.hpp"

namespace poselift {
namespace {

TEST(KmeansPoses, SingleClusterIsMean) {
  const auto poses = make_synthetic_poses(30, 3);
  const auto centers = kmeans_poses(poses, 1, 7);
  ASSERT_EQ(centers.size(), 1u);
  Pose3D mean = Pose3D::Zero();
  for (const auto& p : poses) mean += p;
  mean /= static_cast<double>(poses.size());
  EXPECT_LT((centers[0] - mean).norm(), 1e-10);
}

TEST(KmeansPoses, SeparatedClustersRecovered) {
  SeededRng rng(11);
  std::vector<Pose3D> poses;
  Pose3D center_a = Pose3D::Zero(), center_b = Pose3D::Zero();
  center_a.setConstant(10.0);
  center_b.setConstant(-10.0);
  Pose3D mean_a = Pose3D::Zero(), mean_b = Pose3D::Zero();
  for (int i = 0; i < 25; ++i) {
    Pose3D a = center_a, b = center_b;
    for (int d = 0; d < kPose3Size; ++d) {
      a[d] += 0.05 * rng.gaussian();
      b[d] += 0.05 * rng.gaussian();
    }
    poses.push_back(a);
    poses.push_back(b);
    mean_a += a;
    mean_b += b;
  }
  mean_a /= 25.0;
  mean_b /= 25.0;
  const auto centers = kmeans_poses(poses, 2, 13);
  ASSERT_EQ(centers.size(), 2u);
  const bool first_is_a = (centers[0] - mean_a).norm() < (centers[0] - mean_b).norm();
  const Pose3D& got_a = first_is_a ? centers[0] : centers[1];
  const Pose3D& got_b = first_is_a ? centers[1] : centers[0];
  EXPECT_LT((got_a - mean_a).norm(), 1e-6);
  EXPECT_LT((got_b - mean_b).norm(), 1e-6);
}

TEST(KmeansPoses, LloydSseNonIncreasing) {
  const auto poses = make_synthetic_poses(100, 17);
  std::vector<double> history;
  kmeans_poses(poses, 8, 19, &history);
  ASSERT_GE(history.size(), 2u);
  for (size_t i = 1; i < history.size(); ++i)
    EXPECT_LE(history[i], history[i - 1] + 1e-9);
}

TEST(KmeansPoses, DeterministicAndValidated) {
  const auto poses = make_synthetic_poses(40, 23);
  const auto a = kmeans_poses(poses, 5, 29);
  const auto b = kmeans_poses(poses, 5, 29);
  for (size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i] == b[i]);
  EXPECT_THROW(kmeans_poses(poses, 41, 1), DataError);
  EXPECT_THROW(kmeans_poses(poses, 0, 1), DataError);
}

struct PipelineFixture {
  Basis basis;
  std::vector<Pose3D> corpus;

  PipelineFixture() {
    corpus = make_synthetic_poses(120, 5);
    basis = learn_sparse_dictionary(corpus, 16, 0.05, 10, 5);
  }

  static const PipelineFixture& get() {
    static PipelineFixture fx;
    return fx;
  }
};

TEST(Alternate, FixedPointConvergesImmediately) {
  const auto& fx = PipelineFixture::get();
  // ground truth expressible by a few bases, initialized at the truth
  SeededRng rng(31);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(fx.basis.count());
  for (int a = 0; a < 3; ++a)
    alpha[rng.next_index(fx.basis.count())] = 0.4 * rng.gaussian();
  const Pose3D gt = fx.basis.reconstruct(alpha);
  const Camera camera = random_camera(rng);
  const Pose2D x2d = project(gt, camera);

  AlternationOptions options;
  options.variant.anthropometric = false;  // gt has no exact-proportion limbs
  options.theta = 0.01;
  const AlternationResult result = alternate(x2d, fx.basis, gt, options);
  EXPECT_LE(result.residual_history.size(), 2u);
  EXPECT_LT(result.lift.residual_l1, 1e-4);
}

TEST(Alternate, HistoryCapAndBestSelection) {
  const auto& fx = PipelineFixture::get();
  const auto instances = make_eval_instances(4, 37);
  AlternationOptions options;
  options.tol = 0.0;  // force the loop to its cap
  options.max_outer = 20;
  for (const auto& inst : instances) {
    const AlternationResult result = alternate(inst.x2d, fx.basis, fx.basis.mean, options);
    EXPECT_LE(result.residual_history.size(), 20u);
    const double best =
        *std::min_element(result.residual_history.begin(),
                          result.residual_history.end());
    EXPECT_LE(result.lift.residual_l1, best + 1e-12);
  }
}

TEST(Alternate, ResidualHistoryNonIncreasingOnCleanData) {
  const auto& fx = PipelineFixture::get();
  const auto instances = make_eval_instances(6, 41);
  AlternationOptions options;
  for (const auto& inst : instances) {
    const AlternationResult result =
        alternate(inst.x2d, fx.basis, fx.basis.mean, options);
    for (size_t i = 1; i < result.residual_history.size(); ++i)
      EXPECT_LE(result.residual_history[i],
                result.residual_history[i - 1] + 1e-6);
  }
}

TEST(Alternate, ConstraintsHoldAtPipelineExit) {
  const auto& fx = PipelineFixture::get();
  const auto instances = make_eval_instances(6, 43);
  for (const auto& inst : instances) {
    const AlternationResult result =
        alternate(inst.x2d, fx.basis, fx.basis.mean, {});
    for (double v : result.lift.limb_violation) EXPECT_LE(std::abs(v), 1e-2);
  }
}

TEST(Alternate, DegenerateFirstCameraThrowsPipelineError) {
  const auto& fx = PipelineFixture::get();
  Pose3D collinear;
  for (int j = 0; j < kJointCount; ++j)
    collinear.segment<3>(3 * j) = j * Eigen::Vector3d(1, 1, 0);
  const Pose2D x2d = project(fx.corpus[0], Camera{});
  EXPECT_THROW(alternate(x2d, fx.basis, collinear, {}), PipelineError);
}

TEST(MultiStart, SingleInitMatchesAlternate) {
  const auto& fx = PipelineFixture::get();
  const auto instances = make_eval_instances(2, 47);
  for (const auto& inst : instances) {
    const AlternationResult direct =
        alternate(inst.x2d, fx.basis, fx.basis.mean, {});
    const AlternationResult multi =
        multi_start(inst.x2d, fx.basis, {fx.basis.mean}, {});
    EXPECT_EQ(direct.lift.residual_l1, multi.lift.residual_l1);
    EXPECT_TRUE(direct.lift.pose == multi.lift.pose);
  }
}

TEST(MultiStart, DominatesMeanPoseStart) {
  const auto& fx = PipelineFixture::get();
  const auto instances = make_eval_instances(3, 53);
  std::vector<Pose3D> inits = kmeans_poses(fx.corpus, 8, 59);
  inits.push_back(fx.basis.mean);
  for (const auto& inst : instances) {
    const AlternationResult mean_start =
        alternate(inst.x2d, fx.basis, fx.basis.mean, {});
    const AlternationResult multi =
        multi_start(inst.x2d, fx.basis, inits, {});
    EXPECT_LE(multi.lift.residual_l1, mean_start.lift.residual_l1 + 1e-12);
  }
}

TEST(MultiStart, DeterministicAndGroundTruthMode) {
  const auto& fx = PipelineFixture::get();
  const auto instances = make_eval_instances(2, 61);
  const std::vector<Pose3D> inits = kmeans_poses(fx.corpus, 5, 67);
  for (const auto& inst : instances) {
    const AlternationResult a = multi_start(inst.x2d, fx.basis, inits, {});
    const AlternationResult b = multi_start(inst.x2d, fx.basis, inits, {});
    EXPECT_TRUE(a.lift.pose == b.lift.pose);
    // ground-truth selection is at least as good in 3D error
    const AlternationResult gt_mode =
        multi_start(inst.x2d, fx.basis, inits, {},
                    SelectionCriterion::kGroundTruthError, &inst.gt_pose);
    EXPECT_LE((gt_mode.lift.pose - inst.gt_pose).norm(),
              (a.lift.pose - inst.gt_pose).norm() + 1e-12);
  }
  EXPECT_THROW(multi_start(instances[0].x2d, fx.basis, {}, {}), DataError);
  EXPECT_THROW(
      multi_start(instances[0].x2d, fx.basis, inits, {},
                  SelectionCriterion::kGroundTruthError, nullptr),
      DataError);
}

}  // namespace
}  // namespace poselift
