#pragma once

#include <optional>
#include <vector>

#include "poselift/lifter.hpp"

namespace poselift {

struct AlternationOptions {
  int max_outer = 20;
  double tol = 1e-4;  // relative pose change between outer iterations
  VariantConfig variant;
  double theta = 0.1;
  std::vector<LimbSpec> limbs = default_limbs();
  LiftOptions lift;
  CameraEstimateOptions camera;
};

struct AlternationResult {
  LiftResult lift;
  Camera camera;
  std::vector<double> residual_history;  // L1 reprojection per outer iteration
  Eigen::Vector2d image_center = Eigen::Vector2d::Zero();
  int iterations = 0;
  bool camera_failed = false;  // a later camera estimate failed, returned best
};

// Candidate initial poses for the alternation: one (the mean pose) or a set
// of cluster centers.
using InitializationSet = std::vector<Pose3D>;

// k-means over 36-dim pose vectors with k-means++ seeding and Lloyd
// iterations; deterministic for a fixed seed. sse_history, when given,
// records the within-cluster SSE after each assignment pass.
inline InitializationSet kmeans_poses(const std::vector<Pose3D>& poses,
                                      int k, std::uint64_t seed,
                                      std::vector<double>* sse_history =
                                          nullptr) {
  const int n = static_cast<int>(poses.size());
  if (k < 1) throw DataError("kmeans_poses: k must be positive");
  if (k > n) throw DataError("kmeans_poses: more clusters than poses");
  SeededRng rng(seed);

  std::vector<Pose3D> centers;
  centers.reserve(k);
  centers.push_back(poses[rng.next_index(n)]);
  std::vector<double> dist2(n);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const Pose3D& center : centers)
        best = std::min(best, (poses[i] - center).squaredNorm());
      dist2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      centers.push_back(poses[rng.next_index(n)]);
      continue;
    }
    double pick = rng.uniform() * total;
    int chosen = n - 1;
    for (int i = 0; i < n; ++i) {
      pick -= dist2[i];
      if (pick <= 0.0) {
        chosen = i;
        break;
      }
    }
    centers.push_back(poses[chosen]);
  }

  std::vector<int> assign(n, -1);
  for (int round = 0; round < 100; ++round) {
    bool changed = false;
    double sse = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (poses[i] - centers[0]).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (poses[i] - centers[c]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      sse += best_d;
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (sse_history) sse_history->push_back(sse);
    if (!changed) break;
    std::vector<int> counts(k, 0);
    std::vector<Pose3D> sums(k, Pose3D::Zero());
    for (int i = 0; i < n; ++i) {
      sums[assign[i]] += poses[i];
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers[c] = sums[c] / counts[c];
      } else {
        // re-seed an empty cluster with the point farthest from its center
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d = (poses[i] - centers[assign[i]]).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centers[c] = poses[far];
      }
    }
  }
  return centers;
}

// Outer alternation: estimate the camera from the current 3D pose,
// re-estimate the pose with that camera, repeat until the pose stops
// changing. Returns the iterate with the smallest L1 reprojection residual
// seen.
inline AlternationResult alternate(const Pose2D& x2d, const Basis& basis,
                                   const Pose3D& init,
                                   const AlternationOptions& options = {}) {
  if (options.max_outer < 1)
    throw DataError("alternate: max_outer must be at least 1");
  AlternationResult out;
  out.image_center = pose_centroid(x2d);
  Pose2D x_centered;
  for (int j = 0; j < kJointCount; ++j)
    x_centered.segment<2>(2 * j) =
        x2d.segment<2>(2 * j) - out.image_center;
  const Eigen::Matrix2Xd image = pose_as_columns(x_centered);

  Pose3D current = init;
  {
    const Eigen::Vector3d c = pose_centroid(current);
    for (int j = 0; j < kJointCount; ++j)
      current.segment<3>(3 * j) -= c;
  }

  LiftContinuation continuation;
  std::optional<LiftResult> best;
  Camera best_camera;
  int it = 0;
  for (it = 0; it < options.max_outer; ++it) {
    Camera camera;
    try {
      Eigen::Matrix3Xd world = pose_as_columns(current);
      const Eigen::Vector3d mean = world.rowwise().mean();
      world.colwise() -= mean;
      camera = estimate_camera(image, world, options.camera);
    } catch (const Error& err) {
      if (it == 0)
        throw PipelineError(std::string("alternate: camera estimation failed "
                                        "on the first iteration: ") +
                            err.what());
      out.camera_failed = true;
      break;
    }

    LiftProblem problem;
    problem.x = x_centered;
    problem.basis = &basis;
    problem.camera = camera;
    problem.limbs = options.limbs;
    problem.theta = options.theta;
    problem.variant = options.variant;
    const LiftResult result = lift(problem, options.lift, &continuation);
    out.residual_history.push_back(result.residual_l1);
    if (!best || result.residual_l1 < best->residual_l1) {
      best = result;
      best_camera = camera;
    }

    const double change = (result.pose - current).norm() /
                          std::max(current.norm(), 1.0);
    current = result.pose;
    if (change < options.tol) {
      ++it;
      break;
    }
  }
  if (!best) throw PipelineError("alternate: no successful iteration");
  out.lift = *best;
  out.camera = best_camera;
  out.iterations = it;
  return out;
}

enum class SelectionCriterion {
  kReprojectionResidual,  // usable at inference time
  kGroundTruthError,      // evaluation only; needs the true pose
};

// Runs the alternation once per initial pose (data-parallel) and keeps the
// best result under the chosen criterion.
inline AlternationResult multi_start(
    const Pose2D& x2d, const Basis& basis, const InitializationSet& inits,
    const AlternationOptions& options = {},
    SelectionCriterion criterion = SelectionCriterion::kReprojectionResidual,
    const Pose3D* ground_truth = nullptr) {
  if (inits.empty()) throw DataError("multi_start: no initial poses");
  if (criterion == SelectionCriterion::kGroundTruthError && !ground_truth)
    throw DataError("multi_start: ground-truth selection needs a pose");

  const int n = static_cast<int>(inits.size());
  std::vector<std::optional<AlternationResult>> results(n);
  std::vector<std::string> errors(n);
  parallel_for(n, [&](int i) {
    try {
      results[i] = alternate(x2d, basis, inits[i], options);
    } catch (const Error& err) {
      errors[i] = err.what();
    }
  });

  int best = -1;
  double best_score = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (!results[i]) continue;
    const double score =
        criterion == SelectionCriterion::kGroundTruthError
            ? (results[i]->lift.pose - *ground_truth).norm()
            : results[i]->lift.residual_l1;
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  if (best < 0) {
    std::string detail;
    for (const auto& e : errors)
      if (!e.empty()) detail = e;
    throw PipelineError("multi_start: every start failed; last error: " +
                        detail);
  }
  return *results[best];
}

}  // namespace poselift
