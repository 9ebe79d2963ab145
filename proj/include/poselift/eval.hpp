#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "poselift/pipeline.hpp"

namespace poselift {

// --- metrics ----------------------------------------------------------------

inline double metric_pose_error(const Eigen::VectorXd& a,
                                const Eigen::VectorXd& b) {
  if (a.size() != b.size())
    throw DimensionError("metric_pose_error: dimension mismatch");
  return (a - b).norm();
}

inline double metric_pixel_distance(const Pose2D& est, const Pose2D& gt) {
  return (est - gt).norm();
}

struct PcpResult {
  std::array<double, kLimbCount> per_part{};  // 1 correct, 0 incorrect
  std::array<bool, kLimbCount> valid{};       // false: zero-length gt segment
  double overall = 0.0;                       // mean over valid parts
};

// A part is correct iff both endpoints lie within half the ground-truth
// segment length of their annotated locations.
inline PcpResult metric_pcp(const Pose2D& est, const Pose2D& gt,
                            const std::vector<LimbSpec>& limbs) {
  PcpResult out;
  int valid_count = 0;
  double correct_sum = 0.0;
  for (size_t i = 0; i < limbs.size() && i < out.per_part.size(); ++i) {
    const Eigen::Vector2d gt_a = joint_position(gt, limbs[i].joint_a);
    const Eigen::Vector2d gt_b = joint_position(gt, limbs[i].joint_b);
    const double seg = (gt_a - gt_b).norm();
    if (seg <= 0.0) {
      out.valid[i] = false;
      out.per_part[i] = 0.0;
      continue;
    }
    out.valid[i] = true;
    const double da = (joint_position(est, limbs[i].joint_a) - gt_a).norm();
    const double db = (joint_position(est, limbs[i].joint_b) - gt_b).norm();
    out.per_part[i] = (da <= 0.5 * seg && db <= 0.5 * seg) ? 1.0 : 0.0;
    correct_sum += out.per_part[i];
    ++valid_count;
  }
  out.overall = valid_count > 0 ? correct_sum / valid_count : 0.0;
  return out;
}

// --- noise ------------------------------------------------------------------

// Ten-step Gaussian noise ladder: level l has per-coordinate std l/10 of
// top_magnitude, so the top level's std equals one right-lower-leg length in
// normalized units.
struct NoiseSpec {
  int level = 1;               // 0..10; 0 is the degenerate identity
  double top_magnitude = 1.0;  // std at level 10
  std::uint64_t seed = 0;

  double sigma() const { return level * top_magnitude / 10.0; }
};

inline Pose2D add_noise(const Pose2D& x, const NoiseSpec& spec) {
  if (spec.level < 0 || spec.level > 10)
    throw DataError("add_noise: level must lie in 0..10");
  SeededRng rng(spec.seed);
  const double sigma = spec.sigma();
  Pose2D out = x;
  for (int i = 0; i < kPose2Size; ++i) out[i] += sigma * rng.gaussian();
  return out;
}

// --- synthetic corpus -------------------------------------------------------

// Upright reference pose with exact table proportions (after the limb pass).
inline Pose3D synthetic_reference_pose() {
  Pose3D y = Pose3D::Zero();
  auto set = [&](int j, double x, double yy, double z) {
    y[3 * j] = x;
    y[3 * j + 1] = yy;
    y[3 * j + 2] = z;
  };
  set(kLeftShoulder, -0.50, 2.00, 0.00);
  set(kRightShoulder, 0.50, 2.00, 0.00);
  set(kLeftElbow, -0.55, 1.20, 0.05);
  set(kRightElbow, 0.55, 1.20, -0.05);
  set(kLeftHand, -0.60, 0.45, 0.10);
  set(kRightHand, 0.60, 0.45, -0.10);
  set(kLeftHip, -0.35, 0.90, 0.00);
  set(kRightHip, 0.35, 0.90, 0.00);
  set(kLeftKnee, -0.35, -0.25, 0.08);
  set(kRightKnee, 0.35, -0.25, -0.08);
  set(kLeftFoot, -0.35, -1.25, 0.15);
  set(kRightFoot, 0.35, -1.25, -0.15);
  return y;
}

// Rescales each limb segment to its exact target length, walking each chain
// from the proximal joint outward so corrections do not cascade.
inline void impose_limb_lengths(Pose3D& pose,
                                const std::vector<LimbSpec>& limbs) {
  for (const LimbSpec& limb : limbs) {
    const Eigen::Vector3d a = joint_position(pose, limb.joint_a);
    Eigen::Vector3d d = joint_position(pose, limb.joint_b) - a;
    const double len = d.norm();
    if (len < 1e-12) d = Eigen::Vector3d(0, -1, 0);
    else d /= len;
    pose.segment<3>(3 * limb.joint_b) =
        a + d * std::sqrt(limb.squared_length);
  }
}

struct SyntheticOptions {
  std::uint64_t family_seed = 1000;  // fixes the deformation directions
  int deformation_count = 12;
  double deformation_scale = 0.25;
  int active_deformations = 3;  // sparse combination size
  double jitter = 0.02;
  ProportionTable proportions;
  double camera_scale_min = 0.8;
  double camera_scale_max = 1.2;
};

// Poses are sparse combinations of a fixed set of random deformation
// directions around the reference pose, jittered, then forced back onto the
// exact limb proportions and expressed in the body-local frame. The
// directions are projected onto the tangent space of the limb-length
// constraints at the reference pose, so the final length correction is a
// second-order term and the poses stay near-sparse in the generator
// dictionary.
inline std::vector<Pose3D> make_synthetic_poses(
    int count, std::uint64_t seed, const SyntheticOptions& options = {}) {
  if (count < 1) throw DataError("make_synthetic_poses: count must be positive");
  const std::vector<LimbSpec> limbs = default_limbs(options.proportions);
  SeededRng family(options.family_seed);
  const Pose3D base = synthetic_reference_pose();
  Eigen::MatrixXd length_grads(kPose3Size, limbs.size());
  for (size_t i = 0; i < limbs.size(); ++i) {
    const Eigen::MatrixXd sel = limb_selector(limbs[i]);
    length_grads.col(i) = 2.0 * sel.transpose() * (sel * base);
  }
  const Eigen::MatrixXd grad_gram = length_grads.transpose() * length_grads;
  Eigen::MatrixXd deform(kPose3Size, options.deformation_count);
  for (int j = 0; j < options.deformation_count; ++j) {
    Eigen::VectorXd dir(kPose3Size);
    for (int i = 0; i < kPose3Size; ++i) dir[i] = family.gaussian();
    dir -= length_grads *
           grad_gram.ldlt().solve(length_grads.transpose() * dir);
    dir.normalize();
    deform.col(j) = options.deformation_scale * dir;
  }

  SeededRng rng(seed);
  std::vector<Pose3D> poses;
  poses.reserve(count);
  for (int s = 0; s < count; ++s) {
    Pose3D pose = base;
    for (int a = 0; a < options.active_deformations; ++a) {
      const int dir = static_cast<int>(rng.next_index(options.deformation_count));
      pose += deform.col(dir) * rng.gaussian();
    }
    for (int i = 0; i < kPose3Size; ++i) pose[i] += options.jitter * rng.gaussian();
    impose_limb_lengths(pose, limbs);
    pose = to_local_frame(pose);
    poses.push_back(normalize_skeleton(pose));
  }
  return poses;
}

inline Camera random_camera(SeededRng& rng, double scale_min = 0.8,
                            double scale_max = 1.2) {
  Eigen::Matrix3d a;
  for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(a);
  const Eigen::Matrix3d q = qr.householderQ();
  const double scale = scale_min + (scale_max - scale_min) * rng.uniform();
  Camera cam;
  cam.m1 = scale * q.row(0).transpose();
  cam.m2 = scale * q.row(1).transpose();
  return cam;
}

struct EvalInstance {
  int id = 0;
  Pose3D gt_pose = Pose3D::Zero();
  Camera gt_camera;
  Pose2D x2d = Pose2D::Zero();  // exact projection of gt_pose
};

inline std::vector<EvalInstance> make_eval_instances(
    int count, std::uint64_t seed, const SyntheticOptions& options = {}) {
  const std::vector<Pose3D> poses = make_synthetic_poses(count, seed, options);
  SeededRng rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<EvalInstance> instances;
  instances.reserve(count);
  for (int i = 0; i < count; ++i) {
    EvalInstance inst;
    inst.id = i;
    inst.gt_pose = poses[i];
    inst.gt_camera =
        random_camera(rng, options.camera_scale_min, options.camera_scale_max);
    inst.x2d = project(inst.gt_pose, inst.gt_camera);
    instances.push_back(inst);
  }
  return instances;
}

// --- experiment records -----------------------------------------------------

struct EvalRecord {
  std::string variant;
  int instance = 0;
  int noise_level = 0;     // 0 = clean
  double angle_deg = -1;   // -1 = not a viewpoint run
  double err3d = 0.0;
  std::array<double, kJointCount> joint_err{};
  std::array<double, kLimbCount> pcp_part{};
  double pcp_overall = 0.0;
  double pixel_distance = 0.0;
  int outer_iters = 0;
  long inner_iters = 0;
  double runtime_ms = 0.0;  // not serialized: reports must be reproducible
  bool solver_ok = true;
};

// Camera condition for an experiment: estimate cameras through the
// alternation (the deployment path), or hold them at ground truth (the
// controlled condition that isolates solver quality from camera recovery).
enum class CameraMode { kEstimated, kGroundTruth };

struct EvalRunOptions {
  AlternationOptions alternation;  // variant is overwritten per run
  CameraMode camera_mode = CameraMode::kEstimated;
  bool use_multi_start = false;
  std::vector<Pose3D> inits;  // cluster centers when use_multi_start
};

inline EvalRecord evaluate_instance(const EvalInstance& instance,
                                    const Pose2D& observed,
                                    const Basis& basis, VariantConfig variant,
                                    const EvalRunOptions& options,
                                    int noise_level = 0,
                                    double angle_deg = -1) {
  EvalRecord rec;
  rec.variant = variant.name();
  rec.instance = instance.id;
  rec.noise_level = noise_level;
  rec.angle_deg = angle_deg;
  const auto t0 = std::chrono::steady_clock::now();
  AlternationOptions alt = options.alternation;
  alt.variant = variant;
  try {
    AlternationResult result;
    if (options.camera_mode == CameraMode::kGroundTruth) {
      // single solve under the known camera; centering mirrors alternate()
      result.image_center = pose_centroid(observed);
      Pose2D centered;
      for (int j = 0; j < kJointCount; ++j)
        centered.segment<2>(2 * j) =
            observed.segment<2>(2 * j) - result.image_center;
      LiftProblem problem;
      problem.x = centered;
      problem.basis = &basis;
      problem.camera = instance.gt_camera;
      problem.limbs = alt.limbs;
      problem.theta = alt.theta;
      problem.variant = variant;
      result.lift = lift(problem, alt.lift);
      result.camera = instance.gt_camera;
      result.iterations = 1;
      result.residual_history = {result.lift.residual_l1};
    } else if (options.use_multi_start && !options.inits.empty()) {
      result = multi_start(observed, basis, options.inits, alt);
    } else {
      result = alternate(observed, basis, basis.mean, alt);
    }
    rec.err3d = metric_pose_error(result.lift.pose, instance.gt_pose);
    for (int j = 0; j < kJointCount; ++j)
      rec.joint_err[j] = (joint_position(result.lift.pose, j) -
                          joint_position(instance.gt_pose, j))
                             .norm();
    Pose2D reprojected = project(result.lift.pose, result.camera);
    for (int j = 0; j < kJointCount; ++j)
      reprojected.segment<2>(2 * j) += result.image_center;
    const PcpResult pcp = metric_pcp(reprojected, instance.x2d, alt.limbs);
    rec.pcp_part = pcp.per_part;
    rec.pcp_overall = pcp.overall;
    rec.pixel_distance = metric_pixel_distance(reprojected, instance.x2d);
    rec.outer_iters = result.lift.outer_iterations;
    rec.inner_iters = result.lift.inner_iterations;
  } catch (const Error&) {
    rec.solver_ok = false;
    rec.err3d = std::numeric_limits<double>::quiet_NaN();
  }
  rec.runtime_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return rec;
}

// Every variant on every instance, identical inputs per variant; records in
// deterministic (variant-major) order regardless of scheduling.
inline std::vector<EvalRecord> run_variant_grid(
    const std::vector<EvalInstance>& instances,
    const std::vector<VariantConfig>& variants, const Basis& basis,
    const EvalRunOptions& options) {
  if (instances.empty()) throw DataError("run_variant_grid: no instances");
  const int total = static_cast<int>(instances.size() * variants.size());
  std::vector<EvalRecord> records(total);
  parallel_for(total, [&](int idx) {
    const int v = idx / static_cast<int>(instances.size());
    const int i = idx % static_cast<int>(instances.size());
    records[idx] = evaluate_instance(instances[i], instances[i].x2d, basis,
                                     variants[v], options);
  });
  return records;
}

// Noise ladder: same instances at every level, level-specific seeds.
inline std::vector<EvalRecord> run_noise_sweep(
    const std::vector<EvalInstance>& instances,
    const std::vector<int>& levels,
    const std::vector<VariantConfig>& variants, const Basis& basis,
    std::uint64_t seed, const EvalRunOptions& options) {
  if (instances.empty()) throw DataError("run_noise_sweep: no instances");
  const int per_level = static_cast<int>(instances.size() * variants.size());
  const int total = per_level * static_cast<int>(levels.size());
  std::vector<EvalRecord> records(total);
  parallel_for(total, [&](int idx) {
    const int l = idx / per_level;
    const int rest = idx % per_level;
    const int v = rest / static_cast<int>(instances.size());
    const int i = rest % static_cast<int>(instances.size());
    NoiseSpec spec;
    spec.level = levels[l];
    spec.seed = seed ^ (0x100000001b3ull * (static_cast<std::uint64_t>(levels[l]) * 131071 +
                                            static_cast<std::uint64_t>(i) + 1));
    const Pose2D noisy = add_noise(instances[i].x2d, spec);
    records[idx] = evaluate_instance(instances[i], noisy, basis, variants[v],
                                     options, levels[l]);
  });
  return records;
}

// Rotates the pose about the body y axis, projects with the given camera and
// lifts each view; per-angle failures are recorded, not fatal.
inline std::vector<EvalRecord> viewpoint_sweep(const Pose3D& pose,
                                               const std::vector<double>& angles,
                                               const Camera& camera,
                                               const Basis& basis,
                                               const EvalRunOptions& options,
                                               int instance_id = 0) {
  std::vector<EvalRecord> records(angles.size());
  Pose3D local;
  try {
    local = normalize_skeleton(to_local_frame(pose));
  } catch (const Error&) {
    for (size_t a = 0; a < angles.size(); ++a) {
      records[a].variant = options.alternation.variant.name();
      records[a].instance = instance_id;
      records[a].angle_deg = angles[a];
      records[a].solver_ok = false;
      records[a].err3d = std::numeric_limits<double>::quiet_NaN();
    }
    return records;
  }
  parallel_for(static_cast<int>(angles.size()), [&](int a) {
    const Pose3D rotated = rotate_about_y(local, angles[a]);
    EvalInstance inst;
    inst.id = instance_id;
    inst.gt_pose = local;
    inst.gt_camera = camera;
    inst.x2d = project(rotated, camera);
    records[a] = evaluate_instance(inst, inst.x2d, basis,
                                   options.alternation.variant, options, 0,
                                   angles[a]);
  });
  return records;
}

}  // namespace poselift
