#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "poselift/common.hpp"

namespace poselift {

// Canonical joint order. Fixed for the whole library: every pose vector,
// file format and basis column uses it. Joint j occupies coordinate slots
// 3j..3j+2 in a Pose3D and 2j, 2j+1 in a Pose2D.
enum Joint : int {
  kLeftShoulder = 0,
  kLeftElbow = 1,
  kLeftHand = 2,
  kRightShoulder = 3,
  kRightElbow = 4,
  kRightHand = 5,
  kLeftHip = 6,
  kLeftKnee = 7,
  kLeftFoot = 8,
  kRightHip = 9,
  kRightKnee = 10,
  kRightFoot = 11,
};

struct JointSchema {
  static const std::array<std::string, kJointCount>& names() {
    static const std::array<std::string, kJointCount> kNames = {
        "Lshoulder", "Lelbow", "Lhand", "Rshoulder", "Relbow", "Rhand",
        "Lhip",      "Lknee",  "Lfoot", "Rhip",      "Rknee",  "Rfoot"};
    return kNames;
  }

  static int index(std::string_view name) {
    const auto& all = names();
    for (int i = 0; i < kJointCount; ++i) {
      if (all[i] == name) return i;
    }
    throw SchemaError("unknown joint name: " + std::string(name));
  }
};

// The eight constrained limbs, in fixed order.
enum class LimbId : int {
  kLUA = 0,  // left upper arm
  kLLA = 1,  // left lower arm
  kRUA = 2,  // right upper arm
  kRLA = 3,  // right lower arm
  kLUL = 4,  // left upper leg
  kLLL = 5,  // left lower leg
  kRUL = 6,  // right upper leg
  kRLL = 7,  // right lower leg
};

inline constexpr int kLimbCount = 8;

inline const std::array<std::string, kLimbCount>& limb_names() {
  static const std::array<std::string, kLimbCount> kNames = {
      "LUA", "LLA", "RUA", "RLA", "LUL", "LLL", "RUL", "RLL"};
  return kNames;
}

struct LimbSpec {
  LimbId id;
  int joint_a;             // proximal endpoint (i1)
  int joint_b;             // distal endpoint (i2)
  double squared_length;   // target L_i, in normalized units
};

// Limb length ratios relative to the right lower leg. The solver treats the
// table as data; override via config file if better anthropometry is known.
struct ProportionTable {
  double upper_arm = 0.80;
  double lower_arm = 0.75;
  double upper_leg = 1.15;
  double lower_leg = 1.00;

  double ratio(LimbId id) const {
    switch (id) {
      case LimbId::kLUA:
      case LimbId::kRUA:
        return upper_arm;
      case LimbId::kLLA:
      case LimbId::kRLA:
        return lower_arm;
      case LimbId::kLUL:
      case LimbId::kRUL:
        return upper_leg;
      case LimbId::kLLL:
      case LimbId::kRLL:
        return lower_leg;
    }
    throw SchemaError("bad limb id");
  }

  void validate() const {
    if (lower_leg != 1.0)
      throw DataError("proportion table: lower leg ratio must be 1");
    for (double r : {upper_arm, lower_arm, upper_leg, lower_leg}) {
      if (!(r > 0.0 && r < 3.0))
        throw DataError("proportion table: ratios must lie in (0, 3)");
    }
  }
};

inline std::vector<LimbSpec> default_limbs(const ProportionTable& table = {}) {
  table.validate();
  const std::array<std::array<int, 2>, kLimbCount> ends = {{
      {kLeftShoulder, kLeftElbow},
      {kLeftElbow, kLeftHand},
      {kRightShoulder, kRightElbow},
      {kRightElbow, kRightHand},
      {kLeftHip, kLeftKnee},
      {kLeftKnee, kLeftFoot},
      {kRightHip, kRightKnee},
      {kRightKnee, kRightFoot},
  }};
  std::vector<LimbSpec> limbs;
  limbs.reserve(kLimbCount);
  for (int i = 0; i < kLimbCount; ++i) {
    const auto id = static_cast<LimbId>(i);
    const double r = table.ratio(id);
    limbs.push_back({id, ends[i][0], ends[i][1], r * r});
  }
  return limbs;
}

// Selection-difference matrix C_i = E_{i1} - E_{i2} (3 x 3n). Applied to a
// pose it yields the 3-vector from joint i2 to joint i1.
inline Eigen::MatrixXd limb_selector(const LimbSpec& limb,
                                     int joint_count = kJointCount) {
  if (limb.joint_a < 0 || limb.joint_a >= joint_count || limb.joint_b < 0 ||
      limb.joint_b >= joint_count || limb.joint_a == limb.joint_b) {
    throw SchemaError("limb endpoints must be distinct joints in [0, n)");
  }
  Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(3, 3 * joint_count);
  for (int a = 0; a < 3; ++a) {
    sel(a, 3 * limb.joint_a + a) = 1.0;
    sel(a, 3 * limb.joint_b + a) = -1.0;
  }
  return sel;
}

inline Eigen::Vector3d joint_position(const Pose3D& pose, int joint) {
  return pose.segment<3>(3 * joint);
}

inline Eigen::Vector2d joint_position(const Pose2D& pose, int joint) {
  return pose.segment<2>(2 * joint);
}

inline std::array<double, kLimbCount> limb_lengths(
    const Pose3D& pose, const std::vector<LimbSpec>& limbs) {
  std::array<double, kLimbCount> out{};
  for (size_t i = 0; i < limbs.size() && i < out.size(); ++i) {
    out[i] = (joint_position(pose, limbs[i].joint_a) -
              joint_position(pose, limbs[i].joint_b))
                 .norm();
  }
  return out;
}

inline Eigen::Vector3d pose_centroid(const Pose3D& pose) {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (int j = 0; j < kJointCount; ++j) c += joint_position(pose, j);
  return c / kJointCount;
}

inline Eigen::Vector2d pose_centroid(const Pose2D& pose) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (int j = 0; j < kJointCount; ++j) c += joint_position(pose, j);
  return c / kJointCount;
}

// Centers the pose at its joint centroid and scales it so the right lower
// leg has length one. Camera estimation relies on poses being centered.
inline Pose3D normalize_skeleton(const Pose3D& pose) {
  const double rll =
      (joint_position(pose, kRightKnee) - joint_position(pose, kRightFoot))
          .norm();
  if (rll <= 1e-12)
    throw DegenerateError("normalize_skeleton: right lower leg has zero length");
  const Eigen::Vector3d c = pose_centroid(pose);
  Pose3D out;
  for (int j = 0; j < kJointCount; ++j)
    out.segment<3>(3 * j) = (joint_position(pose, j) - c) / rll;
  return out;
}

struct LocalFrame {
  Eigen::Matrix3d rotation;  // rows are the x/y/z axes in world coordinates
  Eigen::Vector3d origin;    // hip midpoint
};

// Frame attached to the body: x along the hip line (left to right), y along
// the spine (hip midpoint to shoulder midpoint, orthogonalized), z = x cross y.
inline LocalFrame local_frame(const Pose3D& pose) {
  const Eigen::Vector3d hip_mid =
      0.5 * (joint_position(pose, kLeftHip) + joint_position(pose, kRightHip));
  const Eigen::Vector3d shoulder_mid =
      0.5 * (joint_position(pose, kLeftShoulder) +
             joint_position(pose, kRightShoulder));
  Eigen::Vector3d x_axis =
      joint_position(pose, kRightHip) - joint_position(pose, kLeftHip);
  const double hip_len = x_axis.norm();
  if (hip_len <= 1e-12) throw DegenerateError("local_frame: hips coincide");
  x_axis /= hip_len;
  Eigen::Vector3d spine = shoulder_mid - hip_mid;
  spine -= spine.dot(x_axis) * x_axis;
  const double spine_len = spine.norm();
  if (spine_len <= 1e-12)
    throw DegenerateError("local_frame: spine parallel to hip line");
  const Eigen::Vector3d y_axis = spine / spine_len;
  const Eigen::Vector3d z_axis = x_axis.cross(y_axis);
  LocalFrame frame;
  frame.rotation.row(0) = x_axis;
  frame.rotation.row(1) = y_axis;
  frame.rotation.row(2) = z_axis;
  frame.origin = hip_mid;
  return frame;
}

inline Pose3D to_local_frame(const Pose3D& pose) {
  const LocalFrame frame = local_frame(pose);
  Pose3D out;
  for (int j = 0; j < kJointCount; ++j)
    out.segment<3>(3 * j) =
        frame.rotation * (joint_position(pose, j) - frame.origin);
  return out;
}

// Rigid rotation about the frame's y axis; angle in degrees.
inline Pose3D rotate_about_y(const Pose3D& pose, double angle_deg) {
  const double a = angle_deg * M_PI / 180.0;
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d rot;
  rot << c, 0, s, 0, 1, 0, -s, 0, c;
  Pose3D out;
  for (int j = 0; j < kJointCount; ++j)
    out.segment<3>(3 * j) = rot * joint_position(pose, j);
  return out;
}

}  // namespace poselift
