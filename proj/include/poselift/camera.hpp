#pragma once

#include <limits>

#include "poselift/common.hpp"

namespace poselift {

// Weak-perspective camera: x_joint = M0 * y_joint with M0 = [m1^T; m2^T].
// Rows are mutually orthogonal at convergence of estimate_camera.
struct Camera {
  Eigen::Vector3d m1 = Eigen::Vector3d(1, 0, 0);
  Eigen::Vector3d m2 = Eigen::Vector3d(0, 1, 0);

  Eigen::Matrix<double, 2, 3> matrix() const {
    Eigen::Matrix<double, 2, 3> m;
    m.row(0) = m1.transpose();
    m.row(1) = m2.transpose();
    return m;
  }

  double row_dot() const { return m1.dot(m2); }
};

// Elementwise shrinkage sign(v) * max(|v| - t, 0): the closed-form minimizer
// of t ||u||_1 + 1/2 ||u - v||^2.
inline Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double t) {
  if (t < 0) throw DataError("soft_threshold: threshold must be nonnegative");
  return v.array().sign() * (v.array().abs() - t).max(0.0);
}

inline Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& v, double t) {
  if (t < 0) throw DataError("soft_threshold: threshold must be nonnegative");
  return v.array().sign() * (v.array().abs() - t).max(0.0);
}

inline Pose2D project(const Pose3D& pose, const Camera& camera) {
  const auto m = camera.matrix();
  Pose2D out;
  for (int j = 0; j < kJointCount; ++j)
    out.segment<2>(2 * j) = m * pose.segment<3>(3 * j);
  return out;
}

inline Eigen::Matrix3Xd pose_as_columns(const Pose3D& pose) {
  Eigen::Matrix3Xd m(3, kJointCount);
  for (int j = 0; j < kJointCount; ++j) m.col(j) = pose.segment<3>(3 * j);
  return m;
}

inline Eigen::Matrix2Xd pose_as_columns(const Pose2D& pose) {
  Eigen::Matrix2Xd m(2, kJointCount);
  for (int j = 0; j < kJointCount; ++j) m.col(j) = pose.segment<2>(2 * j);
  return m;
}

inline Pose3D pose_from_columns(const Eigen::Matrix3Xd& m) {
  Pose3D p;
  for (int j = 0; j < kJointCount; ++j) p.segment<3>(3 * j) = m.col(j);
  return p;
}

inline Pose2D pose_from_columns(const Eigen::Matrix2Xd& m) {
  Pose2D p;
  for (int j = 0; j < kJointCount; ++j) p.segment<2>(2 * j) = m.col(j);
  return p;
}

struct CameraAdmState {
  Eigen::MatrixXd residual;    // R, 2 x n
  Eigen::MatrixXd multiplier;  // H, 2 x n
  double zeta = 0.0;           // multiplier of m1^T m2 = 0
  double tau = 1.0;
};

struct CameraEstimateOptions {
  double tol = 1e-8;  // on max(||M0 Y + R - X||_inf, |m1^T m2|)
  int max_iterations = 300;
  double tau0 = 1.0;
  double tau_growth = 1.1;
  double tau_cap = 1e10;
};

struct CameraDiagnostics {
  int iterations = 0;
  double residual_l1 = 0.0;     // ||X - M0 Y||_1 at the returned camera
  double orthogonality = 0.0;   // |m1^T m2|
  bool converged = false;
  bool used_pseudo_inverse = false;
};

namespace detail {

// Solve A v = b; falls back to a minimum-norm solve when A is (near-)singular.
inline Eigen::Vector3d solve_3x3(const Eigen::Matrix3d& a,
                                 const Eigen::Vector3d& b, bool* degenerate) {
  Eigen::Vector3d v = a.ldlt().solve(b);
  if ((a * v - b).norm() > 1e-9 * std::max(1.0, b.norm())) {
    v = a.completeOrthogonalDecomposition().solve(b);
    if (degenerate) *degenerate = true;
  }
  return v;
}

}  // namespace detail

// Augmented Lagrangian of the camera problem at the given state.
inline double camera_lagrangian(const Camera& camera,
                                const CameraAdmState& state,
                                const Eigen::Matrix2Xd& image,
                                const Eigen::Matrix3Xd& world) {
  const Eigen::MatrixXd gap = camera.matrix() * world + state.residual - image;
  const double orth = camera.row_dot();
  return state.residual.cwiseAbs().sum() +
         (state.multiplier.cwiseProduct(gap)).sum() + state.zeta * orth +
         0.5 * state.tau * (gap.squaredNorm() + orth * orth);
}

// Least-squares fit of M0 followed by symmetric orthogonalization of the two
// rows, preserving the mean row scale. Deterministic.
inline Camera initial_camera(const Eigen::Matrix2Xd& image,
                             const Eigen::Matrix3Xd& world) {
  const Eigen::MatrixXd fit =
      (world * world.transpose())
          .completeOrthogonalDecomposition()
          .solve(world * image.transpose())
          .transpose();  // 2 x 3
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      fit, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double scale =
      0.5 * (svd.singularValues()(0) + svd.singularValues()(1));
  const Eigen::MatrixXd ortho =
      scale * svd.matrixU() * svd.matrixV().transpose();
  Camera cam;
  cam.m1 = ortho.row(0).transpose();
  cam.m2 = ortho.row(1).transpose();
  return cam;
}

// One R -> m1 -> m2 block sweep at fixed multipliers and penalty. Each block
// is an exact minimizer of the augmented Lagrangian, so a sweep never
// increases it.
inline void camera_sweep(Camera& camera, CameraAdmState& state,
                         const Eigen::Matrix2Xd& image,
                         const Eigen::Matrix3Xd& world,
                         const Eigen::Matrix3d& world_gram,
                         bool* degenerate = nullptr) {
  state.residual = soft_threshold(
      Eigen::MatrixXd(image - camera.matrix() * world -
                      state.multiplier / state.tau),
      1.0 / state.tau);
  const Eigen::MatrixXd targets =
      image - state.residual - state.multiplier / state.tau;
  const double c = state.zeta / state.tau;
  const Eigen::Matrix3d a1 =
      world_gram + camera.m2 * camera.m2.transpose();
  camera.m1 = detail::solve_3x3(
      a1, world * targets.row(0).transpose() - c * camera.m2, degenerate);
  const Eigen::Matrix3d a2 =
      world_gram + camera.m1 * camera.m1.transpose();
  camera.m2 = detail::solve_3x3(
      a2, world * targets.row(1).transpose() - c * camera.m1, degenerate);
}

inline void camera_multiplier_ascent(const Camera& camera,
                                     CameraAdmState& state,
                                     const Eigen::Matrix2Xd& image,
                                     const Eigen::Matrix3Xd& world) {
  state.multiplier +=
      state.tau * (camera.matrix() * world + state.residual - image);
  state.zeta += state.tau * camera.row_dot();
}

// ADM for min ||X - M0 Y||_1 s.t. m1^T m2 = 0 over the camera rows.
// Inputs must be column-centered (the weak-perspective model has no
// translation term). Throws SingularError when Y has rank < 2 and
// ConvergenceError (carrying [m1; m2] of the best iterate) on the cap.
inline Camera estimate_camera(const Eigen::Matrix2Xd& image,
                              const Eigen::Matrix3Xd& world,
                              const CameraEstimateOptions& options = {},
                              CameraDiagnostics* diagnostics = nullptr) {
  if (image.cols() != world.cols())
    throw DimensionError("estimate_camera: joint counts differ");
  const Eigen::Matrix3d world_gram = world * world.transpose();
  {
    Eigen::JacobiSVD<Eigen::Matrix3Xd> svd(world);
    if (svd.singularValues()(1) <= 1e-10 * std::max(1.0, svd.singularValues()(0)))
      throw SingularError("estimate_camera: world points have rank < 2");
  }

  Camera camera = initial_camera(image, world);
  CameraAdmState state;
  state.residual = Eigen::MatrixXd::Zero(2, image.cols());
  state.multiplier = Eigen::MatrixXd::Zero(2, image.cols());
  state.tau = options.tau0;

  Camera best = camera;
  double best_gap = std::numeric_limits<double>::infinity();
  bool degenerate = false;
  int it = 0;
  bool converged = false;
  for (it = 0; it < options.max_iterations; ++it) {
    camera_sweep(camera, state, image, world, world_gram, &degenerate);
    const double primal =
        (camera.matrix() * world + state.residual - image).cwiseAbs().maxCoeff();
    const double orth = std::abs(camera.row_dot());
    camera_multiplier_ascent(camera, state, image, world);
    state.tau = std::min(state.tau * options.tau_growth, options.tau_cap);
    const double gap = std::max(primal, orth);
    if (gap < best_gap) {
      best_gap = gap;
      best = camera;
    }
    if (gap < options.tol) {
      converged = true;
      ++it;
      break;
    }
  }

  const Camera& result = converged ? camera : best;
  if (diagnostics) {
    diagnostics->iterations = it;
    diagnostics->residual_l1 =
        (image - result.matrix() * world).cwiseAbs().sum();
    diagnostics->orthogonality = std::abs(result.row_dot());
    diagnostics->converged = converged;
    diagnostics->used_pseudo_inverse = degenerate;
  }
  if (!converged) {
    Eigen::VectorXd iterate(6);
    iterate << best.m1, best.m2;
    throw ConvergenceError("estimate_camera: iteration cap reached", iterate);
  }
  return result;
}

}  // namespace poselift
