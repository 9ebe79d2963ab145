#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "poselift/common.hpp"

namespace poselift {

enum class BasisMethod { kPca, kClasswisePca, kSparse };

inline const char* basis_method_name(BasisMethod m) {
  switch (m) {
    case BasisMethod::kPca: return "pca";
    case BasisMethod::kClasswisePca: return "classwise-pca";
    case BasisMethod::kSparse: return "sparse";
  }
  return "?";
}

inline BasisMethod basis_method_from_name(const std::string& s) {
  if (s == "pca") return BasisMethod::kPca;
  if (s == "classwise-pca") return BasisMethod::kClasswisePca;
  if (s == "sparse") return BasisMethod::kSparse;
  throw ParseError("unknown basis method: " + s);
}

// Overcomplete pose basis: columns of `matrix` are basis poses, `mean` is the
// mean pose. A 3D pose is reconstructed as matrix * alpha + mean.
struct Basis {
  Eigen::MatrixXd matrix;  // 3n x k
  Pose3D mean;
  BasisMethod method = BasisMethod::kPca;
  double theta_learn = 0.0;  // sparse method only
  std::uint64_t seed = 0;    // sparse method only

  int count() const { return static_cast<int>(matrix.cols()); }

  Pose3D reconstruct(const Eigen::VectorXd& alpha) const {
    if (alpha.size() != matrix.cols())
      throw DimensionError("coefficient count does not match basis");
    return matrix * alpha + mean;
  }
};

struct Coefficients {
  Eigen::VectorXd values;

  int active_count(double tol = 1e-3) const {
    return static_cast<int>((values.array().abs() > tol).count());
  }
};

namespace detail {

// Largest eigenvalue of the symmetric PSD matrix G via power iteration.
inline double power_iteration_lmax(const Eigen::MatrixXd& gram,
                                   int max_iterations = 500) {
  const int n = static_cast<int>(gram.rows());
  if (n == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double lambda = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd w = gram * v;
    const double next = w.norm();
    if (next <= 0.0) return 0.0;
    w /= next;
    if (std::abs(next - lambda) <= 1e-12 * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
    v = w;
  }
  return lambda;
}

struct LassoResult {
  Eigen::MatrixXd coeffs;      // k x N
  Eigen::VectorXd objectives;  // per column, at the returned iterate
  bool converged = true;
  int iterations = 0;
};

// FISTA on N independent lasso columns sharing one design matrix:
//   min ||r_j - B a_j||^2 + theta ||a_j||_1.
// Keeps the best iterate per column, so a warm start never gets worse.
// Step size is 1/L with L = 2 lmax(B^T B), the Lipschitz constant of the
// gradient of the (unhalved) quadratic.
inline LassoResult lasso_fista(const Eigen::MatrixXd& design,
                               const Eigen::MatrixXd& targets, double theta,
                               const Eigen::MatrixXd& warm, double tol,
                               int max_iterations) {
  const Eigen::Index n_cols = targets.cols();
  const Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::MatrixXd bt_targets = design.transpose() * targets;
  const double lmax = power_iteration_lmax(gram) * 1.01 + 1e-30;
  const double step = 1.0 / (2.0 * lmax);
  const double shrink = step * theta;

  auto objectives = [&](const Eigen::MatrixXd& a) -> Eigen::VectorXd {
    return (targets - design * a).colwise().squaredNorm().transpose() +
           theta * a.cwiseAbs().colwise().sum().transpose();
  };

  Eigen::MatrixXd x = warm;
  Eigen::MatrixXd best = x;
  Eigen::VectorXd best_obj = objectives(x);
  Eigen::MatrixXd y = x;
  double t_momentum = 1.0;
  double prev_total = best_obj.sum();
  LassoResult out;
  out.converged = false;
  int it = 0;
  for (it = 0; it < max_iterations; ++it) {
    const Eigen::MatrixXd grad = 2.0 * (gram * y - bt_targets);
    Eigen::MatrixXd x_next = y - step * grad;
    x_next = x_next.array().sign() * (x_next.array().abs() - shrink).max(0.0);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
    y = x_next + ((t_momentum - 1.0) / t_next) * (x_next - x);
    const Eigen::MatrixXd x_prev = std::move(x);
    x = std::move(x_next);
    t_momentum = t_next;

    const Eigen::VectorXd obj = objectives(x);
    for (Eigen::Index j = 0; j < n_cols; ++j) {
      if (obj[j] < best_obj[j]) {
        best_obj[j] = obj[j];
        best.col(j) = x.col(j);
      }
    }
    const double total = obj.sum();
    // objective change alone can flatten out while the iterate is still
    // moving; require the step to be at fixed-point scale as well
    const double step_size = (x - x_prev).cwiseAbs().maxCoeff();
    if (std::abs(prev_total - total) <=
            tol * std::max(1.0, std::abs(prev_total)) &&
        step_size <= 1e-9 * (1.0 + x.cwiseAbs().maxCoeff())) {
      out.converged = true;
      ++it;
      break;
    }
    // objective went up: momentum overshoot, restart it
    if (total > prev_total) {
      y = x;
      t_momentum = 1.0;
    }
    prev_total = total;
  }
  out.iterations = it;
  out.coeffs = std::move(best);
  out.objectives = std::move(best_obj);
  return out;
}

inline Eigen::MatrixXd poses_as_matrix(const std::vector<Pose3D>& poses) {
  Eigen::MatrixXd data(kPose3Size, static_cast<Eigen::Index>(poses.size()));
  for (size_t i = 0; i < poses.size(); ++i) data.col(static_cast<Eigen::Index>(i)) = poses[i];
  return data;
}

// Removes the per-joint centroid from a pose-displacement vector. Dictionary
// columns must be translation-free so that reconstructions from centered
// poses stay centered (the camera model has no translation term).
inline void center_displacement(Eigen::Ref<Eigen::VectorXd> column) {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (int j = 0; j < kJointCount; ++j) centroid += column.segment<3>(3 * j);
  centroid /= kJointCount;
  for (int j = 0; j < kJointCount; ++j) column.segment<3>(3 * j) -= centroid;
}

// Top-k principal directions of the centered data, as columns.
inline Eigen::MatrixXd principal_directions(const Eigen::MatrixXd& centered,
                                            int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered *
                                                     centered.transpose());
  const int n = static_cast<int>(centered.rows());
  Eigen::MatrixXd dirs(n, k);
  for (int j = 0; j < k; ++j) dirs.col(j) = eig.eigenvectors().col(n - 1 - j);
  return dirs;
}

}  // namespace detail

inline Basis learn_pca(const std::vector<Pose3D>& poses, int k) {
  if (poses.size() < 2) throw DataError("learn_pca: need at least 2 poses");
  if (k < 1) throw DimensionError("learn_pca: k must be positive");
  if (k > kPose3Size)
    throw DimensionError("learn_pca: k exceeds the dimension of a 3D pose (36)");
  const Eigen::MatrixXd data = detail::poses_as_matrix(poses);
  const Pose3D mean = data.rowwise().mean();
  Basis basis;
  basis.matrix = detail::principal_directions(data.colwise() - mean, k);
  basis.mean = mean;
  basis.method = BasisMethod::kPca;
  return basis;
}

inline Basis learn_classwise_pca(const std::vector<Pose3D>& poses,
                                 const std::vector<int>& labels,
                                 int k_per_class) {
  if (poses.size() != labels.size())
    throw DataError("learn_classwise_pca: one label per pose required");
  if (k_per_class < 1)
    throw DimensionError("learn_classwise_pca: k_per_class must be positive");
  if (k_per_class > kPose3Size)
    throw DimensionError(
        "learn_classwise_pca: k_per_class exceeds the pose dimension (36)");
  std::map<int, std::vector<Pose3D>> by_class;
  for (size_t i = 0; i < poses.size(); ++i) by_class[labels[i]].push_back(poses[i]);
  if (by_class.empty()) throw DataError("learn_classwise_pca: no poses");
  for (const auto& [label, members] : by_class) {
    if (members.size() < 2)
      throw DataError("learn_classwise_pca: class " + std::to_string(label) +
                      " has fewer than 2 poses");
  }
  const Eigen::MatrixXd data = detail::poses_as_matrix(poses);
  Basis basis;
  basis.mean = data.rowwise().mean();
  basis.matrix.resize(kPose3Size,
                      static_cast<Eigen::Index>(by_class.size()) * k_per_class);
  Eigen::Index col = 0;
  for (const auto& [label, members] : by_class) {
    const Eigen::MatrixXd class_data = detail::poses_as_matrix(members);
    const Pose3D class_mean = class_data.rowwise().mean();
    basis.matrix.middleCols(col, k_per_class) =
        detail::principal_directions(class_data.colwise() - class_mean,
                                     k_per_class);
    col += k_per_class;
  }
  basis.method = BasisMethod::kClasswisePca;
  return basis;
}

struct SparseLearnDiagnostics {
  // Full objective sum_j ||y_j - mu - B a_j||^2 + theta sum_j ||a_j||_1,
  // recorded after each epoch's coding + dictionary update.
  std::vector<double> objective_per_epoch;
};

// Batch dictionary learning: alternate lasso coding of all samples with a
// block-coordinate dictionary update under unit-ball column constraints,
// then rescale columns to unit norm at the end.
inline Basis learn_sparse_dictionary(const std::vector<Pose3D>& poses, int k,
                                     double theta_learn, int epochs,
                                     std::uint64_t seed,
                                     SparseLearnDiagnostics* diagnostics = nullptr) {
  if (poses.empty()) throw DataError("learn_sparse_dictionary: no poses");
  if (k < 1) throw DimensionError("learn_sparse_dictionary: k must be positive");
  if (theta_learn < 0) throw DataError("learn_sparse_dictionary: theta < 0");
  const Eigen::MatrixXd data = detail::poses_as_matrix(poses);
  const Pose3D mean = data.rowwise().mean();
  const Eigen::MatrixXd residuals = data.colwise() - mean;
  const Eigen::Index n_samples = residuals.cols();

  SeededRng rng(seed);
  Eigen::MatrixXd dict(kPose3Size, k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < kPose3Size; ++i) dict(i, j) = rng.gaussian();
    detail::center_displacement(dict.col(j));
    dict.col(j).normalize();
  }

  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(k, n_samples);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    auto coded = detail::lasso_fista(dict, residuals, theta_learn, coeffs,
                                     1e-10, 500);
    coeffs = std::move(coded.coeffs);

    const Eigen::MatrixXd gram = coeffs * coeffs.transpose();
    const Eigen::MatrixXd fit = residuals * coeffs.transpose();
    for (int j = 0; j < k; ++j) {
      if (gram(j, j) <= 1e-12) continue;  // column unused this epoch
      Eigen::VectorXd u =
          (fit.col(j) - dict * gram.col(j)) / gram(j, j) + dict.col(j);
      detail::center_displacement(u);
      const double norm = u.norm();
      if (norm > 1.0) u /= norm;
      dict.col(j) = u;
    }
    if (diagnostics) {
      const double obj =
          (residuals - dict * coeffs).squaredNorm() +
          theta_learn * coeffs.cwiseAbs().sum();
      diagnostics->objective_per_epoch.push_back(obj);
    }
  }

  for (int j = 0; j < k; ++j) {
    const double norm = dict.col(j).norm();
    if (norm <= 1e-12) {
      for (int i = 0; i < kPose3Size; ++i) dict(i, j) = rng.gaussian();
      detail::center_displacement(dict.col(j));
      dict.col(j).normalize();
    } else {
      dict.col(j) /= norm;
    }
  }

  Basis basis;
  basis.matrix = std::move(dict);
  basis.mean = mean;
  basis.method = BasisMethod::kSparse;
  basis.theta_learn = theta_learn;
  basis.seed = seed;
  return basis;
}

struct SparseCodeOptions {
  double tol = 1e-8;          // relative objective change
  int max_iterations = 5000;
};

// Proximal-gradient solve of min ||y - mu - B a||^2 + theta ||a||_1.
// Throws ConvergenceError (carrying the best iterate) on the iteration cap.
inline Coefficients sparse_code(const Pose3D& pose, const Basis& basis,
                                double theta,
                                const SparseCodeOptions& options = {}) {
  if (theta < 0) throw DataError("sparse_code: theta must be nonnegative");
  const Eigen::VectorXd target = pose - basis.mean;
  auto result = detail::lasso_fista(
      basis.matrix, target, theta,
      Eigen::MatrixXd::Zero(basis.count(), 1), options.tol,
      options.max_iterations);
  if (!result.converged) {
    throw ConvergenceError(
        "sparse_code: no convergence within " +
            std::to_string(options.max_iterations) + " iterations",
        result.coeffs.col(0));
  }
  return Coefficients{result.coeffs.col(0)};
}

}  // namespace poselift
