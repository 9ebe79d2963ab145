#pragma once

#include <array>
#include <cctype>
#include <string>
#include <vector>

#include "poselift/basis.hpp"
#include "poselift/camera.hpp"
#include "poselift/skeleton.hpp"

namespace poselift {

enum class LossNorm { kL1, kL2 };

// One cell of the baseline grid: {L1,L2} loss x anthropometric on/off x
// sparsity on/off. Naming follows the convention L1WAWS = L1 loss, With
// Anthropometric constraints, With Sparsity; the full method is L1WAWS.
struct VariantConfig {
  LossNorm loss = LossNorm::kL1;
  bool anthropometric = true;
  bool sparsity = true;

  std::string name() const {
    std::string s = loss == LossNorm::kL1 ? "L1" : "L2";
    s += anthropometric ? "WA" : "NA";
    s += sparsity ? "WS" : "NS";
    return s;
  }

  static VariantConfig parse(const std::string& text) {
    std::string s;
    for (char c : text) s += static_cast<char>(std::toupper(c));
    if (s.size() != 6) throw ParseError("bad variant name: " + text);
    VariantConfig v;
    if (s.substr(0, 2) == "L1") v.loss = LossNorm::kL1;
    else if (s.substr(0, 2) == "L2") v.loss = LossNorm::kL2;
    else throw ParseError("bad variant name: " + text);
    if (s.substr(2, 2) == "WA") v.anthropometric = true;
    else if (s.substr(2, 2) == "NA") v.anthropometric = false;
    else throw ParseError("bad variant name: " + text);
    if (s.substr(4, 2) == "WS") v.sparsity = true;
    else if (s.substr(4, 2) == "NS") v.sparsity = false;
    else throw ParseError("bad variant name: " + text);
    return v;
  }

  static std::array<VariantConfig, 8> grid() {
    std::array<VariantConfig, 8> all;
    int i = 0;
    for (LossNorm loss : {LossNorm::kL2, LossNorm::kL1})
      for (bool anthro : {false, true})
        for (bool sparse : {false, true}) all[i++] = {loss, anthro, sparse};
    return all;
  }
};

struct LiftProblem {
  Pose2D x = Pose2D::Zero();
  const Basis* basis = nullptr;
  Camera camera;
  std::vector<LimbSpec> limbs;
  double theta = 0.1;
  VariantConfig variant;

  void validate() const {
    if (basis == nullptr) throw DataError("lift problem: no basis");
    if (basis->matrix.rows() != kPose3Size)
      throw DimensionError("lift problem: basis rows != 3n");
    if (theta < 0) throw DataError("lift problem: theta must be nonnegative");
  }
};

// Outer ADM state for the pose problem: auxiliary variables gamma (loss
// split) and beta (sparsity split) with their multipliers.
struct PoseAdmState {
  Eigen::VectorXd alpha;    // k
  Eigen::VectorXd beta;     // k
  Eigen::VectorXd gamma;    // 2n
  Eigen::VectorXd lambda1;  // 2n
  Eigen::VectorXd lambda2;  // k
  double eta = 0.1;
};

// Inner ADM state for the rank-constrained Q/P splitting. Persisted across
// outer iterations: the inner multiplier G and penalty delta anneal once over
// the whole solve instead of restarting at every alpha update.
struct SdpState {
  Eigen::MatrixXd q, p, g;  // (k+1) x (k+1), all symmetric
  double delta = 1.0;
  bool initialized = false;
  double last_gap = 0.0;

  void reset(const Eigen::VectorXd& alpha, double delta0) {
    const Eigen::Index k = alpha.size();
    Eigen::VectorXd z(k + 1);
    z << alpha, 1.0;
    p = z * z.transpose();
    q = p;
    g = Eigen::MatrixXd::Zero(k + 1, k + 1);
    delta = delta0;
    initialized = true;
  }
};

struct SdpOptions {
  int sweeps = 5;              // Q/P sweeps per alpha update
  double delta0 = 1.0;
  double delta_growth = 1.02;  // per sweep; about x1.10 per outer iteration
  double delta_cap = 1e8;
  double tol = 1e-6;           // relative ||Q - P||_F
  double projection_gain = 2.0;  // P projects Q + gain/delta * G; 1 would
                                 // be the standard scaled multiplier step
  double extraction_tol = 1e-6;
};

struct LiftOptions {
  double eta0 = 0.1;
  double eta_growth = 1.1;
  double eta_cap = 1e8;
  int max_outer = 300;
  double tol = 1e-6;             // relative primal residuals
  double constraint_tol = 1e-6;  // max |  ||C_i y||^2 - L_i  | at convergence
  // When positive, a resumed solve pulls the penalties back down to these
  // values (multipliers rescaled so the scaled duals are unchanged), giving
  // the solver mobility to track a changed camera at the cost of re-annealing
  // each round. Zero keeps the annealed state.
  double eta_resume = 0.0;
  double delta_resume = 0.0;
  SdpOptions sdp;
  Eigen::VectorXd alpha_init;    // empty = start at zero
};

struct LiftResult {
  Coefficients alpha;
  Pose3D pose = Pose3D::Zero();  // basis.matrix * alpha + basis.mean
  double residual_l1 = 0.0;      // ||x - M(B alpha + mu)||_1
  double residual_l2 = 0.0;
  std::array<double, kLimbCount> limb_violation{};  // ||C_i y||^2 - L_i
  int outer_iterations = 0;
  long inner_iterations = 0;
  bool converged = false;
  int extraction_fallbacks = 0;
  bool ridge_fallback = false;
};

// --- building blocks -------------------------------------------------------

// Limb quadratics: z^T Omega_i z = ||C_i(B a + mu)||^2 - L_i for
// z = [a^T 1]^T. Symmetric by construction.
inline std::vector<Eigen::MatrixXd> build_limb_quadratics(
    const Basis& basis, const std::vector<LimbSpec>& limbs) {
  const int k = basis.count();
  std::vector<Eigen::MatrixXd> omegas;
  omegas.reserve(limbs.size());
  for (const LimbSpec& limb : limbs) {
    const Eigen::MatrixXd sel = limb_selector(limb);
    const Eigen::MatrixXd sel_basis = sel * basis.matrix;  // 3 x k
    const Eigen::Vector3d sel_mean = sel * basis.mean;
    Eigen::MatrixXd omega(k + 1, k + 1);
    omega.topLeftCorner(k, k) = sel_basis.transpose() * sel_basis;
    omega.topRightCorner(k, 1) = sel_basis.transpose() * sel_mean;
    omega.bottomLeftCorner(1, k) = omega.topRightCorner(k, 1).transpose();
    omega(k, k) = sel_mean.squaredNorm() - limb.squared_length;
    omegas.push_back(std::move(omega));
  }
  return omegas;
}

inline Eigen::MatrixXd projected_basis(const Basis& basis,
                                       const Camera& camera) {
  const auto m = camera.matrix();
  Eigen::MatrixXd mb(kPose2Size, basis.count());
  for (int j = 0; j < kJointCount; ++j)
    mb.middleRows(2 * j, 2) = m * basis.matrix.middleRows(3 * j, 3);
  return mb;
}

namespace detail {

// Quadratic form of the alpha subproblem: top-left block holds the Hessian,
// the bottom row twice the linear term, last column zero. z^T W z reproduces
// the alpha-dependent part of the augmented Lagrangian up to an additive
// constant (and, for the L1 path, an overall eta/2 factor that does not move
// the argmin).
inline Eigen::MatrixXd build_w_from(const VariantConfig& variant,
                                    const Eigen::MatrixXd& mb,
                                    const Eigen::VectorXd& m_mu,
                                    const Eigen::MatrixXd& mbt_mb,
                                    const Eigen::VectorXd& x,
                                    const PoseAdmState& state) {
  const Eigen::Index k = mb.cols();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k + 1, k + 1);
  Eigen::VectorXd linear(k);
  if (variant.loss == LossNorm::kL1) {
    w.topLeftCorner(k, k) = mbt_mb;
    if (variant.sparsity)
      w.topLeftCorner(k, k) += Eigen::MatrixXd::Identity(k, k);
    linear = mb.transpose() *
             (state.gamma - x + m_mu + state.lambda1 / state.eta);
    if (variant.sparsity) linear += state.lambda2 / state.eta - state.beta;
  } else {
    w.topLeftCorner(k, k) = mbt_mb;
    if (variant.sparsity)
      w.topLeftCorner(k, k) +=
          (state.eta / 2.0) * Eigen::MatrixXd::Identity(k, k);
    linear = mb.transpose() * (m_mu - x);
    if (variant.sparsity)
      linear += 0.5 * (state.lambda2 - state.eta * state.beta);
  }
  w.bottomLeftCorner(1, k) = 2.0 * linear.transpose();
  return w;
}

}  // namespace detail

inline Eigen::MatrixXd build_w(const LiftProblem& problem,
                               const PoseAdmState& state) {
  problem.validate();
  const Eigen::MatrixXd mb = projected_basis(*problem.basis, problem.camera);
  const Eigen::VectorXd m_mu = project(problem.basis->mean, problem.camera);
  return detail::build_w_from(problem.variant, mb, m_mu,
                              mb.transpose() * mb, problem.x, state);
}

// gamma step: shrink x - M(B alpha + mu) - lambda1/eta at level 1/eta.
inline Eigen::VectorXd update_gamma(const PoseAdmState& state,
                                    const LiftProblem& problem) {
  const Eigen::VectorXd projected =
      projected_basis(*problem.basis, problem.camera) * state.alpha +
      project(problem.basis->mean, problem.camera);
  return soft_threshold(
      Eigen::VectorXd(problem.x - projected - state.lambda1 / state.eta),
      1.0 / state.eta);
}

// beta step: shrink alpha + lambda2/eta at level theta/eta.
inline Eigen::VectorXd update_beta(const PoseAdmState& state,
                                   const LiftProblem& problem) {
  return soft_threshold(
      Eigen::VectorXd(state.alpha + state.lambda2 / state.eta),
      problem.theta / state.eta);
}

struct KktDiagnostics {
  bool degenerate = false;  // Gram system was singular, used pseudo-inverse
};

namespace detail {

inline Eigen::MatrixXd solve_q_kkt_impl(
    const Eigen::MatrixXd& w_sym, const std::vector<Eigen::MatrixXd>& omegas,
    const Eigen::MatrixXd& gram, const Eigen::MatrixXd& p,
    const Eigen::MatrixXd& g, double delta, const Eigen::VectorXd& rhs,
    KktDiagnostics* diagnostics) {
  const size_t m = omegas.size();
  Eigen::MatrixXd q = p - (w_sym + g) / delta;
  if (m == 0) return q;
  Eigen::VectorXd b(m);
  for (size_t i = 0; i < m; ++i)
    b[static_cast<Eigen::Index>(i)] = omegas[i].cwiseProduct(q).sum();
  if (rhs.size() > 0) b -= rhs;
  // nu solves (Gram/delta) nu = b
  Eigen::VectorXd nu = gram.ldlt().solve(delta * b);
  if ((gram * nu - delta * b).norm() >
      1e-10 * std::max(1.0, delta * b.norm())) {
    nu = gram.completeOrthogonalDecomposition().solve(delta * b);
    if (diagnostics) diagnostics->degenerate = true;
  }
  for (size_t i = 0; i < m; ++i)
    q -= (nu[static_cast<Eigen::Index>(i)] / delta) * omegas[i];
  return q;
}

struct Rank1Projection {
  Eigen::MatrixXd matrix;
  double eigenvalue = 0.0;
  Eigen::VectorXd eigenvector;
};

inline Rank1Projection rank1_projection(const Eigen::MatrixXd& s) {
  const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::Index last = sym.rows() - 1;
  Rank1Projection out;
  out.eigenvalue = eig.eigenvalues()(last);
  out.eigenvector = eig.eigenvectors().col(last);
  if (out.eigenvalue > 0.0)
    out.matrix = out.eigenvalue * out.eigenvector * out.eigenvector.transpose();
  else
    out.matrix = Eigen::MatrixXd::Zero(sym.rows(), sym.cols());
  return out;
}

}  // namespace detail

// Equality-constrained Q step, solved in closed form through its KKT
// system: minimizes tr(WQ) + tr(G^T(Q-P)) + delta/2 ||Q-P||_F^2 over
// symmetric Q subject to tr(Omega_i Q) = rhs_i. Empty rhs means all zeros.
inline Eigen::MatrixXd solve_q_kkt(const Eigen::MatrixXd& w,
                                   const std::vector<Eigen::MatrixXd>& omegas,
                                   const Eigen::MatrixXd& p,
                                   const Eigen::MatrixXd& g, double delta,
                                   const Eigen::VectorXd& rhs = {},
                                   KktDiagnostics* diagnostics = nullptr) {
  if (delta <= 0) throw DataError("solve_q_kkt: delta must be positive");
  const Eigen::Index m = static_cast<Eigen::Index>(omegas.size());
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) {
      gram(i, j) = omegas[i].cwiseProduct(omegas[j]).sum();
      gram(j, i) = gram(i, j);
    }
  const Eigen::MatrixXd w_sym = 0.5 * (w + w.transpose());
  return detail::solve_q_kkt_impl(w_sym, omegas, gram, p, g, delta, rhs,
                                  diagnostics);
}

// Nearest (Frobenius) PSD matrix of rank <= 1: max(zeta_1, 0) v_1 v_1^T from
// the leading eigenpair of the symmetrized input.
inline Eigen::MatrixXd project_rank1_psd(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) throw DimensionError("project_rank1_psd: not square");
  return detail::rank1_projection(s).matrix;
}

struct AlphaDiagnostics {
  int sweeps = 0;
  bool extraction_fallback = false;
  double gap = 0.0;  // ||Q - P||_F after the last sweep
};

namespace detail {

// Shared implementation of the alpha update; the public entry point builds
// the cached pieces, lift() reuses them across outer iterations. The
// constraint list is the limb quadratics plus the homogenization pin
// tr(E Q) = 1 with E = e_{k+1} e_{k+1}^T, implied by z = [alpha^T 1]^T
// (without it the lifted problem is unbounded along the scaling ray).
struct SdpContext {
  std::vector<Eigen::MatrixXd> constraints;  // omegas + E
  Eigen::VectorXd rhs;                       // (0, ..., 0, 1)
  Eigen::MatrixXd gram;

  void build(const std::vector<Eigen::MatrixXd>& omegas, Eigen::Index k) {
    constraints = omegas;
    Eigen::MatrixXd pin = Eigen::MatrixXd::Zero(k + 1, k + 1);
    pin(k, k) = 1.0;
    constraints.push_back(std::move(pin));
    const Eigen::Index m = static_cast<Eigen::Index>(constraints.size());
    rhs = Eigen::VectorXd::Zero(m);
    rhs[m - 1] = 1.0;
    gram.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = i; j < m; ++j) {
        gram(i, j) = constraints[i].cwiseProduct(constraints[j]).sum();
        gram(j, i) = gram(i, j);
      }
  }
};

inline Eigen::VectorXd update_alpha_impl(const Eigen::MatrixXd& w,
                                         const Eigen::VectorXd& alpha_prev,
                                         const SdpContext& ctx,
                                         SdpState& sdp, const SdpOptions& opts,
                                         AlphaDiagnostics* diagnostics) {
  const Eigen::Index k = alpha_prev.size();
  if (!sdp.initialized) sdp.reset(alpha_prev, opts.delta0);
  const Eigen::MatrixXd w_sym = 0.5 * (w + w.transpose());
  int sweeps = 0;
  for (; sweeps < opts.sweeps; ++sweeps) {
    sdp.q = solve_q_kkt_impl(w_sym, ctx.constraints, ctx.gram, sdp.p, sdp.g,
                             sdp.delta, ctx.rhs, nullptr);
    const Rank1Projection proj =
        rank1_projection(sdp.q + (opts.projection_gain / sdp.delta) * sdp.g);
    sdp.p = proj.matrix;
    sdp.g += sdp.delta * (sdp.q - sdp.p);
    sdp.delta = std::min(sdp.delta * opts.delta_growth, opts.delta_cap);
    sdp.last_gap = (sdp.q - sdp.p).norm();
    if (sdp.last_gap <= opts.tol * std::max(1.0, sdp.p.norm())) {
      ++sweeps;
      break;
    }
  }
  // extract alpha from P's leading eigenvector, sign fixed so the
  // homogeneous coordinate is positive, then scaled to make it one
  const Rank1Projection top = rank1_projection(sdp.p);
  Eigen::VectorXd nu = top.eigenvector;
  if (nu[k] < 0) nu = -nu;
  bool fallback = top.eigenvalue <= 0.0 || nu[k] < opts.extraction_tol;
  Eigen::VectorXd alpha = fallback
                              ? alpha_prev
                              : Eigen::VectorXd((nu / nu[k]).head(k));
  if (diagnostics) {
    diagnostics->sweeps = sweeps;
    diagnostics->extraction_fallback = fallback;
    diagnostics->gap = sdp.last_gap;
  }
  return alpha;
}

}  // namespace detail

// Anthropometric alpha update via the inner rank-constrained ADM. sdp holds
// the persistent inner state; pass a fresh one for a standalone solve.
inline Eigen::VectorXd update_alpha(const PoseAdmState& state,
                                    const LiftProblem& problem, SdpState& sdp,
                                    const SdpOptions& opts = {},
                                    AlphaDiagnostics* diagnostics = nullptr) {
  problem.validate();
  const Eigen::MatrixXd w = build_w(problem, state);
  detail::SdpContext ctx;
  ctx.build(build_limb_quadratics(*problem.basis, problem.limbs),
            problem.basis->count());
  return detail::update_alpha_impl(w, state.alpha, ctx, sdp, opts, diagnostics);
}

struct UnconstrainedDiagnostics {
  bool ridge_fallback = false;
};

namespace detail {

inline Eigen::VectorXd solve_alpha_unconstrained_impl(
    const Eigen::MatrixXd& w, UnconstrainedDiagnostics* diagnostics) {
  const Eigen::Index k = w.rows() - 1;
  const Eigen::MatrixXd hess = w.topLeftCorner(k, k);
  const Eigen::VectorXd linear =
      0.5 * w.bottomLeftCorner(1, k).transpose();
  Eigen::VectorXd alpha = hess.ldlt().solve(-linear);
  if ((hess * alpha + linear).norm() >
      1e-9 * std::max(1.0, linear.norm())) {
    alpha = (hess + 1e-9 * Eigen::MatrixXd::Identity(k, k))
                .ldlt()
                .solve(-linear);
    if (diagnostics) diagnostics->ridge_fallback = true;
  }
  return alpha;
}

}  // namespace detail

// Alpha update for the no-anthropometric variants: minimizes z^T W z over
// alpha directly. Ridge fallback (+1e-9 I) when the Hessian block is singular.
inline Eigen::VectorXd solve_alpha_unconstrained(
    const PoseAdmState& state, const LiftProblem& problem,
    UnconstrainedDiagnostics* diagnostics = nullptr) {
  problem.validate();
  return detail::solve_alpha_unconstrained_impl(build_w(problem, state),
                                                diagnostics);
}

// --- full solve -------------------------------------------------------------

// Resumable solver state for continuation across camera re-estimations: the
// multipliers and penalties carry over, so a warm restart behaves as a small
// perturbation of a converged solve instead of a fresh anneal.
struct LiftContinuation {
  PoseAdmState state;
  SdpState sdp;
  bool valid = false;
};

inline LiftResult lift(const LiftProblem& problem,
                       const LiftOptions& options = {},
                       LiftContinuation* continuation = nullptr) {
  problem.validate();
  const Basis& basis = *problem.basis;
  const int k = basis.count();
  const VariantConfig variant = problem.variant;
  const bool use_l1 = variant.loss == LossNorm::kL1;
  const bool use_sparsity = variant.sparsity;
  const bool use_anthro = variant.anthropometric;

  const Eigen::MatrixXd mb = projected_basis(basis, problem.camera);
  const Eigen::VectorXd m_mu = project(basis.mean, problem.camera);
  const Eigen::MatrixXd mbt_mb = mb.transpose() * mb;
  std::vector<Eigen::MatrixXd> omegas;
  detail::SdpContext sdp_ctx;
  if (use_anthro) {
    omegas = build_limb_quadratics(basis, problem.limbs);
    sdp_ctx.build(omegas, k);
  }

  PoseAdmState state;
  SdpState sdp;
  const bool resume = continuation && continuation->valid &&
                      continuation->state.alpha.size() == k;
  if (resume) {
    state = continuation->state;
    sdp = continuation->sdp;
    if (options.eta_resume > 0 && state.eta > options.eta_resume) {
      const double ratio = options.eta_resume / state.eta;
      state.lambda1 *= ratio;
      state.lambda2 *= ratio;
      state.eta = options.eta_resume;
    }
    if (options.delta_resume > 0 && sdp.delta > options.delta_resume) {
      sdp.g *= options.delta_resume / sdp.delta;
      sdp.delta = options.delta_resume;
    }
  } else {
    state.alpha = options.alpha_init.size() == k
                      ? options.alpha_init
                      : Eigen::VectorXd::Zero(k);
    state.beta = state.alpha;
    state.gamma = problem.x - mb * state.alpha - m_mu;
    state.lambda1 = Eigen::VectorXd::Zero(kPose2Size);
    state.lambda2 = Eigen::VectorXd::Zero(k);
    state.eta = options.eta0;
  }

  LiftResult result;
  result.converged = false;

  auto max_violation = [&](const Eigen::VectorXd& alpha) {
    double worst = 0.0;
    Eigen::VectorXd z(k + 1);
    z << alpha, 1.0;
    for (const auto& omega : omegas)
      worst = std::max(worst, std::abs(z.dot(omega * z)));
    return worst;
  };

  int outer = 0;
  for (outer = 0; outer < options.max_outer; ++outer) {
    if (use_l1) {
      state.gamma = soft_threshold(
          Eigen::VectorXd(problem.x - mb * state.alpha - m_mu -
                          state.lambda1 / state.eta),
          1.0 / state.eta);
    }
    if (use_sparsity) {
      state.beta = soft_threshold(
          Eigen::VectorXd(state.alpha + state.lambda2 / state.eta),
          problem.theta / state.eta);
    }

    const Eigen::MatrixXd w =
        detail::build_w_from(variant, mb, m_mu, mbt_mb, problem.x, state);
    if (use_anthro) {
      AlphaDiagnostics diag;
      state.alpha = detail::update_alpha_impl(w, state.alpha, sdp_ctx, sdp,
                                              options.sdp, &diag);
      result.inner_iterations += diag.sweeps;
      if (diag.extraction_fallback) ++result.extraction_fallbacks;
    } else {
      UnconstrainedDiagnostics diag;
      state.alpha = detail::solve_alpha_unconstrained_impl(w, &diag);
      result.ridge_fallback = result.ridge_fallback || diag.ridge_fallback;
    }

    bool converged = true;
    if (use_l1) {
      const Eigen::VectorXd primal =
          state.gamma - problem.x + mb * state.alpha + m_mu;
      state.lambda1 += state.eta * primal;
      converged = converged &&
                  primal.norm() <=
                      options.tol * std::max(1.0, problem.x.norm());
    }
    if (use_sparsity) {
      const Eigen::VectorXd primal = state.alpha - state.beta;
      state.lambda2 += state.eta * primal;
      converged = converged &&
                  primal.norm() <=
                      options.tol * std::max(1.0, state.alpha.norm());
    }
    if (use_anthro)
      converged =
          converged && max_violation(state.alpha) <= options.constraint_tol;
    state.eta = std::min(state.eta * options.eta_growth, options.eta_cap);
    if (converged) {
      result.converged = true;
      ++outer;
      break;
    }
  }

  if (continuation) {
    continuation->state = state;
    continuation->sdp = sdp;
    continuation->valid = true;
  }
  result.outer_iterations = outer;
  result.alpha.values = state.alpha;
  result.pose = basis.reconstruct(state.alpha);
  const Eigen::VectorXd reproj_err = problem.x - mb * state.alpha - m_mu;
  result.residual_l1 = reproj_err.lpNorm<1>();
  result.residual_l2 = reproj_err.norm();
  {
    const auto limbs_here = problem.limbs;
    for (size_t i = 0; i < limbs_here.size() && i < result.limb_violation.size();
         ++i) {
      const Eigen::Vector3d d =
          joint_position(result.pose, limbs_here[i].joint_a) -
          joint_position(result.pose, limbs_here[i].joint_b);
      result.limb_violation[i] =
          d.squaredNorm() - limbs_here[i].squared_length;
    }
  }
  return result;
}

}  // namespace poselift
