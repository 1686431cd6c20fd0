#pragma once

#include <algorithm>
#include <cmath>

#include "ridgetrack/eigen3.hpp"
#include "ridgetrack/linalg3.hpp"

namespace ridgetrack {

/// Calibration knobs for the gradient-yielded (hatted) feature branch.
struct FeatureOptions {
  /// Below this norm the pseudoinverse-mapped gradient carries no direction.
  double hatted_grad_tol = 1e-8;
  /// Guard on the hatted anisotropy denominator xi1^2 - 2 xi2.
  double hatted_denom_tol = 1e-12;
  /// Relative eigenvalue cutoff inside the Hessian pseudoinverse.
  double pinv_rel_tol = 1e-10;
};

/// Everything the scoring stage wants to know about one voxel. The plain
/// branch reads the eigen frame directly; the hatted branch re-derives the
/// same kind of quantities from the pseudoinverse-mapped gradient, without
/// ever selecting an eigenvector, and is only trustworthy near an actual
/// ridge (hatted_available says whether it produced usable numbers).
struct VoxelFeatures {
  EigenSystem eig;
  double grad_norm = 0.0;

  Vec3 v;              // principal direction, temporal component >= 0
  double lambda = 0.0; // eigenvalue along v
  double rho = 0.0;    // |cos| between v and the frame axis
  double theta = 0.0;  // |cos| between v and the gradient
  double eta = 0.0;    // anisotropy balance of the two cross-section eigenvalues
  double kappa = 0.0;  // cross-section strength minus lambda^2
  bool eta_degenerate = false;

  bool hatted_available = false;
  Vec3 v_hat;
  double lambda_hat = 0.0;
  double rho_hat = 0.0, theta_hat = 0.0, eta_hat = 0.0, kappa_hat = 0.0;
};

namespace detail {

inline double abs_cos_unit(const Vec3& unit_dir, const Vec3& other, double other_norm) {
  if (other_norm <= 0.0) return 0.0;
  return std::min(std::fabs(dot(unit_dir, other)) / other_norm, 1.0);
}

}  // namespace detail

inline VoxelFeatures voxel_features(const Vec3& grad, const SymMat3& hess,
                                    const FeatureOptions& opt = {}) {
  VoxelFeatures f;
  f.eig = eig3_symmetric(hess);
  f.grad_norm = norm(grad);

  f.v = f.eig.v1;
  f.lambda = f.eig.lambda1;
  f.rho = std::min(std::fabs(f.v.t), 1.0);
  f.theta = detail::abs_cos_unit(f.v, grad, f.grad_norm);
  double l2 = f.eig.lambda2, l3 = f.eig.lambda3;
  double denom = l2 * l2 + l3 * l3;
  if (denom == 0.0) {
    f.eta = 0.0;
    f.eta_degenerate = true;
  } else {
    f.eta = 2.0 * l2 * l3 / denom;
  }
  f.kappa = l2 * l3 - f.lambda * f.lambda;

  Vec3 mapped = pinv3_symmetric(hess, opt.pinv_rel_tol) * grad;
  double mn = norm(mapped);
  if (mn < opt.hatted_grad_tol) return f;
  f.v_hat = redirected((1.0 / mn) * mapped);
  f.lambda_hat = quadratic_form(hess, f.v_hat);
  double xi1 = hess.trace() - f.lambda_hat;
  double xi2 = 0.5 * (xi1 * xi1 - (hess.frobenius_sq() - f.lambda_hat * f.lambda_hat));
  double hat_denom = xi1 * xi1 - 2.0 * xi2;
  if (std::fabs(hat_denom) < opt.hatted_denom_tol) return f;
  f.hatted_available = true;
  f.rho_hat = std::min(std::fabs(f.v_hat.t), 1.0);
  f.theta_hat = detail::abs_cos_unit(f.v_hat, grad, f.grad_norm);
  f.eta_hat = 2.0 * xi2 / hat_denom;
  f.kappa_hat = xi2 - f.lambda_hat * f.lambda_hat;
  return f;
}

}  // namespace ridgetrack
