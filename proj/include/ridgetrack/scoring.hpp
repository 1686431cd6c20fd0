#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ridgetrack/errors.hpp"
#include "ridgetrack/features.hpp"
#include "ridgetrack/parallel.hpp"
#include "ridgetrack/scale_space.hpp"

namespace ridgetrack {

/// Per-voxel evidence terms. Each is an exponent contribution, so the full
/// intra-frame weight is exp of their sum; everything downstream stays in
/// log space and never forms the exponential explicitly.
struct IntraMetrics {
  double l_rho = 0.0;
  double l_theta = 0.0;
  double l_eta_kappa = 0.0;

  double total() const { return l_rho + l_theta + l_eta_kappa; }
};

/// Alignment terms are worth up to 2 each; the anisotropy term scales with
/// log of the cross-section strength and vanishes (rather than going
/// negative) when the curvature signature is degenerate.
inline IntraMetrics intra_metrics(double rho, double theta, double eta, double kappa) {
  IntraMetrics m;
  m.l_rho = 2.0 * rho;
  m.l_theta = 2.0 * theta;
  m.l_eta_kappa = 2.0 * eta + 2.0 * eta * std::log1p(std::max(kappa, 0.0));
  return m;
}

/// Folds the hatted estimate into (log_phi, v): weights become a sum, the
/// direction a weight-proportional convex combination, renormalized to unit
/// length. Both direction estimates already sit in the upper temporal
/// hemisphere, so the combination cannot flip orientation.
inline void merge_hatted(double& log_phi, Vec3& v, double log_phi_hat, const Vec3& v_hat) {
  double m = std::max(log_phi, log_phi_hat);
  double wa = std::exp(log_phi - m);
  double wb = std::exp(log_phi_hat - m);
  Vec3 blended = wa * v + wb * v_hat;
  double n = norm(blended);
  if (!(n > 1e-12 * (wa + wb)))
    throw Error("merged direction has vanishing norm");
  v = (1.0 / n) * blended;
  log_phi = m + std::log(wa + wb);
}

/// Rescales the direction so its temporal component is exactly 1, giving a
/// per-frame pixel velocity. The spatial speed is clamped to cap; a
/// direction with no temporal component keeps its spatial heading at the
/// cap. The cap keeps transition segments sane where the eigen frame is
/// unreliable.
inline Vec3 candidate_tangent(const Vec3& v, double cap) {
  double sn = std::hypot(v.x, v.y);
  if (v.t > 0.0 && sn <= cap * v.t) return {v.x / v.t, v.y / v.t, 1.0};
  if (sn == 0.0) return {0.0, 0.0, 1.0};
  return {cap * v.x / sn, cap * v.y / sn, 1.0};
}

struct ScoringOptions {
  double tangent_cap = 3.0;
  bool use_hatted = true;
  FeatureOptions features;

  void validate() const {
    if (!(tangent_cap > 0.0)) throw ConfigError("tangent cap must be positive");
  }
};

/// Everything the linking stage consumes: per-voxel log weights and the
/// spatial components of the candidate tangents (temporal component is 1).
struct ScoreInputs {
  int width = 0, height = 0, frames = 0;
  std::vector<double> log_phi;
  std::vector<double> tangent_u, tangent_w;

  std::size_t size() const { return log_phi.size(); }
};

/// Runs the per-voxel feature and weight computation over a standardized
/// jet field.
inline ScoreInputs compute_score_inputs(const JetField& jet, const ScoringOptions& opt,
                                        int threads = 1) {
  opt.validate();
  ScoreInputs out;
  out.width = jet.width;
  out.height = jet.height;
  out.frames = jet.frames;
  out.log_phi.resize(jet.size());
  out.tangent_u.resize(jet.size());
  out.tangent_w.resize(jet.size());

  parallel_for(static_cast<std::int64_t>(jet.size()), threads,
               [&](std::int64_t lo, std::int64_t hi) {
                 for (std::int64_t i = lo; i < hi; ++i) {
                   VoxelFeatures f =
                       voxel_features(jet.gradient(i), jet.hessian(i), opt.features);
                   double log_phi = intra_metrics(f.rho, f.theta, f.eta, f.kappa).total();
                   Vec3 dir = f.v;
                   bool merged = opt.use_hatted && f.hatted_available;
                   if (merged) {
                     double log_phi_hat =
                         intra_metrics(f.rho_hat, f.theta_hat, f.eta_hat, f.kappa_hat).total();
                     merge_hatted(log_phi, dir, log_phi_hat, f.v_hat);
                   }
                   // A direction confined to the frame plane has no forward
                   // orientation (v and -v describe the same line), so a
                   // heading derived from it is an arbitrary sideways
                   // velocity. Whenever such a direction feeds the blend,
                   // the voxel contributes a stationary tangent instead,
                   // which keeps the field equivariant under time reversal
                   // and spatial reflections.
                   bool unoriented =
                       f.v.t == 0.0 || (merged && f.v_hat.t == 0.0) || dir.t == 0.0;
                   // The jet derivatives carry one factor of their axis scale,
                   // so directions live in coordinates where one spatial step
                   // spans sigma pixels and one temporal step spans delta
                   // frames. Undo that per axis to express the heading in
                   // pixels per frame, which is what the roughness penalty
                   // and the recovered curve consume.
                   Vec3 physical{jet.sigma * dir.x, jet.sigma * dir.y,
                                 jet.delta * dir.t};
                   Vec3 tangent = unoriented ? Vec3{0.0, 0.0, 1.0}
                                             : candidate_tangent(physical, opt.tangent_cap);
                   out.log_phi[i] = log_phi;
                   out.tangent_u[i] = tangent.x;
                   out.tangent_w[i] = tangent.y;
                 }
               });
  return out;
}

}  // namespace ridgetrack
