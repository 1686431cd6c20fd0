#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ridgetrack/errors.hpp"
#include "ridgetrack/linalg3.hpp"
#include "ridgetrack/linking.hpp"

namespace ridgetrack {

/// Score-weighted summary of one frame: mean position, mean tangent, and
/// the spatial covariance of the score distribution. The temporal row and
/// column of the covariance are structurally zero (every pixel of a frame
/// shares the same time), so only the spatial block is stored.
struct FrameAggregate {
  double tau = 0.0;
  Vec3 position;  // (u, w, tau)
  Vec3 tangent;   // (du, dw, 1)
  double s_uu = 0.0, s_uw = 0.0, s_ww = 0.0;
};

/// Collapses one frame of the score field to its aggregate.
inline FrameAggregate frame_aggregate(const FrameScoreField& scores, const ScoreInputs& in,
                                      int tau) {
  if (tau < 0 || tau >= scores.frames) throw ConfigError("frame index out of range");
  std::size_t fs = scores.frame_size();
  const double* psi = scores.psi.data() + fs * tau;
  const double* tu = in.tangent_u.data() + fs * tau;
  const double* tw = in.tangent_w.data() + fs * tau;

  FrameAggregate agg;
  agg.tau = tau;
  double u = 0.0, w = 0.0, du = 0.0, dw = 0.0;
  for (std::size_t i = 0; i < fs; ++i) {
    double m = static_cast<double>(i % scores.width);
    double n = static_cast<double>(i / scores.width);
    u += psi[i] * m;
    w += psi[i] * n;
    du += psi[i] * tu[i];
    dw += psi[i] * tw[i];
  }
  double suu = 0.0, suw = 0.0, sww = 0.0;
  for (std::size_t i = 0; i < fs; ++i) {
    double cm = static_cast<double>(i % scores.width) - u;
    double cn = static_cast<double>(i / scores.width) - w;
    suu += psi[i] * cm * cm;
    suw += psi[i] * cm * cn;
    sww += psi[i] * cn * cn;
  }
  agg.position = {u, w, static_cast<double>(tau)};
  agg.tangent = {du, dw, 1.0};
  agg.s_uu = suu;
  agg.s_uw = suw;
  agg.s_ww = sww;
  return agg;
}

/// Evaluates the kernel-smoothed trajectory at time t. Every frame
/// aggregate within six bandwidths contributes its own linear prediction
/// position + (t - tau) * tangent, blended with Gaussian weights. The
/// normalized weights sum to 1 by construction, so the curve interpolates
/// a globally consistent average rather than chasing single frames.
inline Vec3 kernel_smooth(const std::vector<FrameAggregate>& aggregates, double bandwidth,
                          double t) {
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  if (aggregates.empty()) throw ConfigError("no frame aggregates");
  Vec3 acc{0.0, 0.0, 0.0};
  double wsum = 0.0;
  for (const FrameAggregate& a : aggregates) {
    double z = (t - a.tau) / bandwidth;
    if (std::fabs(z) > 6.0) continue;
    double k = std::exp(-0.5 * z * z);
    Vec3 pred = a.position + (t - a.tau) * a.tangent;
    acc = acc + k * pred;
    wsum += k;
  }
  if (wsum <= 0.0) throw DegenerateError("empty kernel support at t=" + std::to_string(t));
  return (1.0 / wsum) * acc;
}

/// The full extracted trajectory: per-frame aggregates plus the smoothing
/// bandwidth that turns them into a continuous curve.
struct RidgeCurve {
  std::vector<FrameAggregate> frames;
  double bandwidth = 1.0;

  Vec3 evaluate(double t) const { return kernel_smooth(frames, bandwidth, t); }
};

/// Elliptical confidence region of one frame aggregate: membership means
/// lying in the column space of the covariance and within the chi-square
/// threshold q = -2 ln(alpha) under the pseudoinverse metric.
struct ConfidenceRegion {
  Vec3 center;
  double q = 0.0;
  // spatial pseudoinverse block and the eigen data it came from
  double p_uu = 0.0, p_uw = 0.0, p_ww = 0.0;
  double ev_big = 0.0, ev_small = 0.0;  // spatial covariance eigenvalues
  double ax_u = 1.0, ax_w = 0.0;        // unit eigenvector of ev_big

  bool contains(const Vec3& p, double tol = 1e-9) const {
    Vec3 r = p - center;
    double scale = std::max(1.0, norm(r));
    if (std::fabs(r.t) > tol * scale) return false;
    double cutoff = 1e-12 * std::max(ev_big, 1e-300);
    // components along the two spatial axes
    double c_big = r.x * ax_u + r.y * ax_w;
    double c_small = -r.x * ax_w + r.y * ax_u;
    double form = 0.0;
    if (ev_big > cutoff)
      form += c_big * c_big / ev_big;
    else if (std::fabs(c_big) > tol * scale)
      return false;
    if (ev_small > cutoff)
      form += c_small * c_small / ev_small;
    else if (std::fabs(c_small) > tol * scale)
      return false;
    return form <= q;
  }
};

inline ConfidenceRegion confidence_region(const FrameAggregate& agg, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  ConfidenceRegion region;
  region.center = agg.position;
  region.q = -2.0 * std::log(alpha);

  double tr = agg.s_uu + agg.s_ww;
  double gap = std::hypot(agg.s_uu - agg.s_ww, 2.0 * agg.s_uw);
  region.ev_big = std::max(0.5 * (tr + gap), 0.0);
  region.ev_small = std::max(0.5 * (tr - gap), 0.0);
  // eigenvector of the larger eigenvalue, with a safe fallback when the
  // block is (near) isotropic
  double vx = agg.s_uw, vy = region.ev_big - agg.s_uu;
  double n = std::hypot(vx, vy);
  if (n > 1e-300 * std::max(1.0, region.ev_big)) {
    region.ax_u = vx / n;
    region.ax_w = vy / n;
  } else {
    region.ax_u = 1.0;
    region.ax_w = 0.0;
  }
  double cutoff = 1e-12 * std::max(region.ev_big, 1e-300);
  double inv_big = region.ev_big > cutoff ? 1.0 / region.ev_big : 0.0;
  double inv_small = region.ev_small > cutoff ? 1.0 / region.ev_small : 0.0;
  region.p_uu = inv_big * region.ax_u * region.ax_u + inv_small * region.ax_w * region.ax_w;
  region.p_uw = inv_big * region.ax_u * region.ax_w - inv_small * region.ax_w * region.ax_u;
  region.p_ww = inv_big * region.ax_w * region.ax_w + inv_small * region.ax_u * region.ax_u;
  return region;
}

}  // namespace ridgetrack
