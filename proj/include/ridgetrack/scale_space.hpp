#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ridgetrack/errors.hpp"
#include "ridgetrack/linalg3.hpp"
#include "ridgetrack/parallel.hpp"
#include "ridgetrack/video_tensor.hpp"

namespace ridgetrack {

/// Anisotropic smoothing scales: sigma acts on both spatial axes, delta on
/// the frame axis. Kernels are truncated at ceil(truncate * scale) samples
/// from the center.
struct ScaleParams {
  double sigma = 4.0;
  double delta = 1.0;
  double truncate = 4.0;

  void validate() const {
    if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    if (!(truncate >= 2.0)) throw ConfigError("truncate must be at least 2");
  }
};

/// First and second scale-space derivatives at every voxel. Gradient
/// components carry one factor of their axis scale, Hessian components one
/// factor per differentiated axis, so entries are comparable across scales.
/// standardize() divides the Hessian block by the median gradient norm mu.
struct JetField {
  int width = 0, height = 0, frames = 0;
  double sigma = 1.0, delta = 1.0;
  std::vector<double> gx, gy, gt;
  std::vector<double> hxx, hxy, hyy, hxt, hyt, htt;
  double mu = 0.0;

  std::size_t size() const { return gx.size(); }

  std::size_t index(int m, int n, int tau) const {
    return (static_cast<std::size_t>(tau) * height + n) * width + m;
  }

  Vec3 gradient(std::size_t i) const { return {gx[i], gy[i], gt[i]}; }

  SymMat3 hessian(std::size_t i) const {
    return {hxx[i], hxy[i], hyy[i], hxt[i], hyt[i], htt[i]};
  }
};

/// Separable space-time Gaussian: unit mass, isotropic with scale sigma in
/// (x, y) and scale delta in t.
inline double gaussian_value(double x, double y, double t, const ScaleParams& p) {
  double spatial = std::exp(-(x * x + y * y) / (2.0 * p.sigma * p.sigma)) /
                   (2.0 * std::numbers::pi * p.sigma * p.sigma);
  double temporal = std::exp(-t * t / (2.0 * p.delta * p.delta)) /
                    std::sqrt(2.0 * std::numbers::pi * p.delta * p.delta);
  return spatial * temporal;
}

/// One-sided tap table for a truncated Gaussian derivative of the given
/// order (0, 1 or 2). taps[k] weights offset +k; offset -k takes the same
/// weight for even orders and the negated weight for order 1.
///
/// Truncation breaks the moment conditions that make the infinite kernels
/// reproduce polynomials, so the taps are corrected: order 0 is scaled to
/// unit sum, order 1 to unit first moment (it is zero-sum by symmetry),
/// order 2 is shifted to zero sum and scaled so the second moment equals 2.
/// A slope-1 ramp then differentiates to exactly 1 and x*x to exactly 2.
inline std::vector<double> gaussian_taps(int order, double scale, double truncate) {
  int radius = static_cast<int>(std::ceil(truncate * scale));
  std::vector<double> taps(static_cast<std::size_t>(radius) + 1);
  double inv2s2 = 1.0 / (2.0 * scale * scale);
  for (int k = 0; k <= radius; ++k) {
    double g = std::exp(-double(k) * k * inv2s2);
    if (order == 0)
      taps[k] = g;
    else if (order == 1)
      taps[k] = double(k) * g;
    else
      taps[k] = (double(k) * k / (scale * scale) - 1.0) * g;
  }
  if (order == 0) {
    double sum = taps[0];
    for (int k = 1; k <= radius; ++k) sum += 2.0 * taps[k];
    for (double& c : taps) c /= sum;
  } else if (order == 1) {
    taps[0] = 0.0;
    double moment = 0.0;
    for (int k = 1; k <= radius; ++k) moment += 2.0 * double(k) * taps[k];
    for (double& c : taps) c /= moment;
  } else {
    double sum = taps[0];
    for (int k = 1; k <= radius; ++k) sum += 2.0 * taps[k];
    double shift = sum / (2.0 * radius + 1.0);
    for (double& c : taps) c -= shift;
    double moment = 0.0;
    for (int k = 1; k <= radius; ++k) moment += 2.0 * double(k) * k * taps[k];
    for (double& c : taps) c *= 2.0 / moment;
  }
  return taps;
}

namespace detail {

/// 1D convolution along one tensor axis with edge-replicated borders.
/// Symmetric tap pairs are combined before multiplying, which makes the
/// output of even orders exactly invariant, and of order 1 exactly
/// antisymmetric, under reversal of the axis.
inline void conv_axis(const std::vector<double>& src, std::vector<double>& dst, int width,
                      int height, int frames, int axis, const std::vector<double>& taps,
                      bool odd, int threads) {
  int len = axis == 0 ? width : (axis == 1 ? height : frames);
  std::int64_t stride = axis == 0 ? 1 : (axis == 1 ? width : std::int64_t(width) * height);
  std::int64_t count = static_cast<std::int64_t>(src.size()) / len;
  int radius = static_cast<int>(taps.size()) - 1;

  parallel_for(count, threads, [&](std::int64_t lo, std::int64_t hi) {
    std::vector<double> pad(static_cast<std::size_t>(len) + 2 * radius);
    for (std::int64_t line = lo; line < hi; ++line) {
      std::int64_t start;
      if (axis == 0) {
        start = line * width;
      } else if (axis == 1) {
        std::int64_t m = line % width, tau = line / width;
        start = tau * std::int64_t(width) * height + m;
      } else {
        start = line;
      }
      for (int i = 0; i < len; ++i) pad[radius + i] = src[start + i * stride];
      std::fill(pad.begin(), pad.begin() + radius, pad[radius]);
      std::fill(pad.end() - radius, pad.end(), pad[radius + len - 1]);
      for (int i = 0; i < len; ++i) {
        const double* c = pad.data() + radius + i;
        double acc = odd ? 0.0 : taps[0] * c[0];
        if (odd)
          for (int k = 1; k <= radius; ++k) acc += taps[k] * (c[k] - c[-k]);
        else
          for (int k = 1; k <= radius; ++k) acc += taps[k] * (c[k] + c[-k]);
        dst[start + i * stride] = acc;
      }
    }
  });
}

inline void scale_in_place(std::vector<double>& v, double s) {
  for (double& x : v) x *= s;
}

}  // namespace detail

/// Gaussian-smoothed copy of the video at the given scales.
inline std::vector<double> smooth(const VideoTensor& v, const ScaleParams& p, int threads = 1) {
  p.validate();
  auto g0s = gaussian_taps(0, p.sigma, p.truncate);
  auto g0d = gaussian_taps(0, p.delta, p.truncate);
  std::vector<double> a(v.values()), b(v.size());
  detail::conv_axis(a, b, v.width(), v.height(), v.frames(), 2, g0d, false, threads);
  detail::conv_axis(b, a, v.width(), v.height(), v.frames(), 1, g0s, false, threads);
  detail::conv_axis(a, b, v.width(), v.height(), v.frames(), 0, g0s, false, threads);
  return b;
}

/// Computes the full scale-space jet (scaled gradient and Hessian) of the
/// video. Requires at least 3 samples along every axis.
inline JetField compute_jet(const VideoTensor& v, const ScaleParams& p, int threads = 1) {
  p.validate();
  if (v.width() < 3 || v.height() < 3 || v.frames() < 3)
    throw ConfigError("video must be at least 3x3 spatially and 3 frames long");

  auto g0s = gaussian_taps(0, p.sigma, p.truncate);
  auto g1s = gaussian_taps(1, p.sigma, p.truncate);
  auto g2s = gaussian_taps(2, p.sigma, p.truncate);
  auto g0d = gaussian_taps(0, p.delta, p.truncate);
  auto g1d = gaussian_taps(1, p.delta, p.truncate);
  auto g2d = gaussian_taps(2, p.delta, p.truncate);

  int W = v.width(), H = v.height(), T = v.frames();
  auto conv = [&](const std::vector<double>& src, std::vector<double>& dst, int axis,
                  const std::vector<double>& taps, bool odd) {
    detail::conv_axis(src, dst, W, H, T, axis, taps, odd, threads);
  };

  std::vector<double> t0(v.size()), t1(v.size()), t2(v.size());
  conv(v.values(), t0, 2, g0d, false);
  conv(v.values(), t1, 2, g1d, true);
  conv(v.values(), t2, 2, g2d, false);

  std::vector<double> y0(v.size()), y1(v.size()), y2(v.size()), z0(v.size()), z1(v.size()),
      w0(v.size());
  conv(t0, y0, 1, g0s, false);
  conv(t0, y1, 1, g1s, true);
  conv(t0, y2, 1, g2s, false);
  conv(t1, z0, 1, g0s, false);
  conv(t1, z1, 1, g1s, true);
  conv(t2, w0, 1, g0s, false);
  t0.clear();
  t1.clear();
  t2.clear();

  JetField jet;
  jet.width = W;
  jet.height = H;
  jet.frames = T;
  jet.sigma = p.sigma;
  jet.delta = p.delta;
  jet.gx.resize(v.size());
  jet.gy.resize(v.size());
  jet.gt.resize(v.size());
  jet.hxx.resize(v.size());
  jet.hxy.resize(v.size());
  jet.hyy.resize(v.size());
  jet.hxt.resize(v.size());
  jet.hyt.resize(v.size());
  jet.htt.resize(v.size());

  conv(y0, jet.gx, 0, g1s, true);
  conv(y1, jet.gy, 0, g0s, false);
  conv(z0, jet.gt, 0, g0s, false);
  conv(y0, jet.hxx, 0, g2s, false);
  conv(y2, jet.hyy, 0, g0s, false);
  conv(y1, jet.hxy, 0, g1s, true);
  conv(z0, jet.hxt, 0, g1s, true);
  conv(z1, jet.hyt, 0, g0s, false);
  conv(w0, jet.htt, 0, g0s, false);

  detail::scale_in_place(jet.gx, p.sigma);
  detail::scale_in_place(jet.gy, p.sigma);
  detail::scale_in_place(jet.gt, p.delta);
  detail::scale_in_place(jet.hxx, p.sigma * p.sigma);
  detail::scale_in_place(jet.hyy, p.sigma * p.sigma);
  detail::scale_in_place(jet.hxy, p.sigma * p.sigma);
  detail::scale_in_place(jet.hxt, p.sigma * p.delta);
  detail::scale_in_place(jet.hyt, p.sigma * p.delta);
  detail::scale_in_place(jet.htt, p.delta * p.delta);

  for (const auto* comp :
       {&jet.gx, &jet.gy, &jet.gt, &jet.hxx, &jet.hxy, &jet.hyy, &jet.hxt, &jet.hyt, &jet.htt})
    for (double x : *comp)
      if (!std::isfinite(x)) throw DegenerateError("non-finite jet output");

  return jet;
}

/// Divides the Hessian block by the median gradient norm over the whole
/// volume and records that constant in jet.mu. The gradient is untouched.
/// A zero median means the video carries no usable intensity variation.
inline void standardize(JetField& jet) {
  std::vector<double> norms(jet.size());
  for (std::size_t i = 0; i < jet.size(); ++i)
    norms[i] = std::sqrt(jet.gx[i] * jet.gx[i] + jet.gy[i] * jet.gy[i] + jet.gt[i] * jet.gt[i]);
  std::size_t c = norms.size();
  auto select = [&](std::size_t k) {
    std::nth_element(norms.begin(), norms.begin() + k, norms.end());
    return norms[k];
  };
  double hi = select(c / 2);
  double mu = c % 2 == 1 ? hi : 0.5 * (hi + select(c / 2 - 1));
  if (!(mu > 0.0)) throw DegenerateError("degenerate field: zero median gradient norm");
  jet.mu = mu;
  double inv = 1.0 / mu;
  for (auto* comp : {&jet.hxx, &jet.hxy, &jet.hyy, &jet.hxt, &jet.hyt, &jet.htt})
    detail::scale_in_place(*comp, inv);
}

}  // namespace ridgetrack
