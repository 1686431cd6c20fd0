#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ridgetrack/errors.hpp"
#include "ridgetrack/parallel.hpp"
#include "ridgetrack/scoring.hpp"

namespace ridgetrack {

/// Controls for chaining per-voxel weights across frames. A finite window
/// limits each pixel's predecessors to a Chebyshev neighborhood; kFullWindow
/// considers every pixel of the adjacent frame. normalize_each_frame
/// rescales the running scores once per frame; the final per-frame
/// distribution is provably unchanged by that rescaling, so the flag exists
/// for validating exactly that.
struct TransitionParams {
  static constexpr int kFullWindow = -1;

  int window = 7;
  bool normalize_each_frame = true;

  void validate() const {
    if (window != kFullWindow && window < 1)
      throw ConfigError("transition window must be a positive radius or full");
  }
};

/// Integral of the squared second derivative of the planar cubic that
/// connects consecutive-frame pixels (du, dw apart) with the given endpoint
/// tangents, each axis interpolated over a unit time step.
///
/// The expression is arranged from commutative pairs only, so swapping the
/// endpoints while negating both tangents returns the identical double.
inline double hermite_roughness(double du, double dw, double su0, double sw0, double su1,
                                double sw1) {
  auto axis = [](double d, double s0, double s1) {
    double cross_free = (s0 * s0 + s1 * s1) + s0 * s1;
    double mixed = d * (s0 + s1);
    return 4.0 * cross_free - 12.0 * mixed + 12.0 * (d * d);
  };
  return axis(du, su0, su1) + axis(dw, sw0, sw1);
}

/// Log of the transition weight between two pixels; the roughness enters
/// with a fixed factor of one half.
inline double transition_log_weight(double roughness) { return -0.5 * roughness; }

/// Forward and backward accumulated log scores (each normalized per frame)
/// and their combined per-frame distribution psi, which sums to 1 within
/// rounding on every frame.
struct FrameScoreField {
  int width = 0, height = 0, frames = 0;
  std::vector<double> log_forward;
  std::vector<double> log_backward;
  std::vector<double> psi;

  std::size_t frame_size() const { return static_cast<std::size_t>(width) * height; }

  double frame_sum(int tau) const {
    const double* p = psi.data() + frame_size() * tau;
    double s = 0.0;
    for (std::size_t i = 0; i < frame_size(); ++i) s += p[i];
    return s;
  }
};

namespace detail {

inline double log_sum_exp(const double* terms, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, terms[i]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(terms[i] - m);
  return m + std::log(s);
}

/// One direction of the chain recursion. `step` is +1 for the forward pass
/// and -1 for the backward pass; for each target pixel the neighbor frame
/// is tau - step and segments always run in video time order.
inline void accumulate_direction(const ScoreInputs& in, const TransitionParams& par,
                                 int threads, int step, std::vector<double>& out) {
  int W = in.width, H = in.height, T = in.frames;
  std::size_t fs = static_cast<std::size_t>(W) * H;
  out.assign(in.size(), 0.0);

  int first = step > 0 ? 0 : T - 1;
  std::copy(in.log_phi.begin() + first * fs, in.log_phi.begin() + (first + 1) * fs,
            out.begin() + first * fs);

  auto normalize_frame = [&](int tau) {
    double* f = out.data() + fs * tau;
    double l = log_sum_exp(f, fs);
    if (!std::isfinite(l)) throw DegenerateError("score frame collapsed to zero");
    for (std::size_t i = 0; i < fs; ++i) f[i] -= l;
  };
  if (par.normalize_each_frame) normalize_frame(first);

  int radius = par.window == TransitionParams::kFullWindow ? std::max(W, H) : par.window;

  for (int tau = first + step; tau >= 0 && tau < T; tau += step) {
    const double* prev = out.data() + fs * (tau - step);
    const double* prev_tu = in.tangent_u.data() + fs * (tau - step);
    const double* prev_tw = in.tangent_w.data() + fs * (tau - step);
    const double* cur_tu = in.tangent_u.data() + fs * tau;
    const double* cur_tw = in.tangent_w.data() + fs * tau;
    const double* phi = in.log_phi.data() + fs * tau;
    double* cur = out.data() + fs * tau;

    parallel_for(static_cast<std::int64_t>(fs), threads, [&](std::int64_t lo, std::int64_t hi) {
      std::vector<double> terms;
      terms.reserve(static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1));
      for (std::int64_t p = lo; p < hi; ++p) {
        int pm = static_cast<int>(p % W), pn = static_cast<int>(p / W);
        double ptu = cur_tu[p], ptw = cur_tw[p];
        int n0 = std::max(0, pn - radius), n1 = std::min(H - 1, pn + radius);
        int m0 = std::max(0, pm - radius), m1 = std::min(W - 1, pm + radius);
        terms.clear();
        for (int qn = n0; qn <= n1; ++qn)
          for (int qm = m0; qm <= m1; ++qm) {
            std::size_t q = static_cast<std::size_t>(qn) * W + qm;
            // In video time the segment runs earlier -> later, so for the
            // backward pass the displacement and tangent roles swap.
            double r = step > 0 ? hermite_roughness(pm - qm, pn - qn, prev_tu[q], prev_tw[q],
                                                    ptu, ptw)
                                : hermite_roughness(qm - pm, qn - pn, ptu, ptw, prev_tu[q],
                                                    prev_tw[q]);
            terms.push_back(prev[q] + transition_log_weight(r));
          }
        cur[p] = phi[p] + log_sum_exp(terms.data(), terms.size());
      }
    });
    if (par.normalize_each_frame) normalize_frame(tau);
  }
  if (!par.normalize_each_frame)
    for (int tau = 0; tau < T; ++tau) normalize_frame(tau);
}

}  // namespace detail

/// Chains the per-voxel weights through every frame in both directions and
/// combines them into a per-frame score distribution (geometric mean of the
/// two passes, normalized to unit mass on each frame).
inline FrameScoreField accumulate_scores(const ScoreInputs& in, const TransitionParams& par,
                                         int threads = 1) {
  par.validate();
  if (in.frames < 1 || in.width < 1 || in.height < 1)
    throw ConfigError("score inputs are empty");

  FrameScoreField field;
  field.width = in.width;
  field.height = in.height;
  field.frames = in.frames;
  detail::accumulate_direction(in, par, threads, +1, field.log_forward);
  detail::accumulate_direction(in, par, threads, -1, field.log_backward);

  std::size_t fs = field.frame_size();
  field.psi.resize(in.size());
  std::vector<double> half(fs);
  for (int tau = 0; tau < in.frames; ++tau) {
    const double* lf = field.log_forward.data() + fs * tau;
    const double* lb = field.log_backward.data() + fs * tau;
    double* psi = field.psi.data() + fs * tau;
    for (std::size_t i = 0; i < fs; ++i) half[i] = 0.5 * (lf[i] + lb[i]);
    double l = detail::log_sum_exp(half.data(), fs);
    if (!std::isfinite(l)) throw DegenerateError("score frame collapsed to zero");
    double sum = 0.0;
    for (std::size_t i = 0; i < fs; ++i) {
      psi[i] = std::exp(half[i] - l);
      sum += psi[i];
    }
    for (std::size_t i = 0; i < fs; ++i) psi[i] /= sum;
  }
  return field;
}

}  // namespace ridgetrack
