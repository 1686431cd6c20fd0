#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "ridgetrack/curve.hpp"
#include "ridgetrack/errors.hpp"
#include "ridgetrack/linking.hpp"
#include "ridgetrack/scale_space.hpp"
#include "ridgetrack/scoring.hpp"
#include "ridgetrack/trajectory.hpp"
#include "ridgetrack/video_tensor.hpp"

namespace ridgetrack {

/// Every knob of the detection chain. Defaults reproduce the reference
/// synthetic runs. The config is read-only during detect(), so one instance
/// can drive concurrent detections on different tensors.
struct DetectConfig {
  ScaleParams scales;
  ScoringOptions scoring;
  TransitionParams transition;
  double bandwidth = 1.0;
  double alpha = 0.05;
  bool negate_input = false;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const {
    scales.validate();
    scoring.validate();
    transition.validate();
    if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (threads < 0) throw ConfigError("threads must be non-negative");
  }
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

/// Output bundle of one detection: the smoothed curve (with per-frame
/// aggregates inside), ready-to-serialize per-frame records, the full score
/// field, and run diagnostics.
struct DetectResult {
  RidgeCurve curve;
  std::vector<TrajectoryRecord> records;
  FrameScoreField scores;
  double mu = 0.0;
  std::vector<double> frame_max_psi;
  std::vector<StageTiming> timings;
};

/// Runs the full chain: optional negation, scale-space jets, Hessian
/// standardization, per-voxel features and weights, cross-frame score
/// accumulation, frame aggregation, and kernel smoothing.
inline DetectResult detect(const VideoTensor& video, const DetectConfig& cfg) {
  cfg.validate();
  DetectResult result;
  using clock = std::chrono::steady_clock;
  auto timed = [&](const char* name, auto&& fn) {
    auto begin = clock::now();
    fn();
    result.timings.push_back(
        {name, std::chrono::duration<double>(clock::now() - begin).count()});
  };

  VideoTensor work;
  timed("prepare", [&] { work = cfg.negate_input ? negate(video) : video; });

  JetField jet;
  timed("jets", [&] { jet = compute_jet(work, cfg.scales, cfg.threads); });
  timed("standardize", [&] { standardize(jet); });
  result.mu = jet.mu;

  ScoreInputs inputs;
  timed("scoring", [&] { inputs = compute_score_inputs(jet, cfg.scoring, cfg.threads); });

  timed("linking",
        [&] { result.scores = accumulate_scores(inputs, cfg.transition, cfg.threads); });

  timed("curve", [&] {
    result.curve.bandwidth = cfg.bandwidth;
    result.curve.frames.reserve(static_cast<std::size_t>(video.frames()));
    for (int tau = 0; tau < video.frames(); ++tau)
      result.curve.frames.push_back(frame_aggregate(result.scores, inputs, tau));

    double q = -2.0 * std::log(cfg.alpha);
    for (int tau = 0; tau < video.frames(); ++tau) {
      const FrameAggregate& agg = result.curve.frames[tau];
      Vec3 smoothed = result.curve.evaluate(double(tau));
      TrajectoryRecord rec;
      rec.tau = tau;
      rec.u = smoothed.x;
      rec.w = smoothed.y;
      rec.du = agg.tangent.x;
      rec.dw = agg.tangent.y;
      rec.s_uu = agg.s_uu;
      rec.s_uw = agg.s_uw;
      rec.s_ww = agg.s_ww;
      rec.q_alpha = q;
      result.records.push_back(rec);
    }

    result.frame_max_psi.resize(static_cast<std::size_t>(video.frames()), 0.0);
    std::size_t fs = result.scores.frame_size();
    for (int tau = 0; tau < video.frames(); ++tau) {
      const double* p = result.scores.psi.data() + fs * tau;
      for (std::size_t i = 0; i < fs; ++i)
        result.frame_max_psi[tau] = std::max(result.frame_max_psi[tau], p[i]);
    }
  });

  return result;
}

}  // namespace ridgetrack
