#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "ridgetrack/pipeline.hpp"
#include "ridgetrack/simulate.hpp"

using namespace ridgetrack;
using Catch::Matchers::WithinAbs;

namespace {

SimulationSpec small_moving_blob() {
  SimulationSpec spec;
  spec.width = 21;
  spec.height = 21;
  spec.frames = 12;
  spec.u0 = 10.0;
  spec.w0 = 10.0;
  spec.sine_amp_u = 1.5;
  spec.sine_period_u = 12.0;
  spec.amplitude_pieces = {{0.0, 12.0, 60.0, 0.0, 1.0}};
  spec.radius_base = 2.5;
  spec.radius_amp = 0.0;
  spec.poisson = false;
  return spec;
}

DetectConfig small_config() {
  DetectConfig cfg;
  cfg.negate_input = true;  // the synthetic videos are dips, not crests
  cfg.scales.sigma = 2.0;
  cfg.scales.delta = 1.0;
  cfg.scales.truncate = 3.0;
  cfg.transition.window = 4;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("the chain recovers a clean moving blob") {
  SimulationSpec spec = small_moving_blob();
  VideoTensor video = render_clean(spec);
  DetectResult result = detect(video, small_config());

  REQUIRE(result.records.size() == 12);
  for (int t = 0; t < 12; ++t) {
    Vec3 truth = trajectory(spec, double(t));
    double dev = std::hypot(result.records[t].u - truth.x, result.records[t].w - truth.y);
    INFO("frame " << t << " deviation " << dev);
    CHECK(dev <= 1.5);
    if (t >= 3 && t <= 8) CHECK(dev <= 0.75);
  }

  CHECK(result.mu > 0.0);
  REQUIRE(result.frame_max_psi.size() == 12);
  for (double p : result.frame_max_psi) {
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
  }
  for (const TrajectoryRecord& r : result.records) {
    CHECK(r.q_alpha == -2.0 * std::log(0.05));
    CHECK(r.s_uu >= 0.0);
    CHECK(r.s_ww >= 0.0);
  }

  const char* expected[] = {"prepare", "jets", "standardize", "scoring", "linking", "curve"};
  REQUIRE(result.timings.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(result.timings[i].stage == expected[i]);
    CHECK(result.timings[i].seconds >= 0.0);
  }
}

TEST_CASE("a featureless video is reported as degenerate") {
  VideoTensor flat(9, 9, 5, 3.0);
  CHECK_THROWS_AS(detect(flat, small_config()), DegenerateError);
}

TEST_CASE("detection is invariant under positive affine intensity maps") {
  SimulationSpec spec = small_moving_blob();
  VideoTensor video = render_clean(spec);
  VideoTensor mapped(video.width(), video.height(), video.frames());
  for (std::size_t i = 0; i < video.size(); ++i)
    mapped.data()[i] = 2.2 * video.data()[i] + 30.0;

  DetectConfig cfg = small_config();
  DetectResult a = detect(video, cfg);
  DetectResult b = detect(mapped, cfg);
  for (int t = 0; t < 12; ++t) {
    CHECK_THAT(b.records[t].u, WithinAbs(a.records[t].u, 1e-8));
    CHECK_THAT(b.records[t].w, WithinAbs(a.records[t].w, 1e-8));
    CHECK_THAT(b.records[t].du, WithinAbs(a.records[t].du, 1e-8));
    CHECK_THAT(b.records[t].s_uu, WithinAbs(a.records[t].s_uu, 1e-8));
  }
  CHECK_THAT(b.mu, WithinAbs(2.2 * a.mu, 1e-9 * a.mu));
}

TEST_CASE("detection commutes with time reversal") {
  SimulationSpec spec = small_moving_blob();
  VideoTensor video = render_clean(spec);
  DetectConfig cfg = small_config();
  DetectResult fwd = detect(video, cfg);
  DetectResult rev = detect(reverse_time(video), cfg);

  int T = 12;
  std::size_t fs = fwd.scores.frame_size();
  for (int t = 0; t < T; ++t) {
    int r = T - 1 - t;
    CHECK_THAT(rev.records[r].u, WithinAbs(fwd.records[t].u, 1e-9));
    CHECK_THAT(rev.records[r].w, WithinAbs(fwd.records[t].w, 1e-9));
    CHECK_THAT(rev.records[r].du, WithinAbs(-fwd.records[t].du, 1e-9));
    CHECK_THAT(rev.records[r].dw, WithinAbs(-fwd.records[t].dw, 1e-9));
    CHECK_THAT(rev.records[r].s_uu, WithinAbs(fwd.records[t].s_uu, 1e-12));
    CHECK_THAT(rev.records[r].s_uw, WithinAbs(fwd.records[t].s_uw, 1e-12));
    CHECK_THAT(rev.records[r].s_ww, WithinAbs(fwd.records[t].s_ww, 1e-12));
    for (std::size_t i = 0; i < fs; ++i)
      CHECK_THAT(rev.scores.psi[fs * std::size_t(r) + i],
                 WithinAbs(fwd.scores.psi[fs * std::size_t(t) + i], 1e-12));
  }
}

TEST_CASE("worker count never changes the result") {
  SimulationSpec spec = small_moving_blob();
  VideoTensor video = render_clean(spec);
  DetectConfig one = small_config();
  DetectConfig three = small_config();
  three.threads = 3;
  DetectResult a = detect(video, one);
  DetectResult b = detect(video, three);
  for (int t = 0; t < 12; ++t) {
    CHECK(a.records[t].u == b.records[t].u);
    CHECK(a.records[t].w == b.records[t].w);
    CHECK(a.records[t].du == b.records[t].du);
    CHECK(a.records[t].s_uu == b.records[t].s_uu);
  }
  for (std::size_t i = 0; i < a.scores.psi.size(); ++i) CHECK(a.scores.psi[i] == b.scores.psi[i]);
}

TEST_CASE("the negate flag equals negating the tensor up front") {
  SimulationSpec spec = small_moving_blob();
  VideoTensor video = render_clean(spec);

  DetectConfig flagged = small_config();  // negate_input = true
  DetectConfig plain = small_config();
  plain.negate_input = false;

  DetectResult a = detect(video, flagged);
  DetectResult b = detect(negate(video), plain);
  for (int t = 0; t < 12; ++t) {
    CHECK(a.records[t].u == b.records[t].u);
    CHECK(a.records[t].w == b.records[t].w);
  }
  for (std::size_t i = 0; i < a.scores.psi.size(); ++i) CHECK(a.scores.psi[i] == b.scores.psi[i]);
}

TEST_CASE("detect configuration is validated") {
  VideoTensor video(9, 9, 5, 0.0);
  auto broken = [&](auto&& mutate) {
    DetectConfig cfg = small_config();
    mutate(cfg);
    CHECK_THROWS_AS(detect(video, cfg), ConfigError);
  };
  broken([](DetectConfig& c) { c.bandwidth = 0.0; });
  broken([](DetectConfig& c) { c.alpha = 1.0; });
  broken([](DetectConfig& c) { c.alpha = 0.0; });
  broken([](DetectConfig& c) { c.threads = -1; });
  broken([](DetectConfig& c) { c.scales.sigma = 0.0; });
  broken([](DetectConfig& c) { c.transition.window = 0; });
  broken([](DetectConfig& c) { c.scoring.tangent_cap = -1.0; });
}
