#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ridgetrack/curve.hpp"

using namespace ridgetrack;
using Catch::Matchers::WithinAbs;

namespace {

FrameScoreField field_2x2(std::vector<double> psi) {
  FrameScoreField f;
  f.width = 2;
  f.height = 2;
  f.frames = 1;
  f.psi = std::move(psi);
  return f;
}

}  // namespace

TEST_CASE("frame aggregate worked example on a 2x2 frame") {
  FrameScoreField scores = field_2x2({0.1, 0.2, 0.3, 0.4});
  ScoreInputs in;
  in.width = 2;
  in.height = 2;
  in.frames = 1;
  in.tangent_u = {1.0, 2.0, 3.0, 4.0};
  in.tangent_w = {0.5, 0.5, 0.5, 0.5};
  FrameAggregate agg = frame_aggregate(scores, in, 0);

  CHECK_THAT(agg.position.x, WithinAbs(0.6, 1e-15));
  CHECK_THAT(agg.position.y, WithinAbs(0.7, 1e-15));
  CHECK(agg.position.t == 0.0);
  CHECK_THAT(agg.tangent.x, WithinAbs(3.0, 1e-15));
  CHECK_THAT(agg.tangent.y, WithinAbs(0.5, 1e-15));
  CHECK(agg.tangent.t == 1.0);
  CHECK_THAT(agg.s_uu, WithinAbs(0.24, 1e-15));
  CHECK_THAT(agg.s_ww, WithinAbs(0.21, 1e-15));
  CHECK_THAT(agg.s_uw, WithinAbs(-0.02, 1e-15));
}

TEST_CASE("frame aggregate on a 3x1 strip") {
  FrameScoreField scores;
  scores.width = 3;
  scores.height = 1;
  scores.frames = 2;
  scores.psi = {0.25, 0.5, 0.25, 0.0, 1.0, 0.0};
  ScoreInputs in;
  in.width = 3;
  in.height = 1;
  in.frames = 2;
  in.tangent_u.assign(6, 0.0);
  in.tangent_w.assign(6, 0.0);

  FrameAggregate a0 = frame_aggregate(scores, in, 0);
  CHECK_THAT(a0.position.x, WithinAbs(1.0, 1e-15));
  CHECK_THAT(a0.s_uu, WithinAbs(0.5, 1e-15));
  CHECK(a0.s_ww == 0.0);
  CHECK(a0.s_uw == 0.0);

  FrameAggregate a1 = frame_aggregate(scores, in, 1);
  CHECK(a1.tau == 1.0);
  CHECK_THAT(a1.position.x, WithinAbs(1.0, 1e-15));
  CHECK(a1.s_uu == 0.0);  // point mass has no spread

  CHECK_THROWS_AS(frame_aggregate(scores, in, -1), ConfigError);
  CHECK_THROWS_AS(frame_aggregate(scores, in, 2), ConfigError);
}

TEST_CASE("kernel smoothing blends per-frame linear predictions") {
  std::vector<FrameAggregate> aggs(2);
  aggs[0].tau = 0.0;
  aggs[0].position = {1.0, 0.0, 0.0};
  aggs[0].tangent = {1.0, 1.0, 1.0};
  aggs[1].tau = 1.0;
  aggs[1].position = {2.0, 1.0, 1.0};
  aggs[1].tangent = {1.0, 1.0, 1.0};

  // both predictions land on the same point, so any bandwidth returns it
  for (double h : {0.5, 1.0, 3.0}) {
    Vec3 p = kernel_smooth(aggs, h, 0.5);
    CHECK_THAT(p.x, WithinAbs(1.5, 1e-12));
    CHECK_THAT(p.y, WithinAbs(0.5, 1e-12));
    CHECK_THAT(p.t, WithinAbs(0.5, 1e-12));
  }
}

TEST_CASE("kernel weights are Gaussian in the time offset") {
  std::vector<FrameAggregate> aggs(2);
  aggs[0].tau = 0.0;
  aggs[0].position = {0.0, 0.0, 0.0};
  aggs[0].tangent = {0.0, 0.0, 1.0};
  aggs[1].tau = 1.0;
  aggs[1].position = {4.0, 0.0, 1.0};
  aggs[1].tangent = {0.0, 0.0, 1.0};

  double t = 0.25;
  double k0 = std::exp(-0.5 * 0.25 * 0.25), k1 = std::exp(-0.5 * 0.75 * 0.75);
  Vec3 p = kernel_smooth(aggs, 1.0, t);
  CHECK_THAT(p.x, WithinAbs(4.0 * k1 / (k0 + k1), 1e-13));
  CHECK_THAT(p.t, WithinAbs(t, 1e-13));
}

TEST_CASE("a single aggregate extrapolates along its own tangent") {
  std::vector<FrameAggregate> aggs(1);
  aggs[0].tau = 2.0;
  aggs[0].position = {3.0, 4.0, 2.0};
  aggs[0].tangent = {0.5, -0.25, 1.0};
  Vec3 p = kernel_smooth(aggs, 1.0, 2.8);
  CHECK_THAT(p.x, WithinAbs(3.4, 1e-12));
  CHECK_THAT(p.y, WithinAbs(3.8, 1e-12));
  CHECK_THAT(p.t, WithinAbs(2.8, 1e-12));
}

TEST_CASE("kernel smoothing rejects bad inputs") {
  std::vector<FrameAggregate> aggs(1);
  aggs[0].tau = 0.0;
  CHECK_THROWS_AS(kernel_smooth(aggs, 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(kernel_smooth(aggs, -1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(kernel_smooth({}, 1.0, 0.0), ConfigError);
  // seven bandwidths away from the only aggregate: nothing in support
  CHECK_THROWS_AS(kernel_smooth(aggs, 1.0, 7.0), DegenerateError);
}

TEST_CASE("curve evaluation goes through the kernel") {
  RidgeCurve curve;
  curve.bandwidth = 2.0;
  curve.frames.resize(1);
  curve.frames[0].tau = 0.0;
  curve.frames[0].position = {1.0, 2.0, 0.0};
  curve.frames[0].tangent = {1.0, 0.0, 1.0};
  Vec3 p = curve.evaluate(0.5);
  CHECK_THAT(p.x, WithinAbs(1.5, 1e-12));
  CHECK_THAT(p.y, WithinAbs(2.0, 1e-12));
}

TEST_CASE("confidence region of a rotated covariance") {
  FrameAggregate agg;
  agg.tau = 3.0;
  agg.position = {10.0, 12.0, 3.0};
  agg.s_uu = 1.25;
  agg.s_ww = 1.25;
  agg.s_uw = 0.75;

  ConfidenceRegion region = confidence_region(agg, 0.05);
  CHECK(region.q == -2.0 * std::log(0.05));
  CHECK_THAT(region.q, WithinAbs(5.991464547107982, 1e-12));
  CHECK_THAT(region.ev_big, WithinAbs(2.0, 1e-14));
  CHECK_THAT(region.ev_small, WithinAbs(0.5, 1e-14));
  double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK_THAT(region.ax_u, WithinAbs(inv_sqrt2, 1e-14));
  CHECK_THAT(region.ax_w, WithinAbs(inv_sqrt2, 1e-14));
  // pseudoinverse block equals the true inverse here (det = 1)
  CHECK_THAT(region.p_uu, WithinAbs(1.25, 1e-13));
  CHECK_THAT(region.p_uw, WithinAbs(-0.75, 1e-13));
  CHECK_THAT(region.p_ww, WithinAbs(1.25, 1e-13));

  // walk the long axis: inside just below the boundary, outside just above
  double r_big = std::sqrt(region.q * region.ev_big);
  Vec3 along_big{inv_sqrt2, inv_sqrt2, 0.0};
  CHECK(region.contains(agg.position + (0.999 * r_big) * along_big));
  CHECK_FALSE(region.contains(agg.position + (1.001 * r_big) * along_big));

  double r_small = std::sqrt(region.q * region.ev_small);
  Vec3 along_small{-inv_sqrt2, inv_sqrt2, 0.0};
  CHECK(region.contains(agg.position + (0.999 * r_small) * along_small));
  CHECK_FALSE(region.contains(agg.position + (1.001 * r_small) * along_small));

  // any temporal offset leaves the frame's plane
  CHECK_FALSE(region.contains(agg.position + Vec3{0.0, 0.0, 0.5}));
  CHECK(region.contains(agg.position));
}

TEST_CASE("a point-mass frame yields a degenerate region containing only its center") {
  FrameAggregate agg;
  agg.position = {5.0, 6.0, 0.0};
  ConfidenceRegion region = confidence_region(agg, 0.05);
  CHECK(region.ev_big == 0.0);
  CHECK(region.p_uu == 0.0);
  CHECK(region.contains(agg.position));
  CHECK_FALSE(region.contains(agg.position + Vec3{1e-6, 0.0, 0.0}));
  CHECK_FALSE(region.contains(agg.position + Vec3{0.0, 1e-6, 0.0}));
}

TEST_CASE("a rank-one covariance restricts membership to its axis") {
  FrameAggregate agg;
  agg.position = {0.0, 0.0, 0.0};
  agg.s_uu = 2.0;  // spread along u only
  ConfidenceRegion region = confidence_region(agg, 0.05);
  CHECK_THAT(region.ev_big, WithinAbs(2.0, 1e-14));
  CHECK(region.ev_small == 0.0);
  double r_big = std::sqrt(region.q * region.ev_big);
  CHECK(region.contains({0.999 * r_big, 0.0, 0.0}));
  CHECK_FALSE(region.contains({1.001 * r_big, 0.0, 0.0}));
  CHECK_FALSE(region.contains({0.0, 1e-6, 0.0}));  // off the column space
}

TEST_CASE("alpha is validated") {
  FrameAggregate agg;
  for (double alpha : {0.0, 1.0, -0.5, 1.5})
    CHECK_THROWS_AS(confidence_region(agg, alpha), ConfigError);
  CHECK_NOTHROW(confidence_region(agg, 0.5));
}
