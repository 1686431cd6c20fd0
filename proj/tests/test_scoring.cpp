#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ridgetrack/scale_space.hpp"
#include "ridgetrack/scoring.hpp"
#include "ridgetrack/simulate.hpp"

using namespace ridgetrack;
using Catch::Matchers::WithinAbs;

TEST_CASE("intra-frame metrics follow the exponent recipe") {
  IntraMetrics m = intra_metrics(1.0, 0.8, 1.0, 3.75);
  CHECK_THAT(m.l_rho, WithinAbs(2.0, 1e-15));
  CHECK_THAT(m.l_theta, WithinAbs(1.6, 1e-15));
  CHECK_THAT(m.l_eta_kappa, WithinAbs(2.0 + 2.0 * std::log1p(3.75), 1e-14));
  CHECK_THAT(m.total(), WithinAbs(8.7162892360931, 1e-12));
}

TEST_CASE("negative curvature strength only contributes through eta") {
  IntraMetrics m = intra_metrics(0.5, 0.5, -0.75, -2.0);
  CHECK_THAT(m.l_eta_kappa, WithinAbs(-1.5, 1e-15));  // log1p(max(-2,0)) = 0
}

TEST_CASE("each evidence term is monotone") {
  double base = intra_metrics(0.5, 0.5, 0.5, 1.0).total();
  CHECK(intra_metrics(0.6, 0.5, 0.5, 1.0).total() > base);
  CHECK(intra_metrics(0.5, 0.6, 0.5, 1.0).total() > base);
  CHECK(intra_metrics(0.5, 0.5, 0.6, 1.0).total() > base);
  CHECK(intra_metrics(0.5, 0.5, 0.5, 1.5).total() > base);
}

TEST_CASE("merging folds weights additively and blends directions") {
  SECTION("unequal weights") {
    double log_phi = 0.0;            // weight 1
    double log_phi_hat = std::log(3.0);  // weight 3
    Vec3 v{1.0, 0.0, 0.0};
    merge_hatted(log_phi, v, log_phi_hat, {0.0, 0.0, 1.0});
    CHECK_THAT(std::exp(log_phi), WithinAbs(4.0, 1e-13));
    double inv_sqrt10 = 1.0 / std::sqrt(10.0);
    CHECK_THAT(v.x, WithinAbs(inv_sqrt10, 1e-13));
    CHECK_THAT(v.y, WithinAbs(0.0, 1e-15));
    CHECK_THAT(v.t, WithinAbs(3.0 * inv_sqrt10, 1e-13));
  }

  SECTION("equal weights bisect") {
    double log_phi = 0.7, log_phi_hat = 0.7;
    Vec3 v{0.6, 0.0, 0.8};
    merge_hatted(log_phi, v, log_phi_hat, {0.8, 0.0, 0.6});
    double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK_THAT(v.x, WithinAbs(inv_sqrt2, 1e-13));
    CHECK_THAT(v.t, WithinAbs(inv_sqrt2, 1e-13));
    CHECK_THAT(log_phi, WithinAbs(0.7 + std::log(2.0), 1e-13));
  }

  SECTION("opposed directions cannot be merged") {
    double log_phi = 0.0;
    Vec3 v{1.0, 0.0, 0.0};
    CHECK_THROWS_AS(merge_hatted(log_phi, v, 0.0, {-1.0, 0.0, 0.0}), Error);
  }
}

TEST_CASE("candidate tangents rescale to unit temporal speed") {
  Vec3 a = candidate_tangent({0.6, 0.0, 0.8}, 3.0);
  CHECK_THAT(a.x, WithinAbs(0.75, 1e-15));
  CHECK(a.y == 0.0);
  CHECK(a.t == 1.0);

  Vec3 b = candidate_tangent({0.0, 0.0, 1.0}, 3.0);
  CHECK(b.x == 0.0);
  CHECK(b.t == 1.0);
}

TEST_CASE("candidate tangents cap the spatial speed") {
  // too steep: spatial norm 5 against temporal 0.5 exceeds the cap
  Vec3 a = candidate_tangent({3.0, 4.0, 0.5}, 3.0);
  CHECK_THAT(a.x, WithinAbs(1.8, 1e-13));
  CHECK_THAT(a.y, WithinAbs(2.4, 1e-13));
  CHECK(a.t == 1.0);
  CHECK_THAT(std::hypot(a.x, a.y), WithinAbs(3.0, 1e-13));

  // no temporal component at all: keep the heading, ride the cap
  Vec3 b = candidate_tangent({1.0, 0.0, 0.0}, 3.0);
  CHECK_THAT(b.x, WithinAbs(3.0, 1e-15));
  CHECK(b.t == 1.0);

  // degenerate zero direction falls back to pure time flow
  Vec3 c = candidate_tangent({0.0, 0.0, 0.0}, 3.0);
  CHECK(c.x == 0.0);
  CHECK(c.y == 0.0);
  CHECK(c.t == 1.0);

  // boundary case: exactly at the cap stays uncapped
  Vec3 d = candidate_tangent({3.0, 0.0, 1.0}, 3.0);
  CHECK_THAT(d.x, WithinAbs(3.0, 1e-15));
}

TEST_CASE("scoring options are validated") {
  ScoringOptions opt;
  opt.tangent_cap = 0.0;
  CHECK_THROWS_AS(opt.validate(), ConfigError);
}

TEST_CASE("score inputs cover a rendered tube with sane values") {
  SimulationSpec spec;
  spec.width = 15;
  spec.height = 15;
  spec.frames = 6;
  spec.u0 = 7.0;
  spec.w0 = 7.0;
  spec.amplitude_pieces = {{0.0, 6.0, 60.0, 0.0, 1.0}};
  spec.radius_base = 2.5;
  spec.radius_amp = 0.0;
  spec.poisson = false;
  VideoTensor video = negate(render_clean(spec));  // ridges, not valleys

  JetField jet = compute_jet(video, ScaleParams{2.0, 1.0, 3.0});
  standardize(jet);

  for (bool hatted : {true, false}) {
    ScoringOptions opt;
    opt.use_hatted = hatted;
    ScoreInputs in = compute_score_inputs(jet, opt);
    REQUIRE(in.size() == video.size());
    CHECK(in.width == 15);
    CHECK(in.frames == 6);
    double center_phi = -1e300, border_phi = -1e300;
    for (std::size_t i = 0; i < in.size(); ++i) {
      CHECK(std::isfinite(in.log_phi[i]));
      CHECK(std::hypot(in.tangent_u[i], in.tangent_w[i]) <= opt.tangent_cap + 1e-12);
    }
    // evidence at the tube center beats evidence at a far corner
    std::size_t center = (std::size_t(3) * 15 + 7) * 15 + 7;
    std::size_t corner = (std::size_t(3) * 15 + 1) * 15 + 1;
    center_phi = in.log_phi[center];
    border_phi = in.log_phi[corner];
    CHECK(center_phi > border_phi);
  }
}
