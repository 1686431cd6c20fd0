#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ridgetrack/errors.hpp"
#include "ridgetrack/linalg3.hpp"
#include "ridgetrack/parallel.hpp"
#include "ridgetrack/trajectory.hpp"
#include "ridgetrack/video_tensor.hpp"

namespace ridgetrack {

/// One segment of the piecewise blob amplitude, active on frame times
/// [begin, end): value(t) = offset + cosine_amp * cos(2 pi t / period).
struct AmplitudePiece {
  double begin = 0.0, end = 0.0;
  double offset = 0.0;
  double cosine_amp = 0.0;
  double period = 1.0;

  double value(double t) const {
    if (cosine_amp == 0.0) return offset;
    return offset + cosine_amp * std::cos(2.0 * std::numbers::pi * t / period);
  }
};

/// Recipe for a synthetic valley video: a constant-intensity background with
/// one moving Gaussian dip whose depth follows the amplitude profile, whose
/// footprint radius oscillates, and whose center follows a trajectory built
/// from a base point, optional per-axis step changes, and optional per-axis
/// sinusoids. The three study presets are parameter choices of this recipe.
struct SimulationSpec {
  int width = 41, height = 41, frames = 100;
  double baseline = 140.0;

  double u0 = 20.0, w0 = 20.0;
  double jump_du = 0.0, jump_dw = 0.0;
  double jump_u_at = -1.0, jump_w_at = -1.0;  // negative disables the step
  double sine_amp_u = 0.0, sine_period_u = 0.0;
  double sine_amp_w = 0.0, sine_period_w = 0.0;

  std::vector<AmplitudePiece> amplitude_pieces;  // empty selects the default profile

  double radius_base = 6.0, radius_amp = 3.0;  // R(tau) = base + amp * sin(tau), radians

  bool poisson = true;
  std::uint64_t seed = 0;
  std::string name = "sim";
};

/// The study's standard depth profile: full depth, two pulsing stretches,
/// and a void interval in between where the blob is entirely absent.
inline std::vector<AmplitudePiece> default_amplitude_profile(int frames) {
  std::vector<AmplitudePiece> pieces;
  double T = frames;
  auto add = [&](double b, double e, double off, double amp, double per) {
    b = std::min(b, T);
    e = std::min(e, T);
    if (b < e) pieces.push_back({b, e, off, amp, per});
  };
  add(0, 20, 60.0, 0.0, 1.0);
  add(20, 55, 30.0, 30.0, 10.0);
  add(55, 65, 0.0, 0.0, 1.0);
  add(65, T, 30.0, 30.0, 10.0);
  if (!pieces.empty()) pieces.back().end = T;
  return pieces;
}

inline double amplitude(const SimulationSpec& spec, double t) {
  std::vector<AmplitudePiece> fallback;
  const std::vector<AmplitudePiece>* pieces = &spec.amplitude_pieces;
  if (pieces->empty()) {
    fallback = default_amplitude_profile(spec.frames);
    pieces = &fallback;
  }
  for (const AmplitudePiece& p : *pieces)
    if (t >= p.begin && t < p.end) return p.value(t);
  throw ConfigError("amplitude queried outside the profile domain at t=" + std::to_string(t));
}

inline Vec3 trajectory(const SimulationSpec& spec, double t) {
  double u = spec.u0, w = spec.w0;
  if (spec.jump_u_at >= 0.0 && t >= spec.jump_u_at) u += spec.jump_du;
  if (spec.jump_w_at >= 0.0 && t >= spec.jump_w_at) w += spec.jump_dw;
  if (spec.sine_amp_u != 0.0)
    u += spec.sine_amp_u * std::sin(2.0 * std::numbers::pi * t / spec.sine_period_u);
  if (spec.sine_amp_w != 0.0)
    w += spec.sine_amp_w * std::sin(2.0 * std::numbers::pi * t / spec.sine_period_w);
  return {u, w, t};
}

inline double blob_radius(const SimulationSpec& spec, double tau) {
  return spec.radius_base + spec.radius_amp * std::sin(tau);
}

/// Fills in defaults and rejects specs that violate the synthetic model:
/// negative depth, non-positive radius, or a center that leaves the frame.
inline void validate_and_resolve(SimulationSpec& spec) {
  if (spec.width < 1 || spec.height < 1 || spec.frames < 1)
    throw ConfigError("simulation dimensions must be positive");
  if (!std::isfinite(spec.baseline)) throw ConfigError("baseline must be finite");
  if (spec.amplitude_pieces.empty())
    spec.amplitude_pieces = default_amplitude_profile(spec.frames);

  const auto& ps = spec.amplitude_pieces;
  if (ps.front().begin != 0.0 || ps.back().end != double(spec.frames))
    throw ConfigError("amplitude profile must cover [0, frames) exactly");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!(ps[i].begin < ps[i].end)) throw ConfigError("empty amplitude piece");
    if (i + 1 < ps.size() && ps[i].end != ps[i + 1].begin)
      throw ConfigError("amplitude pieces must be contiguous");
    if (ps[i].cosine_amp != 0.0 && !(ps[i].period > 0.0))
      throw ConfigError("cosine amplitude piece needs a positive period");
    double lo = ps[i].offset - std::fabs(ps[i].cosine_amp);
    if (lo < -1e-9) throw ConfigError("amplitude profile dips below zero");
  }
  if ((spec.sine_amp_u != 0.0 && !(spec.sine_period_u > 0.0)) ||
      (spec.sine_amp_w != 0.0 && !(spec.sine_period_w > 0.0)))
    throw ConfigError("sinusoidal trajectory needs a positive period");
  if (!(spec.radius_base - std::fabs(spec.radius_amp) > 0.0))
    throw ConfigError("blob radius must stay positive");
  for (int t = 0; t < spec.frames; ++t) {
    Vec3 c = trajectory(spec, t);
    if (c.x < 0.0 || c.x >= spec.width || c.y < 0.0 || c.y >= spec.height)
      throw ConfigError("trajectory leaves the frame at t=" + std::to_string(t));
  }
}

/// Renders the noise-free video: baseline minus the Gaussian dip.
inline VideoTensor render_clean(const SimulationSpec& spec, int threads = 1) {
  SimulationSpec s = spec;
  validate_and_resolve(s);
  VideoTensor out(s.width, s.height, s.frames);
  parallel_for(s.frames, threads, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t tau = lo; tau < hi; ++tau) {
      double a = amplitude(s, double(tau));
      Vec3 c = trajectory(s, double(tau));
      double r = blob_radius(s, double(tau));
      double inv = 1.0 / (2.0 * r * r);
      for (int n = 0; n < s.height; ++n)
        for (int m = 0; m < s.width; ++m) {
          double d2 = (m - c.x) * (m - c.x) + (n - c.y) * (n - c.y);
          out.at(m, n, int(tau)) = s.baseline - a * std::exp(-d2 * inv);
        }
    }
  });
  return out;
}

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

/// Counter-based per-voxel random stream: the state is a hash of (seed,
/// counter), so draws depend only on the voxel index, never on evaluation
/// order or worker count.
struct VoxelRng {
  std::uint64_t state;

  VoxelRng(std::uint64_t seed, std::uint64_t counter)
      : state(mix64(seed + 0x9e3779b97f4a7c15ull) ^ mix64(counter + 0xbf58476d1ce4e5b9ull)) {}

  std::uint64_t next_u64() {
    state += 0x9e3779b97f4a7c15ull;
    return mix64(state);
  }

  double uniform_open() {  // (0, 1]
    return (double(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }
};

/// Poisson sampling: Knuth's product-of-uniforms method for small rates,
/// transformed rejection with squeeze (Hormann's PTRS) for rates >= 10.
inline long poisson_draw(double lambda, VoxelRng& rng) {
  if (lambda <= 0.0) return 0;
  if (lambda < 10.0) {
    double limit = std::exp(-lambda);
    double prod = 1.0;
    long k = -1;
    do {
      prod *= rng.uniform_open();
      ++k;
    } while (prod > limit);
    return k;
  }
  double slam = std::sqrt(lambda);
  double loglam = std::log(lambda);
  double b = 0.931 + 2.53 * slam;
  double a = -0.059 + 0.02483 * b;
  double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = rng.uniform_open() - 0.5;
    double v = rng.uniform_open();
    double us = 0.5 - std::fabs(u);
    if (us <= 0.0) continue;
    double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= v_r) return long(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        kf * loglam - lambda - std::lgamma(kf + 1.0))
      return long(kf);
  }
}

}  // namespace detail

/// Replaces every voxel by a Poisson draw whose rate is the clean
/// intensity. Negative intensities are clamped to rate zero; one warning
/// reports how many voxels needed clamping.
inline VideoTensor apply_poisson(const VideoTensor& clean, std::uint64_t seed,
                                 int threads = 1) {
  VideoTensor out(clean.width(), clean.height(), clean.frames());
  std::int64_t total = static_cast<std::int64_t>(clean.size());
  std::atomic<std::int64_t> clamped{0};
  parallel_for(total, threads, [&](std::int64_t lo, std::int64_t hi) {
    std::int64_t local = 0;
    for (std::int64_t i = lo; i < hi; ++i) {
      double rate = clean.data()[i];
      if (rate < 0.0) {
        rate = 0.0;
        ++local;
      }
      detail::VoxelRng rng(seed, static_cast<std::uint64_t>(i));
      out.data()[i] = double(detail::poisson_draw(rate, rng));
    }
    clamped += local;
  });
  if (clamped > 0)
    std::cerr << "warning: clamped " << clamped << " negative intensities to zero rate\n";
  return out;
}

/// Ground truth for the spec's trajectory, one record per frame. Tangents
/// are the analytic derivative of the smooth part (step changes contribute
/// nothing); covariance and threshold columns are zero.
inline std::vector<TrajectoryRecord> truth_trajectory(const SimulationSpec& spec) {
  std::vector<TrajectoryRecord> records;
  records.reserve(static_cast<std::size_t>(spec.frames));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (int t = 0; t < spec.frames; ++t) {
    TrajectoryRecord r;
    r.tau = t;
    Vec3 c = trajectory(spec, double(t));
    r.u = c.x;
    r.w = c.y;
    if (spec.sine_amp_u != 0.0)
      r.du = spec.sine_amp_u * two_pi / spec.sine_period_u *
             std::cos(two_pi * t / spec.sine_period_u);
    if (spec.sine_amp_w != 0.0)
      r.dw = spec.sine_amp_w * two_pi / spec.sine_period_w *
             std::cos(two_pi * t / spec.sine_period_w);
    records.push_back(r);
  }
  return records;
}

/// The three study presets.
inline SimulationSpec preset_spec(const std::string& which) {
  SimulationSpec spec;
  spec.name = which;
  if (which == "gamma1") return spec;
  if (which == "gamma2") {
    spec.u0 = 18.0;
    spec.w0 = 17.0;
    spec.jump_du = 4.0;
    spec.jump_u_at = 60.0;
    spec.jump_dw = 6.0;
    spec.jump_w_at = 30.0;
    return spec;
  }
  if (which == "gamma3") {
    spec.sine_amp_u = 3.0;
    spec.sine_period_u = 50.0;
    spec.sine_amp_w = 2.0;
    spec.sine_period_w = 40.0;
    return spec;
  }
  throw ConfigError("unknown preset '" + which + "': expected gamma1, gamma2 or gamma3");
}

/// Parses the key=value config format. '#' starts a comment; keys are the
/// field names documented in the README. The amplitude profile is a
/// semicolon-separated list of pieces, each "t0:t1 const C" or
/// "t0:t1 cosine OFFSET AMP PERIOD".
inline SimulationSpec parse_simulation_spec(std::istream& in) {
  SimulationSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      std::size_t b = s.find_first_not_of(" \t\r");
      std::size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    auto as_number = [&]() {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size())
        throw ConfigError("config line " + std::to_string(lineno) + ": bad number '" + value +
                          "'");
      return x;
    };
    if (key == "width")
      spec.width = int(as_number());
    else if (key == "height")
      spec.height = int(as_number());
    else if (key == "frames")
      spec.frames = int(as_number());
    else if (key == "baseline")
      spec.baseline = as_number();
    else if (key == "u0")
      spec.u0 = as_number();
    else if (key == "w0")
      spec.w0 = as_number();
    else if (key == "jump_du")
      spec.jump_du = as_number();
    else if (key == "jump_dw")
      spec.jump_dw = as_number();
    else if (key == "jump_u_at")
      spec.jump_u_at = as_number();
    else if (key == "jump_w_at")
      spec.jump_w_at = as_number();
    else if (key == "sine_amp_u")
      spec.sine_amp_u = as_number();
    else if (key == "sine_period_u")
      spec.sine_period_u = as_number();
    else if (key == "sine_amp_w")
      spec.sine_amp_w = as_number();
    else if (key == "sine_period_w")
      spec.sine_period_w = as_number();
    else if (key == "radius_base")
      spec.radius_base = as_number();
    else if (key == "radius_amp")
      spec.radius_amp = as_number();
    else if (key == "seed")
      spec.seed = static_cast<std::uint64_t>(as_number());
    else if (key == "name")
      spec.name = value;
    else if (key == "preset")
      spec = preset_spec(value);
    else if (key == "noise") {
      if (value == "poisson")
        spec.poisson = true;
      else if (value == "none")
        spec.poisson = false;
      else
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": noise must be poisson or none");
    } else if (key == "amplitude") {
      spec.amplitude_pieces.clear();
      std::istringstream pieces(value);
      std::string piece;
      while (std::getline(pieces, piece, ';')) {
        std::istringstream ps(piece);
        std::string range, kind;
        if (!(ps >> range >> kind))
          throw ConfigError("config line " + std::to_string(lineno) + ": bad amplitude piece");
        std::size_t colon = range.find(':');
        if (colon == std::string::npos)
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": amplitude piece needs t0:t1");
        auto bound = [&](const std::string& s) {
          std::size_t used = 0;
          double x = 0.0;
          try {
            x = std::stod(s, &used);
          } catch (const std::exception&) {
            used = 0;
          }
          if (used == 0 || used != s.size())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": bad amplitude bound '" + s + "'");
          return x;
        };
        AmplitudePiece ap;
        ap.begin = bound(range.substr(0, colon));
        ap.end = bound(range.substr(colon + 1));
        if (kind == "const") {
          if (!(ps >> ap.offset))
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": const piece needs a value");
        } else if (kind == "cosine") {
          if (!(ps >> ap.offset >> ap.cosine_amp >> ap.period))
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": cosine piece needs offset, amplitude, period");
        } else {
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": amplitude piece kind must be const or cosine");
        }
        spec.amplitude_pieces.push_back(ap);
      }
    } else {
      throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return spec;
}

}  // namespace ridgetrack
