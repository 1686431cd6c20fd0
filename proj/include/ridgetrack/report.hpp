#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "ridgetrack/errors.hpp"
#include "ridgetrack/pipeline.hpp"

namespace ridgetrack {

namespace detail {

inline nlohmann::json config_json(const DetectConfig& cfg) {
  nlohmann::json j;
  j["sigma"] = cfg.scales.sigma;
  j["delta"] = cfg.scales.delta;
  j["truncate"] = cfg.scales.truncate;
  j["tangent_cap"] = cfg.scoring.tangent_cap;
  j["hatted"] = cfg.scoring.use_hatted;
  if (cfg.transition.window == TransitionParams::kFullWindow)
    j["window"] = "full";
  else
    j["window"] = cfg.transition.window;
  j["bandwidth"] = cfg.bandwidth;
  j["alpha"] = cfg.alpha;
  j["negate"] = cfg.negate_input;
  j["threads"] = cfg.threads;
  return j;
}

}  // namespace detail

/// Human-readable diagnostics sidecar: configuration echo, the
/// standardization constant, stage timings, and the per-frame score peaks.
inline void write_report_text(const DetectResult& result, const DetectConfig& cfg, int width,
                              int height, int frames, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  out << "input: " << width << "x" << height << "x" << frames << "\n";
  out << "sigma: " << cfg.scales.sigma << "\n";
  out << "delta: " << cfg.scales.delta << "\n";
  out << "truncate: " << cfg.scales.truncate << "\n";
  out << "tangent_cap: " << cfg.scoring.tangent_cap << "\n";
  out << "hatted: " << (cfg.scoring.use_hatted ? "on" : "off") << "\n";
  if (cfg.transition.window == TransitionParams::kFullWindow)
    out << "window: full\n";
  else
    out << "window: " << cfg.transition.window << "\n";
  out << "bandwidth: " << cfg.bandwidth << "\n";
  out << "alpha: " << cfg.alpha << "\n";
  out << "negate: " << (cfg.negate_input ? "on" : "off") << "\n";
  out << "threads: " << cfg.threads << "\n";
  out << "mu: " << result.mu << "\n";
  out << "stage seconds:";
  for (const StageTiming& t : result.timings) out << " " << t.stage << "=" << t.seconds;
  out << "\n";
  out << "frame max psi:\n";
  for (std::size_t tau = 0; tau < result.frame_max_psi.size(); ++tau)
    out << "  " << tau << " " << result.frame_max_psi[tau] << "\n";
  if (!out) throw IoError("write failure on " + path);
}

/// Machine-readable twin of the text report.
inline void write_report_json(const DetectResult& result, const DetectConfig& cfg, int width,
                              int height, int frames, const std::string& path) {
  nlohmann::json j;
  j["input"] = {width, height, frames};
  j["config"] = detail::config_json(cfg);
  j["mu"] = result.mu;
  nlohmann::json timings = nlohmann::json::object();
  for (const StageTiming& t : result.timings) timings[t.stage] = t.seconds;
  j["stage_seconds"] = timings;
  j["frame_max_psi"] = result.frame_max_psi;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace ridgetrack
