#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "ridgetrack/errors.hpp"
#include "ridgetrack/trajectory.hpp"

namespace ridgetrack {

struct EvaluationSummary {
  double mean = 0.0;
  double rmse = 0.0;
  double max = 0.0;
  double frac_below_1px = 0.0;
  std::size_t count = 0;
};

/// Frame-by-frame spatial deviation between two trajectories plus summary
/// statistics. When a mask interval is set, `masked` repeats the statistics
/// with frames in [mask_begin, mask_end) excluded.
struct EvaluationReport {
  std::vector<double> tau;
  std::vector<double> dist;
  EvaluationSummary overall;
  bool has_mask = false;
  double mask_begin = 0.0, mask_end = 0.0;
  EvaluationSummary masked;
};

namespace detail {

inline EvaluationSummary summarize(const std::vector<double>& tau,
                                   const std::vector<double>& dist, bool use_mask,
                                   double mask_begin, double mask_end) {
  EvaluationSummary s;
  double sum = 0.0, sumsq = 0.0;
  std::size_t below = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (use_mask && tau[i] >= mask_begin && tau[i] < mask_end) continue;
    ++s.count;
    sum += dist[i];
    sumsq += dist[i] * dist[i];
    s.max = std::max(s.max, dist[i]);
    if (dist[i] < 1.0) ++below;
  }
  if (s.count > 0) {
    s.mean = sum / double(s.count);
    s.rmse = std::sqrt(sumsq / double(s.count));
    s.frac_below_1px = double(below) / double(s.count);
  }
  return s;
}

}  // namespace detail

/// Compares two trajectories defined on exactly the same frame set.
inline EvaluationReport evaluate(std::vector<TrajectoryRecord> a,
                                 std::vector<TrajectoryRecord> b,
                                 std::optional<std::pair<double, double>> mask = {}) {
  auto by_tau = [](const TrajectoryRecord& x, const TrajectoryRecord& y) {
    return x.tau < y.tau;
  };
  std::sort(a.begin(), a.end(), by_tau);
  std::sort(b.begin(), b.end(), by_tau);
  if (a.size() != b.size()) throw ConfigError("trajectories cover different frame counts");
  EvaluationReport report;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].tau != b[i].tau)
      throw ConfigError("trajectories cover different frames (tau=" +
                        std::to_string(a[i].tau) + " vs tau=" + std::to_string(b[i].tau) + ")");
    report.tau.push_back(a[i].tau);
    report.dist.push_back(std::hypot(a[i].u - b[i].u, a[i].w - b[i].w));
  }
  report.overall = detail::summarize(report.tau, report.dist, false, 0.0, 0.0);
  if (mask) {
    report.has_mask = true;
    report.mask_begin = mask->first;
    report.mask_end = mask->second;
    report.masked =
        detail::summarize(report.tau, report.dist, true, mask->first, mask->second);
  }
  return report;
}

inline void save_evaluation_csv(const EvaluationReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  out << "tau,dist\n";
  char line[80];
  for (std::size_t i = 0; i < report.tau.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", report.tau[i], report.dist[i]);
    out << line;
  }
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace ridgetrack
