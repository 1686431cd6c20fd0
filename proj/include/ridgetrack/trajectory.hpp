#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ridgetrack/errors.hpp"

namespace ridgetrack {

/// One frame of an extracted trajectory: position, tangent (temporal
/// component is always 1 and not stored), the spatial covariance block of
/// the per-frame score distribution, and the confidence threshold that
/// turns that covariance into an ellipse.
struct TrajectoryRecord {
  double tau = 0.0;
  double u = 0.0, w = 0.0;
  double du = 0.0, dw = 0.0;
  double s_uu = 0.0, s_uw = 0.0, s_ww = 0.0;
  double q_alpha = 0.0;
};

inline constexpr const char* kTrajectoryHeader = "tau,u,w,du,dw,s_uu,s_uw,s_ww,q_alpha";

/// Writes records as CSV, full double precision. When positive bounds are
/// given, positions outside [0, width) x [0, height) are rejected, as are
/// non-finite fields and covariance blocks that fail symmetry-free positive
/// semidefiniteness (negative diagonal or negative determinant beyond
/// rounding slack).
inline void save_trajectory_csv(const std::vector<TrajectoryRecord>& records,
                                const std::string& path, int width = 0, int height = 0) {
  std::string body(kTrajectoryHeader);
  body.push_back('\n');
  char line[360];
  for (const TrajectoryRecord& r : records) {
    for (double f : {r.tau, r.u, r.w, r.du, r.dw, r.s_uu, r.s_uw, r.s_ww, r.q_alpha})
      if (!std::isfinite(f))
        throw IoError("non-finite trajectory field at tau=" + std::to_string(r.tau));
    if (width > 0 && height > 0 &&
        (r.u < 0.0 || r.u >= width || r.w < 0.0 || r.w >= height))
      throw IoError("trajectory position out of bounds at tau=" + std::to_string(r.tau));
    double scale = std::max({std::fabs(r.s_uu), std::fabs(r.s_ww), 1.0});
    if (r.s_uu < -1e-12 * scale || r.s_ww < -1e-12 * scale ||
        r.s_uu * r.s_ww - r.s_uw * r.s_uw < -1e-12 * scale * scale)
      throw IoError("indefinite covariance block at tau=" + std::to_string(r.tau));
    std::snprintf(line, sizeof(line),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.tau, r.u,
                  r.w, r.du, r.dw, r.s_uu, r.s_uw, r.s_ww, r.q_alpha);
    body += line;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  out << body;
  if (!out) throw IoError("write failure on " + path);
}

inline std::vector<TrajectoryRecord> load_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryHeader)
    throw IoError(path + ": unexpected header '" + line + "'");
  std::vector<TrajectoryRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    TrajectoryRecord r;
    double* fields[9] = {&r.tau, &r.u, &r.w, &r.du, &r.dw, &r.s_uu, &r.s_uw, &r.s_ww, &r.q_alpha};
    std::istringstream ss(line);
    std::string cell;
    int got = 0;
    while (got < 9 && std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      try {
        *fields[got] = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size())
        throw IoError(path + ":" + std::to_string(lineno) + ": bad numeric cell '" + cell + "'");
      ++got;
    }
    if (got != 9 || std::getline(ss, cell, ','))
      throw IoError(path + ":" + std::to_string(lineno) + ": expected 9 comma-separated fields");
    records.push_back(r);
  }
  return records;
}

}  // namespace ridgetrack
