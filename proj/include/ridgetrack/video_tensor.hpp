#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ridgetrack/errors.hpp"

namespace ridgetrack {

/// Gray-scale video volume. Axis m runs across a frame row (width M),
/// axis n down the rows (height N), axis tau over frames (count T).
/// Storage is frame-major: index (m, n, tau) lives at (tau * N + n) * M + m,
/// which also matches the on-disk payload order of the binary format.
class VideoTensor {
 public:
  VideoTensor() = default;

  VideoTensor(int width, int height, int frames, double fill = 0.0)
      : width_(width), height_(height), frames_(frames) {
    if (width <= 0 || height <= 0 || frames <= 0)
      throw ConfigError("video tensor dimensions must be positive");
    data_.assign(size(), fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int frames() const { return frames_; }

  std::size_t size() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_) *
           static_cast<std::size_t>(frames_);
  }

  std::size_t index(int m, int n, int tau) const {
    return (static_cast<std::size_t>(tau) * height_ + n) * width_ + m;
  }

  double& at(int m, int n, int tau) { return data_[index(m, n, tau)]; }
  double at(int m, int n, int tau) const { return data_[index(m, n, tau)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  int width_ = 0, height_ = 0, frames_ = 0;
  std::vector<double> data_;
};

/// Flips the sign of every voxel, turning valleys into ridges.
inline VideoTensor negate(const VideoTensor& v) {
  VideoTensor out = v;
  for (double& x : out.values()) x = -x;
  return out;
}

/// Reverses the frame order; spatial content of each frame is untouched.
inline VideoTensor reverse_time(const VideoTensor& v) {
  VideoTensor out(v.width(), v.height(), v.frames());
  std::size_t frame = static_cast<std::size_t>(v.width()) * v.height();
  for (int tau = 0; tau < v.frames(); ++tau) {
    const double* src = v.data() + frame * tau;
    double* dst = out.data() + frame * (v.frames() - 1 - tau);
    std::copy(src, src + frame, dst);
  }
  return out;
}

}  // namespace ridgetrack
