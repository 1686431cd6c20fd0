#pragma once

#include <array>
#include <cmath>

namespace ridgetrack {

struct Vec3 {
  double x = 0.0, y = 0.0, t = 0.0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : t); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : t); }
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.t + b.t}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.t - b.t}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.t}; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.t}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.t * b.t; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.t - a.t * b.y, a.t * b.x - a.x * b.t, a.x * b.y - a.y * b.x};
}

inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  return n > 0.0 ? Vec3{a.x / n, a.y / n, a.t / n} : a;
}

/// Symmetric 3x3 matrix, unique entries only. Row order (x, y, t).
struct SymMat3 {
  double xx = 0.0, xy = 0.0, yy = 0.0, xt = 0.0, yt = 0.0, tt = 0.0;

  double operator()(int r, int c) const {
    static constexpr int slot[3][3] = {{0, 1, 3}, {1, 2, 4}, {3, 4, 5}};
    switch (slot[r][c]) {
      case 0: return xx;
      case 1: return xy;
      case 2: return yy;
      case 3: return xt;
      case 4: return yt;
      default: return tt;
    }
  }

  double trace() const { return xx + yy + tt; }

  double frobenius_sq() const {
    return xx * xx + yy * yy + tt * tt + 2.0 * (xy * xy + xt * xt + yt * yt);
  }

  double max_abs() const {
    double m = std::fabs(xx);
    for (double v : {xy, yy, xt, yt, tt}) m = std::max(m, std::fabs(v));
    return m;
  }
};

inline Vec3 operator*(const SymMat3& a, const Vec3& v) {
  return {a.xx * v.x + a.xy * v.y + a.xt * v.t,
          a.xy * v.x + a.yy * v.y + a.yt * v.t,
          a.xt * v.x + a.yt * v.y + a.tt * v.t};
}

inline double quadratic_form(const SymMat3& a, const Vec3& v) { return dot(v, a * v); }

inline double det(const SymMat3& a) {
  return a.xx * (a.yy * a.tt - a.yt * a.yt) - a.xy * (a.xy * a.tt - a.yt * a.xt) +
         a.xt * (a.xy * a.yt - a.yy * a.xt);
}

/// Sum of the three principal 2x2 minors (second invariant of the matrix).
inline double minor_sum(const SymMat3& a) {
  return (a.xx * a.yy - a.xy * a.xy) + (a.xx * a.tt - a.xt * a.xt) +
         (a.yy * a.tt - a.yt * a.yt);
}

}  // namespace ridgetrack
