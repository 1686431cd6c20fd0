#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ridgetrack/errors.hpp"
#include "ridgetrack/linalg3.hpp"

namespace ridgetrack {

/// Eigen pairs of a symmetric 3x3 matrix in detection order: lambda1 is the
/// eigenvalue of smallest magnitude (its eigenvector is the candidate ridge
/// direction), lambda2 >= lambda3 are the remaining two. All vectors are
/// unit length, mutually orthogonal, and sign-fixed so the temporal
/// component is non-negative; a zero temporal component falls back to a
/// positive first nonzero coordinate.
struct EigenSystem {
  double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
  Vec3 v1, v2, v3;
};

/// Flips v so that <v, e_t> >= 0, breaking the exact-zero case toward a
/// positive leading coordinate.
inline Vec3 redirected(const Vec3& v) {
  if (v.t > 0.0) return v;
  if (v.t < 0.0) return -v;
  if (v.x != 0.0) return v.x > 0.0 ? v : -v;
  if (v.y != 0.0) return v.y > 0.0 ? v : -v;
  return v;
}

namespace detail {

// Closed-form symmetric eigensolver: trigonometric roots of the
// characteristic polynomial, one Newton step per root, then the
// cross-product / orthogonal-complement eigenvector construction that
// starts from the best-separated eigenvalue.

inline void orthogonal_complement(const Vec3& w, Vec3& u, Vec3& v) {
  if (std::fabs(w.x) > std::fabs(w.y)) {
    double inv = 1.0 / std::sqrt(w.x * w.x + w.t * w.t);
    u = {-w.t * inv, 0.0, w.x * inv};
  } else {
    double inv = 1.0 / std::sqrt(w.y * w.y + w.t * w.t);
    u = {0.0, w.t * inv, -w.y * inv};
  }
  v = cross(w, u);
}

inline Vec3 eigenvector_isolated(const SymMat3& a, double eval) {
  Vec3 r0{a.xx - eval, a.xy, a.xt};
  Vec3 r1{a.xy, a.yy - eval, a.yt};
  Vec3 r2{a.xt, a.yt, a.tt - eval};
  Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
  double d01 = dot(c01, c01), d02 = dot(c02, c02), d12 = dot(c12, c12);
  Vec3 best = c01;
  double dbest = d01;
  if (d02 > dbest) {
    best = c02;
    dbest = d02;
  }
  if (d12 > dbest) {
    best = c12;
    dbest = d12;
  }
  if (dbest == 0.0) return {1.0, 0.0, 0.0};
  return (1.0 / std::sqrt(dbest)) * best;
}

inline Vec3 eigenvector_in_complement(const SymMat3& a, double eval, const Vec3& w0) {
  Vec3 u, v;
  orthogonal_complement(w0, u, v);
  Vec3 au = a * u, av = a * v;
  double m00 = dot(u, au) - eval;
  double m01 = dot(u, av);
  double m11 = dot(v, av) - eval;
  double abs00 = std::fabs(m00), abs01 = std::fabs(m01), abs11 = std::fabs(m11);
  if (abs00 >= abs11) {
    if (std::max(abs00, abs01) == 0.0) return u;
    if (abs00 >= abs01) {
      m01 /= m00;
      m00 = 1.0 / std::sqrt(1.0 + m01 * m01);
      m01 *= m00;
    } else {
      m00 /= m01;
      m01 = 1.0 / std::sqrt(1.0 + m00 * m00);
      m00 *= m01;
    }
    return m01 * u - m00 * v;
  }
  if (std::max(abs11, abs01) == 0.0) return u;
  if (abs11 >= abs01) {
    m01 /= m11;
    m11 = 1.0 / std::sqrt(1.0 + m01 * m01);
    m01 *= m11;
  } else {
    m11 /= m01;
    m01 = 1.0 / std::sqrt(1.0 + m11 * m11);
    m11 *= m01;
  }
  return m11 * u - m01 * v;
}

inline void eig3_ascending(const SymMat3& a, double eval[3], Vec3 evec[3]) {
  double scale = a.max_abs();
  if (scale == 0.0) {
    eval[0] = eval[1] = eval[2] = 0.0;
    evec[0] = {1.0, 0.0, 0.0};
    evec[1] = {0.0, 1.0, 0.0};
    evec[2] = {0.0, 0.0, 1.0};
    return;
  }
  double inv = 1.0 / scale;
  SymMat3 b{a.xx * inv, a.xy * inv, a.yy * inv, a.xt * inv, a.yt * inv, a.tt * inv};

  double q = b.trace() / 3.0;
  double p2 = (b.xx - q) * (b.xx - q) + (b.yy - q) * (b.yy - q) + (b.tt - q) * (b.tt - q) +
              2.0 * (b.xy * b.xy + b.xt * b.xt + b.yt * b.yt);
  double p = std::sqrt(p2 / 6.0);
  if (p == 0.0) {
    eval[0] = eval[1] = eval[2] = q * scale;
    evec[0] = {1.0, 0.0, 0.0};
    evec[1] = {0.0, 1.0, 0.0};
    evec[2] = {0.0, 0.0, 1.0};
    return;
  }
  double pinv = 1.0 / p;
  SymMat3 c{(b.xx - q) * pinv, b.xy * pinv, (b.yy - q) * pinv,
            b.xt * pinv,       b.yt * pinv, (b.tt - q) * pinv};
  double half_det = std::clamp(0.5 * det(c), -1.0, 1.0);
  double angle = std::acos(half_det) / 3.0;
  constexpr double two_thirds_pi = 2.0 * std::numbers::pi / 3.0;
  double beta2 = 2.0 * std::cos(angle);
  double beta0 = 2.0 * std::cos(angle + two_thirds_pi);
  eval[0] = q + p * beta0;
  eval[1] = q + p * (-beta0 - beta2);
  eval[2] = q + p * beta2;

  if (eval[0] > eval[1]) std::swap(eval[0], eval[1]);
  if (eval[1] > eval[2]) std::swap(eval[1], eval[2]);
  if (eval[0] > eval[1]) std::swap(eval[0], eval[1]);

  if (half_det >= 0.0) {
    evec[2] = eigenvector_isolated(b, eval[2]);
    evec[1] = eigenvector_in_complement(b, eval[1], evec[2]);
    evec[0] = cross(evec[1], evec[2]);
  } else {
    evec[0] = eigenvector_isolated(b, eval[0]);
    evec[1] = eigenvector_in_complement(b, eval[1], evec[0]);
    evec[2] = cross(evec[0], evec[1]);
  }

  // The trigonometric roots of a clustered spectrum carry O(sqrt(eps))
  // error, but the eigenvectors stay accurate; the Rayleigh quotient is the
  // residual-minimizing eigenvalue for each computed vector, so it restores
  // O(eps) accuracy (a numerically rank-deficient matrix gets eigenvalues at
  // rounding level instead of sqrt-eps level, which the pseudoinverse cutoff
  // can then drop).
  for (int i = 0; i < 3; ++i) eval[i] = dot(evec[i], b * evec[i]);
  for (int i = 0; i < 2; ++i) {
    int lo = i;
    for (int j = i + 1; j < 3; ++j)
      if (eval[j] < eval[lo]) lo = j;
    if (lo != i) {
      std::swap(eval[i], eval[lo]);
      std::swap(evec[i], evec[lo]);
    }
  }
  eval[0] *= scale;
  eval[1] *= scale;
  eval[2] *= scale;
}

}  // namespace detail

inline EigenSystem eig3_symmetric(const SymMat3& a) {
  double eval[3];
  Vec3 evec[3];
  detail::eig3_ascending(a, eval, evec);

  double mag[3] = {std::fabs(eval[0]), std::fabs(eval[1]), std::fabs(eval[2])};
  int i1 = 0;
  for (int i = 1; i < 3; ++i) {
    if (mag[i] < mag[i1]) {
      i1 = i;
    } else if (mag[i] == mag[i1] && std::fabs(evec[i].t) > std::fabs(evec[i1].t)) {
      i1 = i;
    }
  }
  int rest[2], k = 0;
  for (int i = 0; i < 3; ++i)
    if (i != i1) rest[k++] = i;
  int i2 = rest[0], i3 = rest[1];
  if (eval[i2] < eval[i3]) std::swap(i2, i3);

  EigenSystem out;
  out.lambda1 = eval[i1];
  out.lambda2 = eval[i2];
  out.lambda3 = eval[i3];
  out.v1 = redirected(evec[i1]);
  out.v2 = redirected(evec[i2]);
  out.v3 = redirected(evec[i3]);
  return out;
}

/// Moore-Penrose pseudoinverse through the spectral decomposition;
/// eigenvalues below rel_tol times the largest magnitude are treated as
/// zero and dropped.
inline SymMat3 pinv3_symmetric(const SymMat3& a, double rel_tol = 1e-10) {
  double eval[3];
  Vec3 evec[3];
  detail::eig3_ascending(a, eval, evec);
  double cutoff =
      rel_tol * std::max({std::fabs(eval[0]), std::fabs(eval[1]), std::fabs(eval[2])});
  SymMat3 out{};
  for (int i = 0; i < 3; ++i) {
    if (std::fabs(eval[i]) <= cutoff) continue;
    double s = 1.0 / eval[i];
    const Vec3& v = evec[i];
    out.xx += s * v.x * v.x;
    out.xy += s * v.x * v.y;
    out.yy += s * v.y * v.y;
    out.xt += s * v.x * v.t;
    out.yt += s * v.y * v.t;
    out.tt += s * v.t * v.t;
  }
  return out;
}

/// Gradient premultiplied by the pseudoinverse of the Hessian. Near a ridge
/// this lands on the offset between the voxel and the ridge surface, so its
/// direction is a second, independent estimate of the ridge axis.
inline Vec3 normalized_gradient(const Vec3& grad, const SymMat3& hess,
                                double rel_tol = 1e-10) {
  return pinv3_symmetric(hess, rel_tol) * grad;
}

}  // namespace ridgetrack
