// Shared helpers for the test suites: deterministic RNG wrappers and
// reference implementations ("oracles") that deliberately avoid the code
// paths under test, so each comparison is between two independent routes.

#pragma once

#include <Eigen/Dense>
#include <random>

namespace testsupport {

using Eigen::Matrix3d;
using Eigen::Matrix4d;
using Eigen::Vector2d;
using Eigen::Vector3d;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vector3d random_vec3(Rng& rng, double lo = -1.0, double hi = 1.0) {
  return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

inline Vector3d random_unit3(Rng& rng) {
  while (true) {
    Vector3d v = random_vec3(rng);
    const double n = v.norm();
    if (n > 1e-3 && n < 1.0) return v / n;
  }
}

/// Matrix exponential of skew(w) by plain series summation. 30 terms keep
/// the truncation error below 1e-18 for angles up to pi. Independent of the
/// closed-form Rodrigues path.
inline Matrix3d series_exp_skew(const Vector3d& w) {
  Matrix3d wx;
  wx << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  Matrix3d sum = Matrix3d::Identity();
  Matrix3d term = Matrix3d::Identity();
  for (int k = 1; k <= 30; ++k) {
    term = (term * wx) / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

/// Homogeneous 4x4 from rotation and translation, for matrix-chain oracles.
inline Matrix4d homogeneous(const Matrix3d& r, const Vector3d& t) {
  Matrix4d m = Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = t;
  return m;
}

}  // namespace testsupport
