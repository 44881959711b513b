// Core geometric primitives shared by the whole library: rotations,
// rigid transforms, homogeneous coordinates, the normalized pinhole
// projection and the azimuth/elevation bearing parameterization.
//
// Conventions (fixed throughout):
//   - all lengths in metres, all angles in radians
//   - the projection matrix is diag(-1,-1,1): a point (x,y,z) with z > 0
//     images at (u,v) = (-x/z, -y/z)
//   - a bearing (phi, theta) in (-pi/2, pi/2)^2 maps to the unit vector
//     (sin phi cos theta, -sin theta, cos phi cos theta), which always has
//     positive z, so anchored features sit in front of their camera.

#pragma once

#include <Eigen/Dense>

namespace mcslam {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Image point in normalized pinhole coordinates (no intrinsics applied).
struct ImagePoint {
  double u = 0.0;
  double v = 0.0;
  Vec2 vec() const { return {u, v}; }
};

/// Azimuth/elevation pair, both restricted to the open interval
/// (-pi/2, pi/2) so the encoded direction keeps z > 0.
struct Bearing {
  double phi = 0.0;    // azimuth, rotation towards +x
  double theta = 0.0;  // elevation, rotation towards -y
};

/// Cross-product matrix: skew(v) * w == v.cross(w).
inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

/// Proper rotation. Construction from a raw matrix verifies orthonormality
/// and det = +1 to 1e-12; composition assumes both operands already hold
/// the invariant, so products are not re-checked.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  /// Validating factory; throws std::invalid_argument on a non-rotation.
  static Rotation from_matrix(const Mat3& m);

  /// Trusted factory for matrices that are rotations by construction.
  static Rotation from_matrix_unchecked(const Mat3& m) { return Rotation(m); }

  const Mat3& matrix() const { return m_; }

  Rotation operator*(const Rotation& rhs) const {
    return Rotation(m_ * rhs.m_);
  }
  Vec3 operator*(const Vec3& p) const { return m_ * p; }

  Rotation transposed() const { return Rotation(m_.transpose()); }

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

/// Rodrigues formula. Below ||w|| = 1e-8 the sin/cos coefficients switch to
/// their second-order Taylor expansions to avoid 0/0.
Rotation exp_so3(const Vec3& w);

/// Inverse of exp_so3, principal branch (||result|| <= pi).
Vec3 log_so3(const Rotation& r);

/// Rigid transform p -> R p + t.
struct RigidTransform {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  /// this then maps the result of `rhs`, i.e. (a.compose(b))(p) == a(b(p)).
  RigidTransform compose(const RigidTransform& rhs) const {
    return {rotation * rhs.rotation,
            rotation * rhs.translation + translation};
  }

  RigidTransform inverse() const {
    Rotation rt = rotation.transposed();
    return {rt, -(rt * translation)};
  }

  Mat4 matrix() const;

  static RigidTransform identity() { return {}; }
};

/// Append a unit homogeneous coordinate.
inline Vec4 promote(const Vec3& p) { return {p.x(), p.y(), p.z(), 1.0}; }

/// Divide through by the last coordinate. Throws std::domain_error on a
/// point at infinity (last coordinate exactly zero).
Vec3 demote(const Vec4& ph);
Vec2 demote(const Vec3& ph);

/// Normalized pinhole projection with projection matrix diag(-1,-1,1).
/// Requires z > 0; throws std::domain_error otherwise (field of view is
/// strictly less than 180 degrees).
ImagePoint project_pinhole(const Vec3& p_camera);

/// Bearing -> unit direction (always z > 0). Throws std::invalid_argument
/// when either angle lies outside the open interval (-pi/2, pi/2).
Vec3 bearing_to_unit(const Bearing& b);

/// Unit direction (norm within 1e-9 of one, z > 0) -> bearing.
/// Inverse of bearing_to_unit; throws on a violated precondition.
Bearing unit_to_bearing(const Vec3& p);

}  // namespace mcslam
