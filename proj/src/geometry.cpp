#include "mcslam/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace mcslam {

Rotation Rotation::from_matrix(const Mat3& m) {
  const double ortho = (m.transpose() * m - Mat3::Identity())
                           .cwiseAbs()
                           .maxCoeff();
  if (ortho > 1e-12) {
    throw std::invalid_argument("rotation matrix is not orthonormal");
  }
  if (std::abs(m.determinant() - 1.0) > 1e-12) {
    throw std::invalid_argument("rotation matrix determinant is not +1");
  }
  return Rotation(m);
}

Rotation exp_so3(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a;  // sin(theta)/theta
  double b;  // (1 - cos(theta))/theta^2
  if (theta < 1e-8) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 wx = skew(w);
  return Rotation::from_matrix_unchecked(Mat3::Identity() + a * wx +
                                         b * wx * wx);
}

Vec3 log_so3(const Rotation& r) {
  // Eigen's AngleAxis covers the small-angle and near-pi branches.
  Eigen::AngleAxisd aa(r.matrix());
  return aa.angle() * aa.axis();
}

Mat4 RigidTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation.matrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Vec3 demote(const Vec4& ph) {
  if (ph.w() == 0.0) {
    throw std::domain_error("cannot demote a point at infinity");
  }
  return ph.head<3>() / ph.w();
}

Vec2 demote(const Vec3& ph) {
  if (ph.z() == 0.0) {
    throw std::domain_error("cannot demote a point at infinity");
  }
  return ph.head<2>() / ph.z();
}

ImagePoint project_pinhole(const Vec3& p) {
  if (!(p.z() > 0.0)) {
    throw std::domain_error("point not in front of camera");
  }
  return {-p.x() / p.z(), -p.y() / p.z()};
}

Vec3 bearing_to_unit(const Bearing& b) {
  constexpr double half_pi = 1.5707963267948966;
  if (!(std::abs(b.phi) < half_pi) || !(std::abs(b.theta) < half_pi)) {
    throw std::invalid_argument("bearing outside field of view");
  }
  const double cphi = std::cos(b.phi);
  const double sphi = std::sin(b.phi);
  const double cth = std::cos(b.theta);
  const double sth = std::sin(b.theta);
  return {sphi * cth, -sth, cphi * cth};
}

Bearing unit_to_bearing(const Vec3& p) {
  if (std::abs(p.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("direction is not unit length");
  }
  if (!(p.z() > 0.0)) {
    throw std::invalid_argument("direction does not point forward");
  }
  return {std::atan2(p.x(), p.z()), std::asin(-p.y())};
}

}  // namespace mcslam
