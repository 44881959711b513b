#include "mcslam/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace mcslam {
namespace {

constexpr double kPi = 3.141592653589793;

RigidTransform cam(const Vec3& axis_angle, const Vec3& centre) {
  return {exp_so3(axis_angle), centre};
}

}  // namespace

ClusterCalibration back_to_back_two(double separation) {
  return ClusterCalibration::make(
      {RigidTransform::identity(),
       cam({0.0, kPi, 0.0}, {0.0, 0.0, -separation})});
}

ClusterCalibration side_by_side_two(double baseline) {
  return ClusterCalibration::make(
      {RigidTransform::identity(), cam({0.0, kPi, 0.0}, {baseline, 0.0, 0.0})});
}

ClusterCalibration noncollinear_three() {
  return ClusterCalibration::make(
      {RigidTransform::identity(),
       cam({0.0, 2.0 * kPi / 3.0, 0.0}, {0.4, 0.0, 0.0}),
       {exp_so3({0.0, -2.0 * kPi / 3.0, 0.0}) * exp_so3({0.25, 0.0, 0.0}),
        Vec3{0.15, 0.35, 0.08}}});
}

ClusterCalibration planar_four(double side) {
  return ClusterCalibration::make(
      {RigidTransform::identity(),
       cam({0.0, kPi / 2.0, 0.0}, {side, 0.0, 0.0}),
       cam({0.0, kPi, 0.0}, {side, side, 0.0}),
       cam({0.0, -kPi / 2.0, 0.0}, {0.0, side, 0.0})});
}

KeyframeMotion pure_translation_motion(const Vec3& t) {
  return {t, Vec3::Zero()};
}

KeyframeMotion planar_inplane_rotation_motion(double angle, double lambda) {
  const Vec3 omega{angle, 0.0, 0.0};
  const Mat3 r = exp_so3(omega).matrix();
  const Vec3 direction = (r - Mat3::Identity()) * Vec3::UnitY();
  return {lambda * direction, omega};
}

KeyframeMotion quarter_turn_translation_motion(const ClusterCalibration& c,
                                               double lambda) {
  if (c.camera_count() != 2) {
    throw std::invalid_argument(
        "quarter-turn motion needs a two-camera cluster");
  }
  const Vec3 omega{0.0, 0.0, kPi / 2.0};
  const Mat3 r = exp_so3(omega).matrix();
  const Vec3 direction =
      (r - Mat3::Identity()) * c.extrinsics[1].translation;
  if (direction.norm() < 1e-9) {
    throw std::invalid_argument(
        "baseline is parallel to the turn axis; translation direction "
        "vanishes");
  }
  return {lambda * direction, omega};
}

KeyframeMotion rotation_about_point(const Vec3& centre, const Vec3& axis,
                                    double angle) {
  const double n = axis.norm();
  if (n < 1e-12) {
    throw std::invalid_argument("rotation axis must be non-zero");
  }
  const Vec3 omega = (angle / n) * axis;
  const Mat3 r = exp_so3(omega).matrix();
  return {(Mat3::Identity() - r) * centre, omega};
}

KeyframeMotion concentric_arcs_motion(const ClusterCalibration& c,
                                      double beta, const Vec3& axis,
                                      double angle) {
  if (c.camera_count() != 2) {
    throw std::invalid_argument(
        "concentric-arcs motion needs a two-camera cluster");
  }
  return rotation_about_point(beta * c.extrinsics[1].translation, axis,
                              angle);
}

}  // namespace mcslam
