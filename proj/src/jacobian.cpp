#include "mcslam/jacobian.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace mcslam {

namespace {

/// Columns are dp_hat/dphi and dp_hat/dtheta of the unit observation ray
/// p_hat = (sin phi cos theta, -sin theta, cos phi cos theta).
Eigen::Matrix<double, 3, 2> unit_ray_derivative(const Bearing& b) {
  const double sp = std::sin(b.phi), cp = std::cos(b.phi);
  const double st = std::sin(b.theta), ct = std::cos(b.theta);
  Eigen::Matrix<double, 3, 2> d;
  d << cp * ct, -sp * st,
       0.0,     -ct,
      -sp * ct, -cp * st;
  return d;
}

}  // namespace

Eigen::Matrix2d bearing_block(const Bearing& b) {
  const double cp = std::cos(b.phi), tp = std::tan(b.phi);
  const double ct = std::cos(b.theta), tt = std::tan(b.theta);
  Eigen::Matrix2d block;
  block << -tp * tp - 1.0, 0.0,
           tp * tt / cp,   1.0 / (cp * ct * ct);
  return block;
}

MatX anchor_rows(const Scenario& s, int feature) {
  if (feature < 0 || feature >= s.feature_count())
    throw std::out_of_range("feature index out of range");
  const int nf = s.feature_count();
  MatX rows = MatX::Zero(2, s.state_dim());
  rows.block<2, 2>(0, nf + 6 + 2 * feature) =
      bearing_block(s.features[static_cast<size_t>(feature)].bearing);
  return rows;
}

MatX observation_rows(const Scenario& s, int feature, int observation) {
  const IntermediateVectors iv = intermediate_vectors(s, feature, observation);
  const FeatureParam& f = s.features[static_cast<size_t>(feature)];
  const int cam =
      s.observations.observers[static_cast<size_t>(feature)]
                              [static_cast<size_t>(observation)];
  const Mat3 r_obs =
      s.calibration.extrinsics[static_cast<size_t>(cam)].rotation.matrix();

  const double z = r_obs.col(2).dot(iv.q);
  if (z <= 0.0)
    throw std::domain_error("feature " + std::to_string(feature) +
                            " behind camera " + std::to_string(cam) +
                            " at keyframe 2");

  Eigen::Matrix<double, 2, 3> projector;
  projector.row(0) = -(r_obs.col(1).cross(iv.q)).transpose();
  projector.row(1) = (r_obs.col(0).cross(iv.q)).transpose();
  projector /= z * z;

  const Mat3 r_k = s.motion.rotation().matrix();
  const Mat3 r_anchor =
      s.calibration.extrinsics[static_cast<size_t>(f.anchor_camera)]
          .rotation.matrix();

  const int nf = s.feature_count();
  MatX rows = MatX::Zero(2, s.state_dim());
  rows.col(feature) = projector * iv.a_hat;
  rows.block<2, 3>(0, nf) = projector;
  rows.block<2, 3>(0, nf + 3) = -projector * skew(iv.w);
  rows.block<2, 2>(0, nf + 6 + 2 * feature) =
      f.depth * projector * r_k * r_anchor * unit_ray_derivative(f.bearing);
  return rows;
}

JacobianBundle assemble_jacobian(const Scenario& s) {
  JacobianBundle bundle;
  bundle.entries = measurement_entries(s);
  const int n = s.state_dim();
  bundle.matrix = MatX::Zero(s.measurement_dim(), n);

  for (const MeasurementEntry& e : bundle.entries) {
    const MatX rows = e.keyframe == 1
                          ? anchor_rows(s, e.feature)
                          : observation_rows(s, e.feature, e.observation);
    bundle.matrix.block(e.row, 0, 2, n) = rows;
  }

  Eigen::JacobiSVD<MatX> svd(bundle.matrix);
  bundle.singular_values = VecX::Zero(n);
  bundle.singular_values.head(svd.singularValues().size()) =
      svd.singularValues();
  return bundle;
}

MatX fd_jacobian(const Scenario& s, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");

  const VecX x0 = assemble_state(s);
  const int n = s.state_dim();
  const int nf = s.feature_count();
  const Rotation r0 = s.motion.rotation();

  MatX j(s.measurement_dim(), n);
  for (int c = 0; c < n; ++c) {
    VecX xp = x0, xm = x0;
    if (c >= nf + 3 && c < nf + 6) {
      // Left-multiplicative rotation perturbation, mapped back to the
      // axis-angle coordinates the state stores.
      Vec3 delta = Vec3::Zero();
      delta[c - (nf + 3)] = step;
      xp.segment<3>(nf + 3) = log_so3(exp_so3(delta) * r0);
      xm.segment<3>(nf + 3) = log_so3(exp_so3(-delta) * r0);
    } else {
      xp[c] += step;
      xm[c] -= step;
    }
    const VecX zp = stack_measurements(with_state(s, xp)).z;
    const VecX zm = stack_measurements(with_state(s, xm)).z;
    j.col(c) = (zp - zm) / (2.0 * step);
  }
  return j;
}

RankReport jacobian_rank(const JacobianBundle& bundle, double rel_tol) {
  const int n = static_cast<int>(bundle.matrix.cols());
  Eigen::JacobiSVD<MatX> svd(bundle.matrix, Eigen::ComputeFullV);

  VecX sigma = VecX::Zero(n);
  sigma.head(svd.singularValues().size()) = svd.singularValues();

  RankReport report;
  report.sigma_max = sigma[0];
  report.sigma_min = sigma[n - 1];
  report.sigma_second_min = n >= 2 ? sigma[n - 2] : sigma[0];
  report.spectrum = sigma;
  report.min_direction = svd.matrixV().col(n - 1);
  if (report.sigma_max > 0.0) {
    const double cut = rel_tol * report.sigma_max;
    for (int i = 0; i < n; ++i)
      if (sigma[i] > cut) ++report.rank;
  }
  return report;
}

}  // namespace mcslam
