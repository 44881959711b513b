#include "mcslam/cluster.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mcslam {
namespace {

std::string feature_tag(int j) { return "feature " + std::to_string(j); }

}  // namespace

ClusterCalibration ClusterCalibration::make(
    std::vector<RigidTransform> extrinsics) {
  if (extrinsics.empty()) {
    throw std::invalid_argument("calibration needs at least one camera");
  }
  const RigidTransform& first = extrinsics.front();
  if ((first.rotation.matrix() - Mat3::Identity()).cwiseAbs().maxCoeff() >
          1e-12 ||
      first.translation.cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument(
        "first extrinsic must be the identity (cluster frame is camera 0)");
  }
  ClusterCalibration c;
  c.extrinsics = std::move(extrinsics);
  return c;
}

int ObservationMap::total_observations() const {
  return std::accumulate(observers.begin(), observers.end(), 0,
                         [](int acc, const std::vector<int>& o) {
                           return acc + static_cast<int>(o.size());
                         });
}

VecX assemble_state(const Scenario& s) {
  const int nf = s.feature_count();
  VecX x(6 + 3 * nf);
  for (int j = 0; j < nf; ++j) x[j] = s.features[j].depth;
  x.segment<3>(nf) = s.motion.translation;
  x.segment<3>(nf + 3) = s.motion.omega;
  for (int j = 0; j < nf; ++j) {
    x[nf + 6 + 2 * j] = s.features[j].bearing.phi;
    x[nf + 6 + 2 * j + 1] = s.features[j].bearing.theta;
  }
  return x;
}

StateParts split_state(const VecX& x, int feature_count) {
  if (x.size() != 6 + 3 * feature_count) {
    throw std::invalid_argument("state length does not match feature count");
  }
  StateParts p;
  p.depths = x.head(feature_count);
  p.translation = x.segment<3>(feature_count);
  p.omega = x.segment<3>(feature_count + 3);
  p.bearings.resize(feature_count);
  for (int j = 0; j < feature_count; ++j) {
    p.bearings[j] = {x[feature_count + 6 + 2 * j],
                     x[feature_count + 6 + 2 * j + 1]};
  }
  return p;
}

Scenario with_state(const Scenario& base, const VecX& x) {
  const StateParts parts = split_state(x, base.feature_count());
  Scenario s = base;
  for (int j = 0; j < base.feature_count(); ++j) {
    s.features[j].depth = parts.depths[j];
    s.features[j].bearing = parts.bearings[j];
  }
  s.motion.translation = parts.translation;
  s.motion.omega = parts.omega;
  return s;
}

ValidationReport validate_assumptions(const Scenario& s) {
  ValidationReport report;
  auto violation = [&](int assumption, std::string message) {
    report.violations.push_back({assumption, std::move(message)});
  };

  const int nc = s.camera_count();
  if (nc < 1) {
    violation(0, "calibration: no cameras");
    return report;
  }
  {
    const RigidTransform& first = s.calibration.extrinsics.front();
    if ((first.rotation.matrix() - Mat3::Identity()).cwiseAbs().maxCoeff() >
            1e-12 ||
        first.translation.cwiseAbs().maxCoeff() > 1e-12) {
      violation(0, "calibration: first extrinsic must be identity");
    }
  }
  if (static_cast<int>(s.observations.observers.size()) !=
      s.feature_count()) {
    violation(0, "observation map does not cover every feature");
    return report;
  }

  constexpr double half_pi = 1.5707963267948966;
  const Rotation rk = s.motion.rotation();

  for (int j = 0; j < s.feature_count(); ++j) {
    const FeatureParam& f = s.features[j];
    bool structural_ok = true;

    if (f.anchor_camera < 0 || f.anchor_camera >= nc) {
      violation(1, feature_tag(j) + ": anchor camera index " +
                       std::to_string(f.anchor_camera) + " out of range");
      structural_ok = false;
    }
    if (!(f.depth > 0.0) || !std::isfinite(f.depth)) {
      violation(0, feature_tag(j) + ": depth must be positive and finite");
      structural_ok = false;
    }
    if (!(std::abs(f.bearing.phi) < half_pi) ||
        !(std::abs(f.bearing.theta) < half_pi)) {
      violation(0, feature_tag(j) + ": bearing outside (-pi/2, pi/2)");
      structural_ok = false;
    }

    const std::vector<int>& obs = s.observations.observers[j];
    if (obs.empty()) {
      violation(2, feature_tag(j) +
                       ": no keyframe-2 observations (Assumption 2)");
      structural_ok = false;
    }
    for (int cam : obs) {
      if (cam < 0 || cam >= nc) {
        violation(0, feature_tag(j) + ": observer index " +
                         std::to_string(cam) + " out of range");
        structural_ok = false;
      }
    }
    if (!structural_ok) continue;

    // Geometry of the second keyframe, expressed in the keyframe-2 cluster
    // frame: a_hat is the transformed anchor bearing and v the displacement
    // from the anchor camera centre (keyframe 1) to the observing camera
    // centre (keyframe 2).
    const RigidTransform& anchor = s.calibration.extrinsics[f.anchor_camera];
    const Vec3 a_hat = rk * (anchor.rotation * bearing_to_unit(f.bearing));
    const Vec3 anchor_centre_k2 =
        s.motion.translation + rk * anchor.translation;

    bool has_noncollinear = false;
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const RigidTransform& observer = s.calibration.extrinsics[obs[k]];
      const Vec3 v = anchor_centre_k2 - observer.translation;
      const Vec3 q = f.depth * a_hat + v;
      const double z = observer.rotation.matrix().col(2).dot(q);
      if (!(z > 0.0)) {
        violation(3, feature_tag(j) + ", observation " + std::to_string(k) +
                         ": behind camera " + std::to_string(obs[k]) +
                         " at keyframe 2 (Assumption 3)");
      }
      if (v.norm() < 1e-12) {
        report.notes.push_back(feature_tag(j) + ", observation " +
                               std::to_string(k) +
                               ": zero baseline (observation vector is "
                               "zero, no depth information)");
      } else if (v.cross(a_hat).norm() > 1e-8 * v.norm()) {
        has_noncollinear = true;
      }
    }
    if (!obs.empty() && !has_noncollinear) {
      violation(2, feature_tag(j) +
                       ": every observation is collinear with the anchor "
                       "bearing (Assumption 2)");
    }
  }
  return report;
}

RigidTransform camera_pose_at_keyframe(const ClusterCalibration& calib,
                                       const KeyframeMotion& motion,
                                       int camera, int keyframe) {
  if (camera < 0 || camera >= calib.camera_count()) {
    throw std::out_of_range("camera index out of range");
  }
  if (keyframe != 1 && keyframe != 2) {
    throw std::out_of_range("keyframe index must be 1 or 2");
  }
  const RigidTransform& cam = calib.extrinsics[camera];
  if (keyframe == 1) return cam;
  const RigidTransform motion_tf{motion.rotation(), motion.translation};
  return motion_tf.inverse().compose(cam);
}

}  // namespace mcslam
