// Scenario description for a two-keyframe multicamera cluster:
// rigid calibration of the cameras, point features anchored at the first
// keyframe, the observation topology at the second keyframe, and the
// relative keyframe motion.
//
// The estimation state is the flat vector
//     x = [ s_1 .. s_nf | t (3) | omega (3) | (phi_1, theta_1) .. ]
// of dimension 6 + 3 n_f: feature depths first, then keyframe translation,
// rotation vector, and the per-feature bearings.

#pragma once

#include <string>
#include <vector>

#include "mcslam/geometry.hpp"

namespace mcslam {

/// Rigid mounting of each camera in the cluster frame. The cluster frame
/// is camera 0's frame, so the first extrinsic is pinned to the identity.
struct ClusterCalibration {
  std::vector<RigidTransform> extrinsics;  // camera frame -> cluster frame

  int camera_count() const { return static_cast<int>(extrinsics.size()); }

  /// Validating factory: at least one camera, extrinsics[0] == identity
  /// within 1e-12. Throws std::invalid_argument.
  static ClusterCalibration make(std::vector<RigidTransform> extrinsics);
};

/// Point feature anchored in one camera at the first keyframe: bearing in
/// the anchor camera plus depth along that ray (metres, > 0).
struct FeatureParam {
  int anchor_camera = 0;
  Bearing bearing;
  double depth = 1.0;
};

/// Which cameras re-observe each feature at the second keyframe.
struct ObservationMap {
  std::vector<std::vector<int>> observers;  // observers[j] = camera indices

  int feature_count() const { return static_cast<int>(observers.size()); }
  int total_observations() const;
};

/// Relative motion between the keyframes: a point expressed in the first
/// keyframe's cluster frame maps to R p + t in the second keyframe's frame,
/// with R = exp_so3(omega).
struct KeyframeMotion {
  Vec3 translation = Vec3::Zero();
  Vec3 omega = Vec3::Zero();

  Rotation rotation() const { return exp_so3(omega); }
};

struct Scenario {
  ClusterCalibration calibration;
  std::vector<FeatureParam> features;
  ObservationMap observations;
  KeyframeMotion motion;

  int camera_count() const { return calibration.camera_count(); }
  int feature_count() const { return static_cast<int>(features.size()); }
  int observation_count() const {
    return observations.total_observations();
  }
  int state_dim() const { return 6 + 3 * feature_count(); }
  int measurement_dim() const {
    return 2 * (feature_count() + observation_count());
  }
};

/// Flatten the estimated quantities of a scenario into the state vector.
VecX assemble_state(const Scenario& s);

struct StateParts {
  VecX depths;
  Vec3 translation;
  Vec3 omega;
  std::vector<Bearing> bearings;
};

/// Inverse of assemble_state. Throws std::invalid_argument when the vector
/// length is not 6 + 3 * feature_count.
StateParts split_state(const VecX& x, int feature_count);

/// Copy of `base` with depths, motion and bearings replaced from `x`.
/// Calibration, anchors and observation topology are kept, so
/// assemble_state(with_state(s, x)) == x bit for bit.
Scenario with_state(const Scenario& base, const VecX& x);

/// One broken modelling assumption. `assumption` is 1, 2 or 3 for the
/// anchoring / re-observation / field-of-view assumptions, 0 for a
/// structural defect (bad index, non-positive depth, ...).
struct ValidationIssue {
  int assumption = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> violations;
  std::vector<std::string> notes;  // informational, never fatal

  bool ok() const { return violations.empty(); }
};

/// Check the scenario against the modelling assumptions:
///   1. every feature is anchored in exactly one camera at keyframe 1
///      (structural given this data model; indices must be valid),
///   2. every feature is observed at keyframe 2 and at least one of those
///      observations has a baseline not collinear with the anchor bearing
///      (relative cross product > 1e-8),
///   3. every observed feature lies strictly in front of its observing
///      camera (z > 0, field of view below 180 degrees).
/// Zero-baseline observations are permitted but reported in `notes`; they
/// cannot serve as the non-collinear witness for assumption 2.
ValidationReport validate_assumptions(const Scenario& s);

/// Pose of `camera` in the target frame at `keyframe` (1 or 2):
/// T_c at keyframe 1 and the inverse motion composed with T_c at
/// keyframe 2. Throws std::out_of_range on a bad index.
RigidTransform camera_pose_at_keyframe(const ClusterCalibration& calib,
                                       const KeyframeMotion& motion,
                                       int camera, int keyframe);

}  // namespace mcslam
