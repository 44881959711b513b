// Ready-made cluster geometries and the motion families that are known to
// break two-keyframe observability. Each critical motion makes every
// camera observation vector parallel when paired with the documented
// cluster and a same-camera observation topology, so the reduced matrix
// drops rank regardless of where the features sit.

#pragma once

#include "mcslam/cluster.hpp"

namespace mcslam {

/// Two cameras facing away from each other along z, the second one
/// `separation` metres behind the first.
ClusterCalibration back_to_back_two(double separation = 0.3);

/// Two opposite-facing cameras offset along x by `baseline` metres.
ClusterCalibration side_by_side_two(double baseline = 0.4);

/// Three cameras with non-collinear centres and mixed orientations.
ClusterCalibration noncollinear_three();

/// Four cameras at the corners of a square in the z = 0 plane (camera 0 at
/// the origin), facing outwards.
ClusterCalibration planar_four(double side = 0.3);

/// Straight translation, no rotation. Degenerate whenever no feature is
/// exchanged between cameras: every observation vector equals t.
KeyframeMotion pure_translation_motion(const Vec3& t);

/// For a cluster whose camera centres all lie in the z = 0 plane: rotate
/// by `angle` about the in-plane x axis and translate along (R - I) y_hat
/// scaled by `lambda`. All observation vectors stay parallel to that same
/// direction.
KeyframeMotion planar_inplane_rotation_motion(double angle, double lambda);

/// Quarter turn about z combined with a translation along (R - I) c_1,
/// where c_1 is the second camera's centre; `lambda` scales the
/// translation. Needs a cluster of exactly two cameras whose baseline is
/// not parallel to z.
KeyframeMotion quarter_turn_translation_motion(const ClusterCalibration& c,
                                               double lambda);

/// Rigid rotation of the whole cluster about the fixed point `centre`
/// (target-frame coordinates): R = exp_so3(angle * axis),
/// t = (I - R) centre.
KeyframeMotion rotation_about_point(const Vec3& centre, const Vec3& axis,
                                    double angle);

/// Both cameras of a two-camera cluster travel on concentric circular arcs
/// about the point `beta` of the way along the baseline. Degenerate for
/// every `beta`, `axis` and `angle`.
KeyframeMotion concentric_arcs_motion(const ClusterCalibration& c,
                                      double beta, const Vec3& axis,
                                      double angle);

}  // namespace mcslam
