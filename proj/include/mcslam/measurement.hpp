// Two-keyframe measurement model. Every feature j anchored in camera h is
// re-observed at keyframe 2 by the cameras listed in the observation map;
// each observation is a normalized pinhole image point.
//
// In the keyframe-2 cluster frame the projected point of feature j seen by
// camera i decomposes as R_i^T q with
//     q = s * a_hat + b + c + d,
//     a_hat = R_K R_h p_hat   (transformed anchor bearing, unit)
//     b     = t_K             (keyframe translation)
//     c     = R_K t_h         (rotated anchor camera centre)
//     d     = -t_i            (observing camera centre)
// and two derived vectors used throughout the degeneracy analysis:
//     v = b + c + d          (anchor-to-observer displacement)
//     w = s * a_hat + c      (feature relative to the rotated cluster).

#pragma once

#include <cstdint>
#include <vector>

#include "mcslam/cluster.hpp"

namespace mcslam {

struct IntermediateVectors {
  Vec3 a_hat;
  Vec3 b;
  Vec3 c;
  Vec3 d;
  Vec3 q;
  Vec3 v;
  Vec3 w;
};

/// The decomposition above for observation k of feature j (keyframe 2).
/// Throws std::out_of_range on a bad index.
IntermediateVectors intermediate_vectors(const Scenario& s, int feature,
                                         int observation);

/// Image of `feature` in `camera` at `keyframe` (1 or 2). Throws
/// std::domain_error when the point is not strictly in front of the
/// camera, std::out_of_range on bad indices.
ImagePoint measure_feature(const Scenario& s, int feature, int camera,
                           int keyframe);

/// Provenance of one image point inside the stacked vector.
/// `observation` is the index into the feature's observer list, or -1 for
/// the keyframe-1 anchor measurement. `row` is the offset of the u
/// coordinate; v follows at row + 1.
struct MeasurementEntry {
  int feature = 0;
  int keyframe = 0;
  int observation = 0;
  int camera = 0;
  int row = 0;
};

/// Row layout of the stacked measurement vector (and of the Jacobian):
/// feature-major; per feature the keyframe-2 observations in list order,
/// then the keyframe-1 anchor observation.
std::vector<MeasurementEntry> measurement_entries(const Scenario& s);

struct MeasurementSet {
  VecX z;
  std::vector<MeasurementEntry> entries;

  int rows() const { return static_cast<int>(z.size()); }
};

/// Evaluate the full measurement stack. The scenario must satisfy the
/// modelling assumptions; visibility failures propagate as
/// std::domain_error with feature/camera context.
MeasurementSet stack_measurements(const Scenario& s);

enum class TopologyMode {
  Auto,        // observer = camera whose field of view holds the feature
  SameCamera,  // each feature re-observed by its anchor camera
  CrossCamera, // `cross_camera_count` features anchored in camera 0 are
               // handed to the other cameras; the rest stay same-camera
  Explicit,    // observer lists given verbatim
};

struct GeneratorConfig {
  ClusterCalibration calibration;
  int feature_count = 6;
  TopologyMode topology = TopologyMode::Auto;
  int cross_camera_count = 0;
  std::vector<std::vector<int>> explicit_observers;
  Vec3 translation = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  double bearing_range = 0.6;  // half-angle of the synthesis FOV cone (rad)
  double min_depth = 1.0;      // metres; depths drawn log-uniform
  double max_depth = 10.0;
  int max_retries = 1000;      // per feature
};

/// Draw a scenario that satisfies all modelling assumptions: bearings
/// uniform in (-range, range)^2, depths log-uniform, observers per the
/// topology mode, every observation inside the synthesis cone and in front
/// of its camera, and at least one non-collinear observation per feature.
/// Identical seeds give identical scenarios. Throws std::runtime_error
/// when `max_retries` draws cannot satisfy the assumptions (for instance
/// a motion that pushes everything behind the cameras, or no baseline).
Scenario synthesize_scenario(const GeneratorConfig& config,
                             std::uint64_t seed);

/// Add independent Gaussian noise (std dev `sigma`) to every coordinate.
/// sigma = 0 returns the input unchanged without touching the RNG.
MeasurementSet add_noise(const MeasurementSet& ms, double sigma,
                         std::uint64_t seed);

}  // namespace mcslam
