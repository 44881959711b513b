#include "mcslam/measurement.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace mcslam {
namespace {

void check_feature_index(const Scenario& s, int feature) {
  if (feature < 0 || feature >= s.feature_count()) {
    throw std::out_of_range("feature index out of range");
  }
}

// q for an arbitrary (feature, camera, keyframe) triple; the keyframe-2
// case specializes to the IntermediateVectors decomposition.
Vec3 point_in_cluster_frame(const Scenario& s, int feature, int camera,
                            int keyframe) {
  const FeatureParam& f = s.features[feature];
  const RigidTransform& anchor = s.calibration.extrinsics[f.anchor_camera];
  const Vec3 ray = anchor.rotation * bearing_to_unit(f.bearing);
  const Vec3 centre = anchor.translation;
  if (keyframe == 1) {
    return f.depth * ray + centre -
           s.calibration.extrinsics[camera].translation;
  }
  const Rotation rk = s.motion.rotation();
  return f.depth * (rk * ray) + s.motion.translation + rk * centre -
         s.calibration.extrinsics[camera].translation;
}

}  // namespace

IntermediateVectors intermediate_vectors(const Scenario& s, int feature,
                                         int observation) {
  check_feature_index(s, feature);
  const std::vector<int>& obs = s.observations.observers[feature];
  if (observation < 0 || observation >= static_cast<int>(obs.size())) {
    throw std::out_of_range("observation index out of range");
  }

  const FeatureParam& f = s.features[feature];
  const RigidTransform& anchor = s.calibration.extrinsics[f.anchor_camera];
  const Rotation rk = s.motion.rotation();

  IntermediateVectors iv;
  iv.a_hat = rk * (anchor.rotation * bearing_to_unit(f.bearing));
  iv.b = s.motion.translation;
  iv.c = rk * anchor.translation;
  iv.d = -s.calibration.extrinsics[obs[observation]].translation;
  iv.v = iv.b + iv.c + iv.d;
  iv.w = f.depth * iv.a_hat + iv.c;
  iv.q = f.depth * iv.a_hat + iv.b + iv.c + iv.d;
  return iv;
}

ImagePoint measure_feature(const Scenario& s, int feature, int camera,
                           int keyframe) {
  check_feature_index(s, feature);
  if (camera < 0 || camera >= s.camera_count()) {
    throw std::out_of_range("camera index out of range");
  }
  if (keyframe != 1 && keyframe != 2) {
    throw std::out_of_range("keyframe index must be 1 or 2");
  }
  const Vec3 q = point_in_cluster_frame(s, feature, camera, keyframe);
  const Vec3 p =
      s.calibration.extrinsics[camera].rotation.matrix().transpose() * q;
  if (!(p.z() > 0.0)) {
    throw std::domain_error(
        "feature " + std::to_string(feature) + " behind camera " +
        std::to_string(camera) + " at keyframe " + std::to_string(keyframe));
  }
  return project_pinhole(p);
}

std::vector<MeasurementEntry> measurement_entries(const Scenario& s) {
  std::vector<MeasurementEntry> entries;
  entries.reserve(s.feature_count() + s.observation_count());
  int row = 0;
  for (int j = 0; j < s.feature_count(); ++j) {
    const std::vector<int>& obs = s.observations.observers[j];
    for (int k = 0; k < static_cast<int>(obs.size()); ++k) {
      entries.push_back({j, 2, k, obs[k], row});
      row += 2;
    }
    entries.push_back({j, 1, -1, s.features[j].anchor_camera, row});
    row += 2;
  }
  return entries;
}

MeasurementSet stack_measurements(const Scenario& s) {
  MeasurementSet ms;
  ms.entries = measurement_entries(s);
  ms.z.resize(s.measurement_dim());
  for (const MeasurementEntry& e : ms.entries) {
    const ImagePoint p = measure_feature(s, e.feature, e.camera, e.keyframe);
    ms.z[e.row] = p.u;
    ms.z[e.row + 1] = p.v;
  }
  return ms;
}

namespace {

struct ObservationCheck {
  bool visible = false;      // in front and inside the synthesis cone
  bool noncollinear = false; // usable as the assumption-2 witness
  double cone_radius = 0.0;  // max(|phi|, |theta|) in the observing camera
};

ObservationCheck check_observation(const Scenario& s, int feature,
                                   int camera, double cone) {
  ObservationCheck r;
  const Vec3 q = point_in_cluster_frame(s, feature, camera, 2);
  const RigidTransform& ext = s.calibration.extrinsics[camera];
  const Vec3 p = ext.rotation.matrix().transpose() * q;
  if (!(p.z() > 1e-2)) return r;
  const Bearing b = unit_to_bearing(p.normalized());
  r.cone_radius = std::max(std::abs(b.phi), std::abs(b.theta));
  if (r.cone_radius >= cone) return r;
  r.visible = true;

  const FeatureParam& f = s.features[feature];
  const RigidTransform& anchor = s.calibration.extrinsics[f.anchor_camera];
  const Rotation rk = s.motion.rotation();
  const Vec3 a_hat = rk * (anchor.rotation * bearing_to_unit(f.bearing));
  const Vec3 v = s.motion.translation + rk * anchor.translation -
                 ext.translation;
  r.noncollinear =
      v.norm() > 1e-12 && v.cross(a_hat).norm() > 1e-8 * v.norm();
  return r;
}

}  // namespace

Scenario synthesize_scenario(const GeneratorConfig& config,
                             std::uint64_t seed) {
  const int nc = config.calibration.camera_count();
  const int nf = config.feature_count;
  if (nc < 1) throw std::invalid_argument("generator: no cameras");
  if (nf < 1) throw std::invalid_argument("generator: no features");
  if (config.topology == TopologyMode::CrossCamera &&
      (config.cross_camera_count < 0 || config.cross_camera_count > nf ||
       nc < 2)) {
    throw std::invalid_argument("generator: bad cross-camera request");
  }
  if (config.topology == TopologyMode::Explicit &&
      static_cast<int>(config.explicit_observers.size()) != nf) {
    throw std::invalid_argument(
        "generator: explicit observer list does not cover every feature");
  }
  if (!(config.min_depth > 0.0) || config.max_depth < config.min_depth) {
    throw std::invalid_argument("generator: bad depth range");
  }

  Scenario s;
  s.calibration = config.calibration;
  s.motion = {config.translation, config.omega};
  s.features.resize(nf);
  s.observations.observers.resize(nf);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> bearing_draw(-config.bearing_range,
                                                      config.bearing_range);
  std::uniform_real_distribution<double> depth_draw(
      std::log(config.min_depth), std::log(config.max_depth));

  for (int j = 0; j < nf; ++j) {
    const bool crossed = config.topology == TopologyMode::CrossCamera &&
                         j < config.cross_camera_count;
    // Exchanged features live in camera 0 so that one pass-by motion can
    // hand them to another camera; everything else is spread round-robin.
    const int anchor = crossed ? 0 : j % nc;
    bool placed = false;
    for (int attempt = 0; attempt < config.max_retries && !placed;
         ++attempt) {
      s.features[j] = {anchor,
                       {bearing_draw(rng), bearing_draw(rng)},
                       std::exp(depth_draw(rng))};

      std::vector<int> observers;
      switch (config.topology) {
        case TopologyMode::SameCamera:
          observers = {anchor};
          break;
        case TopologyMode::CrossCamera:
          observers = {crossed ? 1 + (j % (nc - 1)) : anchor};
          break;
        case TopologyMode::Explicit:
          observers = config.explicit_observers[j];
          break;
        case TopologyMode::Auto: {
          // most central candidate wins
          int best = -1;
          double best_radius = 0.0;
          for (int cam = 0; cam < nc; ++cam) {
            const ObservationCheck c =
                check_observation(s, j, cam, config.bearing_range);
            if (c.visible && (best < 0 || c.cone_radius < best_radius)) {
              best = cam;
              best_radius = c.cone_radius;
            }
          }
          if (best < 0) continue;
          observers = {best};
          break;
        }
      }
      if (observers.empty()) continue;

      bool all_visible = true;
      bool witness = false;
      for (int cam : observers) {
        const ObservationCheck c =
            check_observation(s, j, cam, config.bearing_range);
        all_visible = all_visible && c.visible;
        witness = witness || c.noncollinear;
      }
      if (all_visible && witness) {
        s.observations.observers[j] = observers;
        placed = true;
      }
    }
    if (!placed) {
      throw std::runtime_error(
          "generator: could not place feature " + std::to_string(j) +
          " within " + std::to_string(config.max_retries) +
          " attempts (motion incompatible with the requested topology?)");
    }
  }
  return s;
}

MeasurementSet add_noise(const MeasurementSet& ms, double sigma,
                         std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("noise sigma must be >= 0");
  if (sigma == 0.0) return ms;
  MeasurementSet out = ms;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> draw(0.0, sigma);
  for (int i = 0; i < out.z.size(); ++i) out.z[i] += draw(rng);
  return out;
}

}  // namespace mcslam
