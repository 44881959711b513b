// Rank-based degeneracy analysis of the two-keyframe problem.
//
// Every keyframe-2 observation contributes one row
//     [ (v x a_hat)^T , (w x (v x a_hat))^T ]
// to a m_o x 6 matrix; the full Jacobian has rank 6 + 3 n_f exactly when
// this matrix has rank 6. The first and last halves of each row are
// orthogonal by construction (a Pluecker line constraint), which the tests
// exploit as an exactness check.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mcslam/jacobian.hpp"

namespace mcslam {

struct M2RowInfo {
  int feature = 0;
  int observation = 0;
  int camera = 0;
};

struct M2Bundle {
  MatX matrix;                  // m_o x 6
  std::vector<M2RowInfo> rows;  // feature-major, observation-ascending
};

/// Assemble the reduced matrix. Works for any structurally valid scenario;
/// visibility is irrelevant to the rank analysis.
M2Bundle build_m2(const Scenario& s);

/// SVD rank of the reduced matrix; singular values padded to length 6.
RankReport rank_m2(const M2Bundle& m2, double rel_tol = 1e-9);

struct SufficientFlags {
  bool single_camera = false;
  bool single_feature_many_obs = false;     // one feature, six or more rows
  bool parallel_observation_vectors = false;

  bool any() const {
    return single_camera || single_feature_many_obs ||
           parallel_observation_vectors;
  }
};

/// Structural conditions that force rank(M2) < 6 regardless of the feature
/// constellation. Zero observation vectors are skipped by the parallelism
/// test; the pairwise criterion is |v_a x v_b| / (|v_a| |v_b|) < 1e-9.
SufficientFlags detect_sufficient_conditions(const Scenario& s);

enum class MotionClass { NonDegenerate, NearDegenerate, Degenerate };

struct ClassifyThresholds {
  double rank_rel_tol = 1e-9;
  double degenerate_ratio = 1e-9;  // sigma_6/sigma_1 below this: degenerate
  double near_ratio = 1e-5;        // below this: near-degenerate band
};

struct DegeneracyReport {
  int rank_m2 = 0;
  double sigma_ratio = 0.0;  // sigma_6 / sigma_1, zero-padded spectrum
  VecX singular_values;      // length 6, descending
  SufficientFlags flags;
  MotionClass classification = MotionClass::NonDegenerate;
  std::vector<std::string> reasons;
};

DegeneracyReport classify(const Scenario& s,
                          const ClassifyThresholds& thresholds = {});

const char* motion_class_name(MotionClass c);

/// Rectangular translation window swept at fixed rotation. The two chosen
/// translation components run over an inclusive-endpoint grid; the
/// remaining component is pinned at its value in `slice`.
struct SweepGrid {
  int axis_u = 0;
  int axis_v = 1;
  double u_min = -1.0, u_max = 1.0;
  double v_min = -1.0, v_max = 1.0;
  int resolution = 200;      // samples per axis
  Vec3 slice = Vec3::Zero();

  double u_at(int iu) const {
    return u_min + (u_max - u_min) * iu / (resolution - 1);
  }
  double v_at(int iv) const {
    return v_min + (v_max - v_min) * iv / (resolution - 1);
  }
  Vec3 translation_at(int iu, int iv) const {
    Vec3 t = slice;
    t[axis_u] = u_at(iu);
    t[axis_v] = v_at(iv);
    return t;
  }
};

struct SweepOptions {
  SweepGrid grid;
  double abs_tol = 1e-8;       // |det| below this marks a crossing outright
  int max_subsets = 210;       // full enumeration kept up to C(10,6)
  std::uint64_t subset_seed = 2026;
  int threads = 0;             // 0 = hardware concurrency
  int intersection_radius = 2; // Chebyshev radius, in cells
};

struct SweepResult {
  SweepGrid grid;
  Vec3 omega = Vec3::Zero();
  std::vector<std::array<int, 6>> subsets;  // M2 row indices, ascending
  // Cell-major storage: entry for grid cell (iu, iv) and subset s sits at
  // (iu * resolution + iv) * subset_count + s.
  std::vector<double> determinants;         // of row-normalized subsets
  std::vector<std::uint8_t> crossings;
  std::vector<std::pair<int, int>> intersections;  // (iu, iv)
  int intersection_radius = 2;
  std::vector<std::string> warnings;

  int subset_count() const { return static_cast<int>(subsets.size()); }
  int cells() const { return grid.resolution * grid.resolution; }
  double det_at(int iu, int iv, int s) const {
    return determinants[static_cast<size_t>(
        (iu * grid.resolution + iv) * subset_count() + s)];
  }
  bool crossing_at(int iu, int iv, int s) const {
    return crossings[static_cast<size_t>(
                         (iu * grid.resolution + iv) * subset_count() + s)] !=
           0;
  }
};

/// Evaluate every 6-row subset determinant of M2 over the grid. Feature
/// parameters, calibration and rotation stay fixed; only the keyframe
/// translation moves. Rows are unit-normalized before the determinant, so
/// abs_tol is scale-free. Output is identical for any thread count.
/// Throws std::invalid_argument for malformed grids or fewer than six
/// observations.
SweepResult sweep_translations(const Scenario& scenario_template,
                               const SweepOptions& options = {});

/// Cells where every subset has a zero crossing within `radius` cells
/// (Chebyshev distance). Sorted by (iu, iv).
std::vector<std::pair<int, int>> intersect_loci(const SweepResult& sweep,
                                                int radius);

/// The crossing rule on a cell-major determinant grid: |det| < abs_tol, or
/// a sign change against the right or down neighbour (both cells marked).
/// Reusable on determinant grids reloaded from an export.
std::vector<std::uint8_t> detect_crossings(
    const std::vector<double>& determinants, int resolution,
    int subset_count, double abs_tol);

}  // namespace mcslam
