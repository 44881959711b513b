// Analytic Jacobian of the stacked measurement vector with respect to the
// state x = [depths | t | omega | bearings].
//
// Each keyframe-2 observation contributes the row pair
//     (1/z^2) [ -(n_y x q)^T ; (n_x x q)^T ] dq/dx
// where n_x, n_y, n_z are the observing camera's basis vectors in the
// cluster frame, z = n_z . q, and dq/dx has the blocks
//     dq/ds_j   = a_hat
//     dq/dt     = I
//     dq/domega = -skew(s_j a_hat + c)   (= -skew(w))
//     dq/dmu_j  = s_j R_K R_h [dp_hat/dphi  dp_hat/dtheta].
// The omega block is exact for the left-multiplicative perturbation
// R_K <- exp_so3(delta) R_K; the finite-difference reference and the
// solver's state update use the same convention.
//
// Anchor rows (keyframe 1) are zero apart from the 2x2 bearing block: the
// anchor image never depends on depth or on the keyframe motion.

#pragma once

#include "mcslam/measurement.hpp"

namespace mcslam {

struct JacobianBundle {
  MatX matrix;                           // m x n, rows as in measurement_entries
  std::vector<MeasurementEntry> entries;
  VecX singular_values;                  // length n, descending, zero-padded
                                         // when there are fewer rows than
                                         // columns
};

/// d(anchor image)/d(bearing); determinant -1/(cos^3 phi cos^2 theta),
/// so the block never loses rank inside the open bearing domain.
Eigen::Matrix2d bearing_block(const Bearing& b);

/// Both rows of the keyframe-1 anchor measurement of `feature` (2 x n).
MatX anchor_rows(const Scenario& s, int feature);

/// Both rows of keyframe-2 observation `observation` of `feature` (2 x n).
/// Throws std::domain_error when the observed point is not in front of the
/// camera, std::out_of_range on bad indices.
MatX observation_rows(const Scenario& s, int feature, int observation);

JacobianBundle assemble_jacobian(const Scenario& s);

/// Central finite differences of stack_measurements, step > 0. Rotation
/// columns perturb left-multiplicatively. An infeasible perturbed state
/// propagates std::domain_error; retry with a smaller step.
MatX fd_jacobian(const Scenario& s, double step = 1e-6);

struct RankReport {
  int rank = 0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;         // sigma_n after zero-padding
  double sigma_second_min = 0.0;  // sigma_{n-1}
  VecX spectrum;                  // all n singular values, descending
  VecX min_direction;             // right singular vector of sigma_n

  double ratio() const { return sigma_max > 0.0 ? sigma_min / sigma_max : 0.0; }
};

/// Numerical rank: count of singular values above rel_tol * sigma_max.
RankReport jacobian_rank(const JacobianBundle& bundle,
                         double rel_tol = 1e-9);

}  // namespace mcslam
