// Two-keyframe bundle adjustment over the cluster state, by damped normal
// equations. The rotation block of the state updates multiplicatively,
// R <- exp_so3(delta) R, matching the Jacobian's perturbation convention;
// everything else updates additively. Depth positivity is preserved by
// rejecting steps that would cross zero.

#pragma once

#include <cstdint>
#include <vector>

#include "mcslam/jacobian.hpp"

namespace mcslam {

struct ReprojectionResult {
  VecX residual;  // measured minus predicted, stacked layout
  double cost;    // 0.5 * residual^T residual
};

/// Throws std::invalid_argument on a size mismatch; infeasible estimates
/// (observed point behind a camera) propagate std::domain_error.
ReprojectionResult reprojection_error(const Scenario& estimate,
                                      const MeasurementSet& measurements);

/// Solve (J^T J + lambda diag(J^T J)) delta = J^T residual. lambda = 0 is
/// the Gauss-Newton step. Throws std::runtime_error("normal matrix
/// singular") when the damped normal matrix has condition above 1e14.
VecX lm_step(const MatX& jacobian, const VecX& residual, double lambda);

enum class Termination { Converged, MaxIterations, Degenerate };

const char* termination_name(Termination t);

struct SolverOptions {
  int max_iterations = 100;
  double initial_lambda = 1e-3;
  double lambda_up = 10.0;    // multiplied on a rejected step
  double lambda_down = 10.0;  // divided on an accepted step
  double cost_tolerance = 1e-12;  // relative cost decrease
  double step_tolerance = 1e-12;  // update norm
  bool rank_diagnostics = true;   // test sigma ratio each iteration
  double degenerate_ratio = 1e-10;
};

struct SolveResult {
  VecX state;
  std::vector<double> cost_history;  // initial cost, then accepted costs
  Termination termination = Termination::MaxIterations;
  int iterations = 0;       // step attempts, accepted or not
  double sigma_ratio = 0.0; // sigma_min/sigma_max of J at the final state
  double scale_alignment = 0.0;  // |<scale direction, smallest right
                                 // singular vector>| at the final state
};

/// `model` supplies calibration and observation topology; the state under
/// optimization starts at `initial`. Measurements must match the model's
/// stacked layout. An infeasible initial state propagates
/// std::domain_error; rank collapse along the way terminates with
/// Termination::Degenerate rather than throwing.
SolveResult lm_solve(const Scenario& model,
                     const MeasurementSet& measurements, const VecX& initial,
                     const SolverOptions& options = {});

/// Unit tangent of a uniform rescaling of all depths and the keyframe
/// translation: proportional to [s_1..s_nf | t | 0_3 | 0_2nf]. Throws
/// std::invalid_argument when depths and translation are all zero or the
/// vector length is not a valid state size.
VecX scale_direction(const VecX& state);

/// Multiply every component by (1 + fraction * u), u uniform in [-1, 1].
/// Zero components stay zero; fraction 0 returns the input unchanged.
VecX perturb_state(const VecX& state, double fraction, std::uint64_t seed);

}  // namespace mcslam
