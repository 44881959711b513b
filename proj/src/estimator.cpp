#include "mcslam/estimator.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <stdexcept>

namespace mcslam {

ReprojectionResult reprojection_error(const Scenario& estimate,
                                      const MeasurementSet& measurements) {
  if (measurements.z.size() != estimate.measurement_dim())
    throw std::invalid_argument(
        "measurement vector does not match the scenario layout");
  ReprojectionResult result;
  result.residual = measurements.z - stack_measurements(estimate).z;
  result.cost = 0.5 * result.residual.squaredNorm();
  return result;
}

VecX lm_step(const MatX& jacobian, const VecX& residual, double lambda) {
  if (residual.size() != jacobian.rows())
    throw std::invalid_argument("residual does not match the Jacobian rows");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");

  MatX normal = jacobian.transpose() * jacobian;
  normal.diagonal() += lambda * normal.diagonal();

  Eigen::SelfAdjointEigenSolver<MatX> eigen(normal);
  const VecX& eigenvalues = eigen.eigenvalues();  // ascending
  const double largest = eigenvalues[eigenvalues.size() - 1];
  const double smallest = eigenvalues[0];
  if (!(smallest > 0.0) || largest > 1e14 * smallest)
    throw std::runtime_error("normal matrix singular");

  return normal.ldlt().solve(jacobian.transpose() * residual);
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::Degenerate: return "degenerate";
  }
  return "unknown";
}

namespace {

void validate_options(const SolverOptions& options) {
  if (options.max_iterations < 1)
    throw std::invalid_argument("max_iterations must be positive");
  if (!(options.initial_lambda > 0.0) || !(options.lambda_up > 0.0) ||
      !(options.lambda_down > 0.0) || !(options.cost_tolerance > 0.0) ||
      !(options.step_tolerance > 0.0) || !(options.degenerate_ratio > 0.0))
    throw std::invalid_argument("solver options must be positive");
}

/// Additive update everywhere except the rotation block, which composes
/// left-multiplicatively and stores the principal log.
VecX apply_step(const VecX& x, const VecX& delta, int feature_count) {
  VecX next = x + delta;
  const Rotation current = exp_so3(x.segment<3>(feature_count + 3));
  next.segment<3>(feature_count + 3) =
      log_so3(exp_so3(delta.segment<3>(feature_count + 3)) * current);
  return next;
}

bool depths_positive(const VecX& x, int feature_count) {
  for (int j = 0; j < feature_count; ++j)
    if (!(x[j] > 0.0)) return false;
  return true;
}

}  // namespace

SolveResult lm_solve(const Scenario& model,
                     const MeasurementSet& measurements, const VecX& initial,
                     const SolverOptions& options) {
  validate_options(options);
  if (initial.size() != model.state_dim())
    throw std::invalid_argument("initial state has the wrong dimension");

  const int nf = model.feature_count();
  SolveResult result;
  result.state = initial;

  Scenario current = with_state(model, initial);
  ReprojectionResult eval = reprojection_error(current, measurements);
  result.cost_history.push_back(eval.cost);

  double lambda = options.initial_lambda;
  bool stopped = false;

  for (int iter = 0; iter < options.max_iterations && !stopped; ++iter) {
    result.iterations = iter + 1;
    const JacobianBundle bundle = assemble_jacobian(current);

    if (options.rank_diagnostics) {
      const RankReport report = jacobian_rank(bundle);
      if (report.ratio() < options.degenerate_ratio) {
        result.termination = Termination::Degenerate;
        stopped = true;
        break;
      }
    }

    VecX delta;
    try {
      delta = lm_step(bundle.matrix, eval.residual, lambda);
    } catch (const std::runtime_error&) {
      result.termination = Termination::Degenerate;
      stopped = true;
      break;
    }

    if (delta.norm() < options.step_tolerance) {
      result.termination = Termination::Converged;
      stopped = true;
      break;
    }

    const VecX candidate = apply_step(result.state, delta, nf);
    if (!depths_positive(candidate, nf)) {
      lambda *= options.lambda_up;
      continue;
    }

    Scenario candidate_scenario = with_state(model, candidate);
    ReprojectionResult candidate_eval;
    try {
      candidate_eval = reprojection_error(candidate_scenario, measurements);
    } catch (const std::domain_error&) {
      lambda *= options.lambda_up;  // stepped behind a camera
      continue;
    }

    if (candidate_eval.cost <= eval.cost) {
      const double drop = eval.cost - candidate_eval.cost;
      const double relative = drop / std::max(eval.cost, 1e-300);
      result.state = candidate;
      current = std::move(candidate_scenario);
      eval = std::move(candidate_eval);
      result.cost_history.push_back(eval.cost);
      lambda /= options.lambda_down;
      if (relative < options.cost_tolerance) {
        result.termination = Termination::Converged;
        stopped = true;
      }
    } else {
      lambda *= options.lambda_up;
    }
  }

  if (!stopped) result.termination = Termination::MaxIterations;

  const RankReport final_report =
      jacobian_rank(assemble_jacobian(with_state(model, result.state)));
  result.sigma_ratio = final_report.ratio();
  try {
    result.scale_alignment =
        std::abs(scale_direction(result.state).dot(final_report.min_direction));
  } catch (const std::invalid_argument&) {
    result.scale_alignment = 0.0;
  }
  return result;
}

VecX scale_direction(const VecX& state) {
  const Eigen::Index n = state.size();
  if (n < 9 || (n - 6) % 3 != 0)
    throw std::invalid_argument("not a valid state length");
  const Eigen::Index nf = (n - 6) / 3;

  VecX direction = VecX::Zero(n);
  direction.head(nf) = state.head(nf);
  direction.segment<3>(nf) = state.segment<3>(nf);
  const double norm = direction.norm();
  if (norm == 0.0)
    throw std::invalid_argument(
        "scale direction undefined: depths and translation are all zero");
  return direction / norm;
}

VecX perturb_state(const VecX& state, double fraction, std::uint64_t seed) {
  if (fraction < 0.0)
    throw std::invalid_argument("perturbation fraction must be non-negative");
  if (fraction == 0.0) return state;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  VecX out = state;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] *= 1.0 + fraction * unit(rng);
  return out;
}

}  // namespace mcslam
