#include "roadrecon/util/lm_solver.h"

#include <cmath>
#include <sstream>

#include "roadrecon/errors.h"

namespace roadrecon {

bool SolverSummary::CostNonIncreasing() const {
  for (size_t i = 1; i < cost_history.size(); ++i) {
    if (cost_history[i] > cost_history[i - 1]) return false;
  }
  return true;
}

SolverSummary SolveLevenbergMarquardt(LeastSquaresProblem& problem,
                                      const SolverOptions& options) {
  SolverSummary summary;
  double cost = problem.Cost();
  if (!std::isfinite(cost)) {
    std::ostringstream msg;
    msg << "initial cost is not finite (" << cost << ")";
    throw DivergenceError(msg.str());
  }
  summary.initial_cost = cost;
  summary.cost_history.push_back(cost);

  if (cost <= options.absolute_cost_tolerance) {
    summary.final_cost = cost;
    summary.termination = "zero cost";
    return summary;
  }

  double lambda = options.initial_lambda;
  problem.Linearize();
  Eigen::VectorXd step;
  summary.termination = "max iterations";
  for (int it = 0; it < options.max_iterations; ++it) {
    summary.iterations = it + 1;
    if (!problem.SolveDamped(lambda, &step) || !step.allFinite()) {
      lambda *= options.lambda_increase;
      if (lambda > options.max_lambda) {
        summary.termination = "damping limit";
        break;
      }
      continue;
    }
    problem.SaveState();
    problem.ApplyStep(step);
    const double new_cost = problem.Cost();
    if (std::isfinite(new_cost) && new_cost <= cost) {
      const double change = cost - new_cost;
      cost = new_cost;
      ++summary.accepted_steps;
      summary.cost_history.push_back(cost);
      lambda = std::max(lambda / options.lambda_decrease, 1e-16);
      if (cost <= options.absolute_cost_tolerance) {
        summary.termination = "zero cost";
        break;
      }
      if (change < options.relative_cost_tolerance * (cost + change)) {
        summary.termination = "relative cost change";
        break;
      }
      problem.Linearize();
    } else {
      problem.RestoreState();
      lambda *= options.lambda_increase;
      if (lambda > options.max_lambda) {
        summary.termination = "damping limit";
        break;
      }
    }
  }
  summary.final_cost = cost;
  return summary;
}

}  // namespace roadrecon
