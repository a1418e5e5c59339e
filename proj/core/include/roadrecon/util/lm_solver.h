#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace roadrecon {

// A nonlinear least-squares problem as seen by the damped Gauss-Newton loop.
// Implementations own their state and linear algebra; the loop only decides
// which steps to keep.
class LeastSquaresProblem {
 public:
  virtual ~LeastSquaresProblem() = default;

  // Total (robustified) cost at the current state.
  virtual double Cost() = 0;
  // Builds the normal equations at the current state.
  virtual void Linearize() = 0;
  // Solves the damped system for `step`; false if the system is singular.
  virtual bool SolveDamped(double lambda, Eigen::VectorXd* step) = 0;
  virtual void ApplyStep(const Eigen::VectorXd& step) = 0;
  virtual void SaveState() = 0;
  virtual void RestoreState() = 0;
};

struct SolverOptions {
  int max_iterations = 100;
  double initial_lambda = 1e-4;
  double lambda_increase = 10.0;
  double lambda_decrease = 10.0;
  double max_lambda = 1e16;
  // Stop when an accepted step changes the cost by less than this fraction.
  double relative_cost_tolerance = 1e-9;
  // Cost below which the problem is considered solved.
  double absolute_cost_tolerance = 1e-24;
};

struct SolverSummary {
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  int accepted_steps = 0;
  // Cost after every accepted step, starting with the initial cost.
  std::vector<double> cost_history;
  std::string termination;

  bool CostNonIncreasing() const;
};

// Levenberg loop: lambda is multiplied by `lambda_increase` on a rejected
// step and divided by `lambda_decrease` on an accepted one. Throws
// DivergenceError when the initial cost is not finite.
SolverSummary SolveLevenbergMarquardt(LeastSquaresProblem& problem,
                                      const SolverOptions& options);

}  // namespace roadrecon
