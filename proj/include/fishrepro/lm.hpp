#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace fishrepro {

struct LMOptions {
  int max_iterations = 50;
  double step_tolerance = 1e-9;  // converged when |delta| drops below this
  double initial_lambda = 1e-3;
};

struct LMResult {
  Eigen::VectorXd x;
  bool converged = false;
  int iterations = 0;  // accepted steps
  double cost = 0.0;
  std::vector<double> cost_history;  // cost after each accepted step
};

/// Evaluates the (already robustified/weighted) residual vector, optionally
/// the Jacobian, and returns the true objective value at x.
using ResidualFn = std::function<double(const Eigen::VectorXd& x,
                                        Eigen::VectorXd& residuals,
                                        Eigen::MatrixXd* jacobian)>;

/// Dense Levenberg-Marquardt with multiplicative damping on diag(J'J).
LMResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd x0,
                             const LMOptions& options = {});

}  // namespace fishrepro
