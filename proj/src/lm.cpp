#include "fishrepro/lm.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace fishrepro {

LMResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd x0,
                             const LMOptions& options) {
  LMResult res;
  res.x = std::move(x0);

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  double cost = fn(res.x, r, &jac);
  res.cost = cost;
  res.cost_history.push_back(cost);

  double lambda = options.initial_lambda;
  Eigen::VectorXd r_try;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;

    bool accepted = false;
    bool at_minimum = false;
    Eigen::VectorXd step;
    for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      for (Eigen::Index d = 0; d < damped.rows(); ++d)
        damped(d, d) += lambda * std::max(jtj(d, d), 1e-12);
      step = damped.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 4.0;
        continue;
      }
      if (step.norm() < options.step_tolerance) {
        // No admissible move left: the iterate is a local minimum within
        // the step tolerance.
        at_minimum = true;
        break;
      }
      const Eigen::VectorXd x_try = res.x + step;
      const double cost_try = fn(x_try, r_try, nullptr);
      if (std::isfinite(cost_try) && cost_try < cost) {
        res.x = x_try;
        cost = cost_try;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 4.0;
        if (lambda > 1e14) break;
      }
    }
    if (at_minimum) {
      res.converged = true;
      break;
    }
    if (!accepted) break;  // stalled without a small step: not converged

    ++res.iterations;
    res.cost = cost;
    res.cost_history.push_back(cost);
    if (step.norm() < options.step_tolerance) {
      res.converged = true;
      break;
    }
    cost = fn(res.x, r, &jac);  // refresh Jacobian at the accepted point
  }
  return res;
}

}  // namespace fishrepro
