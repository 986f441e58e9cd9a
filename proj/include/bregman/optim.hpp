#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace bregman {

// Returns the objective value and writes the gradient into grad.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

enum class OptimStatus { converged, max_iter, line_search_failed };

std::string to_string(OptimStatus s);

struct BfgsOptions {
  int max_iter = 100;
  double grad_tol = 1e-8;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int max_halvings = 60;
  double curvature_eps = 1e-12;
};

struct OptimResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  OptimStatus status = OptimStatus::max_iter;
};

// BFGS with inverse-Hessian updates (identity start) and Armijo backtracking.
// Non-finite trial values are treated as insufficient decrease. Throws
// NumericError when the start or an accepted iterate is not finite.
OptimResult bfgs(const Objective& obj, const Eigen::VectorXd& x0,
                 const BfgsOptions& opt = {});

// Largest relative error between the analytic gradient and central
// differences, with denominator max(1, |numeric|).
double grad_check(const Objective& obj, const Eigen::VectorXd& x, double h = 1e-6);

}  // namespace bregman
