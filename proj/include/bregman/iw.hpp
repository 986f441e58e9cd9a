#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bregman/kernel.hpp"

namespace bregman {

using Predictor = std::function<double(const Eigen::RowVectorXd&)>;

struct WeightedRegressionTask {
  Points xs;
  Eigen::VectorXd ys;
  Eigen::VectorXd weights;
  KernelSpec kernel;
  double alpha = 0.0;
  double jitter = 1e-10;

  void validate() const;
};

struct KernelRegressor {
  KernelSpec kernel;
  Points centers;
  Eigen::VectorXd coeffs;

  double operator()(const Eigen::RowVectorXd& x) const;
  Eigen::VectorXd predict(const Points& X) const;
};

// Solves (W K / N + (alpha + jitter) I) c = W y / N.
Eigen::VectorXd weighted_krr(const WeightedRegressionTask& task);
KernelRegressor fit_weighted_krr(const WeightedRegressionTask& task);

// (1/N) sum_i w_i (y_i - f(x_i))^2, written on the coefficient vector of a
// kernel expansion over task.xs plus the alpha c'Kc penalty.
double weighted_krr_objective(const WeightedRegressionTask& task, const Eigen::VectorXd& c,
                              Eigen::VectorXd* grad);

struct CandidateSet {
  std::vector<Predictor> models;
  std::vector<std::string> labels;

  void validate() const;
};

double weighted_sq_risk(const Predictor& f, const Points& xs, const Eigen::VectorXd& ys,
                        const Eigen::VectorXd& weights);

// Candidate with the smallest weighted validation risk; ties go to the
// smaller index.
std::size_t iwv_select(const CandidateSet& candidates, const Points& val_xs,
                       const Eigen::VectorXd& val_ys, const Eigen::VectorXd& weights);

// Weighted least squares over the span of the candidates:
// (A'WA/N + ridge I) c = A'Wy/N with A(i, k) = f_k(x_i).
Eigen::VectorXd iwa_aggregate(const CandidateSet& candidates, const Points& val_xs,
                              const Eigen::VectorXd& val_ys, const Eigen::VectorXd& weights,
                              double ridge = 1e-8);

}  // namespace bregman
