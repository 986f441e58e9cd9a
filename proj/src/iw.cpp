#include "bregman/iw.hpp"

#include <cmath>

#include "bregman/errors.hpp"

namespace bregman {

namespace {

void check_weights(const Eigen::VectorXd& w, Eigen::Index n) {
  if (w.size() != n) throw UsageError("weights: length mismatch");
  if ((w.array() < 0.0).any() || !w.allFinite()) throw UsageError("weights must be finite and nonnegative");
}

}  // namespace

void WeightedRegressionTask::validate() const {
  if (xs.rows() == 0 || ys.size() != xs.rows()) throw UsageError("regression task: length mismatch");
  check_weights(weights, xs.rows());
  if (!(weights.maxCoeff() > 0.0)) throw UsageError("regression task: all weights are zero");
  if (!(alpha >= 0.0)) throw UsageError("regression task: alpha must be nonnegative");
  kernel.validate();
}

double KernelRegressor::operator()(const Eigen::RowVectorXd& x) const {
  double s = 0.0;
  for (Eigen::Index j = 0; j < centers.rows(); ++j) s += coeffs[j] * kernel_eval(kernel, x, centers.row(j));
  return s;
}

Eigen::VectorXd KernelRegressor::predict(const Points& X) const {
  return gram(kernel, X, centers) * coeffs;
}

Eigen::VectorXd weighted_krr(const WeightedRegressionTask& task) {
  task.validate();
  const Eigen::Index n = task.xs.rows();
  const double N = static_cast<double>(n);
  Eigen::MatrixXd K = gram(task.kernel, task.xs, task.xs);
  Eigen::MatrixXd A = task.weights.asDiagonal() * K / N;
  A.diagonal().array() += task.alpha + task.jitter;
  Eigen::VectorXd rhs = task.weights.cwiseProduct(task.ys) / N;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd c = lu.solve(rhs);
  if (!c.allFinite()) throw NumericError("weighted_krr: singular system");
  return c;
}

KernelRegressor fit_weighted_krr(const WeightedRegressionTask& task) {
  return KernelRegressor{task.kernel, task.xs, weighted_krr(task)};
}

double weighted_krr_objective(const WeightedRegressionTask& task, const Eigen::VectorXd& c,
                              Eigen::VectorXd* grad) {
  const double N = static_cast<double>(task.xs.rows());
  Eigen::MatrixXd K = gram(task.kernel, task.xs, task.xs);
  Eigen::VectorXd f = K * c;
  Eigen::VectorXd r = task.ys - f;
  double value = task.weights.dot(r.cwiseAbs2()) / N + task.alpha * c.dot(f);
  if (grad) *grad = -2.0 * K * task.weights.cwiseProduct(r) / N + 2.0 * task.alpha * f;
  return value;
}

void CandidateSet::validate() const {
  if (models.empty()) throw UsageError("candidate set is empty");
  if (!labels.empty() && labels.size() != models.size()) throw UsageError("candidate labels mismatch");
}

double weighted_sq_risk(const Predictor& f, const Points& xs, const Eigen::VectorXd& ys,
                        const Eigen::VectorXd& weights) {
  if (ys.size() != xs.rows()) throw UsageError("weighted_sq_risk: length mismatch");
  check_weights(weights, xs.rows());
  if (xs.rows() == 0) throw UsageError("weighted_sq_risk: empty set");
  double total = 0.0;
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    if (weights[i] == 0.0) continue;
    double e = ys[i] - f(xs.row(i));
    total += weights[i] * e * e;
  }
  return total / static_cast<double>(xs.rows());
}

std::size_t iwv_select(const CandidateSet& candidates, const Points& val_xs,
                       const Eigen::VectorXd& val_ys, const Eigen::VectorXd& weights) {
  candidates.validate();
  std::size_t best = 0;
  double best_risk = weighted_sq_risk(candidates.models[0], val_xs, val_ys, weights);
  for (std::size_t k = 1; k < candidates.models.size(); ++k) {
    double r = weighted_sq_risk(candidates.models[k], val_xs, val_ys, weights);
    if (r < best_risk) {
      best = k;
      best_risk = r;
    }
  }
  return best;
}

Eigen::VectorXd iwa_aggregate(const CandidateSet& candidates, const Points& val_xs,
                              const Eigen::VectorXd& val_ys, const Eigen::VectorXd& weights,
                              double ridge) {
  candidates.validate();
  if (!(ridge >= 0.0)) throw UsageError("iwa_aggregate: ridge must be nonnegative");
  if (val_ys.size() != val_xs.rows() || val_xs.rows() == 0) throw UsageError("iwa_aggregate: length mismatch");
  check_weights(weights, val_xs.rows());
  const Eigen::Index n = val_xs.rows();
  const auto l = static_cast<Eigen::Index>(candidates.models.size());
  const double N = static_cast<double>(n);
  Eigen::MatrixXd A(n, l);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd x = val_xs.row(i);
    for (Eigen::Index k = 0; k < l; ++k) A(i, k) = candidates.models[k](x);
  }
  Eigen::MatrixXd M = A.transpose() * weights.asDiagonal() * A / N;
  M.diagonal().array() += ridge;
  Eigen::VectorXd rhs = A.transpose() * weights.cwiseProduct(val_ys) / N;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  if (qr.rank() < l) throw NumericError("iwa_aggregate: rank-deficient system; use a positive ridge");
  return qr.solve(rhs);
}

}  // namespace bregman
