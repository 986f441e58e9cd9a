#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bregman/kernel.hpp"
#include "bregman/losses.hpp"
#include "bregman/optim.hpp"
#include "bregman/synth.hpp"

namespace bregman {

// Points drawn from P (label +1) and from Q (label -1).
struct SampleSet {
  Points xs_p;
  Points xs_q;

  void validate() const;
  Points pooled() const;            // P rows first, then Q rows
  Eigen::VectorXd labels() const;   // +1 for P rows, -1 for Q rows
};

// Mean loss over the N = rows(gram) labeled points plus alpha * c'Gc.
// Writes the gradient when grad is non-null and the number of scores outside
// the loss's admissible range when clamps is non-null.
double empirical_risk(const CompositeLoss& loss, const Eigen::MatrixXd& gram,
                      const Eigen::VectorXd& labels, const Eigen::VectorXd& coeffs,
                      double alpha, Eigen::VectorXd* grad = nullptr, int* clamps = nullptr);

struct FitOptions {
  BfgsOptions bfgs{};
  double max_clamp_fraction = 0.05;
};

struct RatioModel {
  KernelSpec kernel;
  Points centers;
  Eigen::VectorXd coeffs;
  CompositeLoss loss;
  double alpha = 0.0;
  int clamp_count = 0;  // training scores outside the admissible range
  OptimStatus status = OptimStatus::converged;
  int iterations = 0;
  double train_objective = 0.0;
};

RatioModel fit(const SampleSet& samples, const CompositeLoss& loss, const KernelSpec& kernel,
               double alpha, const FitOptions& opt = {});

// Solves (D_Q G + 2 alpha N I) c = e_P, the stationarity condition of the
// kulsif objective.
RatioModel fit_kulsif_closed_form(const SampleSet& samples, const KernelSpec& kernel,
                                  double alpha);

struct PredictStats {
  int score_clamps = 0;  // scores outside the admissible range
  int floored = 0;       // ratio raised to domain_eps
  int capped = 0;        // ratio lowered to beta_max
};

Eigen::VectorXd predict_scores(const RatioModel& model, const Points& X);

// g(score) with the score clamped to the admissible range, then the ratio
// kept inside [domain_eps, beta_max].
Eigen::VectorXd predict_ratio(const RatioModel& model, const Points& X,
                              PredictStats* stats = nullptr);

// g(score) with only the score clamp; may be negative for the identity map.
Eigen::VectorXd predict_ratio_raw(const RatioModel& model, const Points& X);

struct CvResult {
  double alpha = 0.0;
  std::vector<double> grid;
  std::vector<double> mean_risk;
};

// Smallest mean risk wins; values within 1e-12 relative count as ties and
// go to the smaller alpha.
double pick_alpha(const std::vector<double>& grid, const std::vector<double>& mean_risk);

CvResult cross_validate_alpha(const SampleSet& samples, const CompositeLoss& loss,
                              const KernelSpec& kernel, const std::vector<double>& grid,
                              int n_folds, const Rng& rng, const FitOptions& opt = {});

struct ParametricFit {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double divergence = 0.0;
  OptimStatus status = OptimStatus::converged;
  double operator()(double x) const { return theta1 * x * x + theta2; }
};

// Minimises the quadrature Bregman divergence between beta and
// theta1 x^2 + theta2 under Q, with theta2 = softplus(tau). Several fixed
// starting points; the best result is kept.
ParametricFit population_fit_parametric(const BregmanGenerator& gen,
                                        const PiecewisePairSpec& pair, int quad_nodes = 2001);

// Divergence objective of the fit above at (theta1, tau), with gradient.
double parametric_objective(const BregmanGenerator& gen, const PiecewisePairSpec& pair,
                            int quad_nodes, const Eigen::VectorXd& theta_tau,
                            Eigen::VectorXd* grad);

// sup over a uniform grid on [a, b] of |fit(x) - beta(x)|.
double sup_error(const ParametricFit& fit, const PiecewisePairSpec& pair, double a, double b,
                 int n_points = 1001);

double softplus(double t);

}  // namespace bregman
