#pragma once

#include <string>
#include <vector>

#include "bregman/dre.hpp"
#include "bregman/iw.hpp"
#include "bregman/synth.hpp"

namespace bregman {

struct PopulationEstimate {
  std::string label;
  ParametricFit fit;
  double sup_error = 0.0;
};

// Parametric population fits for lr, kulsif, poly(1), poly(6), ew in that
// order, with sup |fit - beta| on [sup_lo, sup_hi].
std::vector<PopulationEstimate> population_estimates(const PiecewisePairSpec& pair,
                                                     int quad_nodes = 2001, double sup_lo = 0.9,
                                                     double sup_hi = 1.0);

// Samples P and Q for one fig2 cell (size/2 from P, the rest from Q).
SampleSet gaussian_cell_samples(const GaussianPair& pair, int size, const Rng& rng);

struct GaussianCellFit {
  Eigen::VectorXd betahat;  // g(f(x)) on the grid, score clamp only
  double max_abs = 0.0;
  int clamp_count = 0;  // training scores outside the admissible range
  bool clamp_exceeded = false;  // clamp_count above the fit's usual 5% limit
  OptimStatus status = OptimStatus::max_iter;
};

// Fits one family with a median-heuristic Gaussian kernel. Excess clamping is
// reported in the result instead of aborting, so a sweep can show it.
GaussianCellFit gaussian_cell_fit(const SampleSet& samples, const std::string& family,
                                  double alpha, const std::vector<double>& grid,
                                  int max_iter = 100);

std::vector<double> uniform_grid(double lo, double hi, int n);

// max |g(f(x))| over [grid_lo, grid_hi] for one freshly sampled cell.
GaussianCellFit gaussian_cell(const GaussianPair& pair, const std::string& family, int size,
                              double alpha, const Rng& rng, int max_iter = 100,
                              double grid_lo = -3.0, double grid_hi = 3.0, int grid_points = 121);

struct WeightedRegressionOutcome {
  std::string weighting;
  KernelRegressor regressor;
  double l2_p = 0.0;  // squared L2(P) error against sin(3x^4)
  double l2_q = 0.0;  // squared L2(Q) error
};

struct RegressionExperiment {
  RegressionTask task;
  ParametricFit ew_fit;
  ParametricFit lr_fit;
  std::vector<WeightedRegressionOutcome> outcomes;  // uniform, exact, ew, lr
};

struct RegressionSettings {
  int n_src = 200;
  int n_tgt = 200;
  double noise = 0.1;
  double alpha = 1e-32;
  int degree = 5;
  double offset = 1.0;
  int quad_nodes = 2001;
  int l2_nodes = 10001;
};

RegressionExperiment run_weighted_regression(const PiecewisePairSpec& pair,
                                             const RegressionSettings& settings, const Rng& rng);

// Squared L2 error of f against sin(3x^4) under one density of the pair,
// Simpson on each piece.
double squared_l2_error(const std::function<double(double)>& f, const PiecewisePairSpec& pair,
                        Which which, int nodes_per_piece);

}  // namespace bregman
