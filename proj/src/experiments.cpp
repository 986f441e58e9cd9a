#include "bregman/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "bregman/errors.hpp"
#include "bregman/quadrature.hpp"

namespace bregman {

std::vector<PopulationEstimate> population_estimates(const PiecewisePairSpec& pair,
                                                     int quad_nodes, double sup_lo,
                                                     double sup_hi) {
  struct Entry {
    const char* label;
    const char* gen;
    double k;
  };
  const Entry entries[] = {
      {"lr", "lr", 0.0}, {"kulsif", "kulsif", 0.0}, {"poly1", "poly", 1.0},
      {"poly6", "poly", 6.0}, {"ew", "ew", 0.0},
  };
  std::vector<PopulationEstimate> out;
  for (const Entry& e : entries) {
    ParametricFit f = population_fit_parametric(builtin_generator(e.gen, e.k), pair, quad_nodes);
    out.push_back({e.label, f, sup_error(f, pair, sup_lo, sup_hi)});
  }
  return out;
}

SampleSet gaussian_cell_samples(const GaussianPair& pair, int size, const Rng& rng) {
  if (size < 2) throw UsageError("gaussian cell: size must be at least 2");
  int n_p = size / 2, n_q = size - n_p;
  Rng sp = rng.substream("p"), sq = rng.substream("q");
  return SampleSet{column_points(pair.sample(Which::P, n_p, sp)),
                   column_points(pair.sample(Which::Q, n_q, sq))};
}

GaussianCellFit gaussian_cell_fit(const SampleSet& samples, const std::string& family,
                                  double alpha, const std::vector<double>& grid, int max_iter) {
  KernelSpec k = KernelSpec::gaussian(median_heuristic(samples.pooled()));
  FitOptions opt;
  opt.bfgs.max_iter = max_iter;
  const double limit = opt.max_clamp_fraction;
  opt.max_clamp_fraction = 1.0;
  RatioModel m = fit(samples, make_family_loss(family), k, alpha, opt);
  GaussianCellFit out;
  out.betahat = predict_ratio_raw(m, column_points(grid));
  out.max_abs = out.betahat.cwiseAbs().maxCoeff();
  out.clamp_count = m.clamp_count;
  out.clamp_exceeded = m.clamp_count > limit * static_cast<double>(m.centers.rows());
  out.status = m.status;
  if (!std::isfinite(out.max_abs)) throw NumericError("gaussian cell: non-finite estimate");
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  if (n < 2 || !(lo < hi)) throw UsageError("uniform_grid: need n >= 2 and lo < hi");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = (i == n - 1) ? hi : lo + (hi - lo) * i / (n - 1);
  return g;
}

GaussianCellFit gaussian_cell(const GaussianPair& pair, const std::string& family, int size,
                              double alpha, const Rng& rng, int max_iter, double grid_lo,
                              double grid_hi, int grid_points) {
  return gaussian_cell_fit(gaussian_cell_samples(pair, size, rng), family, alpha,
                           uniform_grid(grid_lo, grid_hi, grid_points), max_iter);
}

double squared_l2_error(const std::function<double(double)>& f, const PiecewisePairSpec& pair,
                        Which which, int nodes_per_piece) {
  std::vector<double> e = pair.edges();
  const std::vector<double>& lv = which == Which::P ? pair.p_levels : pair.q_levels;
  double total = 0.0;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    if (lv[i] == 0.0) continue;
    total += lv[i] * simpson(
                         [&](double x) {
                           double d = f(x) - regression_target(x);
                           return d * d;
                         },
                         e[i], e[i + 1], nodes_per_piece);
  }
  return total;
}

RegressionExperiment run_weighted_regression(const PiecewisePairSpec& pair,
                                             const RegressionSettings& st, const Rng& rng) {
  pair.validate();
  RegressionExperiment ex;
  ex.ew_fit = population_fit_parametric(builtin_generator("ew"), pair, st.quad_nodes);
  ex.lr_fit = population_fit_parametric(builtin_generator("lr"), pair, st.quad_nodes);
  ex.task = regression_task(pair, st.n_src, st.n_tgt, st.noise, rng);

  Points xs = column_points(ex.task.src_xs);
  Eigen::VectorXd ys = Eigen::Map<const Eigen::VectorXd>(ex.task.src_ys.data(), st.n_src);
  KernelSpec kernel = KernelSpec::polynomial(st.degree, st.offset);

  auto weights_from = [&](const std::function<double(double)>& w) {
    Eigen::VectorXd out(st.n_src);
    for (int i = 0; i < st.n_src; ++i) out[i] = w(ex.task.src_xs[i]);
    return out;
  };
  const std::pair<const char*, std::function<double(double)>> schemes[] = {
      {"uniform", [](double) { return 1.0; }},
      {"exact", [&](double x) { return piecewise_beta(pair, x); }},
      {"ew", [&](double x) { return ex.ew_fit(x); }},
      {"lr", [&](double x) { return ex.lr_fit(x); }},
  };
  for (const auto& [name, w] : schemes) {
    WeightedRegressionTask t{xs, ys, weights_from(w), kernel, st.alpha};
    KernelRegressor reg = fit_weighted_krr(t);
    auto f = [&reg](double x) {
      Eigen::RowVectorXd p(1);
      p[0] = x;
      return reg(p);
    };
    ex.outcomes.push_back({name, reg, squared_l2_error(f, pair, Which::P, st.l2_nodes),
                           squared_l2_error(f, pair, Which::Q, st.l2_nodes)});
  }
  return ex;
}

}  // namespace bregman
