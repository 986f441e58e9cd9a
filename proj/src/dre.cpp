#include "bregman/dre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bregman/errors.hpp"
#include "bregman/quadrature.hpp"

namespace bregman {

void SampleSet::validate() const {
  if (xs_p.rows() == 0 || xs_q.rows() == 0) throw UsageError("sample set: both samples must be nonempty");
  if (xs_p.cols() != xs_q.cols()) throw UsageError("sample set: dimension mismatch");
}

Points SampleSet::pooled() const { return stack_points(xs_p, xs_q); }

Eigen::VectorXd SampleSet::labels() const {
  Eigen::VectorXd y(xs_p.rows() + xs_q.rows());
  y.head(xs_p.rows()).setOnes();
  y.tail(xs_q.rows()).setConstant(-1.0);
  return y;
}

double empirical_risk(const CompositeLoss& loss, const Eigen::MatrixXd& gram,
                      const Eigen::VectorXd& labels, const Eigen::VectorXd& coeffs,
                      double alpha, Eigen::VectorXd* grad, int* clamps) {
  const Eigen::Index n = gram.rows();
  if (gram.cols() != n || labels.size() != n || coeffs.size() != n) {
    throw UsageError("empirical_risk: size mismatch");
  }
  Eigen::VectorXd scores = gram * coeffs;
  Eigen::VectorXd v(n);
  double total = 0.0;
  int clamp_count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    int y = labels[i] > 0.0 ? 1 : -1;
    double s = scores[i];
    if (loss.clamped(s)) ++clamp_count;
    double l = loss.value(y, s);
    if (!std::isfinite(l)) {
      throw NumericError("empirical_risk: loss not finite at index " + std::to_string(i) +
                         " (score " + std::to_string(s) + ")");
    }
    total += l;
    if (grad) v[i] = loss.d1(y, s);
  }
  if (clamps) *clamps = clamp_count;
  double value = total / n + alpha * coeffs.dot(scores);
  if (grad) *grad = gram.transpose() * v / static_cast<double>(n) + 2.0 * alpha * scores;
  return value;
}

RatioModel fit(const SampleSet& samples, const CompositeLoss& loss, const KernelSpec& kernel,
               double alpha, const FitOptions& opt) {
  samples.validate();
  kernel.validate();
  if (!(alpha >= 0.0)) throw UsageError("fit: alpha must be nonnegative");
  Points X = samples.pooled();
  Eigen::VectorXd labels = samples.labels();
  Eigen::MatrixXd G = gram(kernel, X, X);
  Objective obj = [&](const Eigen::VectorXd& c, Eigen::VectorXd& g) {
    try {
      return empirical_risk(loss, G, labels, c, alpha, &g);
    } catch (const NumericError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  empirical_risk(loss, G, labels, Eigen::VectorXd::Zero(X.rows()), alpha);
  OptimResult r = bfgs(obj, Eigen::VectorXd::Zero(X.rows()), opt.bfgs);
  int clamps = 0;
  empirical_risk(loss, G, labels, r.x, alpha, nullptr, &clamps);
  if (clamps > opt.max_clamp_fraction * static_cast<double>(X.rows())) {
    throw NumericError("fit: " + std::to_string(clamps) + " of " + std::to_string(X.rows()) +
                       " training scores outside the admissible range");
  }
  return RatioModel{kernel, X, r.x, loss, alpha, clamps, r.status, r.iterations, r.f};
}

RatioModel fit_kulsif_closed_form(const SampleSet& samples, const KernelSpec& kernel,
                                  double alpha) {
  samples.validate();
  Points X = samples.pooled();
  const Eigen::Index n = X.rows(), np = samples.xs_p.rows();
  Eigen::MatrixXd G = gram(kernel, X, X);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  A.bottomRows(n - np) = G.bottomRows(n - np);
  A.diagonal().array() += 2.0 * alpha * static_cast<double>(n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs.head(np).setOnes();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd c = lu.solve(rhs);
  if (!c.allFinite()) throw NumericError("kulsif closed form: singular system");
  CompositeLoss loss = make_family_loss("kulsif");
  double value = empirical_risk(loss, G, samples.labels(), c, alpha);
  return RatioModel{kernel, X, c, loss, alpha, 0, OptimStatus::converged, 0, value};
}

Eigen::VectorXd predict_scores(const RatioModel& model, const Points& X) {
  return gram(model.kernel, X, model.centers) * model.coeffs;
}

Eigen::VectorXd predict_ratio_raw(const RatioModel& model, const Points& X) {
  Eigen::VectorXd s = predict_scores(model, X);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    s[i] = model.loss.ratio_map().g(model.loss.clamp_score(s[i]));
  }
  return s;
}

Eigen::VectorXd predict_ratio(const RatioModel& model, const Points& X, PredictStats* stats) {
  const CompositeLoss& loss = model.loss;
  const double eps = loss.generator().domain_eps;
  Eigen::VectorXd s = predict_scores(model, X);
  Eigen::VectorXd out(s.size());
  PredictStats local;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (loss.clamped(s[i])) ++local.score_clamps;
    double sc = loss.clamp_score(s[i]);
    double b = loss.ratio_map().g(sc);
#ifndef NDEBUG
    double eta = loss.inv_link(sc);
    double via_link = eta / (1.0 - eta);
    if (std::abs(via_link - b) > 1e-8 * std::max(1.0, std::abs(b))) {
      throw NumericError("predict_ratio: link paths disagree");
    }
#endif
    if (!(b >= eps)) {
      b = eps;
      ++local.floored;
    } else if (b > loss.beta_max()) {
      b = loss.beta_max();
      ++local.capped;
    }
    out[i] = b;
  }
  if (stats) {
    stats->score_clamps += local.score_clamps;
    stats->floored += local.floored;
    stats->capped += local.capped;
  }
  return out;
}

double pick_alpha(const std::vector<double>& grid, const std::vector<double>& mean_risk) {
  if (grid.empty() || grid.size() != mean_risk.size()) throw UsageError("pick_alpha: bad grid");
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid[a] < grid[b]; });
  std::size_t best = order[0];
  for (std::size_t idx : order) {
    double r = mean_risk[idx], rb = mean_risk[best];
    double tol = 1e-12 * std::max(1.0, std::abs(rb));
    if (std::isfinite(r) && (!std::isfinite(rb) || r < rb - tol)) best = idx;
  }
  return grid[best];
}

namespace {

std::vector<int> stratified_folds(Eigen::Index n_p, Eigen::Index n_q, int n_folds, Rng rng) {
  std::vector<int> fold(n_p + n_q);
  auto assign = [&](Eigen::Index offset, Eigen::Index count) {
    std::vector<Eigen::Index> idx(count);
    std::iota(idx.begin(), idx.end(), offset);
    for (Eigen::Index i = count - 1; i > 0; --i) {
      auto j = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(i + 1));
      std::swap(idx[i], idx[j]);
    }
    for (Eigen::Index r = 0; r < count; ++r) fold[idx[r]] = static_cast<int>(r % n_folds);
  };
  assign(0, n_p);
  assign(n_p, n_q);
  return fold;
}

Points select_rows(const Points& X, const std::vector<Eigen::Index>& rows) {
  Points out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

}  // namespace

CvResult cross_validate_alpha(const SampleSet& samples, const CompositeLoss& loss,
                              const KernelSpec& kernel, const std::vector<double>& grid,
                              int n_folds, const Rng& rng, const FitOptions& opt) {
  samples.validate();
  if (grid.empty()) throw UsageError("cross_validate_alpha: empty grid");
  if (n_folds < 2) throw UsageError("cross_validate_alpha: need at least two folds");
  CvResult res;
  res.grid = grid;
  if (grid.size() == 1) {
    res.alpha = grid[0];
    res.mean_risk = {std::numeric_limits<double>::quiet_NaN()};
    return res;
  }
  const Eigen::Index n_p = samples.xs_p.rows(), n_q = samples.xs_q.rows();
  if (n_p < n_folds || n_q < n_folds) {
    throw UsageError("cross_validate_alpha: each class needs at least n_folds points");
  }
  std::vector<int> fold = stratified_folds(n_p, n_q, n_folds, rng.substream("cv-folds"));
  for (double alpha : grid) {
    double total = 0.0;
    bool failed = false;
    for (int f = 0; f < n_folds && !failed; ++f) {
      std::vector<Eigen::Index> tr_p, tr_q, ho;
      for (Eigen::Index i = 0; i < n_p + n_q; ++i) {
        if (fold[i] == f) ho.push_back(i);
        else if (i < n_p) tr_p.push_back(i);
        else tr_q.push_back(i - n_p);
      }
      SampleSet train{select_rows(samples.xs_p, tr_p), select_rows(samples.xs_q, tr_q)};
      try {
        RatioModel m = fit(train, loss, kernel, alpha, opt);
        Points all = samples.pooled();
        Eigen::VectorXd s = predict_scores(m, select_rows(all, ho));
        double risk = 0.0;
        for (std::size_t k = 0; k < ho.size(); ++k) {
          risk += loss.value(ho[k] < n_p ? 1 : -1, s[static_cast<Eigen::Index>(k)]);
        }
        total += risk / static_cast<double>(ho.size());
      } catch (const NumericError&) {
        failed = true;
      }
    }
    res.mean_risk.push_back(failed ? std::numeric_limits<double>::infinity() : total / n_folds);
  }
  res.alpha = pick_alpha(res.grid, res.mean_risk);
  return res;
}

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

double parametric_objective(const BregmanGenerator& gen, const PiecewisePairSpec& pair,
                            int quad_nodes, const Eigen::VectorXd& theta_tau,
                            Eigen::VectorXd* grad) {
  const double th1 = theta_tau[0], tau = theta_tau[1];
  const double th2 = softplus(tau);
  std::vector<double> e = pair.edges();
  double total = 0.0, g1 = 0.0, g2 = 0.0;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    double q = pair.q_levels[i];
    double beta = pair.p_levels[i] / q;
    QuadratureRule rule = simpson_rule(e[i], e[i + 1], quad_nodes);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      double x = rule.nodes[k];
      double bh = th1 * x * x + th2;
      if (!(bh > 0.0)) return std::numeric_limits<double>::infinity();
      double w = rule.weights[k] * q;
      total += w * gen.bregman_term(beta, bh);
      double dd = -gen.d2(bh) * (beta - bh);
      g1 += w * dd * x * x;
      g2 += w * dd;
    }
  }
  if (grad) {
    grad->resize(2);
    (*grad)[0] = g1;
    (*grad)[1] = g2 * sigmoid(tau);
  }
  return total;
}

ParametricFit population_fit_parametric(const BregmanGenerator& gen,
                                        const PiecewisePairSpec& pair, int quad_nodes) {
  pair.validate();
  Objective obj = [&](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
    double val;
    try {
      val = parametric_objective(gen, pair, quad_nodes, v, &g);
    } catch (const NumericError&) {
      val = std::numeric_limits<double>::infinity();  // generator overflow on a trial step
    }
    if (!std::isfinite(val)) g.setZero(2);
    return val;
  };
  BfgsOptions opt;
  opt.grad_tol = 1e-10;
  const double starts[][2] = {{1.0, 0.0}, {5.0, 0.0}, {0.5, -2.0}, {3.0, 1.0}};
  bool have = false;
  ParametricFit best;
  for (const auto& st : starts) {
    Eigen::VectorXd x0(2);
    x0 << st[0], st[1];
    Eigen::VectorXd g0;
    if (!std::isfinite(obj(x0, g0))) continue;
    OptimResult r = bfgs(obj, x0, opt);
    if (!std::isfinite(r.f)) continue;
    if (!have || r.f < best.divergence) {
      best = ParametricFit{r.x[0], softplus(r.x[1]), r.f, r.status};
      have = true;
    }
  }
  if (!have) throw NumericError("population_fit_parametric: no feasible start");
  return best;
}

double sup_error(const ParametricFit& fit, const PiecewisePairSpec& pair, double a, double b,
                 int n_points) {
  double worst = 0.0;
  for (int i = 0; i < n_points; ++i) {
    double x = (i == n_points - 1) ? b : a + (b - a) * i / (n_points - 1);
    worst = std::max(worst, std::abs(fit(x) - piecewise_beta(pair, x)));
  }
  return worst;
}

}  // namespace bregman
