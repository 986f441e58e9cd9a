#include <gtest/gtest.h>

#include <cmath>

#include "bregman/errors.hpp"
#include "bregman/iw.hpp"
#include "bregman/optim.hpp"
#include "bregman/synth.hpp"

using namespace bregman;

namespace {

Points uniform_points(Rng& rng, int n) {
  Points X(n, 1);
  for (int i = 0; i < n; ++i) X(i, 0) = 2 * rng.uniform() - 1;
  return X;
}

Predictor poly_predictor(double a0, double a1, double a2) {
  return [=](const Eigen::RowVectorXd& x) { return a0 + a1 * x[0] + a2 * x[0] * x[0]; };
}

std::size_t unweighted_argmin(const CandidateSet& c, const Points& xs, const Eigen::VectorXd& ys) {
  std::size_t best = 0;
  double best_risk = INFINITY;
  for (std::size_t k = 0; k < c.models.size(); ++k) {
    double r = 0;
    for (int i = 0; i < xs.rows(); ++i) {
      double e = ys[i] - c.models[k](xs.row(i));
      r += e * e;
    }
    if (r < best_risk) {
      best_risk = r;
      best = k;
    }
  }
  return best;
}

}  // namespace

TEST(WeightedRisk, HandCases) {
  Points xs = column_points({0.0, 1.0});
  Eigen::VectorXd ys(2), w(2);
  ys << 1.0, -2.0;
  w << 1.0, 3.0;
  Predictor zero = [](const Eigen::RowVectorXd&) { return 0.0; };
  EXPECT_DOUBLE_EQ(weighted_sq_risk(zero, xs, ys, w), 6.5);
  EXPECT_DOUBLE_EQ(weighted_sq_risk(zero, xs, ys, Eigen::VectorXd::Zero(2)), 0.0);
  Predictor exact = [](const Eigen::RowVectorXd& x) { return 1.0 - 3.0 * x[0]; };
  EXPECT_DOUBLE_EQ(weighted_sq_risk(exact, xs, ys, w), 0.0);
  EXPECT_THROW(weighted_sq_risk(zero, xs, Eigen::VectorXd::Zero(3), w), UsageError);
}

TEST(WeightedRisk, ScalesWithWeights) {
  Rng rng(1);
  Points xs = uniform_points(rng, 30);
  Eigen::VectorXd ys(30), w(30);
  for (int i = 0; i < 30; ++i) {
    ys[i] = rng.normal();
    w[i] = rng.uniform();
  }
  Predictor f = poly_predictor(0.1, -0.4, 0.3);
  EXPECT_NEAR(weighted_sq_risk(f, xs, ys, 3.7 * w), 3.7 * weighted_sq_risk(f, xs, ys, w), 1e-12);
}

TEST(WeightedKrr, MatchesBfgs) {
  Rng rng(2);
  for (int t = 0; t < 5; ++t) {
    WeightedRegressionTask task;
    task.xs = uniform_points(rng, 12);
    task.ys.resize(12);
    task.weights.resize(12);
    for (int i = 0; i < 12; ++i) {
      task.ys[i] = std::sin(3 * task.xs(i, 0)) + 0.1 * rng.normal();
      task.weights[i] = 0.2 + rng.uniform();
    }
    task.kernel = KernelSpec::gaussian(0.7);
    task.alpha = 0.05;
    Eigen::VectorXd c = weighted_krr(task);
    Objective obj = [&task](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
      return weighted_krr_objective(task, v, &g);
    };
    EXPECT_LE(grad_check(obj, c + Eigen::VectorXd::Constant(12, 0.1), 1e-6), 1e-5);
    BfgsOptions opt;
    opt.max_iter = 5000;
    opt.grad_tol = 1e-12;
    OptimResult r = bfgs(obj, Eigen::VectorXd::Zero(12), opt);
    KernelRegressor a{task.kernel, task.xs, c}, b{task.kernel, task.xs, r.x};
    EXPECT_LE((a.predict(task.xs) - b.predict(task.xs)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(WeightedKrr, InterpolatesLinearTarget) {
  WeightedRegressionTask task;
  task.xs = column_points({-0.8, -0.3, 0.1, 0.4, 0.9});
  task.ys = Eigen::VectorXd(5);
  for (int i = 0; i < 5; ++i) task.ys[i] = 2.0 * task.xs(i, 0) - 0.5;
  task.weights = Eigen::VectorXd::Ones(5);
  task.kernel = KernelSpec::polynomial(1, 1.0);
  task.alpha = 1e-12;
  KernelRegressor f = fit_weighted_krr(task);
  EXPECT_LE((f.predict(task.xs) - task.ys).cwiseAbs().maxCoeff(), 1e-6);
  Eigen::RowVectorXd z(1);
  z << 0.25;
  EXPECT_NEAR(f(z), 0.0, 1e-6);
}

TEST(WeightedKrr, SinglePoint) {
  WeightedRegressionTask task;
  task.xs = column_points({0.3});
  task.ys = Eigen::VectorXd::Constant(1, 1.7);
  task.weights = Eigen::VectorXd::Ones(1);
  task.kernel = KernelSpec::gaussian(1.0);
  task.alpha = 1e-12;
  EXPECT_NEAR(fit_weighted_krr(task).predict(task.xs)[0], 1.7, 1e-6);
}

TEST(WeightedKrr, RejectsInvalidTasks) {
  WeightedRegressionTask task;
  task.xs = column_points({0.0, 1.0});
  task.ys = Eigen::VectorXd::Zero(2);
  task.kernel = KernelSpec::gaussian(1.0);
  task.weights = Eigen::VectorXd::Zero(2);
  EXPECT_THROW(weighted_krr(task), UsageError);
  task.weights << 1.0, -1.0;
  EXPECT_THROW(weighted_krr(task), UsageError);
  task.weights = Eigen::VectorXd::Ones(3);
  EXPECT_THROW(weighted_krr(task), UsageError);
}

TEST(Iwv, SingleCandidateAndTruth) {
  Rng rng(3);
  Points xs = uniform_points(rng, 20);
  Eigen::VectorXd ys(20), w(20);
  for (int i = 0; i < 20; ++i) {
    ys[i] = regression_target(xs(i, 0));
    w[i] = 0.5 + rng.uniform();
  }
  CandidateSet one{{poly_predictor(0, 1, 0)}, {"a"}};
  EXPECT_EQ(iwv_select(one, xs, ys, w), 0u);
  Predictor truth = [](const Eigen::RowVectorXd& x) { return regression_target(x[0]); };
  CandidateSet c{{poly_predictor(0, 0, 0), poly_predictor(0, 1, 0), truth, poly_predictor(0, 0, 1)},
                 {"zero", "x", "truth", "x2"}};
  EXPECT_EQ(iwv_select(c, xs, ys, w), 2u);
  CandidateSet dup{{truth, truth}, {"a", "b"}};
  EXPECT_EQ(iwv_select(dup, xs, ys, w), 0u);
  EXPECT_THROW(iwv_select(CandidateSet{}, xs, ys, w), UsageError);
}

TEST(Iwv, UniformWeightsMatchUnweightedSelection) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    Points xs = uniform_points(rng, 15);
    Eigen::VectorXd ys(15);
    for (int i = 0; i < 15; ++i) ys[i] = std::cos(2 * xs(i, 0)) + 0.3 * rng.normal();
    CandidateSet c;
    for (int k = 0; k < 6; ++k) {
      c.models.push_back(poly_predictor(rng.normal(), rng.normal(), rng.normal()));
      c.labels.push_back(std::to_string(k));
    }
    EXPECT_EQ(iwv_select(c, xs, ys, Eigen::VectorXd::Ones(15)), unweighted_argmin(c, xs, ys));
    // Rescaling the weights leaves the argmin alone.
    EXPECT_EQ(iwv_select(c, xs, ys, Eigen::VectorXd::Constant(15, 4.2)), unweighted_argmin(c, xs, ys));
  }
}

TEST(Iwa, SingleTruthGetsUnitCoefficient) {
  Rng rng(5);
  Points xs = uniform_points(rng, 25);
  Eigen::VectorXd ys(25), w(25);
  for (int i = 0; i < 25; ++i) {
    ys[i] = 0.3 - xs(i, 0) + 2 * xs(i, 0) * xs(i, 0);
    w[i] = 0.1 + rng.uniform();
  }
  CandidateSet c{{poly_predictor(0.3, -1, 2)}, {"truth"}};
  Eigen::VectorXd coef = iwa_aggregate(c, xs, ys, w, 0.0);
  ASSERT_EQ(coef.size(), 1);
  EXPECT_NEAR(coef[0], 1.0, 1e-10);
}

TEST(Iwa, DuplicatesAreSymmetric) {
  Rng rng(6);
  Points xs = uniform_points(rng, 25);
  Eigen::VectorXd ys(25), w(25);
  for (int i = 0; i < 25; ++i) {
    ys[i] = regression_target(xs(i, 0));
    w[i] = 0.1 + rng.uniform();
  }
  Predictor f = poly_predictor(0.1, 0.5, -0.2);
  CandidateSet c{{f, f, poly_predictor(0, 0, 1)}, {"a", "b", "c"}};
  Eigen::VectorXd coef = iwa_aggregate(c, xs, ys, w, 1e-6);
  EXPECT_NEAR(coef[0], coef[1], 1e-10);
}

TEST(Iwa, AggregateNoWorseThanBestSingle) {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    Points xs = uniform_points(rng, 40);
    Eigen::VectorXd ys(40), w(40);
    for (int i = 0; i < 40; ++i) {
      ys[i] = regression_target(xs(i, 0)) + 0.1 * rng.normal();
      w[i] = rng.uniform();
    }
    CandidateSet c;
    for (int k = 0; k < 4; ++k) {
      c.models.push_back(poly_predictor(rng.normal(), rng.normal(), rng.normal()));
      c.labels.push_back(std::to_string(k));
    }
    Eigen::VectorXd coef = iwa_aggregate(c, xs, ys, w, 1e-12);
    Predictor agg = [&c, coef](const Eigen::RowVectorXd& x) {
      double s = 0;
      for (std::size_t k = 0; k < c.models.size(); ++k) s += coef[k] * c.models[k](x);
      return s;
    };
    double best = INFINITY;
    for (const auto& m : c.models) best = std::min(best, weighted_sq_risk(m, xs, ys, w));
    EXPECT_LE(weighted_sq_risk(agg, xs, ys, w), best + 1e-12);
  }
}

TEST(Iwa, ScaleCovariance) {
  Rng rng(8);
  Points xs = uniform_points(rng, 30);
  Eigen::VectorXd ys(30), w(30);
  for (int i = 0; i < 30; ++i) {
    ys[i] = regression_target(xs(i, 0));
    w[i] = rng.uniform();
  }
  CandidateSet c{{poly_predictor(1, 0, 0), poly_predictor(0, 1, 0), poly_predictor(0, 0, 1)}, {"1", "x", "x2"}};
  const double lambda = 6.0, ridge = 1e-4;
  Eigen::VectorXd a = iwa_aggregate(c, xs, ys, w, ridge);
  Eigen::VectorXd b = iwa_aggregate(c, xs, ys, lambda * w, lambda * ridge);
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Iwa, RankDeficientWithoutRidgeIsReported) {
  Rng rng(9);
  Points xs = uniform_points(rng, 10);
  Eigen::VectorXd ys = Eigen::VectorXd::Ones(10);
  Predictor f = poly_predictor(1, 0, 0);
  CandidateSet c{{f, f}, {"a", "b"}};
  EXPECT_THROW(iwa_aggregate(c, xs, ys, Eigen::VectorXd::Ones(10), 0.0), NumericError);
}
