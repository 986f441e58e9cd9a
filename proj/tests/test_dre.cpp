#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bregman/dre.hpp"
#include "bregman/errors.hpp"
#include "bregman/generators.hpp"
#include "bregman/quadrature.hpp"

using namespace bregman;

namespace {

SampleSet gaussian_samples(int n, int m, std::uint64_t seed) {
  GaussianPair gp = gaussian_pair(1.0, 0.5, 0.0, 1.0);
  Rng root(seed);
  Rng sp = root.substream("p"), sq = root.substream("q");
  return {column_points(gp.sample(Which::P, n, sp)), column_points(gp.sample(Which::Q, m, sq))};
}

FitOptions tight() {
  FitOptions opt;
  opt.bfgs.grad_tol = 1e-11;
  opt.bfgs.max_iter = 2000;
  return opt;
}

Objective risk_objective(const CompositeLoss& loss, const Eigen::MatrixXd& G, const Eigen::VectorXd& y,
                         double alpha) {
  return [&loss, G, y, alpha](const Eigen::VectorXd& c, Eigen::VectorXd& g) {
    return empirical_risk(loss, G, y, c, alpha, &g);
  };
}

}  // namespace

TEST(EmpiricalRisk, ZeroCoefficientsForKulsif) {
  // Constants chosen so that l(1, y) = -y and l(-1, y) = y^2 / 2; every
  // score is zero at c = 0.
  SampleSet s = gaussian_samples(10, 12, 1);
  Points X = s.pooled();
  Eigen::MatrixXd G = gram(KernelSpec::gaussian(1.0), X, X);
  CompositeLoss loss(builtin_generator("kulsif"), identity_ratio_map(), 0.5, -1.5);
  ASSERT_NEAR(loss.ell_pos(0.7), -0.7, 1e-15);
  ASSERT_NEAR(loss.ell_neg(0.7), 0.245, 1e-15);
  Eigen::VectorXd grad;
  EXPECT_NEAR(empirical_risk(loss, G, s.labels(), Eigen::VectorXd::Zero(22), 0.5, &grad), 0.0, 1e-15);
  // Default constants shift the value by (n * 1 - m / 2) / N but leave the gradient alone.
  Eigen::VectorXd grad0;
  double v0 = empirical_risk(make_family_loss("kulsif"), G, s.labels(), Eigen::VectorXd::Zero(22), 0.5, &grad0);
  EXPECT_NEAR(v0, (10.0 - 6.0) / 22.0, 1e-15);
  EXPECT_LT((grad - grad0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(EmpiricalRisk, GradientMatchesFiniteDifferences) {
  SampleSet s = gaussian_samples(15, 15, 2);
  Points X = s.pooled();
  Eigen::MatrixXd G = gram(KernelSpec::gaussian(median_heuristic(X)), X, X);
  Rng rng(3);
  for (const char* fam : {"kulsif", "lr", "klest", "boost", "ew"}) {
    CompositeLoss loss = make_family_loss(fam);
    Eigen::VectorXd c(30);
    for (int i = 0; i < 30; ++i) c[i] = 0.05 + 0.05 * rng.uniform();
    EXPECT_LE(grad_check(risk_objective(loss, G, s.labels(), 0.1), c, 1e-6), 1e-5) << fam;
  }
  CompositeLoss poly6 = make_family_loss("poly", 6.0);
  Eigen::VectorXd c = Eigen::VectorXd::Constant(30, 0.05);
  EXPECT_LE(grad_check(risk_objective(poly6, G, s.labels(), 0.1), c, 1e-6), 1e-5);
}

TEST(Fit, LargeAlphaShrinksCoefficients) {
  SampleSet s = gaussian_samples(20, 20, 4);
  RatioModel m = fit(s, make_family_loss("lr"), KernelSpec::gaussian(1.0), 1e6);
  EXPECT_LT(m.coeffs.lpNorm<Eigen::Infinity>(), 1e-5);
}

TEST(Fit, SymmetricSampleGivesUnitRatio) {
  SampleSet one = gaussian_samples(30, 30, 5);
  SampleSet s{one.xs_q, one.xs_q};
  // LR's link sends eta = 1/2 to score 0, so the penalty does not bias it.
  RatioModel lr = fit(s, make_family_loss("lr"), KernelSpec::gaussian(1.0), 1e-3);
  EXPECT_LT((predict_ratio(lr, s.xs_q).array() - 1.0).abs().maxCoeff(), 5e-2);
  // Other links put the optimum at a nonzero score that the penalty pulls toward 0.
  for (const char* fam : {"kulsif", "ew"}) {
    RatioModel m = fit(s, make_family_loss(fam), KernelSpec::gaussian(1.0), 1e-4);
    EXPECT_LT((predict_ratio(m, s.xs_q).array() - 1.0).abs().maxCoeff(), 5e-2) << fam;
  }
}

TEST(Fit, KulsifMatchesClosedForm) {
  SampleSet s = gaussian_samples(40, 50, 6);
  KernelSpec k = KernelSpec::gaussian(median_heuristic(s.pooled()));
  for (double alpha : {1e-1, 1e-3}) {
    RatioModel bf = fit(s, make_family_loss("kulsif"), k, alpha, tight());
    RatioModel cf = fit_kulsif_closed_form(s, k, alpha);
    Points X = s.pooled();
    EXPECT_LE((predict_ratio_raw(bf, X) - predict_ratio_raw(cf, X)).cwiseAbs().maxCoeff(), 1e-6)
        << "alpha=" << alpha;
  }
}

TEST(Fit, EwMeanRatioOnFreshQ) {
  SampleSet s = gaussian_samples(200, 200, 7);
  KernelSpec k = KernelSpec::gaussian(median_heuristic(s.pooled()));
  RatioModel m = fit(s, make_family_loss("ew"), k, 1e-3);
  GaussianPair gp = gaussian_pair(1.0, 0.5, 0.0, 1.0);
  Rng fr(70);
  Points fresh = column_points(gp.sample(Which::Q, 2000, fr));
  double mean = predict_ratio(m, fresh).mean();
  EXPECT_GE(mean, 0.8);
  EXPECT_LE(mean, 1.2);
}

TEST(Predict, ZeroModelKulsifIsFloored) {
  SampleSet s = gaussian_samples(5, 5, 8);
  RatioModel m = fit_kulsif_closed_form(s, KernelSpec::gaussian(1.0), 1.0);
  m.coeffs.setZero();
  PredictStats st;
  Eigen::VectorXd r = predict_ratio(m, s.xs_p, &st);
  for (int i = 0; i < r.size(); ++i) EXPECT_DOUBLE_EQ(r[i], m.loss.generator().domain_eps);
  EXPECT_EQ(st.floored + st.score_clamps > 0, true);
}

TEST(Predict, LinkMapsAndConsistency) {
  SampleSet s = gaussian_samples(25, 25, 9);
  KernelSpec k = KernelSpec::gaussian(1.0);
  for (const char* fam : {"lr", "boost", "kulsif", "ew"}) {
    RatioModel m = fit(s, make_family_loss(fam), k, 1e-2);
    Points X = s.pooled();
    Eigen::VectorXd f = predict_scores(m, X);
    Eigen::VectorXd r = predict_ratio_raw(m, X);
    for (int i = 0; i < X.rows(); ++i) {
      double sc = m.loss.clamp_score(f[i]);
      double eta = m.loss.inv_link(sc);
      EXPECT_NEAR(r[i], eta / (1.0 - eta), 1e-10 * std::max(1.0, std::abs(r[i]))) << fam;
      if (std::string(fam) == "lr") EXPECT_NEAR(r[i], std::exp(sc), 1e-12 * std::exp(sc));
      if (std::string(fam) == "boost") EXPECT_NEAR(r[i], std::exp(2 * sc), 1e-12 * std::exp(2 * sc));
    }
  }
}

TEST(Fit, KlestFromZeroFailsLoudly) {
  // c = 0 puts every score on the singular end of the identity map.
  SampleSet s = gaussian_samples(25, 25, 9);
  EXPECT_THROW(fit(s, make_family_loss("klest"), KernelSpec::gaussian(1.0), 1e-2), NumericError);
}

TEST(Fit, PermutationInvariance) {
  SampleSet s = gaussian_samples(20, 25, 10);
  KernelSpec k = KernelSpec::gaussian(1.0);
  SampleSet t{s.xs_p.colwise().reverse(), s.xs_q.colwise().reverse()};
  Rng ev(11);
  Points grid = column_points(gaussian_pair(1, 0.5, 0, 1).sample(Which::Q, 50, ev));
  for (const char* fam : {"kulsif", "lr", "ew"}) {
    RatioModel a = fit(s, make_family_loss(fam), k, 1e-2);
    RatioModel b = fit(t, make_family_loss(fam), k, 1e-2);
    EXPECT_LE((predict_ratio(a, grid) - predict_ratio(b, grid)).cwiseAbs().maxCoeff(), 1e-10) << fam;
  }
}

TEST(CrossValidation, SingleGridElement) {
  SampleSet s = gaussian_samples(20, 20, 12);
  CvResult r = cross_validate_alpha(s, make_family_loss("lr"), KernelSpec::gaussian(1.0), {0.37}, 5, Rng(1));
  EXPECT_DOUBLE_EQ(r.alpha, 0.37);
}

TEST(CrossValidation, DegenerateDataTiesToSmallestAlpha) {
  SampleSet s{column_points(std::vector<double>(10, 0.0)), column_points(std::vector<double>(10, 0.0))};
  CvResult r = cross_validate_alpha(s, make_family_loss("lr"), KernelSpec::gaussian(1.0), {10, 0.1, 1e-3}, 5,
                                    Rng(2));
  EXPECT_DOUBLE_EQ(r.alpha, 1e-3);
  EXPECT_DOUBLE_EQ(pick_alpha({10, 0.1, 1e-3}, {1.0, 1.0, 1.0}), 1e-3);
  EXPECT_DOUBLE_EQ(pick_alpha({10, 0.1, 1e-3}, {0.5, 1.0, 1.0}), 10);
}

TEST(CrossValidation, ReproducibleUnderSeed) {
  SampleSet s = gaussian_samples(200, 200, 13);
  KernelSpec k = KernelSpec::gaussian(median_heuristic(s.pooled()));
  CvResult a = cross_validate_alpha(s, make_family_loss("lr"), k, {10, 0.1, 1e-3}, 5, Rng(4));
  CvResult b = cross_validate_alpha(s, make_family_loss("lr"), k, {10, 0.1, 1e-3}, 5, Rng(4));
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.mean_risk, b.mean_risk);
}

TEST(CrossValidation, RejectsBadArguments) {
  SampleSet s = gaussian_samples(10, 10, 14);
  CompositeLoss lr = make_family_loss("lr");
  EXPECT_THROW(cross_validate_alpha(s, lr, KernelSpec::gaussian(1.0), {}, 5, Rng(1)), UsageError);
  EXPECT_THROW(cross_validate_alpha(s, lr, KernelSpec::gaussian(1.0), {1.0}, 1, Rng(1)), UsageError);
}

TEST(Population, RepresentableTruth) {
  PiecewisePairSpec same = PiecewisePairSpec::normalized(-1, 1, {-0.5, 0.5}, {1, 1, 1}, {1, 1, 1});
  for (const char* fam : {"kulsif", "lr", "ew"}) {
    ParametricFit f = population_fit_parametric(builtin_generator(fam), same);
    EXPECT_NEAR(f.theta1, 0.0, 1e-6) << fam;
    EXPECT_NEAR(f.theta2, 1.0, 1e-6) << fam;
    EXPECT_NEAR(f.divergence, 0.0, 1e-8) << fam;
  }
}

TEST(Population, KulsifMatchesNormalEquations) {
  // phi'' = 1: the divergence is half the Q-weighted squared error, so the
  // optimum is the L2(Q) projection of beta onto span{x^2, 1}.
  PiecewisePairSpec d = PiecewisePairSpec::normalized(-1, 1, {-0.5, 0.5}, {3, 1, 3}, {1, 2, 1});
  std::vector<double> e = d.edges();
  double m4 = 0, m2 = 0, m0 = 0, r2 = 0, r0 = 0;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    double a = e[i], b = e[i + 1], q = d.q_levels[i], p = d.p_levels[i];
    m4 += q * (std::pow(b, 5) - std::pow(a, 5)) / 5;
    m2 += q * (std::pow(b, 3) - std::pow(a, 3)) / 3;
    m0 += q * (b - a);
    r2 += p * (std::pow(b, 3) - std::pow(a, 3)) / 3;
    r0 += p * (b - a);
  }
  double det = m4 * m0 - m2 * m2;
  double t1 = (r2 * m0 - m2 * r0) / det, t2 = (m4 * r0 - m2 * r2) / det;
  ASSERT_GT(t2, 0.0);
  ParametricFit f = population_fit_parametric(builtin_generator("kulsif"), d);
  EXPECT_NEAR(f.theta1, t1, 1e-6);
  EXPECT_NEAR(f.theta2, t2, 1e-6);
}

TEST(Population, ObjectiveGradient) {
  PiecewisePairSpec d = default_piecewise_pair();
  for (const char* fam : {"kulsif", "lr", "ew"}) {
    BregmanGenerator g = builtin_generator(fam);
    Objective obj = [&](const Eigen::VectorXd& x, Eigen::VectorXd& gr) {
      return parametric_objective(g, d, 2001, x, &gr);
    };
    Eigen::VectorXd x(2);
    x << 1.5, 0.2;
    EXPECT_LE(grad_check(obj, x, 1e-4), 1e-5) << fam;
  }
}

TEST(Population, LargeRatioErrorOrdering) {
  PiecewisePairSpec d = default_piecewise_pair();
  std::vector<std::pair<const char*, double>> seq = {{"lr", 0}, {"kulsif", 0}, {"poly", 1}, {"poly", 6}, {"ew", 0}};
  std::vector<double> errs;
  for (auto [fam, k] : seq) {
    ParametricFit f = population_fit_parametric(builtin_generator(fam, k), d);
    errs.push_back(sup_error(f, d, 0.9, 1.0));
  }
  EXPECT_LT(errs.back(), errs.front());
  for (std::size_t i = 1; i < errs.size(); ++i) EXPECT_LE(errs[i], errs[i - 1]) << seq[i].first << seq[i].second;
}
