#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bregman/generators.hpp"

namespace bregman {

// Strictly increasing map from scores to ratio values, described through its
// inverse and the inverse's first two derivatives. score_lo/score_hi bound
// the open set of scores where g is defined.
struct RatioMap {
  std::string name;
  ScalarMap g, g_inv, g_inv1, g_inv2;
  double score_lo = -std::numeric_limits<double>::infinity();
  double score_hi = std::numeric_limits<double>::infinity();

  double d1(double y) const;  // g'(y)
  double d2(double y) const;  // g''(y)
};

RatioMap identity_ratio_map();
RatioMap exp_ratio_map();         // g(y) = e^y
RatioMap exp2_ratio_map();        // g(y) = e^{2y}
RatioMap power_ratio_map(double a);  // g^{-1}(x) = x^a

// g = (phi')^{-1}. Closed forms for builtin generators, safeguarded Newton
// otherwise.
RatioMap canonical_ratio_map(const BregmanGenerator& gen);

// Inverts phi' at y by Newton with bisection fallback, bracket grown from
// [domain_eps, 1] by doubling.
double invert_derivative(const BregmanGenerator& gen, double y);

// Partial losses built from (phi, g) and affine constants c1, c2.
//
// With x = g(s):  l_1(s) = c1 + c2 - phi'(x),  l_-1(s) = c1 + x phi'(x) - phi(x).
// Scores outside [score_lo(), score_hi()] are handled by extending both
// partial losses linearly from the nearest end (C^1, convexity preserving).
// The admissible interval is where g is defined and g(s) stays inside
// [domain_eps, beta_max] for generators singular at zero, or below beta_max
// otherwise.
class CompositeLoss {
 public:
  CompositeLoss(BregmanGenerator gen, RatioMap rmap, double c1 = 0.0,
                double c2 = 0.0, double beta_max = 1e6);

  const BregmanGenerator& generator() const { return gen_; }
  const RatioMap& ratio_map() const { return rmap_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double score_lo() const { return s_lo_; }
  double score_hi() const { return s_hi_; }
  double beta_max() const { return beta_max_; }
  bool clamped(double s) const { return s < s_lo_ || s > s_hi_; }
  double clamp_score(double s) const;

  // y is +1 (sample from P) or -1 (sample from Q).
  double value(int y, double s) const;
  double d1(int y, double s) const;
  double d2(int y, double s) const;
  double ell_pos(double s) const { return value(1, s); }
  double ell_neg(double s) const { return value(-1, s); }

  double inv_link(double s) const;   // g/(1+g)
  double inv_link1(double s) const;  // derivative in s
  double link(double eta) const;     // g^{-1}(eta/(1-eta))

  // Bayes risk gamma(eta) = -phi(eta/(1-eta))(1-eta) + eta c2 + c1 and its
  // derivatives, evaluated directly in eta.
  double gamma(double eta) const;
  double gamma1(double eta) const;
  double gamma2(double eta) const;

  // Partial losses assembled from gamma: gamma + (1-eta) gamma' and
  // gamma - eta gamma' at eta = inv_link(s). Used to cross-check value().
  double value_from_gamma(int y, double s) const;

 private:
  double inner_value(int y, double s) const;
  double inner_d1(int y, double s) const;
  double inner_d2(int y, double s) const;

  BregmanGenerator gen_;
  RatioMap rmap_;
  double c1_, c2_, beta_max_;
  double s_lo_, s_hi_;
};

// Named families: kulsif, lr, klest, boost (fixed ratio maps) and
// poly(k), ew (canonical ratio map).
CompositeLoss make_family_loss(const std::string& family, double k = 0.0);
bool is_known_family(const std::string& family);

struct ConvexitySlack {
  double lower;
  double upper;
};

// Two-sided convexity condition on phi and g^{-1} at x > 0.
ConvexitySlack convexity_margin(const BregmanGenerator& gen, const RatioMap& rmap,
                                double x);

// Same verdict stated on the proper-loss weight w and link Psi; the pair is
// (w'/w - Psi''/Psi' + 1/eta, 1/(1-eta) - (w'/w - Psi''/Psi')). w' is taken
// by central differences of the weight.
ConvexitySlack link_convexity_margin(const CompositeLoss& loss, double eta);

double conditional_risk(const CompositeLoss& loss, double eta, double yhat);
double bayes_risk(const CompositeLoss& loss, double eta);

// Savage residual CR(eta, yhat) - [BR(etahat) + (eta - etahat) BR'(etahat)]
// with etahat = inv_link(yhat); br1 supplies BR'.
double savage_residual(const CompositeLoss& loss, double eta, double yhat,
                       const ScalarMap& br1);

// The two weight ratios l_1'(eta)/(eta-1) and l_-1'(eta)/eta of the proper
// loss l(y, Psi(eta)).
std::pair<double, double> shuford_ratios(const CompositeLoss& loss, double eta);

// Mean of the two ratios; throws CertificationError when they disagree by
// more than rel_tol.
double shuford_weight(const CompositeLoss& loss, double eta, double rel_tol = 1e-7);

// Minimiser of CR(eta, .) found by BFGS from link(eta) + 0.1.
double properness_minimizer(const CompositeLoss& loss, double eta);

struct ExcessRisk {
  double excess;
  double half_bregman;
};

// R(f) - R(f*) under the equal-prior mixture of P and Q, and half the
// Bregman divergence between beta and g(f).
ExcessRisk excess_risk_identity_check(const CompositeLoss& loss,
                                      const DiscretePair& pair,
                                      const std::vector<double>& f);

}  // namespace bregman
