#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bregman {

using ScalarMap = std::function<double(double)>;

// Strictly convex generator phi with closed-form derivatives.
//
// Generators singular at zero (lr, klest, boost, poly with k > 0) have
// positive_domain set; their arguments are floored at domain_eps before
// evaluation. The remaining builtins are evaluated on the whole real line.
struct BregmanGenerator {
  std::string name;
  double k = 0.0;
  ScalarMap phi, phi1, phi2, phi3;
  double domain_eps = 1e-12;
  bool positive_domain = true;

  double clip(double x) const;
  double value(double x) const { return phi(clip(x)); }
  double d1(double x) const { return phi1(clip(x)); }
  double d2(double x) const { return phi2(clip(x)); }
  double d3(double x) const;

  // phi(r) - phi(rhat) - phi'(rhat) (r - rhat)
  double bregman_term(double r, double rhat) const;
};

// name in {kulsif, lr, klest, boost, poly, ew}; k is only used by poly.
BregmanGenerator builtin_generator(const std::string& name, double k = 0.0);

// Finite-support pair of probability measures with P << Q.
struct DiscretePair {
  std::vector<double> support;
  std::vector<double> p;
  std::vector<double> q;

  void validate() const;
  std::vector<double> beta() const;
};

double divergence_discrete(const BregmanGenerator& gen, const DiscretePair& pair,
                           const std::vector<double>& betahat);

double divergence_quadrature(const BregmanGenerator& gen, const ScalarMap& beta,
                             const ScalarMap& betahat, const ScalarMap& q_density,
                             double lo, double hi, int n_nodes = 2001);

// Integral of phi''(c) * |c - r| over c between rhat and r. Equals the
// pointwise Bregman term. Uses c = lo * e^u when the range is positive.
double weight_representation(const BregmanGenerator& gen, double r, double rhat,
                             int n_nodes = 2001);

// A function on [0, 1) with two derivatives.
struct UnitIntervalMap {
  ScalarMap f, f1, f2;
};

// z -> (1 + z) * phi01(z / (1 + z)), with chain-rule derivatives up to the
// second. phi3 is left empty.
BregmanGenerator diamond_transform(const UnitIntervalMap& phi01);

// phi(a) - phi(b) - phi'(b) (a - b) for a map given by value and derivative.
double bregman_gap(const ScalarMap& f, const ScalarMap& f1, double a, double b);

}  // namespace bregman
