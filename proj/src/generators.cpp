#include "bregman/generators.hpp"

#include <algorithm>
#include <cmath>

#include "bregman/errors.hpp"
#include "bregman/quadrature.hpp"

namespace bregman {

double BregmanGenerator::clip(double x) const {
  return positive_domain ? std::max(x, domain_eps) : x;
}

double BregmanGenerator::d3(double x) const {
  if (!phi3) throw UsageError("generator '" + name + "' has no third derivative");
  return phi3(clip(x));
}

double BregmanGenerator::bregman_term(double r, double rhat) const {
  double rc = clip(r), hc = clip(rhat);
  double v = phi(rc) - phi(hc) - phi1(hc) * (rc - hc);
  if (std::isnan(v)) {
    throw NumericError("generator '" + name + "' produced NaN at (" +
                       std::to_string(r) + ", " + std::to_string(rhat) + ")");
  }
  return v;
}

double bregman_gap(const ScalarMap& f, const ScalarMap& f1, double a, double b) {
  return f(a) - f(b) - f1(b) * (a - b);
}

BregmanGenerator builtin_generator(const std::string& name, double k) {
  BregmanGenerator g;
  g.name = name;
  if (name == "kulsif") {
    g.positive_domain = false;
    g.phi = [](double x) { return 0.5 * (x - 1.0) * (x - 1.0); };
    g.phi1 = [](double x) { return x - 1.0; };
    g.phi2 = [](double) { return 1.0; };
    g.phi3 = [](double) { return 0.0; };
  } else if (name == "lr") {
    g.phi = [](double x) { return x * std::log(x) - (1.0 + x) * std::log1p(x); };
    g.phi1 = [](double x) { return std::log(x) - std::log1p(x); };
    g.phi2 = [](double x) { return 1.0 / (x * (1.0 + x)); };
    g.phi3 = [](double x) { return -1.0 / (x * x) + 1.0 / ((1.0 + x) * (1.0 + x)); };
  } else if (name == "klest") {
    g.phi = [](double x) { return x * std::log(x) - x; };
    g.phi1 = [](double x) { return std::log(x); };
    g.phi2 = [](double x) { return 1.0 / x; };
    g.phi3 = [](double x) { return -1.0 / (x * x); };
  } else if (name == "boost") {
    g.phi = [](double x) { return -4.0 * std::sqrt(x); };
    g.phi1 = [](double x) { return -2.0 / std::sqrt(x); };
    g.phi2 = [](double x) { return std::pow(x, -1.5); };
    g.phi3 = [](double x) { return -1.5 * std::pow(x, -2.5); };
  } else if (name == "poly") {
    if (!(k >= 0.0)) throw UsageError("poly generator needs k >= 0");
    g.k = k;
    g.positive_domain = (k != 0.0);
    double a = 1.0 + k, b = 2.0 + k;
    g.phi = [a, b](double x) { return std::pow(x, b) / (a * b); };
    g.phi1 = [a](double x) { return std::pow(x, a) / a; };
    g.phi2 = [k](double x) { return k == 0.0 ? 1.0 : std::pow(x, k); };
    g.phi3 = [k](double x) {
      if (k == 0.0) return 0.0;
      if (k == 1.0) return 1.0;
      return k * std::pow(x, k - 1.0);
    };
  } else if (name == "ew") {
    g.positive_domain = false;
    g.phi = [](double x) { return 0.25 * std::exp(2.0 * x); };
    g.phi1 = [](double x) { return 0.5 * std::exp(2.0 * x); };
    g.phi2 = [](double x) { return std::exp(2.0 * x); };
    g.phi3 = [](double x) { return 2.0 * std::exp(2.0 * x); };
  } else {
    throw UsageError("unknown generator '" + name + "'");
  }
  return g;
}

void DiscretePair::validate() const {
  if (p.size() != q.size() || p.empty() || support.size() != p.size()) {
    throw UsageError("discrete pair: support, p and q must have equal nonzero length");
  }
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(q[i] > 0.0)) throw UsageError("discrete pair: q must be positive");
    if (!(p[i] >= 0.0)) throw UsageError("discrete pair: p must be nonnegative");
    sp += p[i];
    sq += q[i];
  }
  if (std::abs(sp - 1.0) > 1e-12 || std::abs(sq - 1.0) > 1e-12) {
    throw UsageError("discrete pair: masses must sum to one");
  }
}

std::vector<double> DiscretePair::beta() const {
  std::vector<double> b(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) b[i] = p[i] / q[i];
  return b;
}

double divergence_discrete(const BregmanGenerator& gen, const DiscretePair& pair,
                           const std::vector<double>& betahat) {
  pair.validate();
  if (betahat.size() != pair.p.size()) {
    throw UsageError("divergence_discrete: betahat has wrong length");
  }
  std::vector<double> beta = pair.beta();
  double total = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    total += pair.q[i] * gen.bregman_term(beta[i], betahat[i]);
  }
  return total;
}

double divergence_quadrature(const BregmanGenerator& gen, const ScalarMap& beta,
                             const ScalarMap& betahat, const ScalarMap& q_density,
                             double lo, double hi, int n_nodes) {
  QuadratureRule rule = simpson_rule(lo, hi, n_nodes);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    double x = rule.nodes[i];
    double qd = q_density(x);
    if (qd < 0.0) throw UsageError("divergence_quadrature: negative density");
    if (qd == 0.0) continue;
    total += rule.weights[i] * qd * gen.bregman_term(beta(x), betahat(x));
  }
  return total;
}

double weight_representation(const BregmanGenerator& gen, double r, double rhat,
                             int n_nodes) {
  if (r < 0.0 || rhat < 0.0) throw UsageError("weight_representation: negative input");
  double lo = gen.clip(std::min(r, rhat));
  double hi = gen.clip(std::max(r, rhat));
  double rc = gen.clip(r);
  if (hi <= lo) return 0.0;
  if (lo > 0.0) {
    double llo = std::log(lo);
    auto integrand = [&](double u) {
      double c = std::exp(u);
      return gen.d2(c) * std::abs(c - rc) * c;
    };
    return simpson(integrand, llo, std::log(hi), n_nodes);
  }
  auto integrand = [&](double c) { return gen.d2(c) * std::abs(c - rc); };
  return simpson(integrand, lo, hi, n_nodes);
}

BregmanGenerator diamond_transform(const UnitIntervalMap& phi01) {
  auto inner = [](double z) {
    double u = z / (1.0 + z);
    if (!(u <= 1.0 - 1e-12)) {
      throw NumericError("diamond transform: inner argument too close to 1");
    }
    return u;
  };
  BregmanGenerator g;
  g.name = "diamond";
  g.positive_domain = false;
  g.phi = [phi01, inner](double z) { return (1.0 + z) * phi01.f(inner(z)); };
  g.phi1 = [phi01, inner](double z) {
    double u = inner(z);
    return phi01.f(u) + phi01.f1(u) / (1.0 + z);
  };
  g.phi2 = [phi01, inner](double z) {
    double u = inner(z);
    double s = 1.0 + z;
    return phi01.f2(u) / (s * s * s);
  };
  return g;
}

}  // namespace bregman
