#include "bregman/losses.hpp"

#include <algorithm>
#include <cmath>

#include "bregman/errors.hpp"
#include "bregman/optim.hpp"

namespace bregman {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double nudge_up(double v, double eps) { return v + eps * std::max(1.0, std::abs(v)); }
double nudge_down(double v, double eps) { return v - eps * std::max(1.0, std::abs(v)); }

}  // namespace

double RatioMap::d1(double y) const { return 1.0 / g_inv1(g(y)); }

double RatioMap::d2(double y) const {
  double x = g(y);
  double a = g_inv1(x);
  return -g_inv2(x) / (a * a * a);
}

RatioMap identity_ratio_map() {
  RatioMap m;
  m.name = "identity";
  m.g = [](double y) { return y; };
  m.g_inv = [](double x) { return x; };
  m.g_inv1 = [](double) { return 1.0; };
  m.g_inv2 = [](double) { return 0.0; };
  return m;
}

RatioMap exp_ratio_map() {
  RatioMap m;
  m.name = "exp";
  m.g = [](double y) { return std::exp(y); };
  m.g_inv = [](double x) { return std::log(x); };
  m.g_inv1 = [](double x) { return 1.0 / x; };
  m.g_inv2 = [](double x) { return -1.0 / (x * x); };
  return m;
}

RatioMap exp2_ratio_map() {
  RatioMap m;
  m.name = "exp2";
  m.g = [](double y) { return std::exp(2.0 * y); };
  m.g_inv = [](double x) { return 0.5 * std::log(x); };
  m.g_inv1 = [](double x) { return 0.5 / x; };
  m.g_inv2 = [](double x) { return -0.5 / (x * x); };
  return m;
}

RatioMap power_ratio_map(double a) {
  if (!(a > 0.0)) throw UsageError("power ratio map needs a > 0");
  RatioMap m;
  m.name = "power";
  m.score_lo = 0.0;
  m.g = [a](double y) { return std::pow(y, 1.0 / a); };
  m.g_inv = [a](double x) { return std::pow(x, a); };
  m.g_inv1 = [a](double x) { return a * std::pow(x, a - 1.0); };
  m.g_inv2 = [a](double x) { return a * (a - 1.0) * std::pow(x, a - 2.0); };
  return m;
}

double invert_derivative(const BregmanGenerator& gen, double y) {
  double a = gen.domain_eps, b = 1.0;
  int expansions = 0;
  while (gen.d1(b) < y) {
    b *= 2.0;
    if (++expansions > 200 || !std::isfinite(gen.d1(b))) {
      throw NumericError("invert_derivative: target above the range of phi'");
    }
  }
  while (gen.d1(a) > y) {
    if (gen.positive_domain) {
      throw NumericError("invert_derivative: target below the range of phi'");
    }
    a -= 2.0 * (b - a);
    if (++expansions > 400) {
      throw NumericError("invert_derivative: bracket expansion failed");
    }
  }
  double x = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    double r = gen.d1(x) - y;
    if (r == 0.0) return x;
    if (r > 0.0) b = x; else a = x;
    double step = r / gen.d2(x);
    double next = x - step;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - x) <= 1e-12 * std::max(1.0, std::abs(x))) return next;
    x = next;
  }
  throw NumericError("invert_derivative: no convergence after 200 iterations");
}

RatioMap canonical_ratio_map(const BregmanGenerator& gen) {
  RatioMap m;
  m.name = "canonical";
  m.g_inv = [gen](double x) { return gen.d1(x); };
  m.g_inv1 = [gen](double x) { return gen.d2(x); };
  m.g_inv2 = [gen](double x) { return gen.d3(x); };
  const std::string& n = gen.name;
  if (n == "kulsif") {
    m.g = [](double y) { return y + 1.0; };
  } else if (n == "lr") {
    m.score_hi = 0.0;
    m.g = [](double y) { return 1.0 / std::expm1(-y); };
  } else if (n == "klest") {
    m.g = [](double y) { return std::exp(y); };
  } else if (n == "boost") {
    m.score_hi = 0.0;
    m.g = [](double y) { return 4.0 / (y * y); };
  } else if (n == "poly" && gen.k == 0.0) {
    m.g = [](double y) { return y; };
  } else if (n == "poly") {
    double a = 1.0 + gen.k;
    m.score_lo = 0.0;
    m.g = [a](double y) { return std::pow(a * y, 1.0 / a); };
  } else if (n == "ew") {
    m.score_lo = 0.0;
    m.g = [](double y) { return 0.5 * std::log(2.0 * y); };
  } else {
    m.g = [gen](double y) { return invert_derivative(gen, y); };
  }
  return m;
}

CompositeLoss::CompositeLoss(BregmanGenerator gen, RatioMap rmap, double c1,
                             double c2, double beta_max)
    : gen_(std::move(gen)), rmap_(std::move(rmap)), c1_(c1), c2_(c2),
      beta_max_(beta_max) {
  const double eps = gen_.domain_eps;
  if (gen_.positive_domain) {
    s_lo_ = rmap_.g_inv(eps);
    if (!(s_lo_ > rmap_.score_lo)) s_lo_ = nudge_up(rmap_.score_lo, eps);
  } else {
    s_lo_ = std::isfinite(rmap_.score_lo) ? nudge_up(rmap_.score_lo, eps) : -kInf;
  }
  double top = rmap_.g_inv(beta_max_);
  if (std::isfinite(top) && top < rmap_.score_hi) {
    s_hi_ = top;
  } else {
    s_hi_ = std::isfinite(rmap_.score_hi) ? nudge_down(rmap_.score_hi, eps) : kInf;
  }
  if (!(s_lo_ < s_hi_)) throw UsageError("composite loss: empty admissible score range");
}

double CompositeLoss::clamp_score(double s) const { return std::clamp(s, s_lo_, s_hi_); }

double CompositeLoss::inner_value(int y, double s) const {
  double x = rmap_.g(s);
  if (y > 0) return c1_ + c2_ - gen_.d1(x);
  return c1_ + x * gen_.d1(x) - gen_.value(x);
}

double CompositeLoss::inner_d1(int y, double s) const {
  double x = rmap_.g(s);
  double gp = rmap_.d1(s);
  double w = gen_.d2(x) * gp;
  return y > 0 ? -w : x * w;
}

double CompositeLoss::inner_d2(int y, double s) const {
  double x = rmap_.g(s);
  double gp = rmap_.d1(s), gpp = rmap_.d2(s);
  double p2 = gen_.d2(x), p3 = gen_.d3(x);
  if (y > 0) return -p3 * gp * gp - p2 * gpp;
  return (p2 + x * p3) * gp * gp + x * p2 * gpp;
}

double CompositeLoss::value(int y, double s) const {
  if (s < s_lo_) return inner_value(y, s_lo_) + inner_d1(y, s_lo_) * (s - s_lo_);
  if (s > s_hi_) return inner_value(y, s_hi_) + inner_d1(y, s_hi_) * (s - s_hi_);
  return inner_value(y, s);
}

double CompositeLoss::d1(int y, double s) const { return inner_d1(y, clamp_score(s)); }

double CompositeLoss::d2(int y, double s) const {
  if (clamped(s)) return 0.0;
  return inner_d2(y, s);
}

double CompositeLoss::inv_link(double s) const {
  double g = rmap_.g(clamp_score(s));
  if (std::isinf(g)) return 1.0;
  return g / (1.0 + g);
}

double CompositeLoss::inv_link1(double s) const {
  double sc = clamp_score(s);
  double g = rmap_.g(sc);
  return rmap_.d1(sc) / ((1.0 + g) * (1.0 + g));
}

double CompositeLoss::link(double eta) const { return rmap_.g_inv(eta / (1.0 - eta)); }

double CompositeLoss::gamma(double eta) const {
  double x = eta / (1.0 - eta);
  return -gen_.value(x) * (1.0 - eta) + eta * c2_ + c1_;
}

double CompositeLoss::gamma1(double eta) const {
  double x = eta / (1.0 - eta);
  return -gen_.d1(x) / (1.0 - eta) + gen_.value(x) + c2_;
}

double CompositeLoss::gamma2(double eta) const {
  double x = eta / (1.0 - eta);
  double m = 1.0 - eta;
  return -gen_.d2(x) / (m * m * m);
}

double CompositeLoss::value_from_gamma(int y, double s) const {
  double eta = inv_link(s);
  if (y > 0) return gamma(eta) + (1.0 - eta) * gamma1(eta);
  return gamma(eta) - eta * gamma1(eta);
}

bool is_known_family(const std::string& family) {
  return family == "kulsif" || family == "lr" || family == "klest" ||
         family == "boost" || family == "poly" || family == "ew";
}

CompositeLoss make_family_loss(const std::string& family, double k) {
  if (family == "kulsif") return {builtin_generator("kulsif"), identity_ratio_map()};
  if (family == "lr") return {builtin_generator("lr"), exp_ratio_map()};
  if (family == "klest") return {builtin_generator("klest"), identity_ratio_map()};
  if (family == "boost") return {builtin_generator("boost"), exp2_ratio_map()};
  if (family == "poly" || family == "ew") {
    BregmanGenerator gen = builtin_generator(family, k);
    RatioMap rmap = canonical_ratio_map(gen);
    return {std::move(gen), std::move(rmap)};
  }
  throw UsageError("unknown loss family '" + family + "'");
}

ConvexitySlack convexity_margin(const BregmanGenerator& gen, const RatioMap& rmap,
                                double x) {
  if (!(x > 0.0)) throw UsageError("convexity_margin: x must be positive");
  double middle = gen.d3(x) / gen.d2(x) - rmap.g_inv2(x) / rmap.g_inv1(x);
  return {middle + 1.0 / x, -middle};
}

ConvexitySlack link_convexity_margin(const CompositeLoss& loss, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw UsageError("link_convexity_margin: eta outside (0,1)");
  const RatioMap& m = loss.ratio_map();
  double h = 1e-5 * std::min(eta, 1.0 - eta);
  double w = shuford_ratios(loss, eta).first;
  double wp = (shuford_ratios(loss, eta + h).first - shuford_ratios(loss, eta - h).first) / (2.0 * h);
  double x = eta / (1.0 - eta);
  double s = 1.0 + x;
  double psi1 = m.g_inv1(x) * s * s;
  double psi2 = m.g_inv2(x) * s * s * s * s + 2.0 * m.g_inv1(x) * s * s * s;
  double d = wp / w - psi2 / psi1;
  return {d + 1.0 / eta, 1.0 / (1.0 - eta) - d};
}

double conditional_risk(const CompositeLoss& loss, double eta, double yhat) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw UsageError("conditional_risk: eta outside [0,1]");
  if (eta == 0.0) return loss.ell_neg(yhat);
  if (eta == 1.0) return loss.ell_pos(yhat);
  return eta * loss.ell_pos(yhat) + (1.0 - eta) * loss.ell_neg(yhat);
}

double bayes_risk(const CompositeLoss& loss, double eta) {
  return conditional_risk(loss, eta, loss.link(eta));
}

double savage_residual(const CompositeLoss& loss, double eta, double yhat,
                       const ScalarMap& br1) {
  double etahat = loss.inv_link(yhat);
  return conditional_risk(loss, eta, yhat) -
         (bayes_risk(loss, etahat) + (eta - etahat) * br1(etahat));
}

std::pair<double, double> shuford_ratios(const CompositeLoss& loss, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw UsageError("shuford: eta outside (0,1)");
  double s = loss.link(eta);
  double psi1 = 1.0 / loss.inv_link1(s);
  double lp = loss.d1(1, s) * psi1;
  double ln = loss.d1(-1, s) * psi1;
  return {lp / (eta - 1.0), ln / eta};
}

double shuford_weight(const CompositeLoss& loss, double eta, double rel_tol) {
  auto [a, b] = shuford_ratios(loss, eta);
  double scale = std::max(std::abs(a), std::abs(b));
  if (!(std::abs(a - b) <= rel_tol * scale)) {
    throw CertificationError("shuford ratios disagree at eta=" + std::to_string(eta));
  }
  return 0.5 * (a + b);
}

double properness_minimizer(const CompositeLoss& loss, double eta) {
  Objective obj = [&](const Eigen::VectorXd& v, Eigen::VectorXd& grad) {
    double s = v[0];
    grad.resize(1);
    grad[0] = eta * loss.d1(1, s) + (1.0 - eta) * loss.d1(-1, s);
    return conditional_risk(loss, eta, s);
  };
  Eigen::VectorXd x0(1);
  x0[0] = loss.link(eta) + 0.1;
  BfgsOptions opt;
  opt.max_iter = 500;
  opt.grad_tol = 1e-13;
  return bfgs(obj, x0, opt).x[0];
}

ExcessRisk excess_risk_identity_check(const CompositeLoss& loss,
                                      const DiscretePair& pair,
                                      const std::vector<double>& f) {
  pair.validate();
  if (f.size() != pair.p.size()) throw UsageError("excess risk: score vector has wrong length");
  std::vector<double> beta = pair.beta();
  double risk = 0.0, risk_star = 0.0;
  std::vector<double> betahat(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) throw UsageError("excess risk: non-finite score");
    double eta = beta[i] / (1.0 + beta[i]);
    double fs = loss.link(eta);
    risk += 0.5 * (pair.p[i] * loss.ell_pos(f[i]) + pair.q[i] * loss.ell_neg(f[i]));
    risk_star += 0.5 * (pair.p[i] * loss.ell_pos(fs) + pair.q[i] * loss.ell_neg(fs));
    betahat[i] = loss.ratio_map().g(f[i]);
  }
  return {risk - risk_star, 0.5 * divergence_discrete(loss.generator(), pair, betahat)};
}

}  // namespace bregman
