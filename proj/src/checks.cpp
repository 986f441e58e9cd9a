#include "bregman/checks.hpp"

#include <algorithm>
#include <cmath>

#include "bregman/dre.hpp"
#include "bregman/generators.hpp"
#include "bregman/losses.hpp"
#include "bregman/optim.hpp"

namespace bregman {

namespace {

CheckResult make_result(std::string name, double tol) {
  CheckResult r;
  r.name = std::move(name);
  r.tolerance = tol;
  return r;
}

void record(CheckResult& r, double residual) {
  ++r.evaluations;
  if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
  r.max_residual = std::max(r.max_residual, residual);
}

CheckResult finish(CheckResult r) {
  r.passed = r.evaluations > 0 && r.max_residual <= r.tolerance;
  return r;
}

double uniform(Rng& rng, double a, double b) { return a + (b - a) * rng.uniform(); }

CompositeLoss family_loss(const NamedGenerator& g) {
  if (g.name == "poly") return make_family_loss("poly", g.k);
  return make_family_loss(g.name);
}

CompositeLoss canonical_loss(const NamedGenerator& g) {
  BregmanGenerator gen = builtin_generator(g.name, g.k);
  RatioMap m = canonical_ratio_map(gen);
  return CompositeLoss(gen, m);
}

DiscretePair random_pair(Rng& rng) {
  int n = 2 + static_cast<int>(rng.uniform() * 5.0);
  DiscretePair pair;
  double sp = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    pair.support.push_back(i);
    pair.p.push_back(uniform(rng, 1.0, 2.0));
    pair.q.push_back(uniform(rng, 1.0, 2.0));
    sp += pair.p.back();
    sq += pair.q.back();
  }
  for (int i = 0; i < n; ++i) {
    pair.p[i] /= sp;
    pair.q[i] /= sq;
  }
  return pair;
}

std::vector<double> geometric_grid(double a, double b, int n) {
  std::vector<double> out(n);
  double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i) out[i] = std::exp(la + (lb - la) * i / (n - 1));
  return out;
}

}  // namespace

const std::vector<NamedGenerator>& checked_generators() {
  static const std::vector<NamedGenerator> gens = {
      {"kulsif", "kulsif", 0.0}, {"lr", "lr", 0.0},       {"klest", "klest", 0.0},
      {"boost", "boost", 0.0},   {"poly0", "poly", 0.0},  {"poly1", "poly", 1.0},
      {"poly6", "poly", 6.0},    {"ew", "ew", 0.0},
  };
  return gens;
}

CheckResult check_excess_risk(Rng rng, int n_pairs) {
  CheckResult r = make_result("excess_risk_identity", 1e-10);
  for (const auto& ng : checked_generators()) {
    CompositeLoss loss = family_loss(ng);
    Rng local = rng.substream(ng.label);
    for (int t = 0; t < n_pairs; ++t) {
      DiscretePair pair = random_pair(local);
      std::vector<double> f(pair.p.size());
      for (double& v : f) v = loss.ratio_map().g_inv(uniform(local, 0.2, 4.0));
      ExcessRisk e = excess_risk_identity_check(loss, pair, f);
      record(r, std::abs(e.excess - e.half_bregman));
    }
  }
  return finish(r);
}

CheckResult check_classical_recovery() {
  CheckResult r = make_result("classical_loss_recovery", 1e-9);
  struct Case {
    std::string family;
    double lo, hi;
    double (*pos)(double);
    double (*neg)(double);
  };
  const Case cases[] = {
      {"kulsif", -3.0, 3.0, [](double y) { return -y; }, [](double y) { return 0.5 * y * y; }},
      {"lr", -3.0, 3.0, [](double y) { return std::log1p(std::exp(-y)); },
       [](double y) { return std::log1p(std::exp(y)); }},
      {"klest", 0.05, 5.0, [](double y) { return -std::log(y); }, [](double y) { return y; }},
  };
  for (const Case& c : cases) {
    CompositeLoss loss = make_family_loss(c.family);
    for (int y : {1, -1}) {
      std::vector<double> diff;
      for (int i = 0; i < 100; ++i) {
        double s = c.lo + (c.hi - c.lo) * i / 99.0;
        double ref = y > 0 ? c.pos(s) : c.neg(s);
        diff.push_back(ref - loss.value(y, s));
      }
      double offset = 0.0;
      for (double d : diff) offset += d;
      offset /= static_cast<double>(diff.size());
      for (double d : diff) record(r, std::abs(d - offset));
    }
  }
  return finish(r);
}

CheckResult check_closed_form_estimators() {
  CheckResult r = make_result("closed_form_estimators", 1e-10);
  std::vector<double> fs;
  for (int i = 1; i <= 200; ++i) fs.push_back(0.05 * i);
  auto compare = [&](const BregmanGenerator& gen, double (*formula)(double, double), double k) {
    BregmanGenerator generic = gen;
    generic.name = "generic";
    RatioMap closed = canonical_ratio_map(gen);
    RatioMap newton = canonical_ratio_map(generic);
    for (double f : fs) {
      double expect = formula(f, k);
      double scale = std::max(1.0, std::abs(expect));
      record(r, std::abs(closed.g(f) - expect) / scale);
      record(r, std::abs(newton.g(f) - expect) / scale);
    }
  };
  for (double k : {0.0, 1.0, 2.5, 6.0}) {
    compare(builtin_generator("poly", k),
            [](double f, double kk) { return std::pow((1.0 + kk) * f, 1.0 / (1.0 + kk)); }, k);
  }
  compare(builtin_generator("ew"), [](double f, double) { return 0.5 * std::log(2.0 * f); }, 0.0);
  return finish(r);
}

CheckResult check_convexity_slacks() {
  CheckResult r = make_result("convexity_slacks", 1e-9);
  std::vector<double> xs = geometric_grid(1e-6, 50.0, 400);
  for (const auto& ng : checked_generators()) {
    BregmanGenerator gen = builtin_generator(ng.name, ng.k);
    RatioMap m = canonical_ratio_map(gen);
    for (double x : xs) {
      ConvexitySlack s = convexity_margin(gen, m, x);
      record(r, std::max(-s.lower, -s.upper));
    }
  }
  return finish(r);
}

CheckResult check_loss_curvature() {
  CheckResult r = make_result("loss_second_derivative", 1e-8);
  for (const auto& ng : checked_generators()) {
    CompositeLoss loss = canonical_loss(ng);
    double eps = loss.generator().domain_eps;
    for (double x : geometric_grid(eps, 10.0, 400)) {
      double s = loss.ratio_map().g_inv(x);
      double h = 1e-3 * std::max(1.0, std::abs(s));
      for (int y : {1, -1}) {
        double d2 = (loss.value(y, s + h) - 2.0 * loss.value(y, s) + loss.value(y, s - h)) / (h * h);
        record(r, -d2);
      }
    }
  }
  return finish(r);
}

CheckResult check_weight_representation(Rng rng, int per_generator) {
  CheckResult r = make_result("weight_representation", 1e-6);
  for (const auto& ng : checked_generators()) {
    BregmanGenerator gen = builtin_generator(ng.name, ng.k);
    Rng local = rng.substream(ng.label);
    for (int i = 0; i < per_generator; ++i) {
      double a = uniform(local, 0.05, 3.0), b = uniform(local, 0.05, 3.0);
      record(r, std::abs(weight_representation(gen, a, b) - gen.bregman_term(a, b)));
    }
  }
  return finish(r);
}

CheckResult check_shuford(Rng rng, int per_family) {
  CheckResult r = make_result("shuford_weight", 1e-7);
  for (const auto& ng : checked_generators()) {
    CompositeLoss loss = family_loss(ng);
    Rng local = rng.substream(ng.label);
    for (int i = 0; i < per_family; ++i) {
      double eta = uniform(local, 0.02, 0.98);
      auto [a, b] = shuford_ratios(loss, eta);
      record(r, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
      double x = eta / (1.0 - eta);
      double expect = loss.generator().d2(x) * std::pow(1.0 + x, 3);
      record(r, std::abs(0.5 * (a + b) - expect) / expect);
    }
  }
  return finish(r);
}

CheckResult check_savage(Rng rng, int per_family) {
  CheckResult r = make_result("savage_residual", 1e-8);
  for (const auto& ng : checked_generators()) {
    CompositeLoss loss = family_loss(ng);
    Rng local = rng.substream(ng.label);
    auto br1 = [&loss](double e) { return loss.gamma1(e); };
    for (int i = 0; i < per_family; ++i) {
      double eta = uniform(local, 0.0, 1.0);
      double yhat = loss.link(uniform(local, 0.05, 0.8));
      record(r, std::abs(savage_residual(loss, eta, yhat, br1)));
    }
  }
  return finish(r);
}

CheckResult check_diamond(Rng rng, int n) {
  CheckResult r = make_result("diamond_identity", 1e-10);
  UnitIntervalMap ent{
      [](double u) { return (u > 0.0 ? u * std::log(u) : 0.0) + (1.0 - u) * std::log1p(-u); },
      [](double u) { return std::log(u) - std::log1p(-u); },
      [](double u) { return 1.0 / (u * (1.0 - u)); }};
  BregmanGenerator dia = diamond_transform(ent);
  for (int i = 0; i < n; ++i) {
    double x = uniform(rng, 0.0, 10.0), y = uniform(rng, 0.0, 10.0);
    double lhs = (1.0 + x) * bregman_gap(ent.f, ent.f1, x / (1.0 + x), y / (1.0 + y));
    double rhs = bregman_gap(dia.phi, dia.phi1, x, y);
    record(r, std::abs(lhs - rhs));
  }
  return finish(r);
}

CheckResult check_properness() {
  CheckResult r = make_result("properness", 1e-6);
  for (const auto& ng : checked_generators()) {
    CompositeLoss loss = family_loss(ng);
    for (int i = 1; i <= 99; ++i) {
      double eta = 0.01 * i;
      record(r, std::abs(loss.inv_link(properness_minimizer(loss, eta)) - eta));
    }
  }
  return finish(r);
}

CheckResult check_bfgs_linear_solve(Rng rng, int n_problems) {
  CheckResult r = make_result("bfgs_vs_linear_solve", 1e-8);
  for (int t = 0; t < n_problems; ++t) {
    int n = 2 + t % 9;
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      b[i] = uniform(rng, -1.0, 1.0);
      for (int j = 0; j < n; ++j) M(i, j) = uniform(rng, -1.0, 1.0);
    }
    Eigen::MatrixXd A = M.transpose() * M + Eigen::MatrixXd::Identity(n, n);
    Objective obj = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      g = A * x - b;
      return 0.5 * x.dot(A * x) - b.dot(x);
    };
    BfgsOptions opt;
    opt.max_iter = 500;
    opt.grad_tol = 1e-12;
    Eigen::VectorXd x = bfgs(obj, Eigen::VectorXd::Zero(n), opt).x;
    Eigen::VectorXd exact = A.llt().solve(b);
    record(r, (x - exact).lpNorm<Eigen::Infinity>());
  }
  return finish(r);
}

CheckResult check_kulsif_closed_form(Rng rng) {
  CheckResult r = make_result("kulsif_closed_form", 1e-6);
  GaussianPair gp = gaussian_pair(1.0, 0.5, 0.0, 1.0);
  for (int t = 0; t < 3; ++t) {
    Rng local = rng.substream("kulsif-" + std::to_string(t));
    Rng sp = local.substream("p"), sq = local.substream("q");
    SampleSet s{column_points(gp.sample(Which::P, 10, sp)), column_points(gp.sample(Which::Q, 10, sq))};
    KernelSpec k = KernelSpec::gaussian(median_heuristic(s.pooled()));
    FitOptions opt;
    opt.bfgs.max_iter = 5000;
    opt.bfgs.grad_tol = 1e-12;
    double alpha = 1e-2;
    RatioModel a = fit(s, make_family_loss("kulsif"), k, alpha, opt);
    RatioModel b = fit_kulsif_closed_form(s, k, alpha);
    Points X = s.pooled();
    record(r, (predict_ratio_raw(a, X) - predict_ratio_raw(b, X)).lpNorm<Eigen::Infinity>());
  }
  return finish(r);
}

CheckResult check_risk_gradient(Rng rng) {
  CheckResult r = make_result("risk_gradient", 1e-5);
  GaussianPair gp = gaussian_pair(1.0, 0.5, 0.0, 1.0);
  Rng sp = rng.substream("p"), sq = rng.substream("q"), sc = rng.substream("c");
  SampleSet s{column_points(gp.sample(Which::P, 10, sp)), column_points(gp.sample(Which::Q, 10, sq))};
  Points X = s.pooled();
  Eigen::MatrixXd G = gram(KernelSpec::gaussian(median_heuristic(X)), X, X);
  Eigen::VectorXd labels = s.labels();
  for (const auto& ng : checked_generators()) {
    CompositeLoss loss = family_loss(ng);
    Objective obj = [&](const Eigen::VectorXd& c, Eigen::VectorXd& g) {
      return empirical_risk(loss, G, labels, c, 1e-3, &g);
    };
    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd c(X.rows());
      for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = uniform(sc, 0.0, 0.2);
      if (ng.name == "lr" || ng.name == "boost") c.array() -= 0.1;
      record(r, grad_check(obj, c, 1e-6));
    }
  }
  return finish(r);
}

std::vector<CheckResult> run_identity_checks(std::uint64_t seed) {
  Rng root(seed);
  return {
      check_excess_risk(root.substream("excess")),
      check_classical_recovery(),
      check_closed_form_estimators(),
      check_convexity_slacks(),
      check_loss_curvature(),
      check_weight_representation(root.substream("weights")),
      check_shuford(root.substream("shuford")),
      check_savage(root.substream("savage")),
      check_diamond(root.substream("diamond")),
      check_properness(),
      check_bfgs_linear_solve(root.substream("bfgs")),
      check_kulsif_closed_form(root.substream("kulsif")),
      check_risk_gradient(root.substream("gradient")),
  };
}

}  // namespace bregman
