#include "bregman/optim.hpp"

#include <cmath>
#include <sstream>

#include "bregman/errors.hpp"

namespace bregman {

std::string to_string(OptimStatus s) {
  switch (s) {
    case OptimStatus::converged: return "converged";
    case OptimStatus::max_iter: return "max_iter";
    case OptimStatus::line_search_failed: return "line_search_failed";
  }
  return "unknown";
}

namespace {

std::string describe(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index i = 0; i < x.size() && i < 8; ++i) os << (i ? ", " : "") << x[i];
  if (x.size() > 8) os << ", ...";
  os << "]";
  return os.str();
}

}  // namespace

OptimResult bfgs(const Objective& obj, const Eigen::VectorXd& x0, const BfgsOptions& opt) {
  const Eigen::Index n = x0.size();
  OptimResult res;
  res.x = x0;
  Eigen::VectorXd g(n);
  res.f = obj(res.x, g);
  if (!std::isfinite(res.f) || !g.allFinite()) {
    throw NumericError("bfgs: objective not finite at the start " + describe(x0));
  }
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd x_new(n), g_new(n);

  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    if (g.lpNorm<Eigen::Infinity>() < opt.grad_tol) {
      res.status = OptimStatus::converged;
      return res;
    }
    Eigen::VectorXd p = -H * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      H.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
    }

    double t = 1.0, f_new = 0.0;
    bool accepted = false;
    for (int k = 0; k <= opt.max_halvings; ++k) {
      x_new = res.x + t * p;
      if (x_new == res.x) break;  // step below rounding: no decrease possible
      f_new = obj(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= res.f + opt.armijo_c * t * slope) {
        accepted = true;
        break;
      }
      t *= opt.shrink;
    }
    if (!accepted) {
      res.status = OptimStatus::line_search_failed;
      return res;
    }
    if (!g_new.allFinite()) {
      throw NumericError("bfgs: non-finite gradient at " + describe(x_new));
    }

    Eigen::VectorXd s = x_new - res.x;
    Eigen::VectorXd y = g_new - g;
    double sy = s.dot(y);
    if (sy > opt.curvature_eps * s.norm() * y.norm()) {
      double rho = 1.0 / sy;
      Eigen::VectorXd Hy = H * y;
      double yHy = y.dot(Hy);
      H += (rho * rho * yHy + rho) * (s * s.transpose()) -
           rho * (Hy * s.transpose() + s * Hy.transpose());
    }
    res.x = x_new;
    res.f = f_new;
    g = g_new;
  }
  res.status = g.lpNorm<Eigen::Infinity>() < opt.grad_tol ? OptimStatus::converged
                                                          : OptimStatus::max_iter;
  return res;
}

double grad_check(const Objective& obj, const Eigen::VectorXd& x, double h) {
  if (!(h > 0.0)) throw UsageError("grad_check: h must be positive");
  Eigen::VectorXd g(x.size()), scratch(x.size());
  double f0 = obj(x, g);
  if (!std::isfinite(f0) || !g.allFinite()) throw NumericError("grad_check: non-finite evaluation");
  double worst = 0.0;
  Eigen::VectorXd xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    double fp = obj(xp, scratch), fm = obj(xm, scratch);
    xp[i] = xm[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericError("grad_check: non-finite evaluation");
    }
    double num = (fp - fm) / (2.0 * h);
    double denom = std::max(1.0, std::abs(num));
    worst = std::max(worst, std::abs(num - g[i]) / denom);
  }
  return worst;
}

}  // namespace bregman
