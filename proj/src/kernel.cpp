#include "bregman/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bregman/errors.hpp"

namespace bregman {

KernelSpec KernelSpec::gaussian(double sigma) {
  KernelSpec k;
  k.kind = Kind::gaussian;
  k.sigma = sigma;
  k.validate();
  return k;
}

KernelSpec KernelSpec::polynomial(int degree, double offset) {
  KernelSpec k;
  k.kind = Kind::polynomial;
  k.degree = degree;
  k.offset = offset;
  k.validate();
  return k;
}

void KernelSpec::validate() const {
  if (kind == Kind::gaussian && !(sigma > 0.0)) throw UsageError("gaussian kernel needs sigma > 0");
  if (kind == Kind::polynomial && degree < 1) throw UsageError("polynomial kernel needs degree >= 1");
}

std::string KernelSpec::kind_name() const {
  return kind == Kind::gaussian ? "gaussian" : "polynomial";
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                   const Eigen::Ref<const Eigen::RowVectorXd>& y) {
  if (x.size() != y.size()) throw UsageError("kernel_eval: dimension mismatch");
  if (spec.kind == KernelSpec::Kind::gaussian) {
    return std::exp(-(x - y).squaredNorm() / (2.0 * spec.sigma * spec.sigma));
  }
  double base = spec.offset + x.dot(y);
  double r = 1.0;
  for (int i = 0; i < spec.degree; ++i) r *= base;
  return r;
}

Eigen::MatrixXd gram(const KernelSpec& spec, const Points& X, const Points& Y) {
  if (X.cols() != Y.cols()) throw UsageError("gram: dimension mismatch");
  Eigen::MatrixXd G(X.rows(), Y.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < Y.rows(); ++j) G(i, j) = kernel_eval(spec, X.row(i), Y.row(j));
  }
  return G;
}

double median_heuristic(const Points& X) {
  if (X.rows() < 2) throw UsageError("median_heuristic: need at least two points");
  std::vector<double> d;
  d.reserve(X.rows() * (X.rows() - 1) / 2);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < X.rows(); ++j) d.push_back((X.row(i) - X.row(j)).norm());
  }
  std::sort(d.begin(), d.end());
  std::size_t m = d.size();
  double med = (m % 2 == 1) ? d[m / 2] : 0.5 * (d[m / 2 - 1] + d[m / 2]);
  if (d.back() == 0.0) throw UsageError("median_heuristic: all pairwise distances are zero");
  if (!(med > 0.0)) throw NumericError("median_heuristic: median distance is zero");
  return med;
}

Points stack_points(const Points& a, const Points& b) {
  if (a.rows() > 0 && b.rows() > 0 && a.cols() != b.cols()) {
    throw UsageError("stack_points: dimension mismatch");
  }
  Points out(a.rows() + b.rows(), std::max(a.cols(), b.cols()));
  if (a.rows() > 0) out.topRows(a.rows()) = a;
  if (b.rows() > 0) out.bottomRows(b.rows()) = b;
  return out;
}

Points column_points(const std::vector<double>& xs) {
  Points out(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) out(static_cast<Eigen::Index>(i), 0) = xs[i];
  return out;
}

}  // namespace bregman
