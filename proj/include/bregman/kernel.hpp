#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bregman {

// Points are stored as rows.
using Points = Eigen::MatrixXd;

struct KernelSpec {
  enum class Kind { gaussian, polynomial };
  Kind kind = Kind::gaussian;
  double sigma = 1.0;
  int degree = 5;
  double offset = 1.0;

  static KernelSpec gaussian(double sigma);
  static KernelSpec polynomial(int degree, double offset = 1.0);
  void validate() const;
  std::string kind_name() const;
};

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                   const Eigen::Ref<const Eigen::RowVectorXd>& y);

Eigen::MatrixXd gram(const KernelSpec& spec, const Points& X, const Points& Y);

// Median of pairwise Euclidean distances over i < j.
double median_heuristic(const Points& X);

// Stacks two point sets with equal column counts.
Points stack_points(const Points& a, const Points& b);

// n x 1 point matrix from scalar values.
Points column_points(const std::vector<double>& xs);

}  // namespace bregman
