#include "bregman/quadrature.hpp"

#include "bregman/errors.hpp"

namespace bregman {

QuadratureRule simpson_rule(double a, double b, int n_nodes) {
  if (n_nodes < 3 || n_nodes % 2 == 0) {
    throw UsageError("simpson: node count must be odd and >= 3, got " +
                     std::to_string(n_nodes));
  }
  QuadratureRule rule;
  rule.nodes.resize(n_nodes);
  rule.weights.resize(n_nodes);
  const double h = (b - a) / (n_nodes - 1);
  for (int i = 0; i < n_nodes; ++i) {
    rule.nodes[i] = (i == n_nodes - 1) ? b : a + i * h;
    double w = (i == 0 || i == n_nodes - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    rule.weights[i] = w * h / 3.0;
  }
  return rule;
}

double simpson(const std::function<double(double)>& f, double a, double b,
               int n_nodes) {
  QuadratureRule rule = simpson_rule(a, b, n_nodes);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    total += rule.weights[i] * f(rule.nodes[i]);
  }
  return total;
}

}  // namespace bregman
