#pragma once

#include <functional>
#include <vector>

namespace bregman {

// Composite Simpson rule on [a, b] with an odd number of nodes (>= 3).
double simpson(const std::function<double(double)>& f, double a, double b,
               int n_nodes);

// Nodes and weights of the same rule, for callers that vectorise.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule simpson_rule(double a, double b, int n_nodes);

}  // namespace bregman
