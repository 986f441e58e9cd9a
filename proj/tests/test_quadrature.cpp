#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "bregman/errors.hpp"
#include "bregman/quadrature.hpp"

using namespace bregman;

TEST(Simpson, ExactOnCubics) {
  double v = simpson([](double x) { return x * x * x - 2.0 * x + 1.0; }, 0.0, 2.0, 3);
  EXPECT_NEAR(v, 4.0 - 4.0 + 2.0, 1e-14);
}

TEST(Simpson, HalvingSpacingCutsErrorBySixteen) {
  auto f = [](double x) { return std::exp(x); };
  double exact = std::exp(1.0) - 1.0;
  double e1 = std::abs(simpson(f, 0.0, 1.0, 11) - exact);
  double e2 = std::abs(simpson(f, 0.0, 1.0, 21) - exact);
  EXPECT_GT(e1 / e2, 14.0);
  EXPECT_LT(e1 / e2, 17.0);
}

TEST(Simpson, RuleWeightsSumToLength) {
  QuadratureRule r = simpson_rule(-1.0, 2.5, 101);
  ASSERT_EQ(r.nodes.size(), 101u);
  EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), 3.5, 1e-13);
  EXPECT_DOUBLE_EQ(r.nodes.front(), -1.0);
  EXPECT_DOUBLE_EQ(r.nodes.back(), 2.5);
}

TEST(Simpson, RejectsBadNodeCounts) {
  auto f = [](double x) { return x; };
  EXPECT_THROW(simpson(f, 0.0, 1.0, 4), UsageError);
  EXPECT_THROW(simpson(f, 0.0, 1.0, 1), UsageError);
  EXPECT_THROW(simpson_rule(0.0, 1.0, 10), UsageError);
}
