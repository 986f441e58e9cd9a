#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bregman/synth.hpp"

namespace bregman {

struct CheckResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  int evaluations = 0;
  bool passed = false;
};

// Each check returns the worst residual over its evaluations. Residuals
// that must stay above a floor (convexity) are reported negated, so every
// check passes when max_residual <= tolerance.
CheckResult check_excess_risk(Rng rng, int n_pairs = 200);
CheckResult check_classical_recovery();
CheckResult check_closed_form_estimators();
CheckResult check_convexity_slacks();
CheckResult check_loss_curvature();
CheckResult check_weight_representation(Rng rng, int per_generator = 100);
CheckResult check_shuford(Rng rng, int per_family = 100);
CheckResult check_savage(Rng rng, int per_family = 100);
CheckResult check_diamond(Rng rng, int n = 100);
CheckResult check_properness();
CheckResult check_bfgs_linear_solve(Rng rng, int n_problems = 20);
CheckResult check_kulsif_closed_form(Rng rng);
CheckResult check_risk_gradient(Rng rng);

std::vector<CheckResult> run_identity_checks(std::uint64_t seed);

// Builtin generators exercised by the checks: kulsif, lr, klest, boost,
// poly(0), poly(1), poly(6), ew.
struct NamedGenerator {
  std::string label;
  std::string name;
  double k;
};
const std::vector<NamedGenerator>& checked_generators();

}  // namespace bregman
