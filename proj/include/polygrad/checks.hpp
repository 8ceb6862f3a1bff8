#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace polygrad {

/// Outcome of one property or theorem check. worst is the largest error seen
/// (in the units the tolerance is expressed in).
struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string detail;
};

// Expected PGPB update under d_mu pi equals the finite-difference gradient of J.
CheckResult check_pgpb_unbiased(int n_mdps = 20, std::uint64_t seed = 1);
// Form-axis identities, sample by sample.
CheckResult check_form_identities(int n_draws = 1000, std::uint64_t seed = 2);
// grad H + grad E[q-hat] = 0, and grad H against finite differences.
CheckResult check_entropy_identity(int n_draws = 200, std::uint64_t seed = 3);
// Clipped-surrogate gradient equals the Pi-form update with the PPO scale.
CheckResult check_ppo_equivalence(int n_points = 1000, std::uint64_t seed = 4);
// Scale-function constraints on the default grid.
CheckResult check_scale_constraints();
// Expected MSE / MVE updates are semi-gradients of their objectives.
CheckResult check_value_objectives(int n_mdps = 10, std::uint64_t seed = 5);

/// All of the above, in a fixed order.
std::vector<CheckResult> run_theorem_checks();

std::string format_check(const CheckResult& r);

}  // namespace polygrad
