#pragma once

#include "polygrad/envs.hpp"
#include "polygrad/updates.hpp"

namespace polygrad {

/// Exact evaluation of a fixed policy. d_mu is the (1 - gamma)-normalised
/// discounted state visitation from mu, and j_mu = E_{(s,a)~d_mu pi}[r(s, a)].
struct ExactPolicyEval {
  Matrix q_pi;
  Vector v_pi;
  Vector d_mu;
  double j_mu = 0.0;

  /// mu^T V = j_mu / (1 - gamma).
  double discounted_return(double gamma) const { return j_mu / (1.0 - gamma); }
};

/// policy is n_states x n_actions with rows summing to one.
ExactPolicyEval policy_eval_exact(const TabularMdp& mdp, const Matrix& policy);

/// Iterative policy evaluation, independent of the linear solve.
Vector policy_eval_iterative(const TabularMdp& mdp, const Matrix& policy, double tol = 1e-13);

/// Optimal state values by value iteration.
Vector optimal_values(const TabularMdp& mdp, double tol = 1e-12);

/// sum_{s,a} d_mu(s) pi(a | s) G_rule(s, a) with the target fixed to Q^pi and
/// on-policy sampling (delta_o = 0).
Vector exact_expected_update(const TabularMdp& mdp, const TabularLogitsModel& model, const UpdateRule& rule);

/// Central differences of j_mu with respect to every logit.
Vector finite_diff_objective_grad(const TabularMdp& mdp, const TabularLogitsModel& model, double h = 1e-5);

/// sum_{s,a} d_mu(s) pi(a | s) Q^pi(s, a) grad log pi(a | s).
Vector classical_policy_gradient(const TabularMdp& mdp, const TabularLogitsModel& model);

}  // namespace polygrad
