#include "polygrad/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace polygrad {

namespace {

void check_policy(const TabularMdp& mdp, const Matrix& policy) {
  mdp.validate();
  if (policy.rows() != mdp.n_states() || policy.cols() != mdp.n_actions()) {
    throw std::invalid_argument("policy matrix shape does not match the MDP");
  }
  if (((policy.rowwise().sum().array() - 1.0).abs() > 1e-10).any()) {
    throw std::invalid_argument("policy rows must sum to 1");
  }
}

Matrix state_transition(const TabularMdp& mdp, const Matrix& policy) {
  Matrix p = Matrix::Zero(mdp.n_states(), mdp.n_states());
  for (Eigen::Index a = 0; a < mdp.n_actions(); ++a) {
    p += policy.col(a).asDiagonal() * mdp.transition[a];
  }
  return p;
}

Vector solve_checked(const Matrix& a, const Vector& b) {
  Eigen::PartialPivLU<Matrix> lu(a);
  Vector x = lu.solve(b);
  if (!x.allFinite() || (a * x - b).lpNorm<Eigen::Infinity>() > 1e-8 * (1.0 + b.lpNorm<Eigen::Infinity>())) {
    throw std::runtime_error("singular policy evaluation system");
  }
  return x;
}

Matrix q_from_v(const TabularMdp& mdp, const Vector& v) {
  Matrix q(mdp.n_states(), mdp.n_actions());
  for (Eigen::Index a = 0; a < mdp.n_actions(); ++a) {
    q.col(a) = mdp.reward.col(a) + mdp.gamma * mdp.transition[a] * v;
  }
  return q;
}

}  // namespace

ExactPolicyEval policy_eval_exact(const TabularMdp& mdp, const Matrix& policy) {
  check_policy(mdp, policy);
  const Eigen::Index n = mdp.n_states();
  const Matrix p_pi = state_transition(mdp, policy);
  const Vector r_pi = (policy.array() * mdp.reward.array()).rowwise().sum();
  const Matrix lhs = Matrix::Identity(n, n) - mdp.gamma * p_pi;

  ExactPolicyEval out;
  out.v_pi = solve_checked(lhs, r_pi);
  out.q_pi = q_from_v(mdp, out.v_pi);
  out.d_mu = (1.0 - mdp.gamma) * solve_checked(lhs.transpose(), mdp.mu);
  out.j_mu = (out.d_mu.asDiagonal() * (policy.array() * mdp.reward.array()).matrix()).sum();
  return out;
}

Vector policy_eval_iterative(const TabularMdp& mdp, const Matrix& policy, double tol) {
  check_policy(mdp, policy);
  const Matrix p_pi = state_transition(mdp, policy);
  const Vector r_pi = (policy.array() * mdp.reward.array()).rowwise().sum();
  Vector v = Vector::Zero(mdp.n_states());
  for (int it = 0; it < 1000000; ++it) {
    Vector next = r_pi + mdp.gamma * p_pi * v;
    const double diff = (next - v).lpNorm<Eigen::Infinity>();
    v = std::move(next);
    if (diff < tol) return v;
  }
  throw std::runtime_error("iterative policy evaluation did not converge");
}

Vector optimal_values(const TabularMdp& mdp, double tol) {
  mdp.validate();
  Vector v = Vector::Zero(mdp.n_states());
  for (int it = 0; it < 1000000; ++it) {
    Vector next = q_from_v(mdp, v).rowwise().maxCoeff();
    const double diff = (next - v).lpNorm<Eigen::Infinity>();
    v = std::move(next);
    if (diff < tol) return v;
  }
  throw std::runtime_error("value iteration did not converge");
}

Vector exact_expected_update(const TabularMdp& mdp, const TabularLogitsModel& model, const UpdateRule& rule) {
  const Matrix pi = model.policy_matrix();
  const ExactPolicyEval eval = policy_eval_exact(mdp, pi);
  Vector total = Vector::Zero(model.n_params());
  for (Eigen::Index s = 0; s < mdp.n_states(); ++s) {
    if (eval.d_mu[s] == 0.0) continue;
    const LogitSlice slice = model.slice(s);
    for (Eigen::Index a = 0; a < mdp.n_actions(); ++a) {
      const auto signals = LearningSignals::on_policy(eval.q_pi(s, a) - model.q(s, a));
      total += eval.d_mu[s] * pi(s, a) * rule.estimate(slice, a, signals).values;
    }
  }
  return total;
}

Vector finite_diff_objective_grad(const TabularMdp& mdp, const TabularLogitsModel& model, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  TabularLogitsModel probe = model;
  Vector grad(model.n_params());
  for (Eigen::Index i = 0; i < model.n_params(); ++i) {
    const double base = model.params()[i];
    probe.params()[i] = base + h;
    const double up = policy_eval_exact(mdp, probe.policy_matrix()).j_mu;
    probe.params()[i] = base - h;
    const double down = policy_eval_exact(mdp, probe.policy_matrix()).j_mu;
    probe.params()[i] = base;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

Vector classical_policy_gradient(const TabularMdp& mdp, const TabularLogitsModel& model) {
  const Matrix pi = model.policy_matrix();
  const ExactPolicyEval eval = policy_eval_exact(mdp, pi);
  Vector total = Vector::Zero(model.n_params());
  for (Eigen::Index s = 0; s < mdp.n_states(); ++s) {
    const LogitSlice slice = model.slice(s);
    for (Eigen::Index a = 0; a < mdp.n_actions(); ++a) {
      total += eval.d_mu[s] * pi(s, a) * eval.q_pi(s, a) * grad_log_pi(slice, a);
    }
  }
  return total;
}

}  // namespace polygrad
