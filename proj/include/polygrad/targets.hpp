#pragma once

#include "polygrad/policy_models.hpp"

#include <variant>
#include <vector>

namespace polygrad {

/// One experience sample.
struct Transition {
  int s = 0;
  int a = 0;
  double r = 0.0;
  int s_next = 0;
  bool terminal = false;
  double behavior_logprob = 0.0;

  bool operator==(const Transition&) const = default;
};

/// r + gamma * max_u q(s', u); the bootstrap term is dropped on terminal steps.
double q_bootstrap_target(const TabularLogitsModel& model, const Transition& t, double gamma);

/// r + gamma * q(s', a'), where a' is the action taken at s'.
double sarsa_target(const TabularLogitsModel& model, const Transition& t, int next_action, double gamma);

/// Discounted returns of a terminated episode, computed backwards.
std::vector<double> monte_carlo_returns(const std::vector<Transition>& episode, double gamma);

/// Tabular state-value critic trained by TD(0).
class Critic {
 public:
  Critic(Eigen::Index n_states, double gamma, double lr);

  double gamma() const { return gamma_; }
  double lr() const { return lr_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }

  /// r + gamma * V(s') * (1 - terminal).
  double target(const Transition& t) const;
  /// V(s) <- V(s) + lr * (target - V(s)).
  void td0_update(const Transition& t);

 private:
  Vector values_;
  double gamma_;
  double lr_;
};

inline double critic_target(const Critic& critic, const Transition& t) { return critic.target(t); }
inline void critic_td0_update(Critic& critic, const Transition& t) { critic.td0_update(t); }

struct MonteCarloTarget {
  double gamma;
};
struct QBootstrapTarget {
  double gamma;
};
struct SarsaBootstrapTarget {
  double gamma;
};
struct CriticTarget {
  double gamma;
  double critic_lr;
};

using TargetEstimator = std::variant<MonteCarloTarget, QBootstrapTarget, SarsaBootstrapTarget, CriticTarget>;

double discount_of(const TargetEstimator& estimator);
void validate(const TargetEstimator& estimator);

}  // namespace polygrad
