#include "polygrad/targets.hpp"

#include <cmath>
#include <stdexcept>

namespace polygrad {

namespace {

void require_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
}

}  // namespace

double q_bootstrap_target(const TabularLogitsModel& model, const Transition& t, double gamma) {
  require_gamma(gamma);
  if (t.terminal) return t.r;
  return t.r + gamma * model.logits(t.s_next).maxCoeff();
}

double sarsa_target(const TabularLogitsModel& model, const Transition& t, int next_action, double gamma) {
  require_gamma(gamma);
  if (t.terminal) return t.r;
  return t.r + gamma * model.q(t.s_next, next_action);
}

std::vector<double> monte_carlo_returns(const std::vector<Transition>& episode, double gamma) {
  require_gamma(gamma);
  if (episode.empty() || !episode.back().terminal) {
    throw std::invalid_argument("Monte Carlo returns need a terminated episode");
  }
  std::vector<double> returns(episode.size());
  double g = 0.0;
  for (std::size_t k = episode.size(); k-- > 0;) {
    g = episode[k].r + gamma * g;
    returns[k] = g;
  }
  return returns;
}

Critic::Critic(Eigen::Index n_states, double gamma, double lr)
    : values_(Vector::Zero(n_states)), gamma_(gamma), lr_(lr) {
  require_gamma(gamma);
  if (!(lr > 0.0)) throw std::invalid_argument("critic learning rate must be positive");
}

double Critic::target(const Transition& t) const {
  return t.r + (t.terminal ? 0.0 : gamma_ * values_[t.s_next]);
}

void Critic::td0_update(const Transition& t) {
  const double tgt = target(t);
  values_[t.s] += lr_ * (tgt - values_[t.s]);
}

double discount_of(const TargetEstimator& estimator) {
  return std::visit([](const auto& e) { return e.gamma; }, estimator);
}

void validate(const TargetEstimator& estimator) {
  require_gamma(discount_of(estimator));
  if (const auto* c = std::get_if<CriticTarget>(&estimator); c && !(c->critic_lr > 0.0)) {
    throw std::invalid_argument("critic learning rate must be positive");
  }
}

}  // namespace polygrad
