#include "polygrad/targets.hpp"

#include "polygrad/envs.hpp"
#include "polygrad/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace polygrad;

TEST(QBootstrap, Examples) {
  Vector theta = Vector::Zero(4);
  theta[2] = 5.0;
  theta[3] = 1.0;
  const TabularLogitsModel model(2, 2, theta);
  EXPECT_EQ(q_bootstrap_target(model, {0, 0, 10.0, 1, true, 0.0}, 0.9), 10.0);
  EXPECT_DOUBLE_EQ(q_bootstrap_target(model, {0, 0, 0.0, 1, false, 0.0}, 0.9), 4.5);
  EXPECT_EQ(q_bootstrap_target(model, {0, 1, 0.3, 1, false, 0.0}, 0.0), 0.3);
}

TEST(Sarsa, UsesTakenAction) {
  Vector theta = Vector::Zero(4);
  theta[2] = 5.0;
  theta[3] = 1.0;
  const TabularLogitsModel model(2, 2, theta);
  EXPECT_DOUBLE_EQ(sarsa_target(model, {0, 0, 0.0, 1, false, 0.0}, 1, 0.9), 0.9);
  EXPECT_EQ(sarsa_target(model, {0, 0, 2.0, 1, true, 0.0}, 0, 0.9), 2.0);
}

TEST(MonteCarlo, Examples) {
  EXPECT_EQ(monte_carlo_returns({{0, 0, 3.0, 0, true, 0.0}}, 0.9), std::vector<double>{3.0});
  const std::vector<Transition> ep{{0, 0, 0.0, 1, false, 0.0}, {1, 0, 0.0, 2, false, 0.0}, {2, 0, 10.0, 3, true, 0.0}};
  const auto g = monte_carlo_returns(ep, 0.9);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_NEAR(g[0], 8.1, 1e-12);
  EXPECT_NEAR(g[1], 9.0, 1e-12);
  EXPECT_NEAR(g[2], 10.0, 1e-12);
  const auto g0 = monte_carlo_returns(ep, 0.0);
  EXPECT_EQ(g0, (std::vector<double>{0.0, 0.0, 10.0}));
  EXPECT_THROW(monte_carlo_returns({{0, 0, 1.0, 0, false, 0.0}}, 0.9), std::invalid_argument);
}

TEST(MonteCarlo, MatchesDoubleLoop) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 50; ++k) {
    const int len = 1 + k % 20;
    std::vector<Transition> ep(len);
    for (int t = 0; t < len; ++t) ep[t] = {0, 0, u(rng), 0, t == len - 1, 0.0};
    const double gamma = 0.05 * (k % 20);
    const auto g = monte_carlo_returns(ep, gamma);
    for (int t = 0; t < len; ++t) {
      double direct = 0.0;
      for (int j = t; j < len; ++j) direct += std::pow(gamma, j - t) * ep[j].r;
      EXPECT_NEAR(g[t], direct, 1e-12);
    }
  }
}

TEST(Critic, TargetAndTerminal) {
  Critic critic(3, 0.9, 0.1);
  EXPECT_EQ(critic.target({0, 0, 1.0, 1, false, 0.0}), 1.0);
  critic.values()[1] = 7.0;
  EXPECT_EQ(critic.target({0, 0, 1.0, 1, true, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(critic_target(critic, {0, 0, 1.0, 1, false, 0.0}), 1.0 + 0.9 * 7.0);
  EXPECT_THROW(Critic(2, 1.0, 0.1), std::invalid_argument);
}

TEST(Critic, SelfLoopConvergesToGeometricSum) {
  Critic critic(1, 0.9, 0.5);
  for (int i = 0; i < 2000; ++i) critic_td0_update(critic, {0, 0, 1.0, 0, false, 0.0});
  EXPECT_NEAR(critic.values()[0], 10.0, 1e-3);
}

TEST(Critic, MatchesOracleOnDeterministicChain) {
  // Deterministic transitions and a deterministic policy make TD(0) noise free.
  Rng rng(12);
  const int n = 6;
  TabularMdp mdp = random_mdp(rng, n, 2, 0.8);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<int> next(n);
  for (int s = 0; s < n; ++s) {
    next[s] = pick(rng);
    for (auto& p : mdp.transition) p.row(s).setZero();
    for (auto& p : mdp.transition) p(s, next[s]) = 1.0;
  }
  Matrix policy = Matrix::Zero(n, 2);
  policy.col(0).setOnes();
  const ExactPolicyEval exact = policy_eval_exact(mdp, policy);

  Critic critic(n, mdp.gamma, 0.5);
  for (int sweep = 0; sweep < 500; ++sweep) {
    for (int s = 0; s < n; ++s) critic.td0_update({s, 0, mdp.reward(s, 0), next[s], false, 0.0});
  }
  EXPECT_LE((critic.values() - exact.v_pi).lpNorm<Eigen::Infinity>(), 1e-3);
}

TEST(Estimator, Validation) {
  EXPECT_EQ(discount_of(TargetEstimator{QBootstrapTarget{0.9}}), 0.9);
  EXPECT_EQ(discount_of(TargetEstimator{CriticTarget{0.5, 0.1}}), 0.5);
  EXPECT_NO_THROW(validate(TargetEstimator{MonteCarloTarget{0.0}}));
  EXPECT_THROW(validate(TargetEstimator{SarsaBootstrapTarget{1.0}}), std::invalid_argument);
  EXPECT_THROW(validate(TargetEstimator{CriticTarget{0.9, -1.0}}), std::invalid_argument);
}
