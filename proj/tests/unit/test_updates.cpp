#include "polygrad/updates.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace polygrad;

namespace {

Vector randn(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Vector v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Directly coded on-policy estimators for a tabular softmax row.
Vector g_mse(const TabularLogitsModel& m, int s, int a, double delta_r) {
  Vector g = Vector::Zero(m.n_params());
  g[m.index(s, a)] = delta_r;
  return g;
}

Vector g_mve(const TabularLogitsModel& m, int s, int a, double delta_r) {
  const Vector pi = m.softmax_policy(s);
  Vector g = Vector::Zero(m.n_params());
  for (int u = 0; u < m.n_actions(); ++u) g[m.index(s, u)] = -delta_r * pi[u];
  g[m.index(s, a)] += delta_r;
  return g;
}

Vector g_pgpb(const TabularLogitsModel& m, int s, int a, double delta_r) {
  const Vector pi = m.softmax_policy(s);
  const Vector logits = m.logits(s);
  const double mean_q = pi.dot(logits);
  Vector g = g_mve(m, s, a, delta_r);
  for (int u = 0; u < m.n_actions(); ++u) g[m.index(s, u)] += pi[u] * (logits[u] - mean_q);
  return g;
}

}  // namespace

TEST(Signals, Examples) {
  TabularLogitsModel model(1, 4);
  const LogitSlice s = model.slice(0);
  const LearningSignals on = compute_signals(s, 2, s.logits[2], std::log(0.25));
  EXPECT_EQ(on.delta_r(), 0.0);
  EXPECT_NEAR(on.delta_o(), 0.0, 1e-15);
  const LearningSignals off = compute_signals(s, 0, 1.0, std::log(1.0 / 8.0));
  EXPECT_NEAR(off.delta_o(), std::log(2.0), 1e-15);
  EXPECT_THROW(compute_signals(s, 0, std::nan(""), 0.0), std::invalid_argument);
  EXPECT_THROW(compute_signals(s, 0, 0.0, -INFINITY), std::invalid_argument);
}

TEST(UpdateQ, OneHot) {
  TabularLogitsModel model(3, 2);
  const LogitSlice s = model.slice(1);
  EXPECT_TRUE(update_q(s, 0, 0.0).isZero());
  const Vector g = update_q(s, 1, 2.0);
  for (Eigen::Index i = 0; i < g.size(); ++i) EXPECT_EQ(g[i], i == model.index(1, 1) ? 2.0 : 0.0);
  EXPECT_THROW(update_q(s, 0, INFINITY), std::invalid_argument);
}

TEST(UpdateV, CenteredAndRowSumZero) {
  TabularLogitsModel model(2, 2);
  const Vector g = update_v(model.slice(0), 0, 1.0);
  EXPECT_DOUBLE_EQ(g[model.index(0, 0)], 0.5);
  EXPECT_DOUBLE_EQ(g[model.index(0, 1)], -0.5);
  EXPECT_EQ(g[model.index(1, 0)], 0.0);

  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    const TabularLogitsModel m(2, 5, randn(rng, 10));
    const LogitSlice sl = m.slice(1);
    const double f = randn(rng, 1)[0];
    const Vector v = update_v(sl, k % 5, f);
    EXPECT_NEAR(v.segment(m.index(1, 0), 5).sum(), 0.0, 1e-12);
    EXPECT_LE((v - update_q(sl, k % 5, f) + f * expected_grad_q(sl)).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(UpdateP, EntropyOffset) {
  TabularLogitsModel uniform(1, 3);
  const LogitSlice su = uniform.slice(0);
  EXPECT_LE((update_p(su, 1, 0.7) - update_v(su, 1, 0.7)).lpNorm<Eigen::Infinity>(), 1e-15);

  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const TabularLogitsModel m(1, 4, randn(rng, 4));
    const LogitSlice sl = m.slice(0);
    const double f = randn(rng, 1)[0];
    const Vector diff = update_p(sl, k % 4, f) - update_v(sl, k % 4, f);
    EXPECT_LE((diff + entropy_grad(sl)).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LE((diff - grad_expected_qhat(sl)).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LE((update_p(sl, 0, 0.0) + entropy_grad(sl)).lpNorm<Eigen::Infinity>(), 1e-15);
  }
}

TEST(UpdatePi, DiscreteAndGaussian) {
  std::mt19937_64 rng(3);
  const TabularLogitsModel m(1, 4, randn(rng, 4));
  const LogitSlice sl = m.slice(0);
  EXPECT_EQ(update_pi(sl, 2, 0.3, 0.0), update_v(sl, 2, 0.3));
  EXPECT_LE((update_pi(sl, 2, 0.0, 1.0) - entropy_grad(sl)).lpNorm<Eigen::Infinity>(), 1e-15);

  const GaussianPolicy1D g(0.5, 0.2);
  EXPECT_EQ(update_pi(g, 0.5, 1.3, 0.0)[0], 0.0);
  EXPECT_EQ(update_pi(g, 0.1, 0.0, 2.0), Vector(Eigen::Vector2d(0.0, 2.0)));
}

TEST(FormChain, ChainMatchesDirectEstimators) {
  std::mt19937_64 rng(4);
  const UpdateRule q_sq{UpdateForm::q(), ScaleFunction::sq()};
  const UpdateRule v_sq{UpdateForm::v(), ScaleFunction::sq()};
  const UpdateRule p_sq{UpdateForm::p(), ScaleFunction::sq()};
  for (int k = 0; k < 200; ++k) {
    const int n = 2 + k % 6;
    const TabularLogitsModel m(3, n, randn(rng, 3 * n, 1.5));
    const int s = k % 3;
    const int a = k % n;
    const LogitSlice sl = m.slice(s);
    const double target = sl.logits[a] + randn(rng, 1, 2.0)[0];
    const LearningSignals sig = compute_signals(sl, a, target, log_pi(sl, a));
    const double dr = sig.delta_r();
    const Vector mse = q_sq.estimate(sl, a, sig).values;
    const Vector mve = v_sq.estimate(sl, a, sig).values;
    const Vector pgpb = p_sq.estimate(sl, a, sig).values;
    EXPECT_LE((mse - g_mse(m, s, a, dr)).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LE((mve - g_mve(m, s, a, dr)).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LE((pgpb - g_pgpb(m, s, a, dr)).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LE((mve - pgpb - entropy_grad(sl)).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LE((mse - mve - dr * expected_grad_q(sl)).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Rules, ParseAndName) {
  EXPECT_EQ(parse_rule("P:mla").name(), "P:mla");
  EXPECT_EQ(parse_rule(" Q : sq ").name(), "Q:sq");
  const UpdateRule r = parse_rule("Q:mla_param(a_o=0,a_r=0.5)");
  EXPECT_EQ(r.form.kind, FormKind::Q);
  EXPECT_EQ(r.scale.name(), "mla(0,0.5)");
  const UpdateRule pi = parse_rule("Pi(beta=0.01,alpha=0):ppo_clip(eps=0.2)");
  EXPECT_EQ(pi.form.kind, FormKind::Pi);
  EXPECT_DOUBLE_EQ(pi.form.beta, 0.01);
  EXPECT_TRUE(pi.scale.is_trust_region());
  EXPECT_THROW(parse_rule("X:sq"), std::invalid_argument);
  EXPECT_THROW(parse_rule("P:nope"), std::invalid_argument);
  EXPECT_THROW(parse_rule("P:huber(delta)"), std::invalid_argument);
  EXPECT_THROW(parse_rule("Pi(beta=-1):sq"), std::invalid_argument);
}

TEST(Rules, StandardRulesFinite) {
  const auto rules = standard_rules();
  ASSERT_EQ(rules.size(), 12u);
  EXPECT_EQ(rules.front().name(), "Q:sq");
  EXPECT_EQ(rules.back().name(), "P:mla");
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const BanditLinearModel model(randn(rng, 2, 2.0));
    const LogitSlice sl = model.slice(randn(rng, 2));
    const int a = k % kBanditActions;
    const LearningSignals sig = compute_signals(sl, a, randn(rng, 1, 3.0)[0], std::log(1.0 / 8.0));
    for (const auto& rule : rules) {
      const GradientEstimate est = rule.estimate(sl, a, sig);
      EXPECT_EQ(est.values.size(), 2);
      EXPECT_TRUE(est.values.allFinite()) << rule.name();
    }
  }
}

TEST(Rules, ZeroOffPolicyGapReproducesOnPolicy) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 100; ++k) {
    const TabularLogitsModel m(1, 5, randn(rng, 5));
    const LogitSlice sl = m.slice(0);
    const int a = k % 5;
    const double dr = randn(rng, 1)[0];
    const LearningSignals corrected{0.0, dr};
    // e^0 * y is exactly y, so the importance-weighted rule must match the plain one.
    const UpdateRule rule_q{UpdateForm::q(), ScaleFunction::sq()};
    EXPECT_EQ(rule_q.estimate(sl, a, corrected).values, update_q(sl, a, dr));
    const UpdateRule rule_v{UpdateForm::v(), ScaleFunction::sq()};
    EXPECT_EQ(rule_v.estimate(sl, a, corrected).values, update_v(sl, a, dr));
    const UpdateRule rule_p{UpdateForm::p(), ScaleFunction::sq()};
    EXPECT_EQ(rule_p.estimate(sl, a, corrected).values, update_p(sl, a, dr));
  }
}

TEST(Ppo, SurrogateExamples) {
  TabularLogitsModel m(1, 2);
  const LogitSlice sl = m.slice(0);
  const double lp = std::log(0.5);
  EXPECT_DOUBLE_EQ(ppo_surrogate_value(sl, 0, 0.7, lp, 0.2), 0.7);
  EXPECT_EQ(ppo_surrogate_value(sl, 0, 0.0, lp - 0.3, 0.2), 0.0);
  EXPECT_NEAR(ppo_surrogate_value(sl, 0, 1.0, lp - std::log(1.5), 0.2), 1.2, 1e-12);
  EXPECT_NEAR(ppo_surrogate_value(sl, 0, -1.0, lp - std::log(1.5), 0.2), -1.5, 1e-12);
  EXPECT_THROW(ppo_surrogate_value(sl, 0, 1.0, lp, 0.0), std::invalid_argument);
  EXPECT_THROW(ppo_surrogate_value(sl, 0, 1.0, lp, 1.0), std::invalid_argument);

  const GaussianPolicy1D g(0.0, 0.0);
  EXPECT_DOUBLE_EQ(ppo_surrogate_value(g, 0.3, 2.0, g.log_prob(0.3), 0.1), 2.0);
}

TEST(Ppo, DeltaR) {
  EXPECT_EQ(ppo_delta_r(0.8, -1.7, 0.4, 0.0), 0.8);
  EXPECT_DOUBLE_EQ(ppo_delta_r(1.0, -1.0, 1.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(ppo_delta_r(0.0, -2.0, 0.5, 1.0), 1.5);
}
