#include "polygrad/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace polygrad;

namespace {

TabularLogitsModel random_model(Rng& rng, int n_states, int n_actions) {
  std::normal_distribution<double> d(0.0, 1.0);
  Vector theta(n_states * n_actions);
  for (auto& x : theta) x = d(rng);
  return TabularLogitsModel(n_states, n_actions, theta);
}

double rel_err(const Vector& a, const Vector& b) {
  return (a - b).lpNorm<Eigen::Infinity>() / std::max(b.lpNorm<Eigen::Infinity>(), 1e-8);
}

}  // namespace

TEST(PolicyEval, AbsorbingState) {
  TabularMdp mdp{{Matrix::Ones(1, 1)}, Matrix::Ones(1, 1), Vector::Ones(1), 0.9};
  const ExactPolicyEval e = policy_eval_exact(mdp, Matrix::Ones(1, 1));
  EXPECT_NEAR(e.v_pi[0], 10.0, 1e-12);
  EXPECT_NEAR(e.q_pi(0, 0), 10.0, 1e-12);
  EXPECT_NEAR(e.d_mu[0], 1.0, 1e-12);
  EXPECT_NEAR(e.j_mu, 1.0, 1e-12);
  EXPECT_NEAR(e.discounted_return(0.9), 10.0, 1e-12);
}

TEST(PolicyEval, LinearSolveMatchesIteration) {
  Rng rng(21);
  for (int k = 0; k < 20; ++k) {
    const TabularMdp mdp = random_mdp(rng, 2 + k % 5, 2 + k % 3, 0.9);
    const TabularLogitsModel model = random_model(rng, mdp.n_states(), mdp.n_actions());
    const Matrix pi = model.policy_matrix();
    const ExactPolicyEval e = policy_eval_exact(mdp, pi);
    EXPECT_LE((e.v_pi - policy_eval_iterative(mdp, pi)).lpNorm<Eigen::Infinity>(), 1e-10);
    EXPECT_NEAR(e.j_mu, (1.0 - mdp.gamma) * mdp.mu.dot(e.v_pi), 1e-10);
    EXPECT_NEAR(e.d_mu.sum(), 1.0, 1e-10);
    for (Eigen::Index s = 0; s < mdp.n_states(); ++s) {
      for (Eigen::Index a = 0; a < mdp.n_actions(); ++a) {
        const double backup = mdp.reward(s, a) + mdp.gamma * mdp.transition[a].row(s).dot(e.v_pi);
        EXPECT_NEAR(e.q_pi(s, a), backup, 1e-10);
      }
    }
  }
}

TEST(PolicyEval, RejectsBadPolicy) {
  Rng rng(22);
  const TabularMdp mdp = random_mdp(rng, 3, 2, 0.9);
  EXPECT_THROW(policy_eval_exact(mdp, Matrix::Ones(3, 2)), std::invalid_argument);
  EXPECT_THROW(policy_eval_exact(mdp, Matrix::Constant(2, 2, 0.5)), std::invalid_argument);
}

TEST(OptimalValues, DominateEveryPolicy) {
  Rng rng(23);
  const TabularMdp mdp = random_mdp(rng, 5, 3, 0.9);
  const Vector v_star = optimal_values(mdp);
  for (int k = 0; k < 20; ++k) {
    const ExactPolicyEval e = policy_eval_exact(mdp, random_model(rng, 5, 3).policy_matrix());
    EXPECT_TRUE((e.v_pi.array() <= v_star.array() + 1e-9).all());
  }
}

TEST(ExpectedUpdate, PgpbMatchesFiniteDifferences) {
  Rng rng(24);
  const UpdateRule pgpb{UpdateForm::p(), ScaleFunction::sq()};
  for (int k = 0; k < 20; ++k) {
    const TabularMdp mdp = random_mdp(rng, 2 + k % 5, 2 + k % 3, 0.9);
    const TabularLogitsModel model = random_model(rng, mdp.n_states(), mdp.n_actions());
    EXPECT_LE(rel_err(exact_expected_update(mdp, model, pgpb), finite_diff_objective_grad(mdp, model)), 1e-6);
  }
}

TEST(ExpectedUpdate, MveMinusPgpbIsWeightedEntropyGradient) {
  Rng rng(25);
  const UpdateRule mve{UpdateForm::v(), ScaleFunction::sq()};
  const UpdateRule pgpb{UpdateForm::p(), ScaleFunction::sq()};
  const TabularMdp mdp = random_mdp(rng, 4, 3, 0.9);
  const TabularLogitsModel model = random_model(rng, 4, 3);
  const ExactPolicyEval e = policy_eval_exact(mdp, model.policy_matrix());
  Vector expect = Vector::Zero(model.n_params());
  for (int s = 0; s < 4; ++s) expect += e.d_mu[s] * model.entropy_grad(s);
  const Vector diff = exact_expected_update(mdp, model, mve) - exact_expected_update(mdp, model, pgpb);
  EXPECT_LE((diff - expect).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(ExpectedUpdate, ZeroWhenLogitsEqualQ) {
  Rng rng(26);
  const TabularMdp mdp = random_mdp(rng, 3, 2, 0.9);
  // Q^pi depends on theta through pi, so iterate theta <- Q^pi(theta) to a fixed point.
  TabularLogitsModel model(3, 2);
  for (int i = 0; i < 500; ++i) {
    const ExactPolicyEval e = policy_eval_exact(mdp, model.policy_matrix());
    Vector theta(6);
    for (int s = 0; s < 3; ++s) {
      for (int a = 0; a < 2; ++a) theta[model.index(s, a)] = e.q_pi(s, a);
    }
    model = TabularLogitsModel(3, 2, theta);
  }
  const UpdateRule mse{UpdateForm::q(), ScaleFunction::sq()};
  EXPECT_LE(exact_expected_update(mdp, model, mse).lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(FiniteDiff, ClassicalGradientAndRowShift) {
  Rng rng(27);
  for (int k = 0; k < 10; ++k) {
    const TabularMdp mdp = random_mdp(rng, 3 + k % 3, 2 + k % 3, 0.9);
    const TabularLogitsModel model = random_model(rng, mdp.n_states(), mdp.n_actions());
    const Vector fd = finite_diff_objective_grad(mdp, model);
    EXPECT_LE(rel_err(classical_policy_gradient(mdp, model), fd), 1e-6);
    for (Eigen::Index s = 0; s < mdp.n_states(); ++s) {
      EXPECT_NEAR(fd.segment(model.index(s, 0), mdp.n_actions()).sum(), 0.0, 1e-9);
    }
  }
  EXPECT_THROW(finite_diff_objective_grad(random_mdp(rng, 2, 2, 0.9), TabularLogitsModel(2, 2), 0.0),
               std::invalid_argument);
}

TEST(FiniteDiff, ErrorShrinksQuadratically) {
  Rng rng(28);
  const TabularMdp mdp = random_mdp(rng, 4, 3, 0.9);
  const TabularLogitsModel model = random_model(rng, 4, 3);
  const Vector exact = classical_policy_gradient(mdp, model);
  const double coarse = (finite_diff_objective_grad(mdp, model, 0.08) - exact).lpNorm<Eigen::Infinity>();
  const double fine = (finite_diff_objective_grad(mdp, model, 0.04) - exact).lpNorm<Eigen::Infinity>();
  // Halving h should cut the error by about four.
  EXPECT_GT(coarse / fine, 3.0);
  EXPECT_LT(coarse / fine, 5.0);
}
