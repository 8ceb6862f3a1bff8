#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>

namespace polygrad {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Logits q(s, .) of one state and their Jacobian with respect to the model
/// parameters. Row a of the Jacobian is grad_theta q(s, a).
///
/// Every discrete-action gradient in the library is assembled from a slice, so
/// the tabular and linear-in-features models share one code path.
struct LogitSlice {
  Vector logits;
  Matrix jacobian;

  Eigen::Index n_actions() const { return logits.size(); }
  Eigen::Index n_params() const { return jacobian.cols(); }
};

/// Max-shifted log-sum-exp.
double logsumexp(const Vector& logits);
Vector softmax(const Vector& logits);
Vector log_softmax(const Vector& logits);

Vector policy(const LogitSlice& slice);
double log_pi(const LogitSlice& slice, Eigen::Index action);

/// E_{u~pi}[grad q(s, u)].
Vector expected_grad_q(const LogitSlice& slice);
/// grad q(s, a) - E_{u~pi}[grad q(s, u)].
Vector grad_log_pi(const LogitSlice& slice, Eigen::Index action);

double entropy(const LogitSlice& slice);
/// grad H, differentiated through -sum_u pi(u) log pi(u).
Vector entropy_grad(const LogitSlice& slice);
/// grad E_{u~pi_theta}[stop_grad(q)(s, u)] = sum_u q(s, u) grad pi(u | s).
/// Equal to -entropy_grad for softmax policies.
Vector grad_expected_qhat(const LogitSlice& slice);

/// Logits q_theta(s, a) stored as a dense state x action table. Parameters are
/// flattened row-major: index s * n_actions + a.
class TabularLogitsModel {
 public:
  TabularLogitsModel(Eigen::Index n_states, Eigen::Index n_actions);
  TabularLogitsModel(Eigen::Index n_states, Eigen::Index n_actions, Vector theta);

  Eigen::Index n_states() const { return n_states_; }
  Eigen::Index n_actions() const { return n_actions_; }
  Eigen::Index n_params() const { return theta_.size(); }
  Eigen::Index index(Eigen::Index s, Eigen::Index a) const;

  const Vector& params() const { return theta_; }
  Vector& params() { return theta_; }

  double q(Eigen::Index s, Eigen::Index a) const { return theta_[index(s, a)]; }
  Vector logits(Eigen::Index s) const;
  LogitSlice slice(Eigen::Index s) const;

  Vector softmax_policy(Eigen::Index s) const { return softmax(logits(s)); }
  double logsumexp_row(Eigen::Index s) const { return logsumexp(logits(s)); }
  double entropy(Eigen::Index s) const { return polygrad::entropy(slice(s)); }
  Vector entropy_grad(Eigen::Index s) const { return polygrad::entropy_grad(slice(s)); }
  Vector grad_log_pi(Eigen::Index s, Eigen::Index a) const { return polygrad::grad_log_pi(slice(s), a); }

  /// n_states x n_actions matrix of pi(a | s).
  Matrix policy_matrix() const;

 private:
  void check_state(Eigen::Index s) const;

  Eigen::Index n_states_;
  Eigen::Index n_actions_;
  Vector theta_;
};

inline constexpr int kBanditActions = 8;

/// q_theta(x, a) = <(theta0 (1 + x0) - 1, theta1 (1 + x1) - 1), psi(a)> with the
/// eight actions embedded on the unit circle.
class BanditLinearModel {
 public:
  using Context = Eigen::Vector2d;

  BanditLinearModel() : theta_(Eigen::Vector2d::Zero()) {}
  explicit BanditLinearModel(const Eigen::Vector2d& theta) : theta_(theta) {}

  static Eigen::Vector2d embedding(int action);

  Eigen::Index n_params() const { return 2; }
  const Eigen::Vector2d& theta() const { return theta_; }
  Vector params() const { return theta_; }
  void set_params(const Vector& p);

  double q(const Context& x, int action) const;
  Eigen::Vector2d grad_q(const Context& x, int action) const;
  Vector logits(const Context& x) const;
  LogitSlice slice(const Context& x) const;

 private:
  Eigen::Vector2d theta_;
};

/// Scalar Gaussian policy N(mean, exp(log_std)^2). Parameters are ordered
/// (mean, log_std).
class GaussianPolicy1D {
 public:
  GaussianPolicy1D(double mean, double log_std) : mean_(mean), log_std_(log_std) {}

  double mean() const { return mean_; }
  double log_std() const { return log_std_; }
  double stddev() const;
  Vector params() const;
  void set_params(const Vector& p);

  double log_prob(double action) const;
  double density(double action) const;
  double entropy() const;
  Vector log_prob_grad(double action) const;
  Vector entropy_grad() const;

 private:
  double mean_;
  double log_std_;
};

// Free-function spellings used by the update and harness code.
inline Vector gaussian_logprob_grad(const GaussianPolicy1D& p, double action) { return p.log_prob_grad(action); }
inline Vector gaussian_entropy_grad(const GaussianPolicy1D& p) { return p.entropy_grad(); }

}  // namespace polygrad
