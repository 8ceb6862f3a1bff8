#include "polygrad/policy_models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace polygrad {

double logsumexp(const Vector& logits) {
  if (logits.size() == 0) throw std::invalid_argument("logsumexp of an empty row");
  const double m = logits.maxCoeff();
  return m + std::log((logits.array() - m).exp().sum());
}

Vector softmax(const Vector& logits) {
  const double m = logits.maxCoeff();
  Vector p = (logits.array() - m).exp();
  return p / p.sum();
}

Vector log_softmax(const Vector& logits) { return logits.array() - logsumexp(logits); }

Vector policy(const LogitSlice& slice) { return softmax(slice.logits); }

double log_pi(const LogitSlice& slice, Eigen::Index action) {
  if (action < 0 || action >= slice.n_actions()) throw std::out_of_range("action index out of range");
  return slice.logits[action] - logsumexp(slice.logits);
}

Vector expected_grad_q(const LogitSlice& slice) { return slice.jacobian.transpose() * policy(slice); }

Vector grad_log_pi(const LogitSlice& slice, Eigen::Index action) {
  if (action < 0 || action >= slice.n_actions()) throw std::out_of_range("action index out of range");
  return slice.jacobian.row(action).transpose() - expected_grad_q(slice);
}

double entropy(const LogitSlice& slice) {
  const Vector p = policy(slice);
  const Vector logp = log_softmax(slice.logits);
  double h = 0.0;
  for (Eigen::Index u = 0; u < p.size(); ++u) {
    if (p[u] > 0.0) h -= p[u] * logp[u];
  }
  return h;
}

Vector entropy_grad(const LogitSlice& slice) {
  // grad H = -sum_u grad pi(u) (log pi(u) + 1); the "+1" term sums to zero.
  const Vector p = policy(slice);
  const Vector logp = log_softmax(slice.logits);
  const Vector centre = expected_grad_q(slice);
  Vector g = Vector::Zero(slice.n_params());
  for (Eigen::Index u = 0; u < p.size(); ++u) {
    if (p[u] == 0.0) continue;
    g -= p[u] * logp[u] * (slice.jacobian.row(u).transpose() - centre);
  }
  return g;
}

Vector grad_expected_qhat(const LogitSlice& slice) {
  // q-hat is held constant; only pi(u | s) is differentiated.
  const Vector p = policy(slice);
  const Vector centre = expected_grad_q(slice);
  Vector g = Vector::Zero(slice.n_params());
  for (Eigen::Index u = 0; u < p.size(); ++u) {
    g += slice.logits[u] * p[u] * (slice.jacobian.row(u).transpose() - centre);
  }
  return g;
}

TabularLogitsModel::TabularLogitsModel(Eigen::Index n_states, Eigen::Index n_actions)
    : TabularLogitsModel(n_states, n_actions, Vector::Zero(n_states * n_actions)) {}

TabularLogitsModel::TabularLogitsModel(Eigen::Index n_states, Eigen::Index n_actions, Vector theta)
    : n_states_(n_states), n_actions_(n_actions), theta_(std::move(theta)) {
  if (n_states <= 0 || n_actions <= 0) throw std::invalid_argument("tabular model needs positive sizes");
  if (theta_.size() != n_states * n_actions) throw std::invalid_argument("theta size mismatch");
}

void TabularLogitsModel::check_state(Eigen::Index s) const {
  if (s < 0 || s >= n_states_) throw std::out_of_range("state index " + std::to_string(s) + " out of range");
}

Eigen::Index TabularLogitsModel::index(Eigen::Index s, Eigen::Index a) const {
  check_state(s);
  if (a < 0 || a >= n_actions_) throw std::out_of_range("action index " + std::to_string(a) + " out of range");
  return s * n_actions_ + a;
}

Vector TabularLogitsModel::logits(Eigen::Index s) const {
  check_state(s);
  return theta_.segment(s * n_actions_, n_actions_);
}

LogitSlice TabularLogitsModel::slice(Eigen::Index s) const {
  LogitSlice out{logits(s), Matrix::Zero(n_actions_, n_params())};
  for (Eigen::Index a = 0; a < n_actions_; ++a) out.jacobian(a, s * n_actions_ + a) = 1.0;
  return out;
}

Matrix TabularLogitsModel::policy_matrix() const {
  Matrix pi(n_states_, n_actions_);
  for (Eigen::Index s = 0; s < n_states_; ++s) pi.row(s) = softmax_policy(s).transpose();
  return pi;
}

Eigen::Vector2d BanditLinearModel::embedding(int action) {
  if (action < 0 || action >= kBanditActions) throw std::out_of_range("bandit action must be in 0..7");
  const double angle = 2.0 * std::numbers::pi * action / kBanditActions;
  return {std::cos(angle), std::sin(angle)};
}

void BanditLinearModel::set_params(const Vector& p) {
  if (p.size() != 2) throw std::invalid_argument("bandit model has two parameters");
  theta_ = p;
}

double BanditLinearModel::q(const Context& x, int action) const {
  const Eigen::Vector2d feat(theta_[0] * (1.0 + x[0]) - 1.0, theta_[1] * (1.0 + x[1]) - 1.0);
  return feat.dot(embedding(action));
}

Eigen::Vector2d BanditLinearModel::grad_q(const Context& x, int action) const {
  const Eigen::Vector2d psi = embedding(action);
  return {(1.0 + x[0]) * psi[0], (1.0 + x[1]) * psi[1]};
}

Vector BanditLinearModel::logits(const Context& x) const {
  Vector q(kBanditActions);
  for (int a = 0; a < kBanditActions; ++a) q[a] = this->q(x, a);
  return q;
}

LogitSlice BanditLinearModel::slice(const Context& x) const {
  LogitSlice out{logits(x), Matrix(kBanditActions, 2)};
  for (int a = 0; a < kBanditActions; ++a) out.jacobian.row(a) = grad_q(x, a).transpose();
  return out;
}

double GaussianPolicy1D::stddev() const { return std::exp(log_std_); }

Vector GaussianPolicy1D::params() const { return Eigen::Vector2d(mean_, log_std_); }

void GaussianPolicy1D::set_params(const Vector& p) {
  if (p.size() != 2) throw std::invalid_argument("Gaussian policy has two parameters");
  mean_ = p[0];
  log_std_ = p[1];
}

double GaussianPolicy1D::log_prob(double action) const {
  const double z = (action - mean_) / stddev();
  return -0.5 * z * z - log_std_ - 0.5 * std::log(2.0 * std::numbers::pi);
}

double GaussianPolicy1D::density(double action) const { return std::exp(log_prob(action)); }

double GaussianPolicy1D::entropy() const { return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e) + log_std_; }

Vector GaussianPolicy1D::log_prob_grad(double action) const {
  if (!std::isfinite(action)) throw std::invalid_argument("action must be finite");
  const double sigma = stddev();
  const double z = (action - mean_) / sigma;
  return Eigen::Vector2d(z / sigma, z * z - 1.0);
}

Vector GaussianPolicy1D::entropy_grad() const { return Eigen::Vector2d(0.0, 1.0); }

}  // namespace polygrad
