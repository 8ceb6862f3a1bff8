#pragma once

#include "polygrad/policy_models.hpp"
#include "polygrad/signals_scale.hpp"

#include <string>

namespace polygrad {

enum class FormKind { Q, V, P, Pi };

/// Shape of the update. Pi carries the entropy coefficient beta and the
/// temperature alpha used to rebuild q-hat from a direct policy.
struct UpdateForm {
  FormKind kind = FormKind::Q;
  double beta = 0.0;
  double alpha = 0.0;

  static UpdateForm q() { return {FormKind::Q}; }
  static UpdateForm v() { return {FormKind::V}; }
  static UpdateForm p() { return {FormKind::P}; }
  static UpdateForm pi(double beta, double alpha);

  std::string name() const;
};

struct GradientEstimate {
  Vector values;
  LearningSignals signals;
};

/// delta_r = target - q(s, a); delta_o = log pi(a | s) - behavior_logprob.
LearningSignals compute_signals(const LogitSlice& slice, Eigen::Index action, double target,
                                double behavior_logprob);

Vector update_q(const LogitSlice& slice, Eigen::Index action, double f_value);
Vector update_v(const LogitSlice& slice, Eigen::Index action, double f_value);
/// update_v plus grad E_{u~pi}[q-hat(s, u)]. The entropy term carries no
/// importance correction.
Vector update_p(const LogitSlice& slice, Eigen::Index action, double f_value);
Vector update_pi(const LogitSlice& slice, Eigen::Index action, double f_value, double beta);
Vector update_pi(const GaussianPolicy1D& policy, double action, double f_value, double beta);

/// A (form, scale) pair, e.g. "P:mla" or "Q:mla_param(a_o=0,a_r=0.5)".
struct UpdateRule {
  UpdateForm form;
  ScaleFunction scale;

  std::string name() const;
  GradientEstimate estimate(const LogitSlice& slice, Eigen::Index action, const LearningSignals& signals) const;
};

/// Parses "FORM:SCALE" or "FORM:SCALE(k=v,...)". FORM is one of Q, V, P or
/// Pi(beta=..,alpha=..).
UpdateRule parse_rule(const std::string& text);

/// The twelve {Q, V, P} x {sq, ml, sil, mla} rules, form-major.
std::vector<UpdateRule> standard_rules();

/// min(ratio * adv, clip(ratio, 1 - eps, 1 + eps) * adv).
double ppo_surrogate_value(const LogitSlice& slice, Eigen::Index action, double adv, double behavior_logprob,
                           double eps);
double ppo_surrogate_value(const GaussianPolicy1D& policy, double action, double adv, double behavior_logprob,
                           double eps);

/// adv - alpha * (log pi(a | s) + H(pi(. | s))).
double ppo_delta_r(double adv, double logpi, double entropy, double alpha);

}  // namespace polygrad
