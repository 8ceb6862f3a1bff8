#include "polygrad/updates.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace polygrad {

namespace {

void require_finite_f(double f_value) {
  if (!std::isfinite(f_value)) throw std::invalid_argument("scale value must be finite");
}

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("PPO clip eps must lie in (0, 1)");
}

double clipped_objective(double ratio, double adv, double eps) {
  return std::min(ratio * adv, std::clamp(ratio, 1.0 - eps, 1.0 + eps) * adv);
}

std::map<std::string, double> parse_params(const std::string& body) {
  std::map<std::string, double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + item + "'");
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("bad numeric value in '" + item + "'");
    }
  }
  return out;
}

}  // namespace

UpdateForm UpdateForm::pi(double beta, double alpha) {
  if (!(beta >= 0.0) || !(alpha >= 0.0)) throw std::invalid_argument("beta and alpha must be non-negative");
  return {FormKind::Pi, beta, alpha};
}

std::string UpdateForm::name() const {
  switch (kind) {
    case FormKind::Q:
      return "Q";
    case FormKind::V:
      return "V";
    case FormKind::P:
      return "P";
    case FormKind::Pi: {
      std::ostringstream os;
      os << "Pi(beta=" << beta << ",alpha=" << alpha << ")";
      return os.str();
    }
  }
  return "?";
}

LearningSignals compute_signals(const LogitSlice& slice, Eigen::Index action, double target,
                                double behavior_logprob) {
  if (!std::isfinite(target)) throw std::invalid_argument("target must be finite");
  if (!std::isfinite(behavior_logprob)) throw std::invalid_argument("behavior log-probability must be finite");
  return {log_pi(slice, action) - behavior_logprob, target - slice.logits[action]};
}

Vector update_q(const LogitSlice& slice, Eigen::Index action, double f_value) {
  require_finite_f(f_value);
  return f_value * slice.jacobian.row(action).transpose();
}

Vector update_v(const LogitSlice& slice, Eigen::Index action, double f_value) {
  require_finite_f(f_value);
  return f_value * grad_log_pi(slice, action);
}

Vector update_p(const LogitSlice& slice, Eigen::Index action, double f_value) {
  return update_v(slice, action, f_value) - entropy_grad(slice);
}

Vector update_pi(const LogitSlice& slice, Eigen::Index action, double f_value, double beta) {
  require_finite_f(f_value);
  return f_value * grad_log_pi(slice, action) + beta * entropy_grad(slice);
}

Vector update_pi(const GaussianPolicy1D& policy, double action, double f_value, double beta) {
  require_finite_f(f_value);
  return f_value * policy.log_prob_grad(action) + beta * policy.entropy_grad();
}

std::string UpdateRule::name() const { return form.name() + ":" + scale.name(); }

GradientEstimate UpdateRule::estimate(const LogitSlice& slice, Eigen::Index action,
                                      const LearningSignals& signals) const {
  const double f = scale(signals);
  switch (form.kind) {
    case FormKind::Q:
      return {update_q(slice, action, f), signals};
    case FormKind::V:
      return {update_v(slice, action, f), signals};
    case FormKind::P:
      return {update_p(slice, action, f), signals};
    case FormKind::Pi:
      return {update_pi(slice, action, f, form.beta), signals};
  }
  throw std::logic_error("unhandled form");
}

UpdateRule parse_rule(const std::string& text) {
  static const std::regex pattern(R"(^\s*(Q|V|P|Pi(?:\(([^)]*)\))?)\s*:\s*([a-z_]+)\s*(?:\(([^)]*)\))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw std::invalid_argument("cannot parse update rule '" + text + "'");
  UpdateForm form;
  const std::string head = m[1].str();
  if (head == "Q") {
    form = UpdateForm::q();
  } else if (head == "V") {
    form = UpdateForm::v();
  } else if (head == "P") {
    form = UpdateForm::p();
  } else {
    const auto params = parse_params(m[2].str());
    double beta = 0.0;
    double alpha = 0.0;
    for (const auto& [k, v] : params) {
      if (k == "beta") beta = v;
      else if (k == "alpha") alpha = v;
      else throw std::invalid_argument("unknown Pi parameter '" + k + "'");
    }
    form = UpdateForm::pi(beta, alpha);
  }
  return {form, ScaleFunction::from_name(m[3].str(), parse_params(m[4].str()))};
}

std::vector<UpdateRule> standard_rules() {
  std::vector<UpdateRule> rules;
  for (const auto& form : {UpdateForm::q(), UpdateForm::v(), UpdateForm::p()}) {
    for (const auto& scale : {ScaleFunction::sq(), ScaleFunction::ml(), ScaleFunction::sil(), ScaleFunction::mla()}) {
      rules.push_back({form, scale});
    }
  }
  return rules;
}

double ppo_surrogate_value(const LogitSlice& slice, Eigen::Index action, double adv, double behavior_logprob,
                           double eps) {
  require_eps(eps);
  return clipped_objective(std::exp(log_pi(slice, action) - behavior_logprob), adv, eps);
}

double ppo_surrogate_value(const GaussianPolicy1D& policy, double action, double adv, double behavior_logprob,
                           double eps) {
  require_eps(eps);
  return clipped_objective(std::exp(policy.log_prob(action) - behavior_logprob), adv, eps);
}

double ppo_delta_r(double adv, double logpi, double entropy, double alpha) {
  return adv - alpha * (logpi + entropy);
}

}  // namespace polygrad
