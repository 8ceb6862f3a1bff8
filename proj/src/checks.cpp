#include "polygrad/checks.hpp"

#include "polygrad/oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace polygrad {

namespace {

using Clock = std::chrono::steady_clock;

Vector random_normal(Rng& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double rel_error(const Vector& got, const Vector& want, double floor) {
  return (got - want).lpNorm<Eigen::Infinity>() / std::max(want.lpNorm<Eigen::Infinity>(), floor);
}

/// Random logit slice from either a tabular or a bandit model.
LogitSlice random_slice(Rng& rng) {
  if (uniform_int(rng, 0, 1) == 0) {
    const int n_states = uniform_int(rng, 1, 5);
    const int n_actions = uniform_int(rng, 2, 6);
    TabularLogitsModel model(n_states, n_actions, random_normal(rng, n_states * n_actions, 1.5));
    return model.slice(uniform_int(rng, 0, n_states - 1));
  }
  BanditLinearModel model(random_normal(rng, 2, 1.5));
  return model.slice(random_normal(rng, 2));
}

template <class F>
CheckResult timed(const std::string& name, double tolerance, F&& body) {
  const auto start = Clock::now();
  CheckResult r;
  r.name = name;
  r.tolerance = tolerance;
  body(r);
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.passed = r.passed && r.worst <= tolerance;
  return r;
}

Vector central_diff(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace

CheckResult check_pgpb_unbiased(int n_mdps, std::uint64_t seed) {
  return timed("PGPB unbiasedness", 1e-6, [&](CheckResult& r) {
    Rng rng(seed);
    const UpdateRule pgpb{UpdateForm::p(), ScaleFunction::sq()};
    r.passed = true;
    for (int k = 0; k < n_mdps; ++k) {
      const int n_states = uniform_int(rng, 2, 6);
      const int n_actions = uniform_int(rng, 2, 4);
      const TabularMdp mdp = random_mdp(rng, n_states, n_actions, 0.9);
      const TabularLogitsModel model(n_states, n_actions, random_normal(rng, n_states * n_actions));
      const Vector expected = exact_expected_update(mdp, model, pgpb);
      const Vector fd = finite_diff_objective_grad(mdp, model, 1e-5);
      r.worst = std::max(r.worst, rel_error(expected, fd, 1e-12));
    }
    r.detail = std::to_string(n_mdps) + " random MDPs, relative inf-norm error";
  });
}

CheckResult check_form_identities(int n_draws, std::uint64_t seed) {
  return timed("Form-axis identities (MVE-PGPB=gradH, MSE-MVE=dR*E[grad q])", 1e-12, [&](CheckResult& r) {
    Rng rng(seed);
    r.passed = true;
    for (int k = 0; k < n_draws; ++k) {
      const LogitSlice slice = random_slice(rng);
      const int a = uniform_int(rng, 0, static_cast<int>(slice.n_actions()) - 1);
      const double target = uniform_real(rng, -3.0, 3.0);
      const LearningSignals sig = compute_signals(slice, a, target, log_pi(slice, a));
      const double f = eval_f_sq(sig.delta_o(), sig.delta_r());
      const Vector mse = update_q(slice, a, f);
      const Vector mve = update_v(slice, a, f);
      const Vector pgpb = update_p(slice, a, f);
      r.worst = std::max(r.worst, (mve - pgpb - entropy_grad(slice)).lpNorm<Eigen::Infinity>());
      r.worst = std::max(r.worst, (mse - mve - sig.delta_r() * expected_grad_q(slice)).lpNorm<Eigen::Infinity>());
    }
    r.detail = std::to_string(n_draws) + " random (model, sample) draws, max abs elementwise error";
  });
}

CheckResult check_entropy_identity(int n_draws, std::uint64_t seed) {
  CheckResult fd_part = timed("entropy fd", 1e-6, [&](CheckResult& r) {
    Rng rng(seed);
    r.passed = true;
    for (int k = 0; k < n_draws; ++k) {
      const int n_actions = uniform_int(rng, 2, 6);
      const Vector theta = random_normal(rng, n_actions, 1.5);
      const TabularLogitsModel model(1, n_actions, theta);
      const Vector fd = central_diff(
          [&](const Vector& p) { return TabularLogitsModel(1, n_actions, p).entropy(0); }, theta, 1e-5);
      r.worst = std::max(r.worst, rel_error(model.entropy_grad(0), fd, 1e-8));
    }
  });
  return timed("Entropy identity (gradH + gradE[qhat] = 0)", 1e-12, [&](CheckResult& r) {
    Rng rng(seed + 1000);
    r.passed = fd_part.passed;
    for (int k = 0; k < n_draws * 5; ++k) {
      const LogitSlice slice = random_slice(rng);
      r.worst = std::max(r.worst, (entropy_grad(slice) + grad_expected_qhat(slice)).lpNorm<Eigen::Infinity>());
    }
    std::ostringstream os;
    os << "analytic identity max abs error " << r.worst << "; finite-difference rel error " << fd_part.worst
       << " (tol 1e-6)";
    r.detail = os.str();
  });
}

CheckResult check_ppo_equivalence(int n_points, std::uint64_t seed) {
  return timed("PPO clipped surrogate equivalence", 1e-5, [&](CheckResult& r) {
    Rng rng(seed);
    const double eps = 0.2;
    const double h = 1e-5;
    const double band = 1e-3;
    const auto near_boundary = [&](double delta_o, double adv) {
      return std::abs(delta_o - std::log1p(eps)) <= band || std::abs(delta_o - std::log1p(-eps)) <= band ||
             std::abs(adv) <= band;
    };
    r.passed = true;
    int discrete = 0;
    int gaussian = 0;
    while (discrete < n_points) {
      const int n_actions = uniform_int(rng, 2, 6);
      const Vector theta = random_normal(rng, n_actions);
      const int a = uniform_int(rng, 0, n_actions - 1);
      const double adv = uniform_real(rng, -2.0, 2.0);
      const double delta_o = uniform_real(rng, -0.6, 0.6);
      if (near_boundary(delta_o, adv)) continue;
      const LogitSlice slice = TabularLogitsModel(1, n_actions, theta).slice(0);
      const double logp = log_pi(slice, a);
      const double behavior = logp - delta_o;
      const double delta_r = ppo_delta_r(adv, logp, entropy(slice), 0.0);
      const Vector analytic = update_pi(slice, a, eval_f_ppo(delta_o, delta_r, eps), 0.0);
      const Vector fd = central_diff(
          [&](const Vector& p) {
            return ppo_surrogate_value(TabularLogitsModel(1, n_actions, p).slice(0), a, adv, behavior, eps);
          },
          theta, h);
      r.worst = std::max(r.worst, rel_error(fd, analytic, 1e-3));
      ++discrete;
    }
    while (gaussian < n_points) {
      const GaussianPolicy1D policy(uniform_real(rng, -1.0, 1.0), uniform_real(rng, -1.0, 1.0));
      const double action = policy.mean() + policy.stddev() * random_normal(rng, 1)[0];
      const double adv = uniform_real(rng, -2.0, 2.0);
      const double delta_o = uniform_real(rng, -0.6, 0.6);
      if (near_boundary(delta_o, adv)) continue;
      const double behavior = policy.log_prob(action) - delta_o;
      const double delta_r = ppo_delta_r(adv, policy.log_prob(action), policy.entropy(), 0.0);
      const Vector analytic = update_pi(policy, action, eval_f_ppo(delta_o, delta_r, eps), 0.0);
      const Vector fd = central_diff(
          [&](const Vector& p) {
            GaussianPolicy1D probe = policy;
            probe.set_params(p);
            return ppo_surrogate_value(probe, action, adv, behavior, eps);
          },
          policy.params(), h);
      r.worst = std::max(r.worst, rel_error(fd, analytic, 1e-3));
      ++gaussian;
    }
    r.detail = std::to_string(discrete) + " softmax + " + std::to_string(gaussian) +
               " Gaussian points, relative inf-norm error";
  });
}

CheckResult check_scale_constraints() {
  return timed("Scale-function constraints", 0.0, [&](CheckResult& r) {
    const ScanGrid grid = ScanGrid::default_grid();
    std::ostringstream os;
    r.passed = true;
    for (const auto& f : shipped_scale_functions()) {
      const auto report = check_assumption1(f, grid);
      if (!report.ok()) {
        r.passed = false;
        os << f.name() << ": " << report.violations.size() << " violations; ";
      }
    }
    const auto identity = ScaleFunction::mla_param(0.0, 0.0);
    for (double x : grid.xs) {
      for (double y : grid.ys) r.worst = std::max(r.worst, std::abs(identity(x, y) - y));
    }
    for (double x : grid.xs) {
      for (std::size_t j = 1; j < grid.ys.size(); ++j) {
        if (eval_f_mla(x, grid.ys[j]) < eval_f_mla(x, grid.ys[j - 1])) {
          r.passed = false;
          os << "mla decreasing at (" << x << "," << grid.ys[j] << "); ";
        }
      }
    }
    os << "mla(0,0) max deviation from identity " << r.worst;
    r.detail = os.str();
  });
}

CheckResult check_value_objectives(int n_mdps, std::uint64_t seed) {
  return timed("MSE/MVE semi-gradient semantics", 1e-6, [&](CheckResult& r) {
    Rng rng(seed);
    r.passed = true;
    for (int k = 0; k < n_mdps; ++k) {
      const int n_states = uniform_int(rng, 2, 6);
      const int n_actions = uniform_int(rng, 2, 4);
      const TabularMdp mdp = random_mdp(rng, n_states, n_actions, 0.9);
      const TabularLogitsModel model(n_states, n_actions, random_normal(rng, n_states * n_actions));
      // Sampling distribution and targets are frozen at the current parameters.
      const Matrix pi = model.policy_matrix();
      const ExactPolicyEval eval = policy_eval_exact(mdp, pi);
      const auto mse = [&](const Vector& p) {
        const TabularLogitsModel m(n_states, n_actions, p);
        double total = 0.0;
        for (int s = 0; s < n_states; ++s) {
          for (int a = 0; a < n_actions; ++a) {
            const double err = eval.q_pi(s, a) - m.q(s, a);
            total += eval.d_mu[s] * pi(s, a) * err * err;
          }
        }
        return -0.5 * total;
      };
      const auto mve = [&](const Vector& p) {
        const TabularLogitsModel m(n_states, n_actions, p);
        double total = 0.0;
        for (int s = 0; s < n_states; ++s) {
          double mean = 0.0;
          double second = 0.0;
          for (int a = 0; a < n_actions; ++a) {
            const double err = eval.q_pi(s, a) - m.q(s, a);
            mean += pi(s, a) * err;
            second += pi(s, a) * err * err;
          }
          total += eval.d_mu[s] * (second - mean * mean);
        }
        return -0.5 * total;
      };
      const Vector g_mse = exact_expected_update(mdp, model, {UpdateForm::q(), ScaleFunction::sq()});
      const Vector g_mve = exact_expected_update(mdp, model, {UpdateForm::v(), ScaleFunction::sq()});
      r.worst = std::max(r.worst, rel_error(g_mse, central_diff(mse, model.params(), 1e-5), 1e-12));
      r.worst = std::max(r.worst, rel_error(g_mve, central_diff(mve, model.params(), 1e-5), 1e-12));
    }
    r.detail = std::to_string(n_mdps) + " random MDPs, relative inf-norm error";
  });
}

std::vector<CheckResult> run_theorem_checks() {
  return {check_pgpb_unbiased(),    check_form_identities(), check_entropy_identity(),
          check_ppo_equivalence(),  check_scale_constraints(), check_value_objectives()};
}

std::string format_check(const CheckResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "[%s] %-58s worst=%.3e tol=%.1e (%.2fs) %s", r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.worst, r.tolerance, r.seconds, r.detail.c_str());
  return buf;
}

}  // namespace polygrad
