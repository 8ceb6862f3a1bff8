#include "polygrad/harness.hpp"

#include "polygrad/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

namespace polygrad {

namespace {

bool should_log(int iteration, int total, int every) { return iteration % every == 0 || iteration == total; }

/// Runs jobs[i] into results[i]; the output order never depends on scheduling.
std::vector<RunRecord> run_parallel(std::vector<std::function<RunRecord()>> jobs, int workers) {
  std::vector<RunRecord> results(jobs.size());
  unsigned n = workers > 0 ? static_cast<unsigned>(workers) : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(jobs.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = jobs[i]();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace

BanditReference bandit_reference(const Bandit2D& env) {
  return {bandit_reference_optimum(env).value, env.policy_return(BanditLinearModel())};
}

RunRecord run_bandit(const ExperimentConfig& config, const UpdateRule& rule, std::uint64_t seed,
                     const Bandit2D& env, const BanditReference& ref) {
  RunRecord record{rule.name(), seed, {}};
  Rng rng(seed);
  BanditLinearModel model;
  const double lr = config.learning_rates.policy;

  const auto log = [&](int it) {
    const double j = env.policy_return(model);
    record.checkpoints.push_back(
        {it, {{"distance", (model.theta() - kBanditThetaStar).norm()}, {"regret", ref.j_star - j}, {"return", j}}});
  };

  log(0);
  for (int it = 1; it <= config.iterations; ++it) {
    const auto batch = env.sample_batch(rng, config.batch_size);
    Vector grad = Vector::Zero(model.n_params());
    for (const auto& sample : batch) {
      const LogitSlice slice = model.slice(sample.context);
      LearningSignals sig = compute_signals(slice, sample.action, sample.reward, sample.behavior_logprob);
      if (!config.off_policy_correction) sig = LearningSignals::on_policy(sig.delta_r());
      grad += rule.estimate(slice, sample.action, sig).values;
    }
    model.set_params(model.params() + (lr / config.batch_size) * grad);
    if (!model.theta().allFinite()) throw std::runtime_error("bandit parameters diverged for rule " + rule.name());
    if (should_log(it, config.iterations, config.eval_every)) log(it);
  }
  return record;
}

std::vector<RunRecord> run_bandit_suite(const ExperimentConfig& config) {
  if (config.env != EnvKind::Bandit2D) throw std::invalid_argument("run_bandit_suite needs env = bandit2d");
  config.validate();
  const Bandit2D env(config.bandit_eval_seed, config.bandit_eval_contexts);
  const BanditReference ref = bandit_reference(env);
  std::vector<std::function<RunRecord()>> jobs;
  for (const auto& rule : config.rules) {
    for (auto seed : config.seeds) {
      jobs.emplace_back([&, rule, seed] { return run_bandit(config, rule, seed, env, ref); });
    }
  }
  return run_parallel(std::move(jobs), config.workers);
}

RunRecord run_fourroom(const ExperimentConfig& config, const UpdateRule& rule, std::uint64_t seed,
                       const FourRoomEnv& env) {
  RunRecord record{rule.name(), seed, {}};
  Rng rng(seed);
  const auto dataset = fourroom_collect_dataset(env, rng, config.dataset_size, config.episode_cap);
  if (!fourroom_covers_all(env, dataset)) {
    throw std::runtime_error("FourRoom dataset for seed " + std::to_string(seed) +
                             " does not cover every state-action pair; increase dataset_size");
  }
  const TabularMdp mdp = env.as_tabular();
  const double gamma = mdp.gamma;
  const bool q_learning = rule.form.kind == FormKind::Q;
  const double lr = q_learning ? config.learning_rates.q_learning : config.learning_rates.actor;

  TabularLogitsModel model(env.n_states(), FourRoomEnv::kActions);
  Critic critic(env.n_states(), gamma, config.learning_rates.critic);

  const auto log = [&](int it) {
    const double ret = policy_eval_exact(mdp, model.policy_matrix()).discounted_return(gamma);
    record.checkpoints.push_back({it, {{"return", ret}}});
  };

  log(0);
  const int batch_size = config.batch_size;
  for (int it = 1; it <= config.iterations; ++it) {
    const auto batch = fourroom_minibatch(dataset, rng, batch_size);
    Vector grad = Vector::Zero(model.n_params());
    Vector critic_step = Vector::Zero(env.n_states());
    for (const auto& t : batch) {
      const LogitSlice slice = model.slice(t.s);
      const double target = q_learning ? q_bootstrap_target(model, t, gamma) : critic.target(t);
      LearningSignals sig = compute_signals(slice, t.a, target, t.behavior_logprob);
      if (!config.off_policy_correction) sig = LearningSignals::on_policy(sig.delta_r());
      grad += rule.estimate(slice, t.a, sig).values;
      if (!q_learning) critic_step[t.s] += target - critic.values()[t.s];
    }
    model.params() += (lr / batch_size) * grad;
    if (!q_learning) critic.values() += (critic.lr() / batch_size) * critic_step;
    if (should_log(it, config.iterations, config.eval_every)) log(it);
  }
  return record;
}

std::vector<RunRecord> run_fourroom_suite(const ExperimentConfig& config) {
  if (config.env != EnvKind::FourRoom) throw std::invalid_argument("run_fourroom_suite needs env = fourroom");
  config.validate();
  const FourRoomEnv env(config.goal_row, config.goal_col);
  std::vector<std::function<RunRecord()>> jobs;
  for (const auto& rule : config.rules) {
    for (auto seed : config.seeds) {
      jobs.emplace_back([&, rule, seed] { return run_fourroom(config, rule, seed, env); });
    }
  }
  return run_parallel(std::move(jobs), config.workers);
}

}  // namespace polygrad
