#pragma once

#include "polygrad/updates.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace polygrad {

enum class EnvKind { Bandit2D, FourRoom };

struct LearningRates {
  double policy = 0.05;      // bandit SGD step
  double actor = 0.1;        // FourRoom PG actor
  double critic = 0.1;       // FourRoom PG critic
  double q_learning = 0.01;  // FourRoom Q-learning
};

/// One experiment. Loaded from a sectioned key = value file:
///
///   [experiment]   env, seeds, iterations, batch_size, eval_every, output_dir,
///                  off_policy_correction, workers
///   [learning_rates] policy, actor, critic, q_learning
///   [rules]        list = FORM:SCALE; FORM:SCALE(k=v,...); ...
///   [bandit2d]     eval_seed, eval_contexts
///   [fourroom]     dataset_size, episode_cap, goal_row, goal_col
struct ExperimentConfig {
  EnvKind env = EnvKind::Bandit2D;
  std::vector<UpdateRule> rules;
  std::vector<std::uint64_t> seeds;
  int iterations = 10000;
  int batch_size = 32;
  int eval_every = 100;
  LearningRates learning_rates;
  std::filesystem::path output_dir = "out";
  bool off_policy_correction = true;
  int workers = 0;  // 0 = hardware concurrency

  std::uint64_t bandit_eval_seed = 20240101;
  int bandit_eval_contexts = 10000;

  int dataset_size = 50000;
  int episode_cap = 500;
  int goal_row = 11;
  int goal_col = 11;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

ExperimentConfig default_bandit_config();
ExperimentConfig default_fourroom_config();

std::string env_name(EnvKind env);

}  // namespace polygrad
