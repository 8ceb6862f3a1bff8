#pragma once

#include "polygrad/config.hpp"
#include "polygrad/envs.hpp"

#include <map>
#include <string>
#include <vector>

namespace polygrad {

struct Checkpoint {
  int iteration = 0;
  std::map<std::string, double> metrics;

  bool operator==(const Checkpoint&) const = default;
};

/// Trajectory of one (rule, seed) run; checkpoints are strictly increasing.
struct RunRecord {
  std::string rule;
  std::uint64_t seed = 0;
  std::vector<Checkpoint> checkpoints;

  bool operator==(const RunRecord&) const = default;
};

/// Bandit parameters optimal for the greedy policy; distances are measured to it.
inline const Eigen::Vector2d kBanditThetaStar{1.0, 1.0};

/// Reference objective values shared by every bandit run of a suite.
struct BanditReference {
  double j_star;
  double j_init;
};

BanditReference bandit_reference(const Bandit2D& env);

/// Logs regret (J* - J), distance ||theta - theta*|| and return J.
RunRecord run_bandit(const ExperimentConfig& config, const UpdateRule& rule, std::uint64_t seed,
                     const Bandit2D& env, const BanditReference& ref);

/// One run per (rule, seed), returned in rule-major, seed-minor order.
std::vector<RunRecord> run_bandit_suite(const ExperimentConfig& config);

/// Q-form rules use the Q-learning bootstrap target; V and P forms use a TD(0)
/// critic trained on the same minibatches. Logs the exact discounted return
/// mu^T V of the current softmax policy.
RunRecord run_fourroom(const ExperimentConfig& config, const UpdateRule& rule, std::uint64_t seed,
                       const FourRoomEnv& env);

std::vector<RunRecord> run_fourroom_suite(const ExperimentConfig& config);

}  // namespace polygrad
