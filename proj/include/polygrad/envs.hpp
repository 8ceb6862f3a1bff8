#pragma once

#include "polygrad/policy_models.hpp"
#include "polygrad/targets.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace polygrad {

using Rng = std::mt19937_64;

/// Explicit finite MDP. transition[a](s, s') = P(s' | s, a).
struct TabularMdp {
  std::vector<Matrix> transition;
  Matrix reward;  // n_states x n_actions
  Vector mu;
  double gamma = 0.9;

  Eigen::Index n_states() const { return reward.rows(); }
  Eigen::Index n_actions() const { return reward.cols(); }

  /// Throws if a row or mu fails to sum to one within 1e-12, or sizes disagree.
  void validate() const;
};

/// Dirichlet(1) transition rows and initial distribution, rewards U[0, 1].
TabularMdp random_mdp(Rng& rng, int n_states, int n_actions, double gamma);

struct BanditSample {
  Eigen::Vector2d context;
  int action;
  double reward;
  double behavior_logprob;
};

inline constexpr int kBanditEvalContexts = 10000;

/// Synthetic 2D contextual bandit: contexts ~ N(0, I2), eight actions on the
/// unit circle, reward sigmoid(<x, psi(a)>).
class Bandit2D {
 public:
  explicit Bandit2D(std::uint64_t eval_seed = 20240101, int n_eval = kBanditEvalContexts);

  static double reward(const Eigen::Vector2d& context, int action);

  /// Uniform behaviour policy: behavior_logprob = log(1/8).
  std::vector<BanditSample> sample_batch(Rng& rng, int batch_size) const;

  /// Exact expectation over actions, sample mean over the frozen contexts.
  double policy_return(const BanditLinearModel& model) const;

  const std::vector<Eigen::Vector2d>& eval_contexts() const { return eval_contexts_; }

 private:
  std::vector<Eigen::Vector2d> eval_contexts_;
  Matrix eval_rewards_;  // n_eval x 8
};

struct BanditOptimum {
  Eigen::Vector2d theta;
  double value;
};

/// Exhaustive search of policy_return over [lo, hi]^2 with the given step.
BanditOptimum bandit_grid_search(const Bandit2D& env, double lo, double hi, double step);

/// Grid search over [0, 4]^2 followed by compass-search refinement. Used as
/// J* when computing regret.
BanditOptimum bandit_reference_optimum(const Bandit2D& env);

/// 13 x 13 four-rooms gridworld with deterministic moves. Reward 10 on entering
/// the goal, which is terminal.
class FourRoomEnv {
 public:
  enum Action { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
  static constexpr int kActions = 4;
  static constexpr int kSize = 13;
  static constexpr double kGoalReward = 10.0;
  static constexpr double kGamma = 0.9;

  struct Step {
    int s_next;
    double r;
    bool terminal;
  };

  explicit FourRoomEnv(int goal_row = 11, int goal_col = 11);

  static const std::array<std::string, kSize>& layout();

  int n_states() const { return static_cast<int>(cells_.size()); }
  int goal() const { return goal_; }
  int state_of(int row, int col) const;  // -1 for walls
  std::pair<int, int> cell_of(int s) const { return cells_.at(s); }

  Step step(int s, int a) const;
  /// Uniform over non-goal free cells.
  int random_start(Rng& rng) const;
  /// Non-goal states, i.e. those from which transitions are recorded.
  std::vector<int> start_states() const;

  TabularMdp as_tabular() const;

 private:
  std::vector<std::pair<int, int>> cells_;
  std::array<std::array<int, kSize>, kSize> index_{};
  int goal_;
};

inline constexpr int kFourRoomEpisodeCap = 500;

/// Uniform-random behaviour episodes from random starts, truncated after
/// episode_cap steps.
std::vector<Transition> fourroom_collect_dataset(const FourRoomEnv& env, Rng& rng, int n_transitions,
                                                 int episode_cap = kFourRoomEpisodeCap);

/// True when every non-goal (state, action) pair occurs at least once.
bool fourroom_covers_all(const FourRoomEnv& env, const std::vector<Transition>& dataset);

/// Uniform sample with replacement.
std::vector<Transition> fourroom_minibatch(const std::vector<Transition>& dataset, Rng& rng, int size = 64);

void write_dataset_csv(const std::vector<Transition>& dataset, const std::filesystem::path& path);
std::vector<Transition> read_dataset_csv(const std::filesystem::path& path);

}  // namespace polygrad
