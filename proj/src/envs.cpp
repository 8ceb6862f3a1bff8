#include "polygrad/envs.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace polygrad {

void TabularMdp::validate() const {
  const auto n = n_states();
  const auto m = n_actions();
  if (n == 0 || m == 0) throw std::invalid_argument("MDP needs states and actions");
  if (static_cast<Eigen::Index>(transition.size()) != m) throw std::invalid_argument("one transition matrix per action");
  if (mu.size() != n) throw std::invalid_argument("mu size mismatch");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  for (const auto& p : transition) {
    if (p.rows() != n || p.cols() != n) throw std::invalid_argument("transition matrix size mismatch");
    if ((p.array() < 0.0).any()) throw std::invalid_argument("negative transition probability");
    if (((p.rowwise().sum().array() - 1.0).abs() > 1e-12).any()) {
      throw std::invalid_argument("transition rows must sum to 1");
    }
  }
  if ((mu.array() < 0.0).any() || std::abs(mu.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("mu must be a distribution");
  }
}

namespace {

Vector dirichlet_ones(Rng& rng, int n) {
  std::gamma_distribution<double> g(1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v / v.sum();
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TabularMdp random_mdp(Rng& rng, int n_states, int n_actions, double gamma) {
  if (n_states < 2 || n_actions < 2) throw std::invalid_argument("random MDP needs at least 2 states and 2 actions");
  TabularMdp mdp;
  mdp.gamma = gamma;
  mdp.transition.assign(n_actions, Matrix(n_states, n_states));
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) mdp.transition[a].row(s) = dirichlet_ones(rng, n_states).transpose();
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  mdp.reward.resize(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) mdp.reward(s, a) = unit(rng);
  }
  mdp.mu = dirichlet_ones(rng, n_states);
  mdp.validate();
  return mdp;
}

Bandit2D::Bandit2D(std::uint64_t eval_seed, int n_eval) {
  if (n_eval <= 0) throw std::invalid_argument("bandit evaluation set must be non-empty");
  Rng rng(eval_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  eval_contexts_.reserve(n_eval);
  eval_rewards_.resize(n_eval, kBanditActions);
  for (int i = 0; i < n_eval; ++i) {
    const double x0 = normal(rng);
    const double x1 = normal(rng);
    eval_contexts_.emplace_back(x0, x1);
    for (int a = 0; a < kBanditActions; ++a) eval_rewards_(i, a) = reward(eval_contexts_.back(), a);
  }
}

double Bandit2D::reward(const Eigen::Vector2d& context, int action) {
  return sigmoid(context.dot(BanditLinearModel::embedding(action)));
}

std::vector<BanditSample> Bandit2D::sample_batch(Rng& rng, int batch_size) const {
  if (batch_size <= 0) throw std::invalid_argument("batch size must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> uniform_action(0, kBanditActions - 1);
  const double logp = -std::log(static_cast<double>(kBanditActions));
  std::vector<BanditSample> batch;
  batch.reserve(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    const double x0 = normal(rng);
    const double x1 = normal(rng);
    const Eigen::Vector2d x(x0, x1);
    const int a = uniform_action(rng);
    batch.push_back({x, a, reward(x, a), logp});
  }
  return batch;
}

double Bandit2D::policy_return(const BanditLinearModel& model) const {
  double total = 0.0;
  for (std::size_t i = 0; i < eval_contexts_.size(); ++i) {
    const Vector p = softmax(model.logits(eval_contexts_[i]));
    total += p.dot(eval_rewards_.row(static_cast<Eigen::Index>(i)).transpose());
  }
  return total / static_cast<double>(eval_contexts_.size());
}

BanditOptimum bandit_grid_search(const Bandit2D& env, double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("bad grid specification");
  const int n = static_cast<int>(std::llround((hi - lo) / step)) + 1;
  BanditOptimum best{{lo, lo}, -std::numeric_limits<double>::infinity()};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector2d theta(lo + i * step, lo + j * step);
      const double v = env.policy_return(BanditLinearModel(theta));
      if (v > best.value) best = {theta, v};
    }
  }
  return best;
}

BanditOptimum bandit_reference_optimum(const Bandit2D& env) {
  BanditOptimum best = bandit_grid_search(env, 0.0, 4.0, 0.1);
  double step = 0.1;
  const std::array<Eigen::Vector2d, 4> dirs{Eigen::Vector2d(1, 0), Eigen::Vector2d(-1, 0), Eigen::Vector2d(0, 1),
                                            Eigen::Vector2d(0, -1)};
  while (step > 1e-7) {
    bool improved = false;
    for (const auto& d : dirs) {
      const Eigen::Vector2d cand = best.theta + step * d;
      const double v = env.policy_return(BanditLinearModel(cand));
      if (v > best.value) {
        best = {cand, v};
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

const std::array<std::string, FourRoomEnv::kSize>& FourRoomEnv::layout() {
  static const std::array<std::string, kSize> grid{
      "#############",
      "#     #     #",
      "#     #     #",
      "#           #",
      "#     #     #",
      "#     #     #",
      "## ####     #",
      "#     ### ###",
      "#     #     #",
      "#     #     #",
      "#           #",
      "#     #     #",
      "#############",
  };
  return grid;
}

FourRoomEnv::FourRoomEnv(int goal_row, int goal_col) {
  for (auto& row : index_) row.fill(-1);
  const auto& grid = layout();
  for (int r = 0; r < kSize; ++r) {
    for (int c = 0; c < kSize; ++c) {
      if (grid[r][c] == ' ') {
        index_[r][c] = static_cast<int>(cells_.size());
        cells_.emplace_back(r, c);
      }
    }
  }
  goal_ = state_of(goal_row, goal_col);
  if (goal_ < 0) throw std::invalid_argument("goal must be a free cell");
}

int FourRoomEnv::state_of(int row, int col) const {
  if (row < 0 || row >= kSize || col < 0 || col >= kSize) return -1;
  return index_[row][col];
}

FourRoomEnv::Step FourRoomEnv::step(int s, int a) const {
  if (s < 0 || s >= n_states()) throw std::out_of_range("state out of range");
  if (a < 0 || a >= kActions) throw std::out_of_range("action out of range");
  if (s == goal_) return {s, 0.0, true};
  static constexpr std::array<std::array<int, 2>, kActions> moves{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
  const auto [r, c] = cells_[s];
  const int next = state_of(r + moves[a][0], c + moves[a][1]);
  const int s_next = next < 0 ? s : next;
  const bool at_goal = s_next == goal_;
  return {s_next, at_goal ? kGoalReward : 0.0, at_goal};
}

std::vector<int> FourRoomEnv::start_states() const {
  std::vector<int> out;
  for (int s = 0; s < n_states(); ++s) {
    if (s != goal_) out.push_back(s);
  }
  return out;
}

int FourRoomEnv::random_start(Rng& rng) const {
  std::uniform_int_distribution<int> pick(0, n_states() - 2);
  const int k = pick(rng);
  return k < goal_ ? k : k + 1;
}

TabularMdp FourRoomEnv::as_tabular() const {
  const int n = n_states();
  TabularMdp mdp;
  mdp.gamma = kGamma;
  mdp.transition.assign(kActions, Matrix::Zero(n, n));
  mdp.reward = Matrix::Zero(n, kActions);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < kActions; ++a) {
      const Step st = step(s, a);
      mdp.transition[a](s, st.s_next) = 1.0;
      mdp.reward(s, a) = st.r;
    }
  }
  mdp.mu = Vector::Constant(n, 1.0 / (n - 1));
  mdp.mu[goal_] = 0.0;
  mdp.validate();
  return mdp;
}

std::vector<Transition> fourroom_collect_dataset(const FourRoomEnv& env, Rng& rng, int n_transitions,
                                                 int episode_cap) {
  if (n_transitions < 1) throw std::invalid_argument("dataset needs at least one transition");
  if (episode_cap < 1) throw std::invalid_argument("episode cap must be positive");
  std::uniform_int_distribution<int> uniform_action(0, FourRoomEnv::kActions - 1);
  const double logp = -std::log(static_cast<double>(FourRoomEnv::kActions));
  std::vector<Transition> data;
  data.reserve(n_transitions);
  while (static_cast<int>(data.size()) < n_transitions) {
    int s = env.random_start(rng);
    for (int t = 0; t < episode_cap && static_cast<int>(data.size()) < n_transitions; ++t) {
      const int a = uniform_action(rng);
      const auto st = env.step(s, a);
      data.push_back({s, a, st.r, st.s_next, st.terminal, logp});
      if (st.terminal) break;
      s = st.s_next;
    }
  }
  return data;
}

bool fourroom_covers_all(const FourRoomEnv& env, const std::vector<Transition>& dataset) {
  std::vector<char> seen(static_cast<std::size_t>(env.n_states()) * FourRoomEnv::kActions, 0);
  for (const auto& t : dataset) seen[static_cast<std::size_t>(t.s) * FourRoomEnv::kActions + t.a] = 1;
  for (int s : env.start_states()) {
    for (int a = 0; a < FourRoomEnv::kActions; ++a) {
      if (!seen[static_cast<std::size_t>(s) * FourRoomEnv::kActions + a]) return false;
    }
  }
  return true;
}

std::vector<Transition> fourroom_minibatch(const std::vector<Transition>& dataset, Rng& rng, int size) {
  if (dataset.empty()) throw std::invalid_argument("cannot sample from an empty dataset");
  if (size <= 0) throw std::invalid_argument("minibatch size must be positive");
  std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);
  std::vector<Transition> batch;
  batch.reserve(size);
  for (int i = 0; i < size; ++i) batch.push_back(dataset[pick(rng)]);
  return batch;
}

void write_dataset_csv(const std::vector<Transition>& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "s,a,r,s_next,terminal,behavior_logprob\n" << std::setprecision(17);
  for (const auto& t : dataset) {
    out << t.s << ',' << t.a << ',' << t.r << ',' << t.s_next << ',' << (t.terminal ? 1 : 0) << ','
        << t.behavior_logprob << '\n';
  }
}

std::vector<Transition> read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "s,a,r,s_next,terminal,behavior_logprob") {
    throw std::runtime_error("unexpected dataset header in " + path.string());
  }
  std::vector<Transition> data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    Transition t;
    char comma = 0;
    int terminal = 0;
    if (!(ss >> t.s >> comma >> t.a >> comma >> t.r >> comma >> t.s_next >> comma >> terminal >> comma >>
          t.behavior_logprob)) {
      throw std::runtime_error("malformed dataset row: " + line);
    }
    t.terminal = terminal != 0;
    data.push_back(t);
  }
  return data;
}

}  // namespace polygrad
