#include "polygrad/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace polygrad {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// get(path, default) falls back to the default on malformed values; this throws instead.
template <class T>
void read_into(const pt::ptree& tree, const std::string& path, T& field) {
  if (tree.get_child_optional(path)) field = tree.get<T>(path);
}

void read_into(const pt::ptree& tree, const std::string& path, std::filesystem::path& field) {
  if (tree.get_child_optional(path)) field = tree.get<std::string>(path);
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment",
       {"env", "seeds", "iterations", "batch_size", "eval_every", "output_dir", "off_policy_correction", "workers"}},
      {"learning_rates", {"policy", "actor", "critic", "q_learning"}},
      {"rules", {"list"}},
      {"bandit2d", {"eval_seed", "eval_contexts"}},
      {"fourroom", {"dataset_size", "episode_cap", "goal_row", "goal_col"}},
  };
  return keys;
}

void reject_unknown(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }
}

}  // namespace

std::string env_name(EnvKind env) { return env == EnvKind::Bandit2D ? "bandit2d" : "fourroom"; }

void ExperimentConfig::validate() const {
  if (iterations < 0) throw std::invalid_argument("iterations must be non-negative");
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (rules.empty()) throw std::invalid_argument("at least one update rule is required");
  if (batch_size <= 0) throw std::invalid_argument("batch_size must be positive");
  if (eval_every <= 0) throw std::invalid_argument("eval_every must be positive");
  if (!(learning_rates.policy > 0.0) || !(learning_rates.actor > 0.0) || !(learning_rates.critic > 0.0) ||
      !(learning_rates.q_learning > 0.0)) {
    throw std::invalid_argument("learning rates must be positive");
  }
  if (workers < 0) throw std::invalid_argument("workers must be non-negative");
  if (env == EnvKind::Bandit2D) {
    if (bandit_eval_contexts <= 0) throw std::invalid_argument("eval_contexts must be positive");
    for (const auto& r : rules) {
      if (r.form.kind == FormKind::Pi) throw std::invalid_argument("bandit2d supports Q, V and P forms");
    }
  } else {
    if (dataset_size < 1 || episode_cap < 1) throw std::invalid_argument("dataset_size and episode_cap must be positive");
    for (const auto& r : rules) {
      if (r.form.kind == FormKind::Pi) throw std::invalid_argument("fourroom supports Q, V and P forms");
    }
  }
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }

  reject_unknown(tree);
  try {
    const std::string env = tree.get<std::string>("experiment.env");
    ExperimentConfig cfg = env == "bandit2d" ? default_bandit_config()
                           : env == "fourroom" ? default_fourroom_config()
                                               : throw ConfigError("unknown env '" + env + "'");

    if (auto v = tree.get_optional<std::string>("experiment.seeds")) {
      cfg.seeds.clear();
      for (const auto& s : split(*v, ',')) cfg.seeds.push_back(std::stoull(s));
    }
    read_into(tree, "experiment.iterations", cfg.iterations);
    read_into(tree, "experiment.batch_size", cfg.batch_size);
    read_into(tree, "experiment.eval_every", cfg.eval_every);
    read_into(tree, "experiment.output_dir", cfg.output_dir);
    read_into(tree, "experiment.off_policy_correction", cfg.off_policy_correction);
    read_into(tree, "experiment.workers", cfg.workers);

    read_into(tree, "learning_rates.policy", cfg.learning_rates.policy);
    read_into(tree, "learning_rates.actor", cfg.learning_rates.actor);
    read_into(tree, "learning_rates.critic", cfg.learning_rates.critic);
    read_into(tree, "learning_rates.q_learning", cfg.learning_rates.q_learning);

    if (auto v = tree.get_optional<std::string>("rules.list")) {
      cfg.rules.clear();
      for (const auto& r : split(*v, ';')) cfg.rules.push_back(parse_rule(r));
    }

    read_into(tree, "bandit2d.eval_seed", cfg.bandit_eval_seed);
    read_into(tree, "bandit2d.eval_contexts", cfg.bandit_eval_contexts);

    read_into(tree, "fourroom.dataset_size", cfg.dataset_size);
    read_into(tree, "fourroom.episode_cap", cfg.episode_cap);
    read_into(tree, "fourroom.goal_row", cfg.goal_row);
    read_into(tree, "fourroom.goal_col", cfg.goal_col);

    cfg.validate();
    return cfg;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ExperimentConfig default_bandit_config() {
  ExperimentConfig cfg;
  cfg.env = EnvKind::Bandit2D;
  cfg.rules = standard_rules();
  cfg.seeds = {0, 1, 2, 3, 4};
  cfg.iterations = 10000;
  cfg.batch_size = 32;
  cfg.eval_every = 100;
  cfg.learning_rates.policy = 0.05;
  cfg.output_dir = "out/bandit2d";
  cfg.off_policy_correction = true;
  return cfg;
}

ExperimentConfig default_fourroom_config() {
  ExperimentConfig cfg;
  cfg.env = EnvKind::FourRoom;
  for (const char* form : {"P", "Q"}) {
    for (const char* a_r : {"0", "0.1", "0.2", "0.5", "1"}) {
      cfg.rules.push_back(parse_rule(std::string(form) + ":mla_param(a_o=0,a_r=" + a_r + ")"));
    }
  }
  cfg.seeds = {0, 1, 2, 3, 4};
  cfg.iterations = 5000;
  cfg.batch_size = 64;
  cfg.eval_every = 250;
  cfg.learning_rates.actor = 0.1;
  cfg.learning_rates.critic = 0.1;
  cfg.learning_rates.q_learning = 0.01;
  cfg.output_dir = "out/fourroom";
  cfg.off_policy_correction = false;
  return cfg;
}

}  // namespace polygrad
