#include "polygrad/cli.hpp"

#include "polygrad/checks.hpp"
#include "polygrad/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace polygrad {

namespace {

std::map<std::string, double> parse_kv(const std::string& text) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key=value in --params, got '" + item + "'");
    out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  return out;
}

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

ExperimentConfig resolve_config(const RunOptions& opts, EnvKind env) {
  ExperimentConfig cfg = opts.config_path.empty()
                             ? (env == EnvKind::Bandit2D ? default_bandit_config() : default_fourroom_config())
                             : load_config(opts.config_path);
  if (cfg.env != env) throw ConfigError("config env '" + env_name(cfg.env) + "' does not match subcommand");
  if (opts.seed) cfg.seeds = {*opts.seed};
  if (!opts.out_dir.empty()) {
    cfg.output_dir = opts.out_dir;
  } else if (const char* env_out = std::getenv("POLYGRAD_OUT"); env_out && *env_out) {
    cfg.output_dir = env_out;
  }
  cfg.validate();
  return cfg;
}

void print_summary(std::ostream& out, const std::vector<RunRecord>& records, const std::string& metric) {
  out << metric << " at final checkpoint (mean +- s.e. over seeds)\n";
  for (const auto& s : final_summary(records, metric)) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "  %-32s %12.6f +- %.6f  (n=%d)\n", s.rule.c_str(), s.mean, s.std_error, s.n);
    out << buf;
  }
}

int run_experiment(const RunOptions& opts, EnvKind env, std::ostream& out) {
  const ExperimentConfig cfg = resolve_config(opts, env);
  const std::string stem = env_name(env);
  const auto records = env == EnvKind::Bandit2D ? run_bandit_suite(cfg) : run_fourroom_suite(cfg);
  const auto csv = cfg.output_dir / (stem + ".csv");
  emit_csv(records, csv);
  out << "wrote " << csv.string() << "\n";
  const std::vector<std::string> metrics =
      env == EnvKind::Bandit2D ? std::vector<std::string>{"regret", "distance"} : std::vector<std::string>{"return"};
  for (const auto& metric : metrics) {
    const auto svg = cfg.output_dir / (stem + "_" + metric + ".svg");
    emit_svg_lineplot(records, svg, metric);
    out << "wrote " << svg.string() << "\n";
    print_summary(out, records, metric);
  }
  return kExitOk;
}

int run_verify(std::ostream& out) {
  bool ok = true;
  for (const auto& r : run_theorem_checks()) {
    out << format_check(r) << "\n";
    ok = ok && r.passed;
  }
  out << (ok ? "all theorem checks passed" : "theorem checks FAILED") << "\n";
  return ok ? kExitOk : kExitVerifyFailed;
}

struct TableOptions {
  std::string fn = "mla";
  std::string params;
  double xmin = -3.0, xmax = 3.0, ymin = -3.0, ymax = 3.0;
  int steps = 101;
  std::string out_file;
};

int run_scale_table(const TableOptions& t, std::ostream& out) {
  const ScaleFunction f = ScaleFunction::from_name(t.fn, parse_kv(t.params));
  const ScanGrid grid = ScanGrid::uniform(t.xmin, t.xmax, t.ymin, t.ymax, t.steps);
  std::ofstream file;
  if (!t.out_file.empty()) {
    file.open(t.out_file, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + t.out_file);
  }
  std::ostream& sink = t.out_file.empty() ? out : file;
  sink << "x,y,f\n" << std::setprecision(17);
  for (double x : grid.xs) {
    for (double y : grid.ys) sink << x << ',' << y << ',' << f(x, y) << '\n';
  }
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parametric policy-gradient update rules: experiments and checks", "polygrad"};
  app.require_subcommand(1);

  RunOptions bandit_opts, fourroom_opts;
  const auto add_run_options = [](CLI::App* sub, RunOptions& o) {
    sub->add_option("--config", o.config_path, "Experiment config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Run a single seed instead of the configured list");
    sub->add_option("--out", o.out_dir, "Output directory (default: $POLYGRAD_OUT, then the config)");
  };
  auto* bandit = app.add_subcommand("bandit2d", "2D contextual bandit comparison of the 12 update rules");
  add_run_options(bandit, bandit_opts);
  auto* fourroom = app.add_subcommand("fourroom", "Offline FourRoom training with parametric scaling");
  add_run_options(fourroom, fourroom_opts);
  auto* verify = app.add_subcommand("verify", "Run the exact-oracle theorem and property checks");

  TableOptions table;
  auto* scale_table = app.add_subcommand("scale-table", "Tabulate a scaling function on a grid as CSV x,y,f");
  scale_table->add_option("--fn", table.fn, "Scale function name")->capture_default_str();
  scale_table->add_option("--params", table.params, "Parameters as k=v,... (delta, a_o, a_r, eps)");
  scale_table->add_option("--xmin", table.xmin)->capture_default_str();
  scale_table->add_option("--xmax", table.xmax)->capture_default_str();
  scale_table->add_option("--ymin", table.ymin)->capture_default_str();
  scale_table->add_option("--ymax", table.ymax)->capture_default_str();
  scale_table->add_option("--steps", table.steps, "Points per axis")->capture_default_str();
  scale_table->add_option("--out", table.out_file, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitConfigError;
  }

  try {
    if (*bandit) return run_experiment(bandit_opts, EnvKind::Bandit2D, out);
    if (*fourroom) return run_experiment(fourroom_opts, EnvKind::FourRoom, out);
    if (*verify) return run_verify(out);
    if (*scale_table) return run_scale_table(table, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  err << app.help();
  return kExitConfigError;
}

}  // namespace polygrad
