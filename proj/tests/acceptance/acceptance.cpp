// Acceptance suite: one PASS/FAIL line per primary criterion. Exits non-zero
// if any criterion fails.

#include "polygrad/checks.hpp"
#include "polygrad/cli.hpp"
#include "polygrad/harness.hpp"
#include "polygrad/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

using namespace polygrad;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const std::string& id, bool passed, const std::string& detail) {
  if (!passed) ++failures;
  std::cout << "[" << (passed ? "PASS" : "FAIL") << "] " << id << ": " << detail << std::endl;
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

void from_check(const std::string& id, const CheckResult& r, double time_limit) {
  const bool in_time = time_limit <= 0.0 || r.seconds < time_limit;
  std::string detail = fmt("%s worst=%.3e tol=%.1e %.2fs", r.name.c_str(), r.worst, r.tolerance, r.seconds);
  if (time_limit > 0.0) detail += fmt(" (limit %.0fs)", time_limit);
  if (!r.detail.empty()) detail += " | " + r.detail;
  report(id, r.passed && in_time, detail);
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::map<std::string, FinalSummary> by_rule(const std::vector<FinalSummary>& s) {
  std::map<std::string, FinalSummary> out;
  for (const auto& f : s) out[f.rule] = f;
  return out;
}

void criterion_6() {
  const auto t0 = Clock::now();
  const ExperimentConfig cfg = default_bandit_config();
  const auto records = run_bandit_suite(cfg);
  const double elapsed = seconds_since(t0);
  const auto summary = final_summary(records, "regret");
  const auto rules = by_rule(summary);
  const FinalSummary& mla = rules.at("P:mla");

  std::string best_other;
  double best_upper = 1e300;
  for (const auto& s : summary) {
    if (s.rule == mla.rule) continue;
    if (s.mean + s.std_error < best_upper) {
      best_upper = s.mean + s.std_error;
      best_other = s.rule;
    }
  }
  const bool a = mla.mean - mla.std_error <= best_upper;
  const FinalSummary& q_sq = rules.at("Q:sq");
  const FinalSummary& p_sq = rules.at("P:sq");
  const bool b = q_sq.mean - q_sq.std_error > p_sq.mean + p_sq.std_error;

  std::ostringstream os;
  os << fmt("%zu seeds x %d iterations, %.1fs (limit 600s) | ", cfg.seeds.size(), cfg.iterations, elapsed);
  os << fmt("(a) %s: P:mla %.6f+-%.6f vs best other %s upper %.6f; ", a ? "ok" : "violated", mla.mean,
            mla.std_error, best_other.c_str(), best_upper);
  os << fmt("(b) %s: Q:sq %.6f+-%.6f vs P:sq %.6f+-%.6f | ranking:", b ? "ok" : "violated", q_sq.mean,
            q_sq.std_error, p_sq.mean, p_sq.std_error);
  auto ranked = summary;
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.mean < y.mean; });
  for (const auto& s : ranked) os << " " << s.rule << "=" << fmt("%.4f", s.mean);
  report("6 bandit regret ordering", a && b && elapsed < 600.0, os.str());
}

void criterion_7() {
  const Bandit2D env;
  const BanditOptimum opt = bandit_grid_search(env, 0.0, 2.0, 0.05);
  const double dist = (opt.theta - kBanditThetaStar).lpNorm<Eigen::Infinity>();
  const double j_star = env.policy_return(BanditLinearModel(kBanditThetaStar));
  report("7 bandit grid argmax near (1,1)", dist <= 0.05 + 1e-12,
         fmt("argmax (%.2f, %.2f) J=%.6f; J(1,1)=%.6f; distance %.2f (allowed 0.05)", opt.theta[0], opt.theta[1],
             opt.value, j_star, dist));
}

void criterion_8() {
  const auto t0 = Clock::now();
  const ExperimentConfig cfg = default_fourroom_config();
  const auto records = run_fourroom_suite(cfg);
  const double elapsed = seconds_since(t0);
  const auto rules = by_rule(final_summary(records, "return"));
  bool ok = elapsed < 600.0;
  std::ostringstream os;
  os << fmt("%zu seeds x %d updates, %.1fs (limit 600s)", cfg.seeds.size(), cfg.iterations, elapsed);
  for (const char* form : {"P", "Q"}) {
    const auto key = [&](const char* a_r) { return std::string(form) + ":mla(0," + a_r + ")"; };
    const double base = rules.at(key("0")).mean;
    os << " | " << (form[0] == 'P' ? "PG" : "QL") << fmt(" base %.4f:", base);
    for (const char* a_r : {"0.1", "0.2", "0.5", "1"}) {
      const double m = rules.at(key(a_r)).mean;
      const bool strict = std::string(a_r) == "0.5" || std::string(a_r) == "1";
      const bool good = strict ? m > base : m >= base;
      ok = ok && good;
      os << fmt(" %s=%.4f%s", a_r, m, good ? "" : "(!)");
    }
  }
  report("8 FourRoom alpha_r >= baseline", ok, os.str());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion_9() {
  const auto root = std::filesystem::temp_directory_path() / "polygrad_acceptance_determinism";
  std::filesystem::remove_all(root);
  std::string first;
  bool ok = true;
  std::ostringstream os;
  for (const char* run : {"a", "b"}) {
    const std::string dir = (root / run).string();
    const char* argv[] = {"polygrad", "bandit2d", "--seed", "7", "--out", dir.c_str()};
    std::ostringstream out, err;
    const int code = cli_main(6, argv, out, err);
    if (code != kExitOk) {
      ok = false;
      os << "run " << run << " exited " << code << ": " << err.str();
      continue;
    }
    const std::string bytes = slurp(root / run / "bandit2d.csv");
    if (first.empty()) {
      first = bytes;
    } else {
      ok = ok && !bytes.empty() && bytes == first;
    }
  }
  os << "two `bandit2d --seed 7` runs, CSV size " << first.size() << " bytes, "
     << (ok ? "byte-identical" : "differ");
  report("9 determinism", ok, os.str());
  std::filesystem::remove_all(root);
}

}  // namespace

int main() {
  from_check("1 PGPB unbiasedness", check_pgpb_unbiased(20), 30.0);
  from_check("2 form identities", check_form_identities(1000), 5.0);
  from_check("3 entropy identity", check_entropy_identity(), 0.0);
  from_check("4 PPO equivalence", check_ppo_equivalence(1000), 30.0);
  from_check("5 scale constraints", check_scale_constraints(), 0.0);
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
