#pragma once

#include "polygrad/harness.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace polygrad {

/// Columns rule,seed,iteration,metric,value. Rule names containing commas are
/// double-quoted.
void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
std::vector<RunRecord> read_csv(const std::filesystem::path& path);

struct Curve {
  std::string rule;
  std::vector<int> iterations;
  std::vector<double> mean;
};

/// Per-rule mean over seeds, in first-appearance order of the rules.
std::vector<Curve> mean_curves(const std::vector<RunRecord>& records, const std::string& metric);

/// One polyline per rule (mean over seeds), with axis labels and a legend.
void emit_svg_lineplot(const std::vector<RunRecord>& records, const std::filesystem::path& path,
                       const std::string& metric);

struct FinalSummary {
  std::string rule;
  double mean = 0.0;
  double std_error = 0.0;
  int n = 0;
};

/// Seed mean and standard error of the metric at each run's last checkpoint.
std::vector<FinalSummary> final_summary(const std::vector<RunRecord>& records, const std::string& metric);

}  // namespace polygrad
