#include "polygrad/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace polygrad {

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw std::invalid_argument("no records to write");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "rule,seed,iteration,metric,value\n" << std::setprecision(17);
  for (const auto& rec : records) {
    for (const auto& cp : rec.checkpoints) {
      for (const auto& [metric, value] : cp.metrics) {
        out << quote(rec.rule) << ',' << rec.seed << ',' << cp.iteration << ',' << quote(metric) << ',' << value
            << '\n';
      }
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<RunRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "rule,seed,iteration,metric,value") {
    throw std::runtime_error("unexpected header in " + path.string());
  }
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw std::runtime_error("malformed row: " + line);
    const std::uint64_t seed = std::stoull(f[1]);
    const int iteration = std::stoi(f[2]);
    const double value = std::stod(f[4]);
    if (records.empty() || records.back().rule != f[0] || records.back().seed != seed) {
      records.push_back({f[0], seed, {}});
    }
    auto& cps = records.back().checkpoints;
    if (cps.empty() || cps.back().iteration != iteration) cps.push_back({iteration, {}});
    cps.back().metrics[f[3]] = value;
  }
  return records;
}

std::vector<Curve> mean_curves(const std::vector<RunRecord>& records, const std::string& metric) {
  std::vector<Curve> curves;
  std::map<std::string, std::size_t> slot;
  std::vector<std::map<int, std::pair<double, int>>> sums;
  for (const auto& rec : records) {
    auto [it, inserted] = slot.try_emplace(rec.rule, curves.size());
    if (inserted) {
      curves.push_back({rec.rule, {}, {}});
      sums.emplace_back();
    }
    for (const auto& cp : rec.checkpoints) {
      const auto m = cp.metrics.find(metric);
      if (m == cp.metrics.end()) continue;
      auto& acc = sums[it->second][cp.iteration];
      acc.first += m->second;
      acc.second += 1;
    }
  }
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (const auto& [iteration, acc] : sums[i]) {
      curves[i].iterations.push_back(iteration);
      curves[i].mean.push_back(acc.first / acc.second);
    }
  }
  return curves;
}

void emit_svg_lineplot(const std::vector<RunRecord>& records, const std::filesystem::path& path,
                       const std::string& metric) {
  if (records.empty()) throw std::invalid_argument("no records to plot");
  const auto curves = mean_curves(records, metric);

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.mean.size(); ++i) {
      xmin = std::min(xmin, double(c.iterations[i]));
      xmax = std::max(xmax, double(c.iterations[i]));
      ymin = std::min(ymin, c.mean[i]);
      ymax = std::max(ymax, c.mean[i]);
    }
  }
  if (!std::isfinite(xmin)) throw std::invalid_argument("metric '" + metric + "' not present in records");
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;

  constexpr double width = 800, height = 500, left = 80, right = 220, top = 30, bottom = 60;
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  const auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  const auto sy = [&](double y) { return top + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                  "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939"};

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    out << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
        << xv << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << yv
        << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
      << "\" font-size=\"13\" text-anchor=\"middle\">iteration</text>\n";
  out << "<text x=\"20\" y=\"" << top + ph / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << top + ph / 2 << ")\">" << xml_escape(metric) << " (mean over seeds)</text>\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* colour = palette[i % std::size(palette)];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t j = 0; j < curves[i].mean.size(); ++j) {
      out << (j ? " " : "") << sx(curves[i].iterations[j]) << ',' << sy(curves[i].mean[j]);
    }
    out << "\"><title>" << xml_escape(curves[i].rule) << "</title></polyline>\n";
    const double ly = top + 14.0 * i + 10;
    out << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 35 << "\" y2=\"" << ly
        << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">"
        << xml_escape(curves[i].rule) << "</text>\n";
  }
  out << "</svg>\n";
}

std::vector<FinalSummary> final_summary(const std::vector<RunRecord>& records, const std::string& metric) {
  std::vector<FinalSummary> out;
  std::map<std::string, std::vector<double>> finals;
  for (const auto& rec : records) {
    if (rec.checkpoints.empty()) continue;
    const auto& last = rec.checkpoints.back().metrics;
    const auto m = last.find(metric);
    if (m == last.end()) continue;
    if (!finals.count(rec.rule)) out.push_back({rec.rule, 0.0, 0.0, 0});
    finals[rec.rule].push_back(m->second);
  }
  for (auto& s : out) {
    const auto& v = finals[s.rule];
    s.n = static_cast<int>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= s.n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    s.mean = mean;
    s.std_error = s.n > 1 ? std::sqrt(var / (s.n - 1) / s.n) : 0.0;
  }
  return out;
}

}  // namespace polygrad
