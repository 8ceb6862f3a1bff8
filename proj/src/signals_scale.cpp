#include "polygrad/signals_scale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace polygrad {

namespace {

double clamped_exp(double v) { return std::exp(std::clamp(v, -kExpClamp, kExpClamp)); }

void require_finite(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("scale function arguments must be finite");
  }
}

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("PPO clip eps must lie in (0, 1)");
  }
}

void require_alphas(double a_o, double a_r) {
  if (!(a_o >= 0.0) || !(a_r >= 0.0) || !std::isfinite(a_o) || !std::isfinite(a_r)) {
    throw std::invalid_argument("MLA coefficients a_o, a_r must be finite and non-negative");
  }
}

bool not_below(double hi, double lo) {
  return hi >= lo - 1e-12 * (1.0 + std::max(std::abs(hi), std::abs(lo)));
}

std::string format_param(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

LearningSignals::LearningSignals(double delta_o, double delta_r) : delta_o_(delta_o), delta_r_(delta_r) {
  if (!std::isfinite(delta_o) || !std::isfinite(delta_r)) {
    throw std::invalid_argument("learning signals must be finite");
  }
}

double eval_f_sq(double x, double y) { return clamped_exp(x) * y; }

double eval_huber_lambda(double y, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("Huber delta must be positive");
  return std::clamp(y, -delta, delta);
}

double eval_f_ml(double x, double y) { return clamped_exp(x) * (clamped_exp(y) - 1.0); }

double eval_f_sil(double x, double y) { return clamped_exp(x) * std::max(y, 0.0); }

double eval_f_mla(double x, double y) {
  const double shift = 1.0 + x;
  if (y <= -shift && -shift <= 0.0) {
    return -0.5 * shift * shift;
  }
  return y * std::max(shift + 0.5 * y, 0.0);
}

double eval_f_mla_param(double x, double y, double a_o, double a_r) {
  const double shift = 1.0 + a_o * x;
  return y * std::max(shift + a_r * y, std::max(shift, 0.0) / 2.0);
}

double ppo_tau(double x, double y, double eps) {
  require_eps(eps);
  if (y > 0.0 && x < std::log1p(eps)) return 1.0;
  if (y < 0.0 && x > std::log1p(-eps)) return 1.0;
  return 0.0;
}

double eval_f_ppo(double x, double y, double eps) {
  const double tau = ppo_tau(x, y, eps);
  return tau == 0.0 ? 0.0 : clamped_exp(x) * y;
}

double eval_f_mla_ppo(double x, double y, double a_o, double a_r, double eps) {
  const double tau = ppo_tau(x, y, eps);
  return tau == 0.0 ? 0.0 : eval_f_mla_param(x, y, a_o, a_r);
}

ScaleFunction ScaleFunction::sq() { return {ScaleKind::SQ, "sq"}; }

ScaleFunction ScaleFunction::huber(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("Huber delta must be positive");
  ScaleFunction f(ScaleKind::Huber, "huber(" + format_param(delta) + ")");
  f.delta_ = delta;
  return f;
}

ScaleFunction ScaleFunction::ml() { return {ScaleKind::ML, "ml"}; }
ScaleFunction ScaleFunction::sil() { return {ScaleKind::SIL, "sil"}; }
ScaleFunction ScaleFunction::mla() { return {ScaleKind::MLA, "mla"}; }

ScaleFunction ScaleFunction::mla_param(double a_o, double a_r) {
  require_alphas(a_o, a_r);
  ScaleFunction f(ScaleKind::MLAParam, "mla(" + format_param(a_o) + "," + format_param(a_r) + ")");
  f.a_o_ = a_o;
  f.a_r_ = a_r;
  return f;
}

ScaleFunction ScaleFunction::ppo_clip(double eps) {
  require_eps(eps);
  ScaleFunction f(ScaleKind::PpoClip, "ppo(" + format_param(eps) + ")");
  f.eps_ = eps;
  return f;
}

ScaleFunction ScaleFunction::mla_ppo(double a_o, double a_r, double eps) {
  require_alphas(a_o, a_r);
  require_eps(eps);
  ScaleFunction f(ScaleKind::MlaPpo,
                  "mla_ppo(" + format_param(a_o) + "," + format_param(a_r) + "," + format_param(eps) + ")");
  f.a_o_ = a_o;
  f.a_r_ = a_r;
  f.eps_ = eps;
  return f;
}

ScaleFunction ScaleFunction::from_name(const std::string& kind, const std::map<std::string, double>& params) {
  const auto get = [&](const char* key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  for (const auto& [key, _] : params) {
    if (key != "delta" && key != "a_o" && key != "a_r" && key != "eps") {
      throw std::invalid_argument("unknown scale parameter '" + key + "'");
    }
  }
  if (kind == "sq") return sq();
  if (kind == "huber") return huber(get("delta", 1.0));
  if (kind == "ml") return ml();
  if (kind == "sil") return sil();
  if (kind == "mla") return mla();
  if (kind == "mla_param") return mla_param(get("a_o", 1.0), get("a_r", 0.5));
  if (kind == "ppo_clip" || kind == "ppo") return ppo_clip(get("eps", 0.2));
  if (kind == "mla_ppo") return mla_ppo(get("a_o", 1.0), get("a_r", 0.5), get("eps", 0.2));
  throw std::invalid_argument("unknown scale function '" + kind + "'");
}

double ScaleFunction::operator()(double x, double y) const {
  require_finite(x, y);
  switch (kind_) {
    case ScaleKind::SQ:
      return eval_f_sq(x, y);
    case ScaleKind::Huber:
      return clamped_exp(x) * eval_huber_lambda(y, delta_);
    case ScaleKind::ML:
      return eval_f_ml(x, y);
    case ScaleKind::SIL:
      return eval_f_sil(x, y);
    case ScaleKind::MLA:
      return eval_f_mla(x, y);
    case ScaleKind::MLAParam:
      return eval_f_mla_param(x, y, a_o_, a_r_);
    case ScaleKind::PpoClip:
      return eval_f_ppo(x, y, eps_);
    case ScaleKind::MlaPpo:
      return eval_f_mla_ppo(x, y, a_o_, a_r_, eps_);
  }
  throw std::logic_error("unhandled scale kind");
}

std::vector<ScaleFunction> shipped_scale_functions() {
  return {ScaleFunction::sq(),           ScaleFunction::huber(1.0),          ScaleFunction::ml(),
          ScaleFunction::sil(),          ScaleFunction::mla(),               ScaleFunction::mla_param(1.0, 0.5),
          ScaleFunction::ppo_clip(0.2),  ScaleFunction::mla_ppo(1.0, 0.5, 0.2)};
}

ScanGrid ScanGrid::uniform(double xmin, double xmax, double ymin, double ymax, int steps) {
  if (steps < 2) throw std::invalid_argument("grid needs at least 2 steps per axis");
  if (!(xmax > xmin) || !(ymax > ymin)) throw std::invalid_argument("grid bounds must be increasing");
  ScanGrid g;
  g.xs.reserve(steps);
  g.ys.reserve(steps);
  for (int i = 0; i < steps; ++i) {
    g.xs.push_back(xmin + (xmax - xmin) * i / (steps - 1));
    g.ys.push_back(ymin + (ymax - ymin) * i / (steps - 1));
  }
  return g;
}

Assumption1Report check_assumption1(const std::function<double(double, double)>& f, const ScanGrid& grid,
                                    const Assumption1Options& opts) {
  Assumption1Report report;
  auto xs = grid.xs;
  auto ys = grid.ys;
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());

  const auto add = [&](double x, double y, int c, std::string what) {
    report.violations.push_back({x, y, c, std::move(what)});
  };

  // Constraint 1: f(x, 0) = 0, sign agreement, non-decreasing in y.
  for (double x : xs) {
    if (f(x, 0.0) != 0.0) add(x, 0.0, 1, "f(x, 0) != 0");
    double prev = 0.0;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double v = f(x, ys[j]);
      if (ys[j] * v < 0.0) add(x, ys[j], 1, "sign disagrees with delta_r");
      if (j > 0 && !not_below(v, prev)) add(x, ys[j], 1, "decreasing in delta_r");
      prev = v;
    }
  }

  // Constraint 2: |f| non-decreasing in x near x = 0.
  double lo = -opts.radius;
  double hi = opts.radius;
  if (opts.trust_region) {
    lo = std::max(lo, std::log1p(-opts.eps));
    hi = std::min(hi, std::log1p(opts.eps));
  }
  std::vector<double> band;
  for (double x : xs) {
    // Strict inequalities keep trust-region boundaries out of the band.
    if (opts.trust_region ? (x > lo && x < hi) : (x >= lo && x <= hi)) band.push_back(x);
  }
  for (double y : ys) {
    for (std::size_t i = 1; i < band.size(); ++i) {
      if (!not_below(std::abs(f(band[i], y)), std::abs(f(band[i - 1], y)))) {
        add(band[i], y, 2, "|f| decreasing in delta_o near 0");
      }
    }
  }
  return report;
}

Assumption1Report check_assumption1(const ScaleFunction& f, const ScanGrid& grid) {
  Assumption1Options opts;
  opts.trust_region = f.is_trust_region();
  opts.eps = f.eps();
  return check_assumption1([&f](double x, double y) { return f(x, y); }, grid, opts);
}

}  // namespace polygrad
