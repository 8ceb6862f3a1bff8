#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace polygrad {

/// The two scalar learning signals that drive every update: the log importance
/// ratio (delta_o) and the return prediction error (delta_r).
class LearningSignals {
 public:
  LearningSignals(double delta_o, double delta_r);

  /// On-policy construction; delta_o is exactly zero.
  static LearningSignals on_policy(double delta_r) { return {0.0, delta_r}; }

  double delta_o() const { return delta_o_; }
  double delta_r() const { return delta_r_; }

 private:
  double delta_o_;
  double delta_r_;
};

// Arguments to exp() are clamped to this range before exponentiation.
inline constexpr double kExpClamp = 20.0;

double eval_f_sq(double x, double y);
double eval_huber_lambda(double y, double delta);
double eval_f_ml(double x, double y);
double eval_f_sil(double x, double y);
double eval_f_mla(double x, double y);
double eval_f_mla_param(double x, double y, double a_o, double a_r);

/// PPO trust-region indicator; zero on the (strict) boundaries and at y == 0.
double ppo_tau(double x, double y, double eps);
double eval_f_ppo(double x, double y, double eps);
double eval_f_mla_ppo(double x, double y, double a_o, double a_r, double eps);

enum class ScaleKind { SQ, Huber, ML, SIL, MLA, MLAParam, PpoClip, MlaPpo };

/// A named, parameterized map (delta_o, delta_r) -> scalar.
///
/// Parameters are validated on construction: Huber needs delta > 0, the
/// MLA family needs a_o, a_r >= 0 and the PPO family needs eps in (0, 1).
class ScaleFunction {
 public:
  static ScaleFunction sq();
  static ScaleFunction huber(double delta);
  static ScaleFunction ml();
  static ScaleFunction sil();
  static ScaleFunction mla();
  static ScaleFunction mla_param(double a_o, double a_r);
  static ScaleFunction ppo_clip(double eps);
  static ScaleFunction mla_ppo(double a_o, double a_r, double eps);

  /// Builds a scale function from a kind name ("sq", "huber", "ml", "sil",
  /// "mla", "mla_param", "ppo_clip", "mla_ppo") and a parameter map using the
  /// keys delta, a_o, a_r, eps. Missing parameters take documented defaults.
  static ScaleFunction from_name(const std::string& kind,
                                 const std::map<std::string, double>& params = {});

  double operator()(double x, double y) const;
  double operator()(const LearningSignals& s) const { return (*this)(s.delta_o(), s.delta_r()); }

  ScaleKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool is_trust_region() const { return kind_ == ScaleKind::PpoClip || kind_ == ScaleKind::MlaPpo; }
  double delta() const { return delta_; }
  double a_o() const { return a_o_; }
  double a_r() const { return a_r_; }
  double eps() const { return eps_; }

 private:
  ScaleFunction(ScaleKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

  ScaleKind kind_;
  std::string name_;
  double delta_ = 1.0;
  double a_o_ = 0.0;
  double a_r_ = 0.0;
  double eps_ = 0.2;
};

/// Every kind the library ships, at its default parameters.
std::vector<ScaleFunction> shipped_scale_functions();

struct ScanGrid {
  std::vector<double> xs;
  std::vector<double> ys;

  /// steps x steps points, evenly spaced and inclusive of both ends.
  static ScanGrid uniform(double xmin, double xmax, double ymin, double ymax, int steps);
  /// 101 x 101 over [-3, 3]^2.
  static ScanGrid default_grid() { return uniform(-3.0, 3.0, -3.0, 3.0, 101); }
};

struct Assumption1Violation {
  double x;
  double y;
  int constraint;  // 1 or 2
  std::string what;
};

struct Assumption1Report {
  std::vector<Assumption1Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Constraint 2 is only checked for x in this band around zero.
inline constexpr double kConstraint2Radius = 0.5;

struct Assumption1Options {
  /// Trust-region functions only need constraint 2 inside (log(1-eps), log(1+eps)).
  bool trust_region = false;
  double eps = 0.2;
  double radius = kConstraint2Radius;
};

Assumption1Report check_assumption1(const std::function<double(double, double)>& f,
                                    const ScanGrid& grid, const Assumption1Options& opts = {});
Assumption1Report check_assumption1(const ScaleFunction& f, const ScanGrid& grid);

}  // namespace polygrad
