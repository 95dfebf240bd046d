#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "awsgd/losses.hpp"

namespace awsgd {

enum class PiFamily {
  exp_saturating,          // 1 - e^{-x}
  clamp_linear,            // min{x, 1}
  clamp_power,             // min{(x/b)^a, 1}
  ratio,                   // 1 - 1/(1 + mu x)
  ratio_sqrt,              // 1 - 1/(1 + mu sqrt(x))
  star_squared_hinge,      // (beta/2)(1 - 1/(1 + mu sqrt(l)))
  star_gsh,                // exact lower envelope for the smooth hinge family
  abs_error_proportional,  // omega * abs-error loss
  zero_one_proportional,   // omega * zero-one loss
  uncertainty_binary,      // margin-magnitude rule for logistic models
  uncertainty_multiclass,  // top-score-gap rule for softmax models
  power_of_zeta,           // zeta^eta
  constant,                // p
};

// What a family consumes when it is evaluated inside a run.
enum class PiInput {
  scalar_loss,  // (estimated) value of the configured sampling loss
  margin,       // signed margin u = y x'theta (label required)
  abs_margin,   // |x'theta|, label-free
  gap,          // top-score gap, label-free
  zeta,         // the expected Polyak step (label required)
  none,         // input ignored
};

struct PiSpec {
  PiFamily family = PiFamily::constant;
  double a = 0.0;
  double b = 0.0;
  double mu = 0.0;
  double omega = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  double c = 0.0;
  double R = 0.0;
  double eta = 0.0;
  double p = 0.0;
  int k = 2;
  bool top2_gap = true;  // uncertainty_multiclass: top-2 statistic vs top-k

  static PiSpec exp_saturating();
  static PiSpec clamp_linear();
  static PiSpec clamp_power(double a, double b);
  static PiSpec ratio(double mu);
  static PiSpec ratio_sqrt(double mu);
  static PiSpec star_squared_hinge(double beta, double mu);
  static PiSpec star_gsh(double a, double beta, double rho);
  static PiSpec abs_error_proportional(double omega);
  static PiSpec zero_one_proportional(double omega);
  static PiSpec uncertainty_binary(double a, double beta, double c, double rho, double R);
  static PiSpec uncertainty_multiclass(double a, double beta, double c, double rho,
                                       double R, int k);
  static PiSpec power_of_zeta(double eta, double beta, double rho);
  static PiSpec constant(double p);

  PiInput input() const;
  bool has_primitive() const;
  // Families carrying an explicit beta scale (rebound to the policy beta
  // under adaptive-weight runs).
  bool has_beta_param() const;
  std::string name() const;
  void validate() const;
};

// pi(x) in [0,1]. `x` is interpreted per PiSpec::input().
double pi_eval(const PiSpec& spec, double x);

// Primitive with Pi(0) = 0; scalar-loss families and constant only.
double pi_primitive(const PiSpec& spec, double x);

// Inverse of the primitive; closed form where available, monotone bisection
// otherwise.
double pi_inverse(const PiSpec& spec, double y);

// beta * min{1/psi, rho}; zero when the gradient vanishes.
double zeta_polyak(const LossKind& kind, const Example& ex, const ModelParams& params,
                   double beta, double rho);

struct StepPolicy {
  enum class Kind { constant_weight, adaptive_weight };
  Kind kind = Kind::constant_weight;
  double gamma = 1.0;  // constant_weight
  double beta = 1.0;   // adaptive_weight
  double rho = 1.0;    // adaptive_weight

  static StepPolicy constant_weight(double gamma) {
    return {Kind::constant_weight, gamma, 0.0, 0.0};
  }
  static StepPolicy adaptive_weight(double beta, double rho) {
    return {Kind::adaptive_weight, 0.0, beta, rho};
  }
  bool is_adaptive() const { return kind == Kind::adaptive_weight; }
};

struct StepDraw {
  bool sampled = false;
  double step_size = 0.0;
  double pi_used = 0.0;
  double expected_step = 0.0;  // gamma*pi for constant weight, zeta for AWS
};

// Constant weight: z = gamma w.p. pi. Adaptive weight: z = zeta/pi w.p. pi;
// zeta = 0 short-circuits without consuming randomness; pi = 0 with zeta > 0
// is rejected as an inconsistent policy.
StepDraw draw_step(const StepPolicy& policy, double pi, double zeta,
                   std::mt19937_64& rng);

// Sampling input a run would feed `spec` when the exact loss is available.
double oracle_sampling_input(const PiSpec& spec, const LossKind& sampling_loss,
                             const Example& ex, const ModelParams& params);

struct ConditionReport {
  bool all_hold = true;
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();  // min(lhs - rhs)
  double worst_at = 0.0;  // margin / sample index where the worst slack occurs
  std::string detail;
};

// Theorem condition pi >= beta/(2(1-c)) * min{rho*psi, 1} over a sample set.
ConditionReport check_aws_condition(const PiSpec& spec, const LossKind& train_loss,
                                    const LossKind& sampling_loss, double beta,
                                    double rho, double c,
                                    const std::vector<std::pair<Example, ModelParams>>& samples);

struct AlphaBetaReport {
  bool alpha_holds = true;
  bool beta_holds = true;
  double worst_alpha_slack = std::numeric_limits<double>::infinity();  // rhs - lhs
  double worst_alpha_margin = 0.0;
  double worst_beta_slack = std::numeric_limits<double>::infinity();  // lhs - rhs
  double worst_beta_margin = 0.0;
  bool all_hold() const { return alpha_holds && beta_holds; }
};

// Margin-form convergence conditions
//   pi(u) l'(u)^2 R^2 (x2 if multiclass) <= alpha tilde_l(u)
//   pi(u) (-l'(u)) (rho_star - u)        >= beta tilde_l(u)
// evaluated over a margin grid. pi(u) = 0 with tilde_l(u) = 0 passes
// vacuously.
AlphaBetaReport check_alpha_beta_conditions(const PiSpec& pi, const LossKind& train_loss,
                                            const LossKind& eval_loss, double alpha,
                                            double beta, double rho_star, double R,
                                            const std::vector<double>& margin_grid,
                                            bool multiclass_factor2 = false);

}  // namespace awsgd
