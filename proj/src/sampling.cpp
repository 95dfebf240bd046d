#include "awsgd/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace awsgd {

namespace {
double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

PiSpec PiSpec::exp_saturating() {
  PiSpec s;
  s.family = PiFamily::exp_saturating;
  return s;
}
PiSpec PiSpec::clamp_linear() {
  PiSpec s;
  s.family = PiFamily::clamp_linear;
  return s;
}
PiSpec PiSpec::clamp_power(double a, double b) {
  PiSpec s;
  s.family = PiFamily::clamp_power;
  s.a = a;
  s.b = b;
  s.validate();
  return s;
}
PiSpec PiSpec::ratio(double mu) {
  PiSpec s;
  s.family = PiFamily::ratio;
  s.mu = mu;
  s.validate();
  return s;
}
PiSpec PiSpec::ratio_sqrt(double mu) {
  PiSpec s;
  s.family = PiFamily::ratio_sqrt;
  s.mu = mu;
  s.validate();
  return s;
}
PiSpec PiSpec::star_squared_hinge(double beta, double mu) {
  PiSpec s;
  s.family = PiFamily::star_squared_hinge;
  s.beta = beta;
  s.mu = mu;
  s.validate();
  return s;
}
PiSpec PiSpec::star_gsh(double a, double beta, double rho) {
  PiSpec s;
  s.family = PiFamily::star_gsh;
  s.a = a;
  s.beta = beta;
  s.rho = rho;
  s.validate();
  return s;
}
PiSpec PiSpec::abs_error_proportional(double omega) {
  PiSpec s;
  s.family = PiFamily::abs_error_proportional;
  s.omega = omega;
  s.validate();
  return s;
}
PiSpec PiSpec::zero_one_proportional(double omega) {
  PiSpec s;
  s.family = PiFamily::zero_one_proportional;
  s.omega = omega;
  s.validate();
  return s;
}
PiSpec PiSpec::uncertainty_binary(double a, double beta, double c, double rho, double R) {
  PiSpec s;
  s.family = PiFamily::uncertainty_binary;
  s.a = a;
  s.beta = beta;
  s.c = c;
  s.rho = rho;
  s.R = R;
  s.validate();
  return s;
}
PiSpec PiSpec::uncertainty_multiclass(double a, double beta, double c, double rho,
                                      double R, int k) {
  PiSpec s;
  s.family = PiFamily::uncertainty_multiclass;
  s.a = a;
  s.beta = beta;
  s.c = c;
  s.rho = rho;
  s.R = R;
  s.k = k;
  s.validate();
  return s;
}
PiSpec PiSpec::power_of_zeta(double eta, double beta, double rho) {
  PiSpec s;
  s.family = PiFamily::power_of_zeta;
  s.eta = eta;
  s.beta = beta;
  s.rho = rho;
  s.validate();
  return s;
}
PiSpec PiSpec::constant(double p) {
  PiSpec s;
  s.family = PiFamily::constant;
  s.p = p;
  s.validate();
  return s;
}

void PiSpec::validate() const {
  switch (family) {
    case PiFamily::exp_saturating:
    case PiFamily::clamp_linear:
      break;
    case PiFamily::clamp_power:
      require(a > 0.0 && b > 0.0, "clamp_power: a > 0 and b > 0 required");
      break;
    case PiFamily::ratio:
    case PiFamily::ratio_sqrt:
      require(mu > 0.0, "ratio family: mu > 0 required");
      break;
    case PiFamily::star_squared_hinge:
      require(beta > 0.0 && beta <= 2.0, "star_squared_hinge: beta in (0,2]");
      require(mu > 0.0, "star_squared_hinge: mu > 0 required");
      break;
    case PiFamily::star_gsh:
      require(a >= 1.0, "star_gsh: a >= 1 required");
      require(beta > 0.0 && beta <= 1.0, "star_gsh: beta in (0,1]");
      require(rho > 1.0, "star_gsh: rho > 1 required");
      break;
    case PiFamily::abs_error_proportional:
      require(omega > 0.0 && omega <= 0.5, "abs_error_proportional: omega in (0,1/2]");
      break;
    case PiFamily::zero_one_proportional:
      require(omega > 0.0 && omega <= 1.0, "zero_one_proportional: omega in (0,1]");
      break;
    case PiFamily::uncertainty_binary:
    case PiFamily::uncertainty_multiclass:
      require(a > 0.0 && a <= 0.5, "uncertainty family: a in (0,1/2]");
      require(c > 0.0 && c < 1.0, "uncertainty family: c in (0,1)");
      require(beta > 0.0 && rho > 0.0 && R > 0.0,
              "uncertainty family: beta, rho, R must be positive");
      if (family == PiFamily::uncertainty_multiclass)
        require(k >= 2, "uncertainty_multiclass: k >= 2 required");
      break;
    case PiFamily::power_of_zeta:
      require(eta >= 0.0, "power_of_zeta: eta >= 0 required");
      require(beta > 0.0 && rho > 0.0, "power_of_zeta: beta, rho must be positive");
      break;
    case PiFamily::constant:
      require(p >= 0.0 && p <= 1.0, "constant: p in [0,1]");
      break;
  }
}

PiInput PiSpec::input() const {
  switch (family) {
    case PiFamily::exp_saturating:
    case PiFamily::clamp_linear:
    case PiFamily::clamp_power:
    case PiFamily::ratio:
    case PiFamily::ratio_sqrt:
    case PiFamily::star_squared_hinge:
    case PiFamily::abs_error_proportional:
    case PiFamily::zero_one_proportional:
      return PiInput::scalar_loss;
    case PiFamily::star_gsh:
      return PiInput::margin;
    case PiFamily::uncertainty_binary:
      return PiInput::abs_margin;
    case PiFamily::uncertainty_multiclass:
      return PiInput::gap;
    case PiFamily::power_of_zeta:
      return PiInput::zeta;
    case PiFamily::constant:
      return PiInput::none;
  }
  return PiInput::none;
}

bool PiSpec::has_primitive() const {
  switch (family) {
    case PiFamily::exp_saturating:
    case PiFamily::clamp_linear:
    case PiFamily::clamp_power:
    case PiFamily::ratio:
    case PiFamily::ratio_sqrt:
    case PiFamily::constant:
      return true;
    default:
      return false;
  }
}

bool PiSpec::has_beta_param() const {
  switch (family) {
    case PiFamily::star_squared_hinge:
    case PiFamily::star_gsh:
    case PiFamily::uncertainty_binary:
    case PiFamily::uncertainty_multiclass:
    case PiFamily::power_of_zeta:
      return true;
    default:
      return false;
  }
}

std::string PiSpec::name() const {
  switch (family) {
    case PiFamily::exp_saturating: return "exp_saturating";
    case PiFamily::clamp_linear: return "clamp_linear";
    case PiFamily::clamp_power: return "clamp_power";
    case PiFamily::ratio: return "ratio";
    case PiFamily::ratio_sqrt: return "ratio_sqrt";
    case PiFamily::star_squared_hinge: return "star_squared_hinge";
    case PiFamily::star_gsh: return "star_gsh";
    case PiFamily::abs_error_proportional: return "abs_error_proportional";
    case PiFamily::zero_one_proportional: return "zero_one_proportional";
    case PiFamily::uncertainty_binary: return "uncertainty_binary";
    case PiFamily::uncertainty_multiclass: return "uncertainty_multiclass";
    case PiFamily::power_of_zeta: return "power_of_zeta";
    case PiFamily::constant: return "constant";
  }
  return "?";
}

double pi_eval(const PiSpec& spec, double x) {
  switch (spec.family) {
    case PiFamily::exp_saturating:
      return clamp01(-std::expm1(-std::max(x, 0.0)));
    case PiFamily::clamp_linear:
      return clamp01(x);
    case PiFamily::clamp_power:
      return clamp01(std::pow(std::max(x, 0.0) / spec.b, spec.a));
    case PiFamily::ratio:
      return clamp01(1.0 - 1.0 / (1.0 + spec.mu * std::max(x, 0.0)));
    case PiFamily::ratio_sqrt:
      return clamp01(1.0 - 1.0 / (1.0 + spec.mu * std::sqrt(std::max(x, 0.0))));
    case PiFamily::star_squared_hinge:
      return clamp01(0.5 * spec.beta *
                     (1.0 - 1.0 / (1.0 + spec.mu * std::sqrt(std::max(x, 0.0)))));
    case PiFamily::star_gsh: {
      const double u = x;
      if (u >= 1.0) return 0.0;
      if (u <= 0.0)
        return clamp01(spec.beta * (spec.a / (spec.a + 1.0) - u) / (spec.rho - u));
      // l(u) and 1 - u^a both vanish at u = 1; expm1/log1p forms keep the
      // ratio accurate through the cancellation
      const double log_u = std::log(u);
      const double one_minus_ua = -std::expm1(spec.a * log_u);
      const double ell =
          (1.0 - u) + std::expm1((spec.a + 1.0) * log_u) / (spec.a + 1.0);
      const double denom = one_minus_ua * (spec.rho - u);
      if (denom <= 0.0 || ell <= 0.0) return 0.0;
      return clamp01(spec.beta * ell / denom);
    }
    case PiFamily::abs_error_proportional:
      return clamp01(spec.omega * x);
    case PiFamily::zero_one_proportional:
      return clamp01(spec.omega * x);
    case PiFamily::uncertainty_binary: {
      const double inner =
          spec.rho * spec.R * spec.R / (binary_entropy(spec.a) + (1.0 - spec.a) * std::abs(x));
      return clamp01(spec.beta / (2.0 * (1.0 - spec.c)) * std::min(inner, 1.0));
    }
    case PiFamily::uncertainty_multiclass: {
      const double shifted = std::max(x - std::log(static_cast<double>(spec.k - 1)), 0.0);
      const double hstar = 1.0 / (binary_entropy(spec.a) + (1.0 - spec.a) * shifted);
      const double inner = 2.0 * spec.rho * spec.R * spec.R * hstar;
      return clamp01(spec.beta / (2.0 * (1.0 - spec.c)) * std::min(inner, 1.0));
    }
    case PiFamily::power_of_zeta:
      return clamp01(std::pow(std::max(x, 0.0), spec.eta));
    case PiFamily::constant:
      return clamp01(spec.p);
  }
  return 0.0;
}

double pi_primitive(const PiSpec& spec, double x) {
  if (!spec.has_primitive())
    throw std::invalid_argument("pi_primitive: family has no scalar primitive");
  if (x < 0.0) throw std::invalid_argument("pi_primitive: x must be nonnegative");
  switch (spec.family) {
    case PiFamily::exp_saturating:
      // x + e^{-x} - 1; both terms are O(x^2) near zero
      return x + std::expm1(-x);
    case PiFamily::clamp_linear:
      return x <= 1.0 ? 0.5 * x * x : x - 0.5;
    case PiFamily::clamp_power: {
      const double a = spec.a, b = spec.b;
      if (x <= b) return std::pow(x, 1.0 + a) / (std::pow(b, a) * (1.0 + a));
      return x - b * a / (1.0 + a);
    }
    case PiFamily::ratio:
      return x - std::log1p(spec.mu * x) / spec.mu;
    case PiFamily::ratio_sqrt: {
      const double r = std::sqrt(x);
      return x - 2.0 / spec.mu * r +
             2.0 / (spec.mu * spec.mu) * std::log1p(spec.mu * r);
    }
    case PiFamily::constant:
      return spec.p * x;
    default:
      return 0.0;
  }
}

double pi_inverse(const PiSpec& spec, double y) {
  if (!spec.has_primitive())
    throw std::invalid_argument("pi_inverse: family has no scalar primitive");
  if (y <= 0.0) return 0.0;
  switch (spec.family) {
    case PiFamily::clamp_linear:
      return y <= 0.5 ? std::sqrt(2.0 * y) : y + 0.5;
    case PiFamily::clamp_power: {
      const double a = spec.a, b = spec.b;
      if (y <= b / (1.0 + a))
        return std::pow(std::pow(b, a) * (1.0 + a) * y, 1.0 / (1.0 + a));
      return y + a * b / (1.0 + a);
    }
    case PiFamily::constant:
      if (spec.p <= 0.0) throw std::invalid_argument("pi_inverse: constant pi = 0");
      return y / spec.p;
    default:
      break;
  }
  // Monotone bisection on [0, hi] with hi doubled until it brackets y.
  double hi = 1.0;
  int guard = 0;
  while (pi_primitive(spec, hi) < y) {
    hi *= 2.0;
    if (++guard > 200) throw std::runtime_error("pi_inverse: failed to bracket");
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pi_primitive(spec, mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double zeta_polyak(const LossKind& kind, const Example& ex, const ModelParams& params,
                   double beta, double rho) {
  if (beta <= 0.0 || rho <= 0.0)
    throw std::invalid_argument("zeta_polyak: beta and rho must be positive");
  const std::optional<double> p = psi(kind, ex, params);
  if (!p) return 0.0;
  return beta * std::min(1.0 / *p, rho);
}

StepDraw draw_step(const StepPolicy& policy, double pi, double zeta,
                   std::mt19937_64& rng) {
  if (pi < 0.0 || pi > 1.0) throw std::invalid_argument("draw_step: pi outside [0,1]");
  StepDraw out;
  out.pi_used = pi;
  if (policy.kind == StepPolicy::Kind::constant_weight) {
    out.expected_step = policy.gamma * pi;
    if (pi <= 0.0) return out;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (unif(rng) < pi) {
      out.sampled = true;
      out.step_size = policy.gamma;
    }
    return out;
  }
  out.expected_step = zeta;
  if (zeta == 0.0) return out;  // nothing to reweight; skip the draw entirely
  if (pi <= 0.0)
    throw std::invalid_argument("draw_step: pi = 0 with zeta > 0 leaves the update undefined");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (unif(rng) < pi) {
    out.sampled = true;
    out.step_size = zeta / pi;
  }
  return out;
}

double oracle_sampling_input(const PiSpec& spec, const LossKind& sampling_loss,
                             const Example& ex, const ModelParams& params) {
  switch (spec.input()) {
    case PiInput::scalar_loss:
      return loss_value(sampling_loss, ex, params);
    case PiInput::margin:
      return margin(params, ex);
    case PiInput::abs_margin:
      if (!params.task.is_binary())
        throw std::invalid_argument("uncertainty_binary: binary tasks only");
      return std::abs(score(params, ex.features));
    case PiInput::gap: {
      if (params.task.is_binary())
        throw std::invalid_argument("uncertainty_multiclass: multiclass tasks only");
      const int k = params.task.num_classes;
      Vec scores(k);
      for (int y = 0; y < k; ++y) scores[y] = dot(params.class_block(y), ex.features);
      std::sort(scores.begin(), scores.end(), std::greater<>());
      return spec.top2_gap ? scores[0] - scores[1] : scores[0] - scores[k - 1];
    }
    case PiInput::zeta:
      return zeta_polyak(sampling_loss, ex, params, spec.beta, spec.rho);
    case PiInput::none:
      return 0.0;
  }
  return 0.0;
}

ConditionReport check_aws_condition(const PiSpec& spec, const LossKind& train_loss,
                                    const LossKind& sampling_loss, double beta,
                                    double rho, double c,
                                    const std::vector<std::pair<Example, ModelParams>>& samples) {
  if (c <= 0.0 || c >= 1.0)
    throw std::invalid_argument("check_aws_condition: c must be in (0,1)");
  ConditionReport rep;
  std::size_t idx = 0;
  for (const auto& [ex, params] : samples) {
    const std::optional<double> p = psi(train_loss, ex, params);
    if (p) {
      const LossKind& input_loss =
          spec.input() == PiInput::zeta ? train_loss : sampling_loss;
      const double lhs = pi_eval(spec, oracle_sampling_input(spec, input_loss, ex, params));
      const double rhs = beta / (2.0 * (1.0 - c)) * std::min(rho * *p, 1.0);
      const double slack = lhs - rhs;
      ++rep.checked;
      if (slack < -1e-12) {
        ++rep.violations;
        rep.all_hold = false;
      }
      if (slack < rep.worst_slack) {
        rep.worst_slack = slack;
        rep.worst_at = static_cast<double>(idx);
      }
    }
    ++idx;
  }
  return rep;
}

namespace {

// Scalar sampling input for the margin-grid condition checker.
double grid_pi_input(const PiSpec& spec, const LossKind& train_loss, double u) {
  switch (spec.family) {
    case PiFamily::star_gsh:
      return u;
    case PiFamily::uncertainty_binary:
      return std::abs(u);
    case PiFamily::zero_one_proportional:
      return u <= 0.0 ? 1.0 : 0.0;
    case PiFamily::abs_error_proportional:
      // discrete absolute error |y - sgn(x'theta)| of the margin
      return u < 0.0 ? 2.0 : (u == 0.0 ? 1.0 : 0.0);
    default:
      return margin_loss(train_loss, u);
  }
}

}  // namespace

AlphaBetaReport check_alpha_beta_conditions(const PiSpec& pi, const LossKind& train_loss,
                                            const LossKind& eval_loss, double alpha,
                                            double beta, double rho_star, double R,
                                            const std::vector<double>& margin_grid,
                                            bool multiclass_factor2) {
  if (margin_grid.empty())
    throw std::invalid_argument("check_alpha_beta_conditions: empty grid");
  AlphaBetaReport rep;
  const double grad_factor = multiclass_factor2 ? 2.0 : 1.0;
  const double tol = 1e-9;
  for (double u : margin_grid) {
    const double pu = pi_eval(pi, grid_pi_input(pi, train_loss, u));
    const double lt = margin_loss(eval_loss, u);
    if (pu == 0.0 && lt == 0.0) continue;  // vacuous: both sides of each inequality vanish
    const double dl = margin_loss_derivative(train_loss, u);
    const double lhs_a = pu * dl * dl * R * R * grad_factor;
    const double rhs_a = alpha * lt;
    const double slack_a = rhs_a - lhs_a;
    if (slack_a < -tol * std::max(1.0, std::abs(rhs_a))) rep.alpha_holds = false;
    if (slack_a < rep.worst_alpha_slack) {
      rep.worst_alpha_slack = slack_a;
      rep.worst_alpha_margin = u;
    }
    const double lhs_b = pu * (-dl) * (rho_star - u);
    const double rhs_b = beta * lt;
    const double slack_b = lhs_b - rhs_b;
    if (slack_b < -tol * std::max(1.0, std::abs(rhs_b))) rep.beta_holds = false;
    if (slack_b < rep.worst_beta_slack) {
      rep.worst_beta_slack = slack_b;
      rep.worst_beta_margin = u;
    }
  }
  return rep;
}

}  // namespace awsgd
