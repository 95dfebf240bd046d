#include "awsgd/losses.hpp"

#include <algorithm>
#include <cmath>

namespace awsgd {

LossKind LossKind::gen_smooth_hinge(double a) {
  if (a < 1.0) throw std::invalid_argument("gen_smooth_hinge: a must be >= 1");
  LossKind k;
  k.tag = LossTag::gen_smooth_hinge;
  k.a = a;
  return k;
}

LossKind LossKind::multi_cross_entropy(int k) {
  if (k < 2) throw std::invalid_argument("multi_cross_entropy: k must be >= 2");
  LossKind kind;
  kind.tag = LossTag::multi_cross_entropy;
  kind.k = k;
  return kind;
}

std::string LossKind::name() const {
  switch (tag) {
    case LossTag::squared_hinge: return "squared_hinge";
    case LossTag::hinge: return "hinge";
    case LossTag::gen_smooth_hinge: return "gen_smooth_hinge";
    case LossTag::logistic: return "logistic";
    case LossTag::zero_one: return "zero_one";
    case LossTag::abs_error: return "abs_error";
    case LossTag::multi_cross_entropy: return "multi_cross_entropy";
  }
  return "?";
}

double margin_loss(const LossKind& kind, double u) {
  switch (kind.tag) {
    case LossTag::squared_hinge: {
      const double g = std::max(1.0 - u, 0.0);
      return 0.5 * g * g;
    }
    case LossTag::hinge:
      return std::max(1.0 - u, 0.0);
    case LossTag::gen_smooth_hinge: {
      const double a = kind.a;
      if (u >= 1.0) return 0.0;
      if (u <= 0.0) return a / (a + 1.0) - u;
      return a / (a + 1.0) - u + std::pow(u, a + 1.0) / (a + 1.0);
    }
    case LossTag::logistic:
      return log1p_exp_neg(u);
    case LossTag::zero_one:
      return u <= 0.0 ? 1.0 : 0.0;
    case LossTag::abs_error:
      return sigmoid(-u);
    case LossTag::multi_cross_entropy:
      throw std::invalid_argument("margin_loss: not a margin loss");
  }
  return 0.0;
}

double margin_loss_derivative(const LossKind& kind, double u) {
  switch (kind.tag) {
    case LossTag::squared_hinge:
      return u >= 1.0 ? 0.0 : -(1.0 - u);
    case LossTag::hinge:
      return u >= 1.0 ? 0.0 : -1.0;
    case LossTag::gen_smooth_hinge:
      if (u >= 1.0) return 0.0;
      if (u <= 0.0) return -1.0;
      return -(1.0 - std::pow(u, kind.a));
    case LossTag::logistic:
      return -sigmoid(-u);
    case LossTag::zero_one:
    case LossTag::abs_error:
      return 0.0;  // sampling/evaluation losses: zero-gradient convention
    case LossTag::multi_cross_entropy:
      throw std::invalid_argument("margin_loss_derivative: not a margin loss");
  }
  return 0.0;
}

namespace {

// Softmax scores and log-normalizer for multiclass cross entropy.
struct Softmax {
  Vec scores;   // s_y = x'theta_y
  Vec probs;    // softmax(s)
  double logz;  // log sum exp(s)
};

Softmax softmax_of(const Example& ex, const ModelParams& params) {
  const int k = params.task.num_classes;
  Softmax sm;
  sm.scores.resize(k);
  for (int y = 0; y < k; ++y) sm.scores[y] = dot(params.class_block(y), ex.features);
  const double m = *std::max_element(sm.scores.begin(), sm.scores.end());
  double z = 0.0;
  for (int y = 0; y < k; ++y) z += std::exp(sm.scores[y] - m);
  sm.logz = m + std::log(z);
  sm.probs.resize(k);
  for (int y = 0; y < k; ++y) sm.probs[y] = std::exp(sm.scores[y] - sm.logz);
  return sm;
}

// Gradient of the margin u(x,y,theta) for multiclass margin losses; ties in
// the argmax are averaged.
Vec multiclass_margin_gradient(const Example& ex, const ModelParams& params) {
  const int k = params.task.num_classes;
  const int d = params.dim();
  Vec scores(k);
  for (int y = 0; y < k; ++y) scores[y] = dot(params.class_block(y), ex.features);
  double best = -std::numeric_limits<double>::infinity();
  for (int y = 0; y < k; ++y) {
    if (y == ex.label) continue;
    best = std::max(best, scores[y]);
  }
  std::vector<int> tied;
  for (int y = 0; y < k; ++y)
    if (y != ex.label && scores[y] == best) tied.push_back(y);
  Vec grad(static_cast<std::size_t>(k) * d, 0.0);
  for (int i = 0; i < d; ++i)
    grad[static_cast<std::size_t>(ex.label) * d + i] = ex.features[i];
  const double w = 1.0 / static_cast<double>(tied.size());
  for (int y : tied)
    for (int i = 0; i < d; ++i)
      grad[static_cast<std::size_t>(y) * d + i] -= w * ex.features[i];
  return grad;
}

}  // namespace

double loss_value(const LossKind& kind, const Example& ex, const ModelParams& params) {
  if (kind.tag == LossTag::multi_cross_entropy) {
    const Softmax sm = softmax_of(ex, params);
    return sm.logz - sm.scores[ex.label];
  }
  return margin_loss(kind, margin(params, ex));
}

Vec loss_gradient(const LossKind& kind, const Example& ex, const ModelParams& params) {
  if (kind.tag == LossTag::multi_cross_entropy) {
    const int k = params.task.num_classes;
    const int d = params.dim();
    const Softmax sm = softmax_of(ex, params);
    Vec grad(static_cast<std::size_t>(k) * d, 0.0);
    for (int y = 0; y < k; ++y) {
      const double c = sm.probs[y] - (y == ex.label ? 1.0 : 0.0);
      for (int i = 0; i < d; ++i) grad[static_cast<std::size_t>(y) * d + i] = c * ex.features[i];
    }
    return grad;
  }
  const double du = margin_loss_derivative(kind, margin(params, ex));
  if (params.task.is_binary()) {
    Vec grad(ex.features.begin(), ex.features.end());
    scale(grad, du * ex.label);
    return grad;
  }
  Vec grad = multiclass_margin_gradient(ex, params);
  scale(grad, du);
  return grad;
}

LossEval evaluate_loss(const LossKind& kind, const Example& ex, const ModelParams& params) {
  LossEval out;
  out.value = loss_value(kind, ex, params);
  out.gradient = loss_gradient(kind, ex, params);
  out.inf_value = 0.0;  // all supported kinds attain or approach zero
  return out;
}

std::optional<double> psi(const LossKind& kind, const Example& ex,
                          const ModelParams& params) {
  if (!kind.is_trainable())
    throw std::invalid_argument("psi: requires a differentiable loss kind");
  const LossEval eval = evaluate_loss(kind, ex, params);
  const double grad_sq = norm2_sq(eval.gradient);
  if (grad_sq <= 0.0) return std::nullopt;
  return grad_sq / (eval.value - eval.inf_value);
}

double h_logistic(double u) {
  if (u > 30.0) {
    // h(u) = t (1 - 3t/2 + O(t^2)) with t = e^{-u}
    const double t = std::exp(-u);
    return t * (1.0 - 1.5 * t);
  }
  const double one_plus_eu = 1.0 + std::exp(u);
  return 1.0 / (one_plus_eu * one_plus_eu * log1p_exp_neg(u));
}

double binary_entropy(double a) {
  if (a <= 0.0 || a >= 1.0) throw std::invalid_argument("binary_entropy: a in (0,1)");
  return a * std::log(1.0 / a) + (1.0 - a) * std::log(1.0 / (1.0 - a));
}

HBounds h_upper_bounds(double u, double a) {
  if (a <= 0.0 || a > 0.5)
    throw std::invalid_argument("h_upper_bounds: a must be in (0, 1/2]");
  HBounds b;
  b.sigmoid_bound = sigmoid(-u);
  b.entropy_bound = 1.0 / (binary_entropy(a) + (1.0 - a) * std::abs(u));
  return b;
}

double smoothness_constant(const LossKind& kind, double R) {
  if (R <= 0.0) throw std::invalid_argument("smoothness_constant: R must be positive");
  switch (kind.tag) {
    case LossTag::squared_hinge: return R * R;
    case LossTag::logistic: return R * R / 4.0;
    case LossTag::gen_smooth_hinge: return kind.a * R * R;
    case LossTag::multi_cross_entropy: return R * R / 2.0;
    default:
      throw std::invalid_argument("smoothness_constant: kind is not smooth");
  }
}

}  // namespace awsgd
