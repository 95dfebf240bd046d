#pragma once

#include <optional>
#include <string>

#include "awsgd/model.hpp"

namespace awsgd {

enum class LossTag {
  squared_hinge,
  hinge,
  gen_smooth_hinge,
  logistic,
  zero_one,
  abs_error,
  multi_cross_entropy,
};

struct LossKind {
  LossTag tag = LossTag::logistic;
  double a = 1.0;  // gen_smooth_hinge shape, a >= 1
  int k = 2;       // multi_cross_entropy class count

  static LossKind squared_hinge() { return {LossTag::squared_hinge}; }
  static LossKind hinge() { return {LossTag::hinge}; }
  static LossKind gen_smooth_hinge(double a);
  static LossKind logistic() { return {LossTag::logistic}; }
  static LossKind zero_one() { return {LossTag::zero_one}; }
  static LossKind abs_error() { return {LossTag::abs_error}; }
  static LossKind multi_cross_entropy(int k);

  bool is_margin_loss() const { return tag != LossTag::multi_cross_entropy; }
  // Kinds usable as a training loss with a gradient step. zero_one and
  // abs_error are sampling/evaluation losses only.
  bool is_trainable() const {
    return tag != LossTag::zero_one && tag != LossTag::abs_error;
  }
  bool is_smooth() const {
    return tag == LossTag::squared_hinge || tag == LossTag::logistic ||
           tag == LossTag::gen_smooth_hinge || tag == LossTag::multi_cross_entropy;
  }
  bool is_convex() const { return tag != LossTag::zero_one && tag != LossTag::abs_error; }
  std::string name() const;
};

struct LossEval {
  double value = 0.0;
  Vec gradient;
  double inf_value = 0.0;  // inf over theta' of the per-example loss
};

// Scalar margin loss l(u) for margin-based kinds.
double margin_loss(const LossKind& kind, double u);
// dl/du; zero_one and abs_error use the zero-gradient convention.
double margin_loss_derivative(const LossKind& kind, double u);

double loss_value(const LossKind& kind, const Example& ex, const ModelParams& params);
Vec loss_gradient(const LossKind& kind, const Example& ex, const ModelParams& params);
LossEval evaluate_loss(const LossKind& kind, const Example& ex, const ModelParams& params);

// Polyak ratio ||grad||^2 / (loss - inf loss); nullopt when the gradient
// vanishes.
std::optional<double> psi(const LossKind& kind, const Example& ex,
                          const ModelParams& params);

// h(u) = 1 / ((1+e^u)^2 log(1+e^{-u})), the gradient-to-loss ratio of the
// logistic loss per unit feature norm. Switches to the tail expansion for
// u > 30 where log1p(exp(-u)) runs out of precision.
double h_logistic(double u);

// Binary entropy H(a) = a log(1/a) + (1-a) log(1/(1-a)).
double binary_entropy(double a);

struct HBounds {
  double sigmoid_bound;  // 1 - sigma(u)
  double entropy_bound;  // 1 / (H(a) + (1-a)|u|)
};
HBounds h_upper_bounds(double u, double a);

// Per-example smoothness upper bound L for feature norms up to R.
double smoothness_constant(const LossKind& kind, double R);

}  // namespace awsgd
