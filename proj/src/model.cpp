#include "awsgd/model.hpp"

#include <algorithm>

namespace awsgd {

double score(const ModelParams& params, std::span<const double> x) {
  if (!params.task.is_binary())
    throw std::invalid_argument("score: binary tasks only");
  return dot(params.theta, x);
}

double margin(const ModelParams& params, const Example& ex) {
  if (params.task.is_binary()) {
    if (ex.features.size() != params.theta.size())
      throw std::invalid_argument("margin: dimension mismatch");
    if (ex.label != 1 && ex.label != -1)
      throw std::invalid_argument("margin: binary label must be -1 or +1");
    return ex.label * dot(params.theta, ex.features);
  }
  const int k = params.task.num_classes;
  const int d = params.dim();
  if (static_cast<int>(ex.features.size()) != d)
    throw std::invalid_argument("margin: dimension mismatch");
  if (ex.label < 0 || ex.label >= k)
    throw std::invalid_argument("margin: class index out of range");
  const double own = dot(params.class_block(ex.label), ex.features);
  double best_other = -std::numeric_limits<double>::infinity();
  for (int y = 0; y < k; ++y) {
    if (y == ex.label) continue;
    best_other = std::max(best_other, dot(params.class_block(y), ex.features));
  }
  return own - best_other;
}

double predict_prob(const ModelParams& params, std::span<const double> x) {
  return sigmoid(score(params, x));
}

ModelParams project(ModelParams params, const ProjectionBall& ball) {
  if (ball.is_unbounded()) return params;
  if (ball.radius < 0.0) throw std::invalid_argument("project: negative radius");
  if (!ball.center.empty() && ball.center.size() != params.theta.size())
    throw std::invalid_argument("project: center dimension mismatch");
  const auto dist = [&] {
    double dist_sq = 0.0;
    for (std::size_t i = 0; i < params.theta.size(); ++i) {
      const double c = ball.center.empty() ? 0.0 : ball.center[i];
      const double diff = params.theta[i] - c;
      dist_sq += diff * diff;
    }
    return std::sqrt(dist_sq);
  };
  // Iterate the rescaling to a fixed point so projection is exactly
  // idempotent despite rounding at the boundary.
  for (int pass = 0; pass < 8; ++pass) {
    const double d = dist();
    if (d <= ball.radius) return params;
    const double shrink = ball.radius / d;
    for (std::size_t i = 0; i < params.theta.size(); ++i) {
      const double c = ball.center.empty() ? 0.0 : ball.center[i];
      params.theta[i] = c + (params.theta[i] - c) * shrink;
    }
  }
  return params;
}

void running_average(Vec& avg, std::size_t t, std::span<const double> next) {
  if (t < 1) throw std::invalid_argument("running_average: t must be >= 1");
  if (avg.size() != next.size())
    throw std::invalid_argument("running_average: dimension mismatch");
  const double w = 1.0 / static_cast<double>(t + 1);
  for (std::size_t i = 0; i < avg.size(); ++i)
    avg[i] += (next[i] - avg[i]) * w;
}

}  // namespace awsgd
