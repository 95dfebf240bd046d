#pragma once

#include <limits>
#include <optional>
#include <string>

#include "awsgd/vec.hpp"

namespace awsgd {

enum class Task { binary, multiclass };

struct TaskSpec {
  Task kind = Task::binary;
  int num_classes = 2;  // meaningful for multiclass only

  static TaskSpec binary_task() { return {Task::binary, 2}; }
  static TaskSpec multiclass_task(int k) { return {Task::multiclass, k}; }
  bool is_binary() const { return kind == Task::binary; }
};

// One data point. Binary labels are -1/+1; multiclass labels are class
// indices in [0, k).
struct Example {
  Vec features;
  int label = 1;
  std::string id;
};

// Flat parameter vector; multiclass stores k blocks of length d.
struct ModelParams {
  Vec theta;
  TaskSpec task;

  int dim() const {
    if (task.is_binary()) return static_cast<int>(theta.size());
    return static_cast<int>(theta.size()) / task.num_classes;
  }
  std::span<const double> class_block(int y) const {
    const int d = dim();
    return {theta.data() + static_cast<std::size_t>(y) * d, static_cast<std::size_t>(d)};
  }

  static ModelParams zeros(int d, TaskSpec task = TaskSpec::binary_task()) {
    const std::size_t n =
        task.is_binary() ? d : static_cast<std::size_t>(d) * task.num_classes;
    return {Vec(n, 0.0), task};
  }
};

struct ProjectionBall {
  Vec center;  // empty = origin
  double radius = std::numeric_limits<double>::infinity();

  bool is_unbounded() const { return !std::isfinite(radius); }
};

// Binary: y * x'theta. Multiclass: x'theta_y - max_{y' != y} x'theta_{y'}.
double margin(const ModelParams& params, const Example& ex);

// Raw score x'theta for binary models.
double score(const ModelParams& params, std::span<const double> x);

// sigma(x'theta); binary tasks only.
double predict_prob(const ModelParams& params, std::span<const double> x);

// Euclidean projection onto the ball; identity when inside or unbounded.
ModelParams project(ModelParams params, const ProjectionBall& ball);

// In-place iterate averaging: avg holds the mean of the first t iterates,
// returns the mean after folding in one more.
void running_average(Vec& avg, std::size_t t, std::span<const double> next);

}  // namespace awsgd
