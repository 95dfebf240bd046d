#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "awsgd/vec.hpp"

namespace awsgd {

// Beta(shape1, shape2) parameters giving the requested mean with variance
// mean(1-mean)/(alpha+mean). Requires alpha + mean > 1.
std::pair<double, double> beta_params_for_mean(double mean, double alpha);

enum class EstimatorTag { oracle, beta_noise, knn, forest };

struct EstimatorKind {
  EstimatorTag tag = EstimatorTag::oracle;
  double alpha = 100.0;      // beta_noise
  int k = 3;                 // knn
  int trees = 25;            // forest
  int warmup_steps = 1;      // forest: observations before predictions start
  int max_depth = 8;         // forest
  int min_leaf = 2;          // forest
  int refit_every = 1;       // forest/knn refit cadence (1 = every observation)
  double warmup_estimate = 0.5;

  static EstimatorKind oracle() { return {}; }
  static EstimatorKind beta_noise(double alpha);
  static EstimatorKind knn(int k);
  static EstimatorKind forest(int trees, int warmup_steps, int max_depth = 8,
                              int min_leaf = 2);
  bool is_learned() const { return tag == EstimatorTag::knn || tag == EstimatorTag::forest; }
  std::string name() const;
};

// One CART-style regression tree, variance-reduction splits, stored flat.
class RegressionTree {
 public:
  void fit(const std::vector<Vec>& xs, const std::vector<double>& ys,
           const std::vector<std::size_t>& rows, int max_depth, int min_leaf);
  double predict(std::span<const double> x) const;

 private:
  struct Node {
    int feature = -1;  // -1 = leaf
    double threshold = 0.0;
    double value = 0.0;
    int left = -1;
    int right = -1;
  };
  int build(const std::vector<Vec>& xs, const std::vector<double>& ys,
            std::vector<std::size_t>& rows, std::size_t lo, std::size_t hi, int depth,
            int max_depth, int min_leaf);
  std::vector<Node> nodes_;
};

// Bagged regression trees with bootstrap resampling.
class RegressionForest {
 public:
  void fit(const std::vector<Vec>& xs, const std::vector<double>& ys, int trees,
           int max_depth, int min_leaf, std::mt19937_64& rng);
  double predict(std::span<const double> x) const;
  bool fitted() const { return !trees_.empty(); }

 private:
  std::vector<RegressionTree> trees_;
};

// Loss-estimator oracle: exact, synthetic Beta noise, or a learned regressor
// over (features, model prediction) -> observed absolute-error loss.
class EstimatorState {
 public:
  EstimatorState() = default;
  EstimatorState(EstimatorKind kind, std::uint64_t seed);

  // Estimated loss in [0,1]. Oracle/beta_noise require the true loss; learned
  // kinds require it absent (labels are unknown at acquisition time).
  double estimate(std::span<const double> features, double model_pred,
                  std::optional<double> true_loss);

  // Record an acquired label's realized absolute-error loss and refit.
  void observe(std::span<const double> features, double model_pred,
               double realized_abs_loss);

  std::size_t steps_seen() const { return steps_seen_; }
  const EstimatorKind& kind() const { return kind_; }

 private:
  Vec augmented(std::span<const double> features, double model_pred) const;
  void refit();

  EstimatorKind kind_;
  std::mt19937_64 rng_{0};
  std::vector<Vec> xs_;
  std::vector<double> ys_;
  std::size_t steps_seen_ = 0;
  RegressionForest forest_;
};

}  // namespace awsgd
