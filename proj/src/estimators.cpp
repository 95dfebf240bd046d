#include "awsgd/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace awsgd {

std::pair<double, double> beta_params_for_mean(double mean, double alpha) {
  if (mean <= 0.0 || mean >= 1.0)
    throw std::invalid_argument("beta_params_for_mean: mean must be in (0,1)");
  if (alpha <= 0.0) throw std::invalid_argument("beta_params_for_mean: alpha must be positive");
  const double s = alpha + mean - 1.0;  // shape1 + shape2
  if (s <= 0.0)
    throw std::invalid_argument("beta_params_for_mean: alpha + mean must exceed 1");
  return {mean * s, (1.0 - mean) * s};
}

EstimatorKind EstimatorKind::beta_noise(double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("beta_noise: alpha must be positive");
  EstimatorKind k;
  k.tag = EstimatorTag::beta_noise;
  k.alpha = alpha;
  return k;
}

EstimatorKind EstimatorKind::knn(int k) {
  if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
  EstimatorKind e;
  e.tag = EstimatorTag::knn;
  e.k = k;
  return e;
}

EstimatorKind EstimatorKind::forest(int trees, int warmup_steps, int max_depth,
                                    int min_leaf) {
  if (trees < 1) throw std::invalid_argument("forest: trees must be >= 1");
  if (warmup_steps < 0) throw std::invalid_argument("forest: warmup_steps must be >= 0");
  EstimatorKind e;
  e.tag = EstimatorTag::forest;
  e.trees = trees;
  e.warmup_steps = warmup_steps;
  e.max_depth = max_depth;
  e.min_leaf = min_leaf;
  return e;
}

std::string EstimatorKind::name() const {
  switch (tag) {
    case EstimatorTag::oracle: return "oracle";
    case EstimatorTag::beta_noise: return "beta_noise";
    case EstimatorTag::knn: return "knn";
    case EstimatorTag::forest: return "forest";
  }
  return "?";
}

void RegressionTree::fit(const std::vector<Vec>& xs, const std::vector<double>& ys,
                         const std::vector<std::size_t>& rows, int max_depth,
                         int min_leaf) {
  nodes_.clear();
  std::vector<std::size_t> work(rows);
  build(xs, ys, work, 0, work.size(), 0, max_depth, min_leaf);
}

int RegressionTree::build(const std::vector<Vec>& xs, const std::vector<double>& ys,
                          std::vector<std::size_t>& rows, std::size_t lo, std::size_t hi,
                          int depth, int max_depth, int min_leaf) {
  const std::size_t m = hi - lo;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    sum += ys[rows[i]];
    sum_sq += ys[rows[i]] * ys[rows[i]];
  }
  const double mean = sum / static_cast<double>(m);
  const double sse = sum_sq - sum * mean;

  const int node_id = static_cast<int>(nodes_.size());
  nodes_.push_back({-1, 0.0, mean, -1, -1});
  if (depth >= max_depth || m < 2 * static_cast<std::size_t>(min_leaf) || sse <= 1e-12)
    return node_id;

  const std::size_t d = xs[rows[lo]].size();
  int best_feature = -1;
  double best_threshold = 0.0;
  double best_sse = sse;
  std::vector<std::size_t> order(rows.begin() + lo, rows.begin() + hi);
  for (std::size_t f = 0; f < d; ++f) {
    std::sort(order.begin(), order.end(), [&](std::size_t r1, std::size_t r2) {
      if (xs[r1][f] != xs[r2][f]) return xs[r1][f] < xs[r2][f];
      return r1 < r2;
    });
    double left_sum = 0.0, left_sq = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const double y = ys[order[i]];
      left_sum += y;
      left_sq += y * y;
      if (xs[order[i]][f] == xs[order[i + 1]][f]) continue;
      const std::size_t nl = i + 1, nr = m - nl;
      if (nl < static_cast<std::size_t>(min_leaf) || nr < static_cast<std::size_t>(min_leaf))
        continue;
      const double right_sum = sum - left_sum;
      const double right_sq = sum_sq - left_sq;
      const double split_sse = (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
                               (right_sq - right_sum * right_sum / static_cast<double>(nr));
      if (split_sse < best_sse - 1e-12) {
        best_sse = split_sse;
        best_feature = static_cast<int>(f);
        best_threshold = 0.5 * (xs[order[i]][f] + xs[order[i + 1]][f]);
      }
    }
  }
  if (best_feature < 0) return node_id;

  const auto mid = std::partition(rows.begin() + lo, rows.begin() + hi, [&](std::size_t r) {
    return xs[r][best_feature] <= best_threshold;
  });
  const std::size_t split = static_cast<std::size_t>(mid - rows.begin());
  if (split == lo || split == hi) return node_id;  // degenerate split

  nodes_[node_id].feature = best_feature;
  nodes_[node_id].threshold = best_threshold;
  const int left = build(xs, ys, rows, lo, split, depth + 1, max_depth, min_leaf);
  nodes_[node_id].left = left;
  const int right = build(xs, ys, rows, split, hi, depth + 1, max_depth, min_leaf);
  nodes_[node_id].right = right;
  return node_id;
}

double RegressionTree::predict(std::span<const double> x) const {
  int node = 0;
  while (nodes_[node].feature >= 0) {
    node = x[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left
                                                             : nodes_[node].right;
  }
  return nodes_[node].value;
}

void RegressionForest::fit(const std::vector<Vec>& xs, const std::vector<double>& ys,
                           int trees, int max_depth, int min_leaf, std::mt19937_64& rng) {
  trees_.assign(trees, {});
  const std::size_t n = xs.size();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> rows(n);
  for (auto& tree : trees_) {
    for (std::size_t i = 0; i < n; ++i) rows[i] = pick(rng);
    tree.fit(xs, ys, rows, max_depth, min_leaf);
  }
}

double RegressionForest::predict(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.predict(x);
  return sum / static_cast<double>(trees_.size());
}

EstimatorState::EstimatorState(EstimatorKind kind, std::uint64_t seed)
    : kind_(kind), rng_(seed) {}

Vec EstimatorState::augmented(std::span<const double> features, double model_pred) const {
  Vec out(features.begin(), features.end());
  out.push_back(model_pred);
  return out;
}

double EstimatorState::estimate(std::span<const double> features, double model_pred,
                                std::optional<double> true_loss) {
  switch (kind_.tag) {
    case EstimatorTag::oracle:
      if (!true_loss) throw std::invalid_argument("oracle estimator requires the true loss");
      return *true_loss;
    case EstimatorTag::beta_noise: {
      if (!true_loss)
        throw std::invalid_argument("beta_noise estimator requires the true loss");
      const double m = *true_loss;
      if (m <= 0.0) return 0.0;
      if (m >= 1.0) return 1.0;
      const auto [s1, s2] = beta_params_for_mean(m, kind_.alpha);
      std::gamma_distribution<double> g1(s1, 1.0), g2(s2, 1.0);
      const double x = g1(rng_), y = g2(rng_);
      if (x + y <= 0.0) return m;
      return x / (x + y);
    }
    case EstimatorTag::knn: {
      if (true_loss)
        throw std::invalid_argument("learned estimators must not see the true loss");
      if (xs_.empty()) return kind_.warmup_estimate;
      const Vec q = augmented(features, model_pred);
      const std::size_t k = std::min<std::size_t>(kind_.k, xs_.size());
      std::vector<std::pair<double, std::size_t>> dist(xs_.size());
      for (std::size_t i = 0; i < xs_.size(); ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
          const double diff = xs_[i][j] - q[j];
          d += diff * diff;
        }
        dist[i] = {d, i};
      }
      std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) sum += ys_[dist[i].second];
      return std::clamp(sum / static_cast<double>(k), 0.0, 1.0);
    }
    case EstimatorTag::forest: {
      if (true_loss)
        throw std::invalid_argument("learned estimators must not see the true loss");
      if (steps_seen_ < static_cast<std::size_t>(kind_.warmup_steps) || !forest_.fitted())
        return kind_.warmup_estimate;
      return std::clamp(forest_.predict(augmented(features, model_pred)), 0.0, 1.0);
    }
  }
  return kind_.warmup_estimate;
}

void EstimatorState::observe(std::span<const double> features, double model_pred,
                             double realized_abs_loss) {
  if (realized_abs_loss < 0.0 || realized_abs_loss > 1.0)
    throw std::invalid_argument("observe: realized loss must be in [0,1]");
  xs_.push_back(augmented(features, model_pred));
  ys_.push_back(realized_abs_loss);
  ++steps_seen_;
  if (kind_.tag == EstimatorTag::forest &&
      (steps_seen_ % std::max(1, kind_.refit_every) == 0 ||
       steps_seen_ == static_cast<std::size_t>(kind_.warmup_steps)))
    refit();
}

void EstimatorState::refit() {
  forest_.fit(xs_, ys_, kind_.trees, kind_.max_depth, kind_.min_leaf, rng_);
}

}  // namespace awsgd
