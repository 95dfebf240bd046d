#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "awsgd/model.hpp"

namespace awsgd {

struct Dataset {
  std::vector<Example> examples;
  int d = 0;
  TaskSpec task;
  std::string name;

  std::size_t size() const { return examples.size(); }
  // Largest feature norm; 0 for an empty dataset.
  double max_feature_norm() const;
};

enum class LabelMap { auto_detect, zero_one, one_two, none };

Dataset load_libsvm(const std::string& path, LabelMap map = LabelMap::auto_detect);
void save_libsvm(const Dataset& ds, const std::string& path);

// CSV with a header row; the label column is named "label", all other
// columns are numeric features.
Dataset load_csv(const std::string& path, LabelMap map = LabelMap::auto_detect);

struct MarginSpec {
  std::size_t n = 0;
  int d = 2;
  double rho_star = 0.5;  // margin wrt the unit-norm separator
  double R = 1.0;         // feature-norm cap
  std::uint64_t seed = 0;
};

// Rejection-samples x uniformly in the R-ball until |x'theta*| >= rho_star,
// with a fixed unit-norm theta*; labels are sgn(x'theta*).
std::pair<Dataset, Vec> gen_margin_dataset(const MarginSpec& spec);

// phi_j(x) = exp(-gamma ||x - c_j||^2) for m landmarks sampled without
// replacement; gamma <= 0 selects the median-of-squared-distances heuristic.
Dataset rbf_featurize(const Dataset& ds, std::size_t landmarks, double gamma,
                      std::uint64_t seed);

std::pair<Dataset, Dataset> shuffle_split(const Dataset& ds, double test_fraction,
                                          std::uint64_t seed);

// All distinct terminal tic-tac-toe boards (x moves first), one-hot encoded
// per cell as {x, o, blank}; label +1 when x has a three-in-a-row.
Dataset gen_tictactoe();

}  // namespace awsgd
