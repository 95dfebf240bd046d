#pragma once

#include <optional>
#include <string>

#include "awsgd/engine.hpp"

namespace awsgd {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RbfSpec {
  std::size_t landmarks = 300;
  double gamma = 0.0;  // <= 0 selects the median heuristic
  std::uint64_t seed = 0;
};

struct DatasetSpec {
  enum class Kind { libsvm, csv, margin, tictactoe };
  Kind kind = Kind::margin;
  std::string path;
  LabelMap label_map = LabelMap::auto_detect;
  MarginSpec margin;
  double theta_scale = 1.0;  // rescales the generator separator (margin data)
  std::optional<RbfSpec> rbf;
};

struct RunSpec {
  DatasetSpec dataset;
  RunConfig config;
};

// Materialized dataset plus the rescaled reference separator when the
// generator provides one.
struct MaterializedDataset {
  Dataset data;
  std::optional<Vec> theta_star;
};

MaterializedDataset materialize(const DatasetSpec& spec);

// Strict parser: unknown keys raise ConfigError naming the offending key.
RunSpec parse_run_spec_json(const std::string& json_text);
RunSpec load_run_spec(const std::string& path);

// Apply one "key=value" override with dotted paths into the raw JSON.
std::string apply_override(const std::string& json_text, const std::string& assignment);

std::string run_spec_to_json(const RunSpec& spec);

// Summary payload written next to metrics.csv.
std::string summary_json(const RunResult& result, const std::vector<LossKind>& eval_losses);

}  // namespace awsgd
