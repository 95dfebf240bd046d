#pragma once

#include <functional>
#include <optional>
#include <string>

#include "awsgd/data.hpp"
#include "awsgd/estimators.hpp"
#include "awsgd/sampling.hpp"

namespace awsgd {

struct RunConfig {
  LossKind train_loss = LossKind::logistic();
  std::vector<LossKind> eval_losses = {LossKind::logistic(), LossKind::zero_one(),
                                       LossKind::abs_error()};
  StepPolicy policy = StepPolicy::constant_weight(1.0);
  PiSpec pi = PiSpec::constant(1.0);
  double pi_scale = 1.0;  // calibration multiplier on the sampling probability
  LossKind sampling_loss = LossKind::abs_error();
  // Feed the label-scale absolute error |y - sgn(x'theta)| in {0,1,2} as the
  // sampling input instead of an estimated loss.
  bool discrete_abs_input = false;
  EstimatorKind estimator = EstimatorKind::oracle();
  ProjectionBall projection;
  Vec theta_init;  // empty = zeros
  std::size_t n_iterations = 0;  // 0 = one pass over the stream
  bool allow_repeat = false;
  bool shuffle = true;
  std::uint64_t seed = 1;

  void validate(const Dataset& ds) const;
};

struct MetricsRow {
  std::size_t t = 0;
  std::vector<double> progressive_losses;  // one per eval loss, pre-update
  double pi = 0.0;
  bool sampled = false;
  double step_size = 0.0;
  std::size_t cumulative_samples = 0;
  double theta_norm = 0.0;  // after the step's update
};

struct RunResult {
  std::vector<MetricsRow> rows;
  ModelParams final_theta;
  ModelParams averaged_theta;
  std::vector<double> avg_progressive_losses;
  std::size_t total_samples = 0;
  double sampling_rate = 0.0;
  double wall_seconds = 0.0;

  // Mean progressive loss of one eval column over the whole run.
  double avg_loss(std::size_t eval_index) const { return avg_progressive_losses.at(eval_index); }
};

RunResult run_stream(const Dataset& ds, const RunConfig& cfg);

// CSV with one row per iteration, 10 significant digits.
void write_metrics_csv(const RunResult& result, const std::vector<LossKind>& eval_losses,
                       const std::string& path);

// Rebind the calibration knob: the policy beta (and the family beta where one
// exists) for adaptive-weight runs, a plain multiplier on pi otherwise.
void apply_calibration_beta(RunConfig& cfg, double beta);

struct CalibrationResult {
  double beta = 0.0;
  double achieved_rate = 0.0;
  int probes = 0;
};

// Binary search on the beta knob for a target empirical sampling rate; every
// probe is a full run with the config's fixed seed.
CalibrationResult calibrate_beta(const Dataset& ds, const RunConfig& base, double target_rate,
                                 double tol = 0.01, int max_iter = 40);

struct SweepSpace {
  std::optional<std::pair<double, double>> eta;    // power_of_zeta exponent
  std::optional<std::pair<double, double>> rho;    // adaptive-weight rho
  std::optional<std::pair<double, double>> gamma;  // constant-weight step (log-uniform)
  std::optional<std::pair<double, double>> omega;  // proportional-family scale
};

struct SweepEntry {
  RunConfig config;
  double beta = 0.0;
  double achieved_rate = 0.0;
  double cross_entropy = 0.0;
};

struct SweepResult {
  std::vector<SweepEntry> leaderboard;  // ascending cross entropy
  const SweepEntry& best() const { return leaderboard.front(); }
};

// Uniform random search; each trial is beta-calibrated to the target rate and
// ranked by average progressive cross entropy.
SweepResult sweep(const Dataset& ds, const RunConfig& base, const SweepSpace& space,
                  int budget, double target_rate, double tol = 0.01, int jobs = 1);

struct HoldoutSummary {
  std::vector<double> mean_losses;  // one per requested loss
  double accuracy = 0.0;
};

HoldoutSummary evaluate_holdout(const ModelParams& params, const Dataset& test,
                                const std::vector<LossKind>& losses);

// Cross-entropy eval index used for ranking (logistic for binary tasks).
std::size_t cross_entropy_index(const RunConfig& cfg);

}  // namespace awsgd
